#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>

namespace ska::cli {

enum ExitCode : int { kOk = 0, kComparisonFailed = 1, kUsageError = 2 };

// Bad invocation, unreadable input or unwritable output.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  bool svg = true;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const CommandOptions& opts, std::ostream& log);
int cmd_invariance(const CommandOptions& opts, std::ostream& log);
int cmd_variational(const CommandOptions& opts, std::ostream& log);
int cmd_report(const std::filesystem::path& dir, std::ostream& out);

// Full command-line entry point; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ska::cli
