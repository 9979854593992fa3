#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ska/dataset.hpp"
#include "ska/dynamics.hpp"
#include "ska/invariance.hpp"
#include "ska/matrix.hpp"

namespace ska::cli {

// Parse or validation failure. `key` is the dotted key path ("" for a
// syntax error) and `line` the 1-based source line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string origin, std::string key, std::size_t line, const std::string& what);
  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

enum class DataSource { synthetic, mnist, inline_values };

struct DataConfig {
  DataSource source = DataSource::synthetic;
  std::filesystem::path images, labels;
  std::size_t limit = 0;
  std::size_t batch = 0;  // 0 = whole dataset
  data::BatchMode mode = data::BatchMode::full;
  data::BlobSpec blobs;
  std::optional<Matrix> inputs;
};

struct VariationalConfig {
  std::vector<UnitSelection> selections{{0, 0, 0}};
  bool dt_halving = true;
};

struct ExperimentConfig {
  NetworkConfig network;
  std::vector<Matrix> initial_weights;  // empty = random init
  DataConfig data;
  invariance::InvarianceSpec invariance;
  VariationalConfig variational;
};

// Relative data paths are resolved against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const std::filesystem::path& base_dir = {});
// Reads a config file. A run manifest is accepted too: its "config" block
// is used.
ExperimentConfig load_config(const std::filesystem::path& path);

// Fully resolved config in the input schema; parse_config(dump) round-trips.
nlohmann::json to_json(const ExperimentConfig& cfg);

data::Dataset build_dataset(const DataConfig& cfg);

}  // namespace ska::cli
