#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ska/matrix.hpp"

namespace ska::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr int kMnistClasses = 10;

class IdxError : public std::runtime_error {
 public:
  enum class Kind {
    io,                  // file missing or unreadable
    truncated_header,    // fewer bytes than the header needs
    bad_magic,           // magic number does not match the expected IDX type
    zero_dimension,      // a declared dimension is 0
    dimension_overflow,  // declared dimensions exceed the addressable size
    truncated_payload,   // fewer payload bytes than the dimensions promise
    trailing_bytes,      // more payload bytes than the dimensions promise
    label_out_of_range,  // label ≥ declared class count
  };

  IdxError(Kind kind, const std::string& message);
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(IdxError::Kind kind) noexcept;

// Raw decoded IDX image tensor (n images of rows×cols unsigned bytes).
struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;
};

// Parsers over an in-memory file image. Used by the loaders and directly
// by the corrupt-header fuzz tests.
IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<int> parse_idx_labels(std::span<const std::uint8_t> bytes, int classes = kMnistClasses);

// Reads a whole file, transparently gunzipping when the name ends in ".gz".
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

// n × (rows·cols) matrix, pixel bytes scaled by 1/255.
Matrix load_idx_images(const std::filesystem::path& path);
std::vector<int> load_idx_labels(const std::filesystem::path& path, int classes = kMnistClasses);

std::vector<std::uint8_t> encode_idx_images(const IdxImages& images);
std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels);
// Writes raw bytes; gzip-compressed when the name ends in ".gz".
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

enum class Source { mnist_file, synthetic, inline_values };
const char* to_string(Source source) noexcept;

struct Dataset {
  Matrix inputs;                          // n × d, entries in [0, 1]
  std::optional<std::vector<int>> labels;  // length n when present
  int classes = 0;
  Source source = Source::synthetic;

  std::size_t size() const noexcept { return inputs.rows(); }
  std::size_t dim() const noexcept { return inputs.cols(); }
};

// Throws std::invalid_argument when the Dataset invariants do not hold.
void validate(const Dataset& ds);

// Loads images (and labels when given), keeping the first `limit` records
// when limit > 0.
Dataset load_mnist(const std::filesystem::path& images,
                   const std::optional<std::filesystem::path>& labels, std::size_t limit = 0);

struct BlobSpec {
  std::size_t n = 512;
  std::size_t d = 128;
  int classes = 4;
  std::uint64_t seed = 42;
  double spacing = 1.0;     // Euclidean distance between any two class centres
  double sigma = 0.1;       // per-feature noise standard deviation
  double background = 0.25;
};

// Class-conditional Gaussian blobs clipped to [0, 1]. Sample i has label
// i mod classes. Class c's centre is `background` plus
// spacing/√(2m) on the m features with index ≡ c (mod classes), so any two
// centres are exactly `spacing` apart (requires classes ≤ d).
Dataset synthetic_blobs(const BlobSpec& spec);

// Centre of class c under synthetic_blobs (exposed for tests).
std::vector<double> blob_center(const BlobSpec& spec, int c);

enum class BatchMode { full, cyclic };
const char* to_string(BatchMode mode) noexcept;
std::optional<BatchMode> parse_batch_mode(const std::string& text) noexcept;

// full: the leading `size` rows at every step. cyclic: rows starting at
// (k·size mod n), wrapping around.
Matrix take_batch(const Dataset& ds, std::size_t size, BatchMode mode, std::size_t step);

}  // namespace ska::data
