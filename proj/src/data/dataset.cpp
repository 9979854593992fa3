#include <algorithm>
#include <cmath>
#include <random>

#include "ska/dataset.hpp"

namespace ska::data {

const char* to_string(Source source) noexcept {
  switch (source) {
    case Source::mnist_file: return "mnist-file";
    case Source::synthetic: return "synthetic";
    case Source::inline_values: return "inline";
  }
  return "unknown";
}

const char* to_string(BatchMode mode) noexcept {
  return mode == BatchMode::full ? "full" : "cyclic";
}

std::optional<BatchMode> parse_batch_mode(const std::string& text) noexcept {
  if (text == "full" || text == "full-batch") return BatchMode::full;
  if (text == "cyclic") return BatchMode::cyclic;
  return std::nullopt;
}

void validate(const Dataset& ds) {
  for (double v : ds.inputs.flat()) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("dataset input outside [0, 1]");
  }
  if (ds.labels) {
    if (ds.labels->size() != ds.size())
      throw std::invalid_argument("dataset has " + std::to_string(ds.labels->size()) +
                                  " labels for " + std::to_string(ds.size()) + " samples");
    for (int y : *ds.labels) {
      if (y < 0 || y >= ds.classes)
        throw std::invalid_argument("dataset label " + std::to_string(y) + " outside 0.." +
                                    std::to_string(ds.classes - 1));
    }
  }
}

Dataset load_mnist(const std::filesystem::path& images,
                   const std::optional<std::filesystem::path>& labels, std::size_t limit) {
  Matrix x = load_idx_images(images);
  std::optional<std::vector<int>> y;
  if (labels) {
    y = load_idx_labels(*labels, kMnistClasses);
    if (y->size() != x.rows())
      throw std::invalid_argument("MNIST images (" + std::to_string(x.rows()) + ") and labels (" +
                                  std::to_string(y->size()) + ") disagree in count");
  }
  if (limit > 0 && limit < x.rows()) {
    std::vector<double> head(x.flat().begin(), x.flat().begin() + static_cast<std::ptrdiff_t>(limit * x.cols()));
    x = Matrix(limit, x.cols(), std::move(head));
    if (y) y->resize(limit);
  }
  Dataset ds{std::move(x), std::move(y), kMnistClasses, Source::mnist_file};
  validate(ds);
  return ds;
}

std::vector<double> blob_center(const BlobSpec& spec, int c) {
  const auto classes = static_cast<std::size_t>(spec.classes);
  // All blocks have floor(d/classes) or ceil(d/classes) members; the
  // amplitude uses the smallest so centres are at least `spacing` apart.
  const std::size_t m = std::max<std::size_t>(1, spec.d / classes);
  const double amp = spec.classes > 1 ? spec.spacing / std::sqrt(2.0 * static_cast<double>(m)) : 0.0;
  std::vector<double> center(spec.d, spec.background);
  for (std::size_t i = static_cast<std::size_t>(c); i < spec.d; i += classes) center[i] += amp;
  return center;
}

Dataset synthetic_blobs(const BlobSpec& spec) {
  if (spec.n == 0 || spec.d == 0 || spec.classes < 1)
    throw std::invalid_argument("synthetic_blobs: n, d and classes must be positive");
  if (static_cast<std::size_t>(spec.classes) > spec.d)
    throw std::invalid_argument("synthetic_blobs: more classes than features");

  std::vector<std::vector<double>> centers;
  for (int c = 0; c < spec.classes; ++c) centers.push_back(blob_center(spec, c));

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  std::vector<double> values(spec.n * spec.d);
  std::vector<int> labels(spec.n);
  for (std::size_t s = 0; s < spec.n; ++s) {
    labels[s] = static_cast<int>(s % static_cast<std::size_t>(spec.classes));
    const auto& mu = centers[static_cast<std::size_t>(labels[s])];
    for (std::size_t i = 0; i < spec.d; ++i)
      values[s * spec.d + i] = std::clamp(mu[i] + noise(rng), 0.0, 1.0);
  }
  return Dataset{Matrix(spec.n, spec.d, std::move(values)), std::move(labels), spec.classes,
                 Source::synthetic};
}

Matrix take_batch(const Dataset& ds, std::size_t size, BatchMode mode, std::size_t step) {
  const std::size_t n = ds.size();
  if (size == 0) throw std::invalid_argument("take_batch: batch size must be positive");
  if (mode == BatchMode::full && size > n)
    throw std::invalid_argument("take_batch: full batch of " + std::to_string(size) +
                                " exceeds dataset size " + std::to_string(n));
  const std::size_t d = ds.dim();
  const std::size_t start = mode == BatchMode::full ? 0 : (step % n) * (size % n) % n;
  std::vector<double> out(size * d);
  auto src = ds.inputs.flat();
  for (std::size_t r = 0; r < size; ++r) {
    const std::size_t row = (start + r) % n;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(row * d), d,
                out.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  return Matrix(size, d, std::move(out));
}

}  // namespace ska::data
