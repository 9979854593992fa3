#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "ska/dataset.hpp"

namespace data = ska::data;
using Kind = data::IdxError::Kind;

namespace {

std::vector<std::uint8_t> image_file(std::uint32_t n, std::uint32_t r, std::uint32_t c,
                                     std::vector<std::uint8_t> pixels) {
  return data::encode_idx_images(data::IdxImages{n, r, c, std::move(pixels)});
}

Kind kind_of(const std::vector<std::uint8_t>& bytes, bool labels = false) {
  try {
    if (labels) data::parse_idx_labels(bytes);
    else data::parse_idx_images(bytes);
  } catch (const data::IdxError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an IdxError";
  return Kind::io;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ska_test_" + name);
}

}  // namespace

TEST(Idx, HandBuiltImageHeader) {
  const std::vector<std::uint8_t> bytes{0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0, 255, 0, 255};
  const auto img = data::parse_idx_images(bytes);
  EXPECT_EQ(img.count, 1u);
  EXPECT_EQ(img.rows, 2u);
  EXPECT_EQ(img.cols, 2u);
  const auto path = temp_path("hand.idx");
  data::write_file_bytes(path, bytes);
  EXPECT_EQ(data::load_idx_images(path), (ska::Matrix{{0, 1, 0, 1}}));
  std::filesystem::remove(path);
}

TEST(Idx, HandBuiltLabels) {
  const std::vector<std::uint8_t> bytes{0, 0, 8, 1, 0, 0, 0, 3, 7, 0, 9};
  EXPECT_EQ(data::parse_idx_labels(bytes), (std::vector<int>{7, 0, 9}));
  std::vector<std::uint8_t> bad = bytes;
  bad[9] = 12;
  EXPECT_EQ(kind_of(bad, true), Kind::label_out_of_range);
}

TEST(Idx, DistinctErrors) {
  EXPECT_EQ(kind_of({}), Kind::truncated_header);
  EXPECT_EQ(kind_of({0, 0, 8, 3, 0, 0}), Kind::truncated_header);
  EXPECT_EQ(kind_of({0, 0, 8, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0}), Kind::bad_magic);
  EXPECT_EQ(kind_of({0, 0, 8, 3, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1}), Kind::zero_dimension);
  EXPECT_EQ(kind_of({0, 0, 8, 3, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0, 0, 0, 2}),
            Kind::dimension_overflow);
  EXPECT_EQ(kind_of({0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 1, 5}), Kind::truncated_payload);
  EXPECT_EQ(kind_of({0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 5, 6}), Kind::trailing_bytes);
  EXPECT_EQ(kind_of({0, 0, 8, 1, 0, 0, 0, 2, 1}, true), Kind::truncated_payload);
}

TEST(Idx, MissingFileIsIoError) {
  try {
    data::load_idx_images("/nonexistent/ska/images.idx");
    FAIL();
  } catch (const data::IdxError& e) {
    EXPECT_EQ(e.kind(), Kind::io);
  }
}

TEST(Idx, RandomCorruptHeadersNeverCrash) {
  std::mt19937_64 rng(2024);
  const auto good = image_file(3, 4, 5, std::vector<std::uint8_t>(60, 17));
  for (int trial = 0; trial < 500; ++trial) {
    auto bytes = good;
    std::uniform_int_distribution<std::size_t> pos(0, 15);
    std::uniform_int_distribution<int> byte(0, 255);
    const int flips = 1 + trial % 4;
    for (int f = 0; f < flips; ++f) bytes[pos(rng)] = static_cast<std::uint8_t>(byte(rng));
    if (trial % 7 == 0) bytes.resize(std::uniform_int_distribution<std::size_t>(0, bytes.size())(rng));
    if (bytes == good) continue;
    try {
      const auto img = data::parse_idx_images(bytes);
      EXPECT_EQ(img.pixels.size(), std::size_t{img.count} * img.rows * img.cols);
    } catch (const data::IdxError&) {
    }
  }
}

TEST(Idx, RoundTripPlainAndGzip) {
  std::mt19937_64 rng(5);
  std::vector<std::uint8_t> pixels(7 * 3 * 4);
  for (auto& p : pixels) p = static_cast<std::uint8_t>(rng());
  const data::IdxImages img{7, 3, 4, pixels};
  std::vector<std::uint8_t> labels{0, 1, 2, 3, 4, 5, 9};
  for (const std::string ext : {".idx", ".idx.gz"}) {
    const auto ip = temp_path("rt_images" + ext), lp = temp_path("rt_labels" + ext);
    data::write_file_bytes(ip, data::encode_idx_images(img));
    data::write_file_bytes(lp, data::encode_idx_labels(labels));
    const auto back = data::parse_idx_images(data::read_file_bytes(ip));
    EXPECT_EQ(back.pixels, pixels);
    EXPECT_EQ(back.count, 7u);
    const auto m = data::load_idx_images(ip);
    for (std::size_t i = 0; i < pixels.size(); ++i) EXPECT_EQ(m.flat()[i], pixels[i] / 255.0);
    EXPECT_EQ(data::load_idx_labels(lp), (std::vector<int>{0, 1, 2, 3, 4, 5, 9}));
    std::filesystem::remove(ip);
    std::filesystem::remove(lp);
  }
}

TEST(Dataset, MnistFixtureLoads) {
  const std::filesystem::path dir = SKA_TEST_DATA_DIR;
  const auto ds = data::load_mnist(dir / "mnist5k-images-idx3-ubyte.gz", dir / "mnist5k-labels-idx1-ubyte.gz");
  EXPECT_EQ(ds.size(), 5000u);
  EXPECT_EQ(ds.dim(), 784u);
  for (double v : ds.inputs.flat()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
  std::vector<int> counts(10);
  for (int y : *ds.labels) ++counts[static_cast<std::size_t>(y)];
  for (int c : counts) EXPECT_EQ(c, 500);
  const auto head = data::load_mnist(dir / "mnist5k-images-idx3-ubyte.gz", std::nullopt, 100);
  EXPECT_EQ(head.size(), 100u);
  EXPECT_FALSE(head.labels.has_value());
}

TEST(Dataset, ValidateRejectsBrokenInvariants) {
  data::Dataset ds{ska::Matrix{{0.5, 1.5}}, std::nullopt, 0, data::Source::inline_values};
  EXPECT_THROW(data::validate(ds), std::invalid_argument);
  data::Dataset labelled{ska::Matrix{{0.5}, {0.2}}, std::vector<int>{0}, 2, data::Source::synthetic};
  EXPECT_THROW(data::validate(labelled), std::invalid_argument);
  labelled.labels = std::vector<int>{0, 2};
  EXPECT_THROW(data::validate(labelled), std::invalid_argument);
}

TEST(Blobs, DeterministicAndValid) {
  data::BlobSpec spec;
  spec.n = 64;
  spec.d = 20;
  const auto a = data::synthetic_blobs(spec);
  const auto b = data::synthetic_blobs(spec);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NO_THROW(data::validate(a));
  spec.seed = 43;
  EXPECT_NE(data::synthetic_blobs(spec).inputs, a.inputs);
}

TEST(Blobs, SingleClassHasAllZeroLabels) {
  data::BlobSpec spec;
  spec.n = 10;
  spec.d = 4;
  spec.classes = 1;
  const auto ds = data::synthetic_blobs(spec);
  for (int y : *ds.labels) EXPECT_EQ(y, 0);
}

TEST(Blobs, CentresAreSpacingApart) {
  data::BlobSpec spec;
  spec.d = 128;
  for (int i = 0; i < spec.classes; ++i)
    for (int j = i + 1; j < spec.classes; ++j) {
      const auto a = data::blob_center(spec, i), b = data::blob_center(spec, j);
      double s = 0;
      for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      EXPECT_NEAR(std::sqrt(s), spec.spacing, 1e-12);
    }
}

TEST(Blobs, EmpiricalMeansSeparate) {
  data::BlobSpec spec;
  spec.n = 2000;
  spec.d = 32;
  const auto ds = data::synthetic_blobs(spec);
  const auto classes = static_cast<std::size_t>(spec.classes);
  std::vector<std::vector<double>> mean(classes, std::vector<double>(spec.d));
  std::vector<double> count(classes);
  for (std::size_t s = 0; s < ds.size(); ++s) {
    const auto c = static_cast<std::size_t>((*ds.labels)[s]);
    ++count[c];
    for (std::size_t i = 0; i < spec.d; ++i) mean[c][i] += ds.inputs(s, i);
  }
  const double per_class = static_cast<double>(spec.n) / spec.classes;
  for (std::size_t i = 0; i < classes; ++i)
    for (std::size_t j = i + 1; j < classes; ++j) {
      double dist = 0;
      for (std::size_t k = 0; k < spec.d; ++k) {
        const double diff = mean[i][k] / count[i] - mean[j][k] / count[j];
        dist += diff * diff;
      }
      EXPECT_GE(std::sqrt(dist), spec.spacing - 3.0 * spec.sigma / std::sqrt(per_class));
    }
}

TEST(Batch, FullModeIsConstant) {
  data::BlobSpec spec;
  spec.n = 10;
  spec.d = 3;
  spec.classes = 2;
  const auto ds = data::synthetic_blobs(spec);
  const auto b0 = data::take_batch(ds, 4, data::BatchMode::full, 0);
  EXPECT_EQ(data::take_batch(ds, 4, data::BatchMode::full, 17), b0);
  EXPECT_EQ(b0.row(3)[1], ds.inputs(3, 1));
  EXPECT_THROW(data::take_batch(ds, 0, data::BatchMode::full, 0), std::invalid_argument);
  EXPECT_THROW(data::take_batch(ds, 11, data::BatchMode::full, 0), std::invalid_argument);
}

TEST(Batch, CyclicRows) {
  const ska::Matrix x{{0.0}, {0.1}, {0.2}, {0.3}};
  const data::Dataset four{x, std::nullopt, 0, data::Source::inline_values};
  EXPECT_EQ(data::take_batch(four, 2, data::BatchMode::cyclic, 0), (ska::Matrix{{0.0}, {0.1}}));
  EXPECT_EQ(data::take_batch(four, 2, data::BatchMode::cyclic, 1), (ska::Matrix{{0.2}, {0.3}}));
  EXPECT_EQ(data::take_batch(four, 2, data::BatchMode::cyclic, 2), (ska::Matrix{{0.0}, {0.1}}));
  const data::Dataset three{ska::Matrix{{0.0}, {0.1}, {0.2}}, std::nullopt, 0, data::Source::inline_values};
  EXPECT_EQ(data::take_batch(three, 2, data::BatchMode::cyclic, 1), (ska::Matrix{{0.2}, {0.0}}));
  EXPECT_EQ(data::parse_batch_mode("cyclic"), data::BatchMode::cyclic);
  EXPECT_FALSE(data::parse_batch_mode("random").has_value());
}
