#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>

#include "ska/dataset.hpp"

namespace ska::data {
namespace {

// Refuse anything above 2^32 payload bytes; the full MNIST training set is
// ~47 MB.
constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 32;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

bool ends_with_gz(const std::filesystem::path& p) { return p.extension() == ".gz"; }

// Checks magic and returns the payload size implied by `dims`.
std::uint64_t check_header(std::span<const std::uint8_t> bytes, std::uint32_t magic,
                           std::size_t ndims, std::uint32_t* dims) {
  const std::size_t header = 4 + 4 * ndims;
  if (bytes.size() < 4)
    throw IdxError(IdxError::Kind::truncated_header,
                   "IDX header truncated: " + std::to_string(bytes.size()) + " bytes");
  const std::uint32_t got = read_be32(bytes, 0);
  if (got != magic)
    throw IdxError(IdxError::Kind::bad_magic,
                   "IDX magic " + hex(got) + " does not match expected " + hex(magic));
  if (bytes.size() < header)
    throw IdxError(IdxError::Kind::truncated_header,
                   "IDX header truncated: " + std::to_string(bytes.size()) + " of " +
                       std::to_string(header) + " bytes");
  std::uint64_t payload = 1;
  for (std::size_t i = 0; i < ndims; ++i) {
    dims[i] = read_be32(bytes, 4 + 4 * i);
    if (dims[i] == 0)
      throw IdxError(IdxError::Kind::zero_dimension,
                     "IDX dimension " + std::to_string(i) + " is zero");
  }
  for (std::size_t i = 0; i < ndims; ++i) {
    if (payload > kMaxPayload / dims[i])
      throw IdxError(IdxError::Kind::dimension_overflow, "IDX dimensions exceed 2^32 bytes");
    payload *= dims[i];
  }
  if (payload > kMaxPayload)
    throw IdxError(IdxError::Kind::dimension_overflow, "IDX dimensions exceed 2^32 bytes");
  const std::uint64_t available = bytes.size() - header;
  if (available < payload)
    throw IdxError(IdxError::Kind::truncated_payload,
                   "IDX payload truncated: " + std::to_string(available) + " of " +
                       std::to_string(payload) + " bytes");
  if (available > payload)
    throw IdxError(IdxError::Kind::trailing_bytes,
                   "IDX payload has " + std::to_string(available - payload) + " trailing bytes");
  return payload;
}

}  // namespace

IdxError::IdxError(Kind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

const char* to_string(IdxError::Kind kind) noexcept {
  switch (kind) {
    case IdxError::Kind::io: return "io";
    case IdxError::Kind::truncated_header: return "truncated_header";
    case IdxError::Kind::bad_magic: return "bad_magic";
    case IdxError::Kind::zero_dimension: return "zero_dimension";
    case IdxError::Kind::dimension_overflow: return "dimension_overflow";
    case IdxError::Kind::truncated_payload: return "truncated_payload";
    case IdxError::Kind::trailing_bytes: return "trailing_bytes";
    case IdxError::Kind::label_out_of_range: return "label_out_of_range";
  }
  return "unknown";
}

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  std::uint32_t dims[3];
  const std::uint64_t payload = check_header(bytes, kIdxImageMagic, 3, dims);
  IdxImages out{dims[0], dims[1], dims[2], {}};
  out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(payload));
  return out;
}

std::vector<int> parse_idx_labels(std::span<const std::uint8_t> bytes, int classes) {
  std::uint32_t dims[1];
  check_header(bytes, kIdxLabelMagic, 1, dims);
  std::vector<int> labels(dims[0]);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = bytes[8 + i];
    if (labels[i] >= classes)
      throw IdxError(IdxError::Kind::label_out_of_range,
                     "label " + std::to_string(labels[i]) + " at record " + std::to_string(i) +
                         " is outside 0.." + std::to_string(classes - 1));
  }
  return labels;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::vector<std::uint8_t> out;
  if (ends_with_gz(path)) {
    std::unique_ptr<gzFile_s, int (*)(gzFile)> gz(gzopen(path.c_str(), "rb"), gzclose);
    if (!gz) throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
    std::uint8_t buf[1 << 16];
    for (;;) {
      const int got = gzread(gz.get(), buf, sizeof buf);
      if (got < 0) throw IdxError(IdxError::Kind::io, "gzip stream error in " + path.string());
      if (got == 0) break;
      out.insert(out.end(), buf, buf + got);
    }
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
  out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return out;
}

Matrix load_idx_images(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const IdxImages img = parse_idx_images(bytes);
  const std::size_t d = std::size_t{img.rows} * img.cols;
  std::vector<double> values(img.pixels.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = img.pixels[i] / 255.0;
  return Matrix(img.count, d, std::move(values));
}

std::vector<int> load_idx_labels(const std::filesystem::path& path, int classes) {
  return parse_idx_labels(read_file_bytes(path), classes);
}

std::vector<std::uint8_t> encode_idx_images(const IdxImages& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  write_be32(out, kIdxImageMagic);
  write_be32(out, images.count);
  write_be32(out, images.rows);
  write_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels) {
  if (labels.size() > std::numeric_limits<std::uint32_t>::max())
    throw IdxError(IdxError::Kind::dimension_overflow, "too many labels for IDX");
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  write_be32(out, kIdxLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (ends_with_gz(path)) {
    std::unique_ptr<gzFile_s, int (*)(gzFile)> gz(gzopen(path.c_str(), "wb9"), gzclose);
    if (!gz) throw IdxError(IdxError::Kind::io, "cannot write " + path.string());
    std::size_t done = 0;
    while (done < bytes.size()) {
      const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(bytes.size() - done, 1 << 20));
      if (gzwrite(gz.get(), bytes.data() + done, chunk) != static_cast<int>(chunk))
        throw IdxError(IdxError::Kind::io, "gzip write failed for " + path.string());
      done += chunk;
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IdxError(IdxError::Kind::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IdxError(IdxError::Kind::io, "write failed for " + path.string());
}

}  // namespace ska::data
