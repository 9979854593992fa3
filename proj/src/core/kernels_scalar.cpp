// Reference kernels. These define the arithmetic every vector variant must
// reproduce bit-for-bit.

#include <algorithm>

#include "kernels_internal.hpp"

namespace ska::simd::detail {
namespace {

void gemm(const double* a, std::size_t rs, std::size_t cs, const double* b, double* c,
          std::size_t m, std::size_t kdim, std::size_t n) {
  std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t kk = 0; kk < kdim; ++kk) {
      const double aik = a[i * rs + kk * cs];
      const double* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = crow[j] + aik * brow[j];
    }
  }
}

void add(const double* a, const double* b, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i] * b[i];
}

void scale(const double* a, double s, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i] * s;
}

void sub_scaled(const double* a, const double* b, double s, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i] - s * b[i];
}

}  // namespace

const Kernels scalar_kernels{gemm, add, sub, mul, scale, sub_scaled};

}  // namespace ska::simd::detail
