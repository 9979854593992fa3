// AVX2 variants. Compiled with -mavx2 only (no -mfma): products and sums
// stay separately rounded so results match kernels_scalar.cpp exactly.

#include <immintrin.h>

#include <algorithm>

#include "kernels_internal.hpp"

namespace ska::simd::detail {
namespace {

// 4 rows × 12 columns of C held in registers across one reduction block.
inline void micro_4x12(const double* a, std::size_t rs, std::size_t cs, const double* b,
                       double* c, std::size_t n, std::size_t i, std::size_t j, std::size_t k0,
                       std::size_t k1) {
  __m256d acc[4][3];
  for (int r = 0; r < 4; ++r)
    for (int v = 0; v < 3; ++v) acc[r][v] = _mm256_loadu_pd(c + (i + r) * n + j + 4 * v);

  for (std::size_t kk = k0; kk < k1; ++kk) {
    const double* brow = b + kk * n + j;
    const __m256d b0 = _mm256_loadu_pd(brow);
    const __m256d b1 = _mm256_loadu_pd(brow + 4);
    const __m256d b2 = _mm256_loadu_pd(brow + 8);
    for (int r = 0; r < 4; ++r) {
      const __m256d av = _mm256_set1_pd(a[(i + r) * rs + kk * cs]);
      acc[r][0] = _mm256_add_pd(acc[r][0], _mm256_mul_pd(av, b0));
      acc[r][1] = _mm256_add_pd(acc[r][1], _mm256_mul_pd(av, b1));
      acc[r][2] = _mm256_add_pd(acc[r][2], _mm256_mul_pd(av, b2));
    }
  }

  for (int r = 0; r < 4; ++r)
    for (int v = 0; v < 3; ++v) _mm256_storeu_pd(c + (i + r) * n + j + 4 * v, acc[r][v]);
}

// One row, one 4-wide column strip.
inline void micro_1x4(const double* a, std::size_t rs, std::size_t cs, const double* b, double* c,
                      std::size_t n, std::size_t i, std::size_t j, std::size_t k0, std::size_t k1) {
  __m256d acc = _mm256_loadu_pd(c + i * n + j);
  for (std::size_t kk = k0; kk < k1; ++kk) {
    const __m256d av = _mm256_set1_pd(a[i * rs + kk * cs]);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(av, _mm256_loadu_pd(b + kk * n + j)));
  }
  _mm256_storeu_pd(c + i * n + j, acc);
}

inline void scalar_cell(const double* a, std::size_t rs, std::size_t cs, const double* b,
                        double* c, std::size_t n, std::size_t i, std::size_t j, std::size_t k0,
                        std::size_t k1) {
  double acc = c[i * n + j];
  for (std::size_t kk = k0; kk < k1; ++kk) acc = acc + a[i * rs + kk * cs] * b[kk * n + j];
  c[i * n + j] = acc;
}

void gemm(const double* a, std::size_t rs, std::size_t cs, const double* b, double* c,
          std::size_t m, std::size_t kdim, std::size_t n) {
  std::fill(c, c + m * n, 0.0);
  for (std::size_t k0 = 0; k0 < kdim; k0 += kReductionBlock) {
    const std::size_t k1 = std::min(kdim, k0 + kReductionBlock);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
      std::size_t j = 0;
      for (; j + 12 <= n; j += 12) micro_4x12(a, rs, cs, b, c, n, i, j, k0, k1);
      for (; j + 4 <= n; j += 4)
        for (std::size_t r = 0; r < 4; ++r) micro_1x4(a, rs, cs, b, c, n, i + r, j, k0, k1);
      for (; j < n; ++j)
        for (std::size_t r = 0; r < 4; ++r) scalar_cell(a, rs, cs, b, c, n, i + r, j, k0, k1);
    }
    for (; i < m; ++i) {
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) micro_1x4(a, rs, cs, b, c, n, i, j, k0, k1);
      for (; j < n; ++j) scalar_cell(a, rs, cs, b, c, n, i, j, k0, k1);
    }
  }
}

template <class VecOp, class ScalarOp>
inline void binary(const double* a, const double* b, double* out, std::size_t len, VecOp vop,
                   ScalarOp sop) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(out + i, vop(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < len; ++i) out[i] = sop(a[i], b[i]);
}

void add(const double* a, const double* b, double* out, std::size_t len) {
  binary(a, b, out, len, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
         [](double x, double y) { return x + y; });
}

void sub(const double* a, const double* b, double* out, std::size_t len) {
  binary(a, b, out, len, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
         [](double x, double y) { return x - y; });
}

void mul(const double* a, const double* b, double* out, std::size_t len) {
  binary(a, b, out, len, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
         [](double x, double y) { return x * y; });
}

void scale(const double* a, double s, double* out, std::size_t len) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), sv));
  for (; i < len; ++i) out[i] = a[i] * s;
}

void sub_scaled(const double* a, const double* b, double s, double* out, std::size_t len) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d prod = _mm256_mul_pd(sv, _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), prod));
  }
  for (; i < len; ++i) out[i] = a[i] - s * b[i];
}

}  // namespace

const Kernels avx2_kernels{gemm, add, sub, mul, scale, sub_scaled};

}  // namespace ska::simd::detail
