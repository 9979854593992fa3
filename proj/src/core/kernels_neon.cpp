// AArch64 NEON variants. vmulq/vaddq only (never vfmaq) so the rounding
// sequence matches kernels_scalar.cpp.

#include <arm_neon.h>

#include <algorithm>

#include "kernels_internal.hpp"

namespace ska::simd::detail {
namespace {

// 4 rows × 8 columns (4 float64x2 per row).
inline void micro_4x8(const double* a, std::size_t rs, std::size_t cs, const double* b, double* c,
                      std::size_t n, std::size_t i, std::size_t j, std::size_t k0, std::size_t k1) {
  float64x2_t acc[4][4];
  for (int r = 0; r < 4; ++r)
    for (int v = 0; v < 4; ++v) acc[r][v] = vld1q_f64(c + (i + r) * n + j + 2 * v);

  for (std::size_t kk = k0; kk < k1; ++kk) {
    const double* brow = b + kk * n + j;
    float64x2_t bv[4];
    for (int v = 0; v < 4; ++v) bv[v] = vld1q_f64(brow + 2 * v);
    for (int r = 0; r < 4; ++r) {
      const float64x2_t av = vdupq_n_f64(a[(i + r) * rs + kk * cs]);
      for (int v = 0; v < 4; ++v) acc[r][v] = vaddq_f64(acc[r][v], vmulq_f64(av, bv[v]));
    }
  }

  for (int r = 0; r < 4; ++r)
    for (int v = 0; v < 4; ++v) vst1q_f64(c + (i + r) * n + j + 2 * v, acc[r][v]);
}

inline void micro_1x2(const double* a, std::size_t rs, std::size_t cs, const double* b, double* c,
                      std::size_t n, std::size_t i, std::size_t j, std::size_t k0, std::size_t k1) {
  float64x2_t acc = vld1q_f64(c + i * n + j);
  for (std::size_t kk = k0; kk < k1; ++kk) {
    const float64x2_t av = vdupq_n_f64(a[i * rs + kk * cs]);
    acc = vaddq_f64(acc, vmulq_f64(av, vld1q_f64(b + kk * n + j)));
  }
  vst1q_f64(c + i * n + j, acc);
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
      for (; j + 8 <= n; j += 8) micro_4x8(a, rs, cs, b, c, n, i, j, k0, k1);
      for (; j + 2 <= n; j += 2)
        for (std::size_t r = 0; r < 4; ++r) micro_1x2(a, rs, cs, b, c, n, i + r, j, k0, k1);
      for (; j < n; ++j)
        for (std::size_t r = 0; r < 4; ++r) scalar_cell(a, rs, cs, b, c, n, i + r, j, k0, k1);
    }
    for (; i < m; ++i) {
      std::size_t j = 0;
      for (; j + 2 <= n; j += 2) micro_1x2(a, rs, cs, b, c, n, i, j, k0, k1);
      for (; j < n; ++j) scalar_cell(a, rs, cs, b, c, n, i, j, k0, k1);
    }
  }
}

void add(const double* a, const double* b, double* out, std::size_t len) {
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < len; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t len) {
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < len; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t len) {
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < len; ++i) out[i] = a[i] * b[i];
}

void scale(const double* a, double s, double* out, std::size_t len) {
  const float64x2_t sv = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), sv));
  for (; i < len; ++i) out[i] = a[i] * s;
}

void sub_scaled(const double* a, const double* b, double s, double* out, std::size_t len) {
  const float64x2_t sv = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2)
    vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vmulq_f64(sv, vld1q_f64(b + i))));
  for (; i < len; ++i) out[i] = a[i] - s * b[i];
}

}  // namespace

const Kernels neon_kernels{gemm, add, sub, mul, scale, sub_scaled};

}  // namespace ska::simd::detail
