#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "ska/simd.hpp"

namespace simd = ska::simd;

namespace {

double seconds_per_call(const simd::Kernels& k, const std::vector<double>& a, const std::vector<double>& b,
                        std::vector<double>& c, std::size_t m, std::size_t kd, std::size_t n) {
  using clock = std::chrono::steady_clock;
  std::size_t reps = 1;
  for (;;) {
    const auto t0 = clock::now();
    for (std::size_t r = 0; r < reps; ++r) k.gemm(a.data(), kd, 1, b.data(), c.data(), m, kd, n);
    const double s = std::chrono::duration<double>(clock::now() - t0).count();
    if (s > 0.2) return s / static_cast<double>(reps);
    reps *= 2;
  }
}

}  // namespace

int main() {
  struct Shape {
    std::size_t m, k, n;
  };
  const Shape shapes[] = {{512, 128, 64}, {1000, 784, 256}, {1000, 256, 128}, {1000, 64, 10}};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::printf("%-6s %16s %12s %10s\n", "isa", "m x k x n", "ms/call", "GFLOP/s");
  for (const auto& s : shapes) {
    std::vector<double> a(s.m * s.k), b(s.k * s.n), c(s.m * s.n);
    for (double& v : a) v = u(rng);
    for (double& v : b) v = u(rng);
    for (auto isa : {simd::Isa::scalar, simd::Isa::avx2, simd::Isa::neon}) {
      if (!simd::supported(isa)) continue;
      const double t = seconds_per_call(simd::kernels(isa), a, b, c, s.m, s.k, s.n);
      char dims[32];
      std::snprintf(dims, sizeof dims, "%zux%zux%zu", s.m, s.k, s.n);
      std::printf("%-6.*s %16s %12.3f %10.2f\n", static_cast<int>(simd::name(isa).size()), simd::name(isa).data(),
                  dims, t * 1e3, 2.0 * static_cast<double>(s.m * s.k * s.n) / t * 1e-9);
    }
  }
}
