#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace ska::simd {

enum class Isa { scalar, avx2, neon };

std::string_view name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view text) noexcept;

// True when the kernels were compiled in and the running CPU executes them.
bool supported(Isa isa) noexcept;

// Widest supported ISA on this machine.
Isa detect() noexcept;

// Currently dispatched ISA. Starts at detect(), or at $SKA_SIMD when that
// names a supported ISA.
Isa active() noexcept;

// Throws std::invalid_argument for an unsupported ISA.
void set_active(Isa isa);

// Kernel table. All kernels produce bit-identical results across ISAs:
// vector lanes run over independent output elements, and each element's
// sum is accumulated in ascending reduction index without FMA.
struct Kernels {
  // C (m×n) = A (m×kdim) · B (kdim×n). A is addressed as
  // a[i*a_row_stride + kk*a_col_stride]; B and C are dense row-major.
  // C is overwritten.
  void (*gemm)(const double* a, std::size_t a_row_stride, std::size_t a_col_stride,
               const double* b, double* c, std::size_t m, std::size_t kdim, std::size_t n);
  void (*add)(const double* a, const double* b, double* out, std::size_t len);
  void (*sub)(const double* a, const double* b, double* out, std::size_t len);
  void (*mul)(const double* a, const double* b, double* out, std::size_t len);
  void (*scale)(const double* a, double s, double* out, std::size_t len);
  // out = a − s·b
  void (*sub_scaled)(const double* a, const double* b, double s, double* out, std::size_t len);
};

const Kernels& kernels() noexcept;
const Kernels& kernels(Isa isa);

// RAII override of the active ISA, mainly for equivalence tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active()) { set_active(isa); }
  ~ScopedIsa() { set_active(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace ska::simd
