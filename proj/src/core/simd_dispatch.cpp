#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace ska::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(SKA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("SKA_SIMD")) {
    if (auto isa = parse_isa(env); isa && supported(*isa)) return *isa;
  }
  return detect();
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view text) noexcept {
  if (text == "scalar") return Isa::scalar;
  if (text == "avx2") return Isa::avx2;
  if (text == "neon") return Isa::neon;
  return std::nullopt;
}

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: {
      static const bool ok = cpu_has_avx2();
      return ok;
    }
    case Isa::neon:
#if defined(SKA_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect() noexcept {
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active() noexcept { return current().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  if (!supported(isa))
    throw std::invalid_argument("SIMD ISA '" + std::string(name(isa)) + "' is not supported here");
  current().store(isa, std::memory_order_relaxed);
}

const Kernels& kernels(Isa isa) {
  switch (isa) {
    case Isa::scalar: return detail::scalar_kernels;
#if defined(SKA_HAVE_AVX2)
    case Isa::avx2:
      if (supported(Isa::avx2)) return detail::avx2_kernels;
      break;
#endif
#if defined(SKA_HAVE_NEON)
    case Isa::neon: return detail::neon_kernels;
#endif
    default: break;
  }
  throw std::invalid_argument("no kernels for ISA '" + std::string(name(isa)) + "'");
}

const Kernels& kernels() noexcept {
  switch (active()) {
#if defined(SKA_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_kernels;
#endif
#if defined(SKA_HAVE_NEON)
    case Isa::neon: return detail::neon_kernels;
#endif
    default: return detail::scalar_kernels;
  }
}

}  // namespace ska::simd
