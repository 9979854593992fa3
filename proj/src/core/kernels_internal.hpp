#pragma once

#include "ska/simd.hpp"

namespace ska::simd::detail {

extern const Kernels scalar_kernels;
#if defined(SKA_HAVE_AVX2)
extern const Kernels avx2_kernels;
#endif
#if defined(SKA_HAVE_NEON)
extern const Kernels neon_kernels;
#endif

// Reduction-dimension block used by the vector GEMMs. Blocking over the
// reduction index keeps the per-element order ascending.
inline constexpr std::size_t kReductionBlock = 256;

}  // namespace ska::simd::detail
