#pragma once

#include <cstddef>

#include "batik/program.hpp"

namespace batik::kernels {

/// Points per evaluation block; scratch holds one block per register.
inline constexpr std::size_t kBlock = 64;

#define BATIK_DECLARE_BACKEND(ns)                                                                   \
  namespace ns {                                                                                    \
  bool evaluate_batch(const Program& program, const double* x, const double* y, const double* z, \
                      double* out, std::size_t n, double* scratch);                                 \
  }

BATIK_DECLARE_BACKEND(scalar)
#if defined(BATIK_HAVE_AVX2)
BATIK_DECLARE_BACKEND(avx2)
#endif
#if defined(BATIK_HAVE_NEON)
BATIK_DECLARE_BACKEND(neon)
#endif

#undef BATIK_DECLARE_BACKEND

}  // namespace batik::kernels
