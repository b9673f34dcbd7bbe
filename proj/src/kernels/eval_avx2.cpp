// Built with -mavx2 (and no -mfma); only reached after a runtime CPU check.

#include <immintrin.h>

#include "block_eval.hpp"

namespace batik::kernels::avx2 {
namespace {

struct Ops {
  using Reg = __m256d;
  using Mask = __m256d;
  static constexpr std::size_t kLanes = 4;
  static Reg load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, Reg v) { _mm256_storeu_pd(p, v); }
  static Reg set1(double v) { return _mm256_set1_pd(v); }
  static Reg add(Reg a, Reg b) { return _mm256_add_pd(a, b); }
  static Reg sub(Reg a, Reg b) { return _mm256_sub_pd(a, b); }
  static Reg mul(Reg a, Reg b) { return _mm256_mul_pd(a, b); }
  static Reg div(Reg a, Reg b) { return _mm256_div_pd(a, b); }
  // Sign flip, exactly what scalar negation does (also for 0 and nan).
  static Reg neg(Reg a) { return _mm256_xor_pd(a, _mm256_set1_pd(-0.0)); }
  static Mask no_mask() { return _mm256_setzero_pd(); }
  static Mask zero_mask(Mask m, Reg den) {
    return _mm256_or_pd(m, _mm256_cmp_pd(den, _mm256_setzero_pd(), _CMP_EQ_OQ));
  }
  static bool any(Mask m) { return _mm256_movemask_pd(m) != 0; }
};

}  // namespace

bool evaluate_batch(const Program& program, const double* x, const double* y, const double* z,
                    double* out, std::size_t n, double* scratch) {
  return evaluate_blocks<Ops>(program, x, y, z, out, n, scratch);
}

}  // namespace batik::kernels::avx2
