// AArch64 only; Advanced SIMD is architecturally guaranteed there.

#include <arm_neon.h>

#include "block_eval.hpp"

namespace batik::kernels::neon {
namespace {

struct Ops {
  using Reg = float64x2_t;
  using Mask = uint64x2_t;
  static constexpr std::size_t kLanes = 2;
  static Reg load(const double* p) { return vld1q_f64(p); }
  static void store(double* p, Reg v) { vst1q_f64(p, v); }
  static Reg set1(double v) { return vdupq_n_f64(v); }
  static Reg add(Reg a, Reg b) { return vaddq_f64(a, b); }
  static Reg sub(Reg a, Reg b) { return vsubq_f64(a, b); }
  static Reg mul(Reg a, Reg b) { return vmulq_f64(a, b); }
  static Reg div(Reg a, Reg b) { return vdivq_f64(a, b); }
  static Reg neg(Reg a) { return vnegq_f64(a); }
  static Mask no_mask() { return vdupq_n_u64(0); }
  static Mask zero_mask(Mask m, Reg den) { return vorrq_u64(m, vceqzq_f64(den)); }
  static bool any(Mask m) { return (vgetq_lane_u64(m, 0) | vgetq_lane_u64(m, 1)) != 0; }
};

}  // namespace

bool evaluate_batch(const Program& program, const double* x, const double* y, const double* z,
                    double* out, std::size_t n, double* scratch) {
  return evaluate_blocks<Ops>(program, x, y, z, out, n, scratch);
}

}  // namespace batik::kernels::neon
