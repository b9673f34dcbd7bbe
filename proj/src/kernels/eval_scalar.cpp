#include "block_eval.hpp"

namespace batik::kernels::scalar {
namespace {

struct Ops {
  using Reg = double;
  using Mask = bool;
  static constexpr std::size_t kLanes = 1;
  static Reg load(const double* p) { return *p; }
  static void store(double* p, Reg v) { *p = v; }
  static Reg set1(double v) { return v; }
  static Reg add(Reg a, Reg b) { return a + b; }
  static Reg sub(Reg a, Reg b) { return a - b; }
  static Reg mul(Reg a, Reg b) { return a * b; }
  static Reg div(Reg a, Reg b) { return a / b; }
  static Reg neg(Reg a) { return -a; }
  static Mask no_mask() { return false; }
  static Mask zero_mask(Mask m, Reg den) { return m || den == 0.0; }
  static bool any(Mask m) { return m; }
};

}  // namespace

bool evaluate_batch(const Program& program, const double* x, const double* y, const double* z,
                    double* out, std::size_t n, double* scratch) {
  return evaluate_blocks<Ops>(program, x, y, z, out, n, scratch);
}

}  // namespace batik::kernels::scalar
