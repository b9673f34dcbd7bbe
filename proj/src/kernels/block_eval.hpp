#pragma once

// Instruction-outer evaluation shared by every backend. A block of up to
// kBlock points runs each instruction across all of its lanes before moving
// on, so dispatch cost is paid once per instruction per block. Register i
// occupies scratch[i * kBlock, (i + 1) * kBlock).
//
// `V` supplies the vector type and its operations: lanes, load, store, set1,
// add, sub, mul, div, neg, zero_mask (accumulates lanes whose divisor is 0)
// and any (whether an accumulated mask has a set lane).
//
// No std:: templates are instantiated here: a copy compiled with -mavx2 could
// otherwise be picked by the linker for callers on CPUs without AVX2.

#include <cstddef>
#include <cstring>

#include "backends.hpp"
#include "batik/detail/ipow.hpp"

namespace batik::kernels {

// Bitwise equality of every value in [p, p + m).
inline bool all_same(const double* p, std::size_t m) {
  for (std::size_t k = 1; k < m; ++k) {
    if (std::memcmp(p + k, p, sizeof(double)) != 0) return false;
  }
  return true;
}

template <class V>
bool evaluate_blocks(const Program& program, const double* x, const double* y, const double* z, double* out,
                     std::size_t n, double* r) {
  using Reg = typename V::Reg;
  using Mask = typename V::Mask;
  constexpr std::size_t L = V::kLanes;
  static_assert(kBlock % L == 0);
  const auto code = program.code();
  const std::size_t last = code.size() - 1;
  // One flag per register after the register file: the register holds the same
  // value in every lane of the block and only lane 0 is stored.
  auto* uniform = reinterpret_cast<unsigned char*>(r + code.size() * kBlock);
  Mask zero_divisor = V::no_mask();

  for (std::size_t base = 0; base < n; base += kBlock) {
    const std::size_t m = n - base < kBlock ? n - base : kBlock;
    // Lanes past m repeat the block's last point.
    const std::size_t padded = (m + L - 1) / L * L;
    const bool input_uniform[3] = {all_same(x + base, m), all_same(y + base, m), all_same(z + base, m)};

    // dst = f(a, b) lane by lane, broadcasting uniform operands. Scalar and
    // vector IEEE operations round identically, so the result does not
    // depend on which path runs.
    const auto binary = [&](std::size_t i, const Instruction& ins, auto scalar_op, auto vector_op) {
      double* dst = r + i * kBlock;
      const double* a = r + std::size_t{ins.a} * kBlock;
      const double* b = r + std::size_t{ins.b} * kBlock;
      const bool ua = uniform[ins.a] != 0, ub = uniform[ins.b] != 0;
      uniform[i] = ua && ub;
      if (ua && ub) {
        dst[0] = scalar_op(a[0], b[0]);
      } else if (ua) {
        const Reg av = V::set1(a[0]);
        for (std::size_t k = 0; k < padded; k += L) V::store(dst + k, vector_op(av, V::load(b + k)));
      } else if (ub) {
        const Reg bv = V::set1(b[0]);
        for (std::size_t k = 0; k < padded; k += L) V::store(dst + k, vector_op(V::load(a + k), bv));
      } else {
        for (std::size_t k = 0; k < padded; k += L) V::store(dst + k, vector_op(V::load(a + k), V::load(b + k)));
      }
    };

    for (std::size_t i = 0; i < code.size(); ++i) {
      const Instruction& ins = code[i];
      double* dst = r + i * kBlock;
      const double* a = r + std::size_t{ins.a} * kBlock;
      switch (ins.op) {
        case OpCode::Const:
          uniform[i] = 1;
          dst[0] = ins.value;
          break;
        case OpCode::X:
        case OpCode::Y:
        case OpCode::Z: {
          const int axis = ins.op == OpCode::X ? 0 : ins.op == OpCode::Y ? 1 : 2;
          const double* src = (axis == 0 ? x : axis == 1 ? y : z) + base;
          uniform[i] = input_uniform[axis];
          if (input_uniform[axis]) {
            dst[0] = src[0];
          } else {
            for (std::size_t k = 0; k < padded; ++k) dst[k] = src[k < m ? k : m - 1];
          }
          break;
        }
        case OpCode::Add:
          binary(i, ins, [](double p, double q) { return p + q; }, [](Reg p, Reg q) { return V::add(p, q); });
          break;
        case OpCode::Sub:
          binary(i, ins, [](double p, double q) { return p - q; }, [](Reg p, Reg q) { return V::sub(p, q); });
          break;
        case OpCode::Mul:
          binary(i, ins, [](double p, double q) { return p * q; }, [](Reg p, Reg q) { return V::mul(p, q); });
          break;
        case OpCode::Div:
          binary(
              i, ins,
              [&](double p, double q) {
                zero_divisor = V::zero_mask(zero_divisor, V::set1(q));
                return p / q;
              },
              [&](Reg p, Reg q) {
                zero_divisor = V::zero_mask(zero_divisor, q);
                return V::div(p, q);
              });
          break;
        case OpCode::Neg:
          uniform[i] = uniform[ins.a];
          if (uniform[i]) {
            dst[0] = -a[0];
          } else {
            for (std::size_t k = 0; k < padded; k += L) V::store(dst + k, V::neg(V::load(a + k)));
          }
          break;
        case OpCode::Pow:
          uniform[i] = uniform[ins.a];
          if (uniform[i]) {
            dst[0] = detail::ipow(a[0], ins.exponent, 1.0, [](double p, double q) { return p * q; });
          } else {
            const Reg one = V::set1(1.0);
            for (std::size_t k = 0; k < padded; k += L) {
              V::store(dst + k,
                       detail::ipow(V::load(a + k), ins.exponent, one, [](Reg p, Reg q) { return V::mul(p, q); }));
            }
          }
          break;
      }
    }
    const double* result = r + last * kBlock;
    if (uniform[last]) {
      for (std::size_t k = 0; k < m; ++k) out[base + k] = result[0];
    } else {
      std::memcpy(out + base, result, m * sizeof(double));
    }
  }
  return !V::any(zero_divisor);
}

}  // namespace batik::kernels
