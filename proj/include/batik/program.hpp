#pragma once

// Straight-line form of an Expr with its parameters bound, the thing the
// evaluation kernels in batik/kernels.hpp actually run.

#include <cstdint>
#include <span>
#include <vector>

#include "batik/expr.hpp"

namespace batik {

enum class OpCode : std::uint8_t { Const, X, Y, Z, Add, Sub, Mul, Div, Neg, Pow };

/// One SSA step; the result of instruction i lives in register i.
struct Instruction {
  OpCode op = OpCode::Const;
  std::uint32_t a = 0;  // operand register (Add..Pow)
  std::uint32_t b = 0;  // second operand register (Add..Div)
  std::uint32_t exponent = 0;
  double value = 0.0;   // Const
};

class Program {
 public:
  /// Binds `params`, folds parameter-only subtrees, and merges shared nodes.
  /// Throws EvalError for an unbound parameter.
  static Program compile(const Expr& expr, const ParamBinding& params);

  std::span<const Instruction> code() const noexcept { return code_; }
  std::size_t register_count() const noexcept { return code_.size(); }

  /// Single point. Throws EvalError on division by zero.
  double evaluate(const Point3& p) const;
  /// As above, using `registers` (at least register_count() long) as storage.
  double evaluate(const Point3& p, std::span<double> registers) const;
  /// Value plus (df/dx, df/dy, df/dz). Throws EvalError on division by zero.
  ValueGradient evaluate_with_gradient(const Point3& p) const;

 private:
  std::vector<Instruction> code_;
};

}  // namespace batik
