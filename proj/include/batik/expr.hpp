#pragma once

// Implicit equations in x, y, z with free single-letter parameters.
//
// An Expr is an immutable tree; copies share structure and are safe to hand
// to any number of render threads. The zero set {p : f(p) = 0} is the surface.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "batik/geometry.hpp"

namespace batik {

enum class Axis : std::uint8_t { X, Y, Z };

/// Values for the free parameters of an equation, keyed by name ("a", "b", ...).
using ParamBinding = std::map<std::string, double, std::less<>>;

/// Largest exponent accepted by the parser and by Expr::power.
inline constexpr unsigned kMaxExponent = 64;
/// Longest equation text the parser accepts, in bytes.
inline constexpr std::size_t kMaxEquationLength = 16384;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : std::runtime_error(message), offset_(offset) {}

  /// Byte offset into the input where the problem was detected.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised for unbound parameters and division by zero.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Expr {
 public:
  enum class Kind : std::uint8_t { Constant, Variable, Parameter, Add, Sub, Mul, Div, Neg, Pow };

  static Expr constant(double value);
  static Expr variable(Axis axis);
  /// `name` must be a single lowercase letter other than x, y, z.
  static Expr parameter(std::string name);
  static Expr add(Expr lhs, Expr rhs);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(Expr lhs, Expr rhs);
  static Expr div(Expr lhs, Expr rhs);
  static Expr neg(Expr operand);
  static Expr power(Expr base, unsigned exponent);

  Kind kind() const noexcept;
  double value() const;               // Constant
  Axis axis() const;                  // Variable
  const std::string& name() const;    // Parameter
  unsigned exponent() const;          // Pow
  Expr lhs() const;                   // binary lhs, Neg operand, Pow base
  Expr rhs() const;                   // binary rhs

  bool is_binary() const noexcept;

  /// Address of the shared node; equal for copies of the same tree.
  const void* identity() const noexcept { return node_.get(); }

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

  friend Expr operator+(Expr a, Expr b) { return add(std::move(a), std::move(b)); }
  friend Expr operator-(Expr a, Expr b) { return sub(std::move(a), std::move(b)); }
  friend Expr operator*(Expr a, Expr b) { return mul(std::move(a), std::move(b)); }
  friend Expr operator/(Expr a, Expr b) { return div(std::move(a), std::move(b)); }
  friend Expr operator-(Expr a) { return neg(std::move(a)); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const Node& node() const noexcept { return *node_; }

  std::shared_ptr<const Node> node_;
};

/// Parses Surfer-style equation text. Grammar: docs/equation-grammar.ebnf.
Expr parse(std::string_view text);

/// Minimal-parenthesis text form; parse(print(e)) == e. Never emits "=0".
std::string print(const Expr& expr);

double evaluate(const Expr& expr, const Point3& p, const ParamBinding& params);

/// Partial derivatives (df/dx, df/dy, df/dz) by forward-mode differentiation.
Vec3 gradient(const Expr& expr, const Point3& p, const ParamBinding& params);

/// Value and gradient in one pass.
struct ValueGradient {
  double value = 0.0;
  Vec3 grad;
};
ValueGradient evaluate_with_gradient(const Expr& expr, const Point3& p, const ParamBinding& params);

/// Total degree in x, y, z with parameters treated as constants, or nullopt when
/// the expression divides by something that depends on x, y or z.
///
/// Computed structurally (max over sums, sum over products), so it is an upper
/// bound that is exact unless leading terms cancel, e.g. "x^2-x^2" reports 2.
std::optional<unsigned> degree(const Expr& expr);

/// Sorted, de-duplicated parameter names used by `expr`.
std::vector<std::string> free_parameters(const Expr& expr);

/// Left-folded multiply chain f1*f2*...; the union of the factors' zero sets.
/// Throws std::invalid_argument on an empty list.
Expr product(std::span<const Expr> factors);

/// Replaces every variable v by v/k, dilating the zero set by k.
/// Throws std::invalid_argument when k is zero or not finite.
Expr scale_substitute(const Expr& expr, double k);

/// f^2 + g^2 - epsilon_scale*param: a thin solid around the curve f = g = 0.
/// Throws std::invalid_argument when epsilon_scale is negative.
Expr intersect_sos(const Expr& f, const Expr& g, std::string_view param_name, double epsilon_scale);

/// Number of nodes counted as a tree (shared subtrees counted each time).
std::size_t tree_size(const Expr& expr);

}  // namespace batik
