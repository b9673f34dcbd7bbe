#include <array>
#include <charconv>
#include <cmath>

#include "batik/expr.hpp"

namespace batik {
namespace {

// Binding strength, loosest first.
enum Precedence { kAdditive = 1, kMultiplicative = 2, kUnary = 3, kPower = 4, kAtom = 5 };

Precedence precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return kAdditive;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return kMultiplicative;
    case Expr::Kind::Neg:
      return kUnary;
    case Expr::Kind::Pow:
      return kPower;
    case Expr::Kind::Constant:
      // "-2" re-parses as a negative literal only outside a power base.
      return e.value() < 0.0 || std::signbit(e.value()) ? kUnary : kAtom;
    default:
      return kAtom;
  }
}

std::string format_number(double v) {
  std::array<char, 400> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  return std::string(buf.data(), res.ptr);
}

std::string wrap(std::string s) { return "(" + s + ")"; }

std::string print_node(const Expr& e);

std::string print_operand(const Expr& child, Precedence min_prec, bool right_side) {
  std::string s = print_node(child);
  const Precedence p = precedence(child);
  // Same-precedence right operands need parentheses to keep left association.
  if (p < min_prec || (right_side && p == min_prec)) return wrap(std::move(s));
  if (right_side && !s.empty() && s.front() == '-') return wrap(std::move(s));
  return s;
}

std::string print_node(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      return format_number(e.value());
    case K::Variable:
      switch (e.axis()) {
        case Axis::X:
          return "x";
        case Axis::Y:
          return "y";
        case Axis::Z:
          return "z";
      }
      break;
    case K::Parameter:
      return e.name();
    case K::Add:
      return print_operand(e.lhs(), kAdditive, false) + "+" + print_operand(e.rhs(), kAdditive, true);
    case K::Sub:
      return print_operand(e.lhs(), kAdditive, false) + "-" + print_operand(e.rhs(), kAdditive, true);
    case K::Mul:
      return print_operand(e.lhs(), kMultiplicative, false) + "*" +
             print_operand(e.rhs(), kMultiplicative, true);
    case K::Div:
      return print_operand(e.lhs(), kMultiplicative, false) + "/" +
             print_operand(e.rhs(), kMultiplicative, true);
    case K::Neg: {
      const Expr operand = e.lhs();
      std::string s = print_node(operand);
      // "-2" would fold into a literal and "-a*b" would bind as (-a)*b.
      if (operand.kind() == K::Constant || precedence(operand) < kUnary) s = wrap(std::move(s));
      return "-" + s;
    }
    case K::Pow: {
      const Expr base = e.lhs();
      std::string s = print_node(base);
      if (precedence(base) < kAtom) s = wrap(std::move(s));
      return s + "^" + std::to_string(e.exponent());
    }
  }
  return {};
}

}  // namespace

std::string print(const Expr& expr) { return print_node(expr); }

}  // namespace batik
