#include <cctype>
#include <charconv>
#include <cmath>

#include "batik/expr.hpp"

namespace batik {
namespace {

constexpr int kMaxNesting = 256;

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : src_(text) {}

  Expr parse_equation() {
    if (src_.size() > kMaxEquationLength) {
      throw ParseError(kMaxEquationLength, "equation longer than " + std::to_string(kMaxEquationLength) + " bytes");
    }
    skip_space();
    if (at_end()) throw ParseError(0, "empty equation");
    Expr e = parse_expression();
    skip_space();
    if (!at_end() && peek() == '=') {
      ++pos_;
      skip_space();
      if (at_end() || !(is_digit(peek()) || peek() == '.')) throw ParseError(pos_, "expected 0 after '='");
      const std::size_t at = pos_;
      if (lex_number() != 0.0) throw ParseError(at, "only '=0' is supported on the right-hand side");
      skip_space();
      if (!at_end()) throw ParseError(pos_, "unexpected input after '=0'");
      return e;
    }
    if (!at_end()) {
      if (peek() == ')') throw ParseError(pos_, "unbalanced ')'");
      throw ParseError(pos_, std::string("unexpected '") + peek() + "'");
    }
    return e;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  // Position of the last consumed non-space character.
  char last_consumed() const {
    std::size_t i = pos_;
    while (i > 0 && std::isspace(static_cast<unsigned char>(src_[i - 1]))) --i;
    return i == 0 ? '\0' : src_[i - 1];
  }

  Expr parse_expression() {
    Expr lhs = parse_term();
    for (;;) {
      skip_space();
      if (at_end()) return lhs;
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      Expr rhs = parse_term();
      lhs = c == '+' ? Expr::add(std::move(lhs), std::move(rhs)) : Expr::sub(std::move(lhs), std::move(rhs));
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      const bool after_paren = last_consumed() == ')';
      skip_space();
      if (at_end()) return lhs;
      const char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        Expr rhs = parse_unary();
        lhs = c == '*' ? Expr::mul(std::move(lhs), std::move(rhs)) : Expr::div(std::move(lhs), std::move(rhs));
      } else if (after_paren && (c == '(' || is_letter(c))) {
        // "(x-y)(x+y)" and "(x+y)x": implicit multiplication after ')'.
        Expr rhs = parse_power();
        lhs = Expr::mul(std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    skip_space();
    if (!at_end() && peek() == '-') {
      ++pos_;
      skip_space();
      // A literal directly after '-' becomes a negative constant unless '^' follows,
      // since '^' binds tighter than negation.
      if (!at_end() && (is_digit(peek()) || peek() == '.')) {
        const std::size_t mark = pos_;
        const double v = lex_number();
        skip_space();
        if (at_end() || peek() != '^') return Expr::constant(-v);
        pos_ = mark;
      }
      return Expr::neg(parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    for (;;) {
      skip_space();
      if (at_end() || peek() != '^') return base;
      ++pos_;
      base = Expr::power(std::move(base), parse_exponent());
    }
  }

  unsigned parse_exponent() {
    skip_space();
    bool parenthesized = false;
    if (!at_end() && peek() == '(') {
      parenthesized = true;
      ++pos_;
      skip_space();
    }
    const std::size_t at = pos_;
    if (!at_end() && peek() == '-') throw ParseError(at, "negative exponent");
    if (at_end() || !(is_digit(peek()) || peek() == '.')) {
      throw ParseError(at, "exponent must be a non-negative integer literal");
    }
    const double v = lex_number();
    if (v != std::floor(v)) throw ParseError(at, "non-integer exponent");
    if (v > kMaxExponent) throw ParseError(at, "exponent exceeds " + std::to_string(kMaxExponent));
    if (parenthesized) {
      skip_space();
      if (at_end() || peek() != ')') throw ParseError(pos_, "expected ')'");
      ++pos_;
    }
    return static_cast<unsigned>(v);
  }

  Expr parse_primary() {
    skip_space();
    if (at_end()) throw ParseError(pos_, "expected operand");
    const char c = peek();
    if (c == '(') {
      const std::size_t open = pos_;
      if (++depth_ > kMaxNesting) throw ParseError(open, "parentheses nested too deeply");
      ++pos_;
      Expr inner = parse_expression();
      skip_space();
      if (at_end()) throw ParseError(open, "unbalanced '('");
      if (peek() != ')') throw ParseError(pos_, std::string("expected ')' but found '") + peek() + "'");
      ++pos_;
      --depth_;
      return inner;
    }
    if (is_digit(c) || c == '.') return Expr::constant(lex_number());
    if (is_letter(c)) {
      const std::size_t start = pos_;
      while (!at_end() && (is_letter(peek()) || is_digit(peek()) || peek() == '_')) ++pos_;
      const std::string_view word = src_.substr(start, pos_ - start);
      if (word.size() != 1) {
        throw ParseError(start, "'" + std::string(word) + "' is not a variable or single-letter parameter");
      }
      switch (word[0]) {
        case 'x':
          return Expr::variable(Axis::X);
        case 'y':
          return Expr::variable(Axis::Y);
        case 'z':
          return Expr::variable(Axis::Z);
        default:
          break;
      }
      if (word[0] < 'a' || word[0] > 'z') {
        throw ParseError(start, "parameters are lowercase letters: '" + std::string(word) + "'");
      }
      return Expr::parameter(std::string(word));
    }
    if (c == ')') throw ParseError(pos_, "expected operand before ')'");
    if (c == '*' || c == '/' || c == '+' || c == '^' || c == '=') {
      throw ParseError(pos_, std::string("expected operand before '") + c + "'");
    }
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  double lex_number() {
    const std::size_t start = pos_;
    while (!at_end() && is_digit(peek())) ++pos_;
    if (!at_end() && peek() == '.') {
      ++pos_;
      while (!at_end() && is_digit(peek())) ++pos_;
    }
    const std::string_view digits = src_.substr(start, pos_ - start);
    if (digits == ".") throw ParseError(start, "malformed number");
    double v = 0.0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v, std::chars_format::fixed);
    if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) {
      throw ParseError(start, "malformed number");
    }
    if (!std::isfinite(v)) throw ParseError(start, "number out of range");
    return v;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_equation(); }

}  // namespace batik
