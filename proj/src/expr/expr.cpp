#include "batik/expr.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "batik/detail/ipow.hpp"

namespace batik {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  Axis axis = Axis::X;
  unsigned exponent = 0;
  std::string name;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

bool valid_parameter_name(std::string_view name) {
  return name.size() == 1 && name[0] >= 'a' && name[0] <= 'z' && name[0] != 'x' && name[0] != 'y' &&
         name[0] != 'z';
}

}  // namespace

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("constant must be finite");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Axis axis) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->axis = axis;
  return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
  if (!valid_parameter_name(name)) {
    throw std::invalid_argument("parameter name must be a single letter other than x, y, z: '" + name + "'");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Parameter;
  n->name = std::move(name);
  return Expr(std::move(n));
}

#define BATIK_BINARY_CTOR(fn, K)                 \
  Expr Expr::fn(Expr lhs, Expr rhs) {            \
    auto n = std::make_shared<Node>();           \
    n->kind = Kind::K;                           \
    n->lhs = std::move(lhs.node_);               \
    n->rhs = std::move(rhs.node_);               \
    return Expr(std::move(n));                   \
  }
BATIK_BINARY_CTOR(add, Add)
BATIK_BINARY_CTOR(sub, Sub)
BATIK_BINARY_CTOR(mul, Mul)
BATIK_BINARY_CTOR(div, Div)
#undef BATIK_BINARY_CTOR

Expr Expr::neg(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Neg;
  n->lhs = std::move(operand.node_);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, unsigned exponent) {
  if (exponent > kMaxExponent) {
    throw std::invalid_argument("exponent " + std::to_string(exponent) + " exceeds " +
                                std::to_string(kMaxExponent));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->exponent = exponent;
  n->lhs = std::move(base.node_);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

double Expr::value() const {
  if (kind() != Kind::Constant) throw std::logic_error("value() on a non-constant node");
  return node_->value;
}

Axis Expr::axis() const {
  if (kind() != Kind::Variable) throw std::logic_error("axis() on a non-variable node");
  return node_->axis;
}

const std::string& Expr::name() const {
  if (kind() != Kind::Parameter) throw std::logic_error("name() on a non-parameter node");
  return node_->name;
}

unsigned Expr::exponent() const {
  if (kind() != Kind::Pow) throw std::logic_error("exponent() on a non-power node");
  return node_->exponent;
}

Expr Expr::lhs() const {
  if (!node_->lhs) throw std::logic_error("lhs() on a leaf node");
  return Expr(node_->lhs);
}

Expr Expr::rhs() const {
  if (!node_->rhs) throw std::logic_error("rhs() on a node without a right operand");
  return Expr(node_->rhs);
}

bool Expr::is_binary() const noexcept {
  switch (kind()) {
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div:
      return true;
    default:
      return false;
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Constant:
      return x.value == y.value;
    case Expr::Kind::Variable:
      return x.axis == y.axis;
    case Expr::Kind::Parameter:
      return x.name == y.name;
    case Expr::Kind::Neg:
      return a.lhs() == b.lhs();
    case Expr::Kind::Pow:
      return x.exponent == y.exponent && a.lhs() == b.lhs();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

namespace {

double lookup(const ParamBinding& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw EvalError("unbound parameter '" + name + "'");
  return it->second;
}

double coordinate(const Point3& p, Axis axis) {
  switch (axis) {
    case Axis::X:
      return p.x;
    case Axis::Y:
      return p.y;
    case Axis::Z:
      break;
  }
  return p.z;
}

double eval_node(const Expr& e, const Point3& p, const ParamBinding& params) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      return e.value();
    case K::Variable:
      return coordinate(p, e.axis());
    case K::Parameter:
      return lookup(params, e.name());
    case K::Add:
      return eval_node(e.lhs(), p, params) + eval_node(e.rhs(), p, params);
    case K::Sub:
      return eval_node(e.lhs(), p, params) - eval_node(e.rhs(), p, params);
    case K::Mul:
      return eval_node(e.lhs(), p, params) * eval_node(e.rhs(), p, params);
    case K::Div: {
      const double num = eval_node(e.lhs(), p, params);
      const double den = eval_node(e.rhs(), p, params);
      if (den == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case K::Neg:
      return -eval_node(e.lhs(), p, params);
    case K::Pow:
      return detail::ipow(eval_node(e.lhs(), p, params), e.exponent());
  }
  throw std::logic_error("unknown node kind");
}

struct Dual {
  double v;
  double dx, dy, dz;
};

// Derivative formulas here are mirrored in Program::evaluate_with_gradient.
Dual diff_node(const Expr& e, const Point3& p, const ParamBinding& params) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
      return {e.value(), 0.0, 0.0, 0.0};
    case K::Parameter:
      return {lookup(params, e.name()), 0.0, 0.0, 0.0};
    case K::Variable:
      switch (e.axis()) {
        case Axis::X:
          return {p.x, 1.0, 0.0, 0.0};
        case Axis::Y:
          return {p.y, 0.0, 1.0, 0.0};
        case Axis::Z:
          return {p.z, 0.0, 0.0, 1.0};
      }
      break;
    case K::Add: {
      const Dual a = diff_node(e.lhs(), p, params);
      const Dual b = diff_node(e.rhs(), p, params);
      return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dz + b.dz};
    }
    case K::Sub: {
      const Dual a = diff_node(e.lhs(), p, params);
      const Dual b = diff_node(e.rhs(), p, params);
      return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dz - b.dz};
    }
    case K::Mul: {
      const Dual a = diff_node(e.lhs(), p, params);
      const Dual b = diff_node(e.rhs(), p, params);
      return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy, a.dz * b.v + a.v * b.dz};
    }
    case K::Div: {
      const Dual a = diff_node(e.lhs(), p, params);
      const Dual b = diff_node(e.rhs(), p, params);
      if (b.v == 0.0) throw EvalError("division by zero");
      const double den = b.v * b.v;
      return {a.v / b.v, (a.dx * b.v - a.v * b.dx) / den, (a.dy * b.v - a.v * b.dy) / den,
              (a.dz * b.v - a.v * b.dz) / den};
    }
    case K::Neg: {
      const Dual a = diff_node(e.lhs(), p, params);
      return {-a.v, -a.dx, -a.dy, -a.dz};
    }
    case K::Pow: {
      const Dual a = diff_node(e.lhs(), p, params);
      const unsigned n = e.exponent();
      if (n == 0) return {1.0, 0.0, 0.0, 0.0};
      const double scale = static_cast<double>(n) * detail::ipow(a.v, n - 1);
      return {detail::ipow(a.v, n), scale * a.dx, scale * a.dy, scale * a.dz};
    }
  }
  throw std::logic_error("unknown node kind");
}

void collect_parameters(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::Parameter:
      out.insert(e.name());
      return;
    case Expr::Kind::Constant:
    case Expr::Kind::Variable:
      return;
    case Expr::Kind::Neg:
    case Expr::Kind::Pow:
      collect_parameters(e.lhs(), out);
      return;
    default:
      collect_parameters(e.lhs(), out);
      collect_parameters(e.rhs(), out);
  }
}

Expr substitute_variables(const Expr& e, double k) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Constant:
    case K::Parameter:
      return e;
    case K::Variable:
      return Expr::div(e, Expr::constant(k));
    case K::Neg:
      return Expr::neg(substitute_variables(e.lhs(), k));
    case K::Pow:
      return Expr::power(substitute_variables(e.lhs(), k), e.exponent());
    case K::Add:
      return Expr::add(substitute_variables(e.lhs(), k), substitute_variables(e.rhs(), k));
    case K::Sub:
      return Expr::sub(substitute_variables(e.lhs(), k), substitute_variables(e.rhs(), k));
    case K::Mul:
      return Expr::mul(substitute_variables(e.lhs(), k), substitute_variables(e.rhs(), k));
    case K::Div:
      return Expr::div(substitute_variables(e.lhs(), k), substitute_variables(e.rhs(), k));
  }
  throw std::logic_error("unknown node kind");
}

}  // namespace

double evaluate(const Expr& expr, const Point3& p, const ParamBinding& params) {
  return eval_node(expr, p, params);
}

ValueGradient evaluate_with_gradient(const Expr& expr, const Point3& p, const ParamBinding& params) {
  const Dual d = diff_node(expr, p, params);
  return {d.v, {d.dx, d.dy, d.dz}};
}

Vec3 gradient(const Expr& expr, const Point3& p, const ParamBinding& params) {
  return evaluate_with_gradient(expr, p, params).grad;
}

std::optional<unsigned> degree(const Expr& expr) {
  using K = Expr::Kind;
  switch (expr.kind()) {
    case K::Constant:
    case K::Parameter:
      return 0u;
    case K::Variable:
      return 1u;
    case K::Neg:
      return degree(expr.lhs());
    case K::Pow: {
      auto base = degree(expr.lhs());
      if (!base) return std::nullopt;
      return *base * expr.exponent();
    }
    case K::Add:
    case K::Sub: {
      auto a = degree(expr.lhs());
      auto b = degree(expr.rhs());
      if (!a || !b) return std::nullopt;
      return std::max(*a, *b);
    }
    case K::Mul: {
      auto a = degree(expr.lhs());
      auto b = degree(expr.rhs());
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case K::Div: {
      auto a = degree(expr.lhs());
      auto b = degree(expr.rhs());
      if (!a || !b || *b != 0) return std::nullopt;
      return *a;
    }
  }
  return std::nullopt;
}

std::vector<std::string> free_parameters(const Expr& expr) {
  std::set<std::string> names;
  collect_parameters(expr, names);
  return {names.begin(), names.end()};
}

Expr product(std::span<const Expr> factors) {
  if (factors.empty()) throw std::invalid_argument("product of an empty list");
  Expr result = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) result = Expr::mul(result, factors[i]);
  return result;
}

Expr scale_substitute(const Expr& expr, double k) {
  if (k == 0.0 || !std::isfinite(k)) throw std::invalid_argument("scale factor must be finite and non-zero");
  return substitute_variables(expr, k);
}

Expr intersect_sos(const Expr& f, const Expr& g, std::string_view param_name, double epsilon_scale) {
  if (!(epsilon_scale >= 0.0) || !std::isfinite(epsilon_scale)) {
    throw std::invalid_argument("epsilon_scale must be finite and non-negative");
  }
  Expr squares = Expr::add(Expr::power(f, 2), Expr::power(g, 2));
  Expr slack = Expr::mul(Expr::constant(epsilon_scale), Expr::parameter(std::string(param_name)));
  return Expr::sub(std::move(squares), std::move(slack));
}

std::size_t tree_size(const Expr& expr) {
  switch (expr.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Variable:
    case Expr::Kind::Parameter:
      return 1;
    case Expr::Kind::Neg:
    case Expr::Kind::Pow:
      return 1 + tree_size(expr.lhs());
    default:
      return 1 + tree_size(expr.lhs()) + tree_size(expr.rhs());
  }
}

}  // namespace batik
