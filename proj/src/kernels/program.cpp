#include "batik/program.hpp"

#include <stdexcept>
#include <unordered_map>

#include "batik/detail/ipow.hpp"

namespace batik {
namespace {

class Compiler {
 public:
  explicit Compiler(const ParamBinding& params) : params_(params) {}

  std::uint32_t emit(const Expr& e) {
    if (auto it = seen_.find(e.identity()); it != seen_.end()) return it->second;
    const std::uint32_t reg = lower(e);
    seen_.emplace(e.identity(), reg);
    return reg;
  }

  std::vector<Instruction> take() { return std::move(code_); }

 private:
  std::uint32_t push(Instruction ins) {
    code_.push_back(ins);
    return static_cast<std::uint32_t>(code_.size() - 1);
  }

  std::uint32_t constant(double v) { return push({OpCode::Const, 0, 0, 0, v}); }

  bool is_const(std::uint32_t reg) const { return code_[reg].op == OpCode::Const; }
  double const_value(std::uint32_t reg) const { return code_[reg].value; }

  std::uint32_t lower(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind()) {
      case K::Constant:
        return constant(e.value());
      case K::Parameter: {
        auto it = params_.find(e.name());
        if (it == params_.end()) throw EvalError("unbound parameter '" + e.name() + "'");
        return constant(it->second);
      }
      case K::Variable:
        switch (e.axis()) {
          case Axis::X:
            return push({OpCode::X});
          case Axis::Y:
            return push({OpCode::Y});
          case Axis::Z:
            return push({OpCode::Z});
        }
        break;
      case K::Neg: {
        const std::uint32_t a = emit(e.lhs());
        if (is_const(a)) return constant(-const_value(a));
        return push({OpCode::Neg, a});
      }
      case K::Pow: {
        const std::uint32_t a = emit(e.lhs());
        if (is_const(a)) return constant(detail::ipow(const_value(a), e.exponent()));
        return push({OpCode::Pow, a, 0, e.exponent()});
      }
      case K::Add:
      case K::Sub:
      case K::Mul:
      case K::Div: {
        const std::uint32_t a = emit(e.lhs());
        const std::uint32_t b = emit(e.rhs());
        // Folding performs the same IEEE operation the kernels would, so the
        // result is bit-identical. A zero divisor is left for the kernels to report.
        if (is_const(a) && is_const(b)) {
          const double x = const_value(a);
          const double y = const_value(b);
          switch (e.kind()) {
            case K::Add:
              return constant(x + y);
            case K::Sub:
              return constant(x - y);
            case K::Mul:
              return constant(x * y);
            default:
              if (y != 0.0) return constant(x / y);
          }
        }
        const OpCode op = e.kind() == K::Add   ? OpCode::Add
                          : e.kind() == K::Sub ? OpCode::Sub
                          : e.kind() == K::Mul ? OpCode::Mul
                                               : OpCode::Div;
        return push({op, a, b});
      }
    }
    throw std::logic_error("unknown node kind");
  }

  const ParamBinding& params_;
  std::vector<Instruction> code_;
  std::unordered_map<const void*, std::uint32_t> seen_;
};

}  // namespace

Program Program::compile(const Expr& expr, const ParamBinding& params) {
  Compiler c(params);
  const std::uint32_t result = c.emit(expr);
  std::vector<Instruction> code = c.take();

  // Drop instructions the result does not depend on (operands of folded constants).
  std::vector<bool> live(code.size(), false);
  live[result] = true;
  for (std::size_t i = result + 1; i-- > 0;) {
    if (!live[i]) continue;
    const Instruction& ins = code[i];
    switch (ins.op) {
      case OpCode::Add:
      case OpCode::Sub:
      case OpCode::Mul:
      case OpCode::Div:
        live[ins.b] = true;
        [[fallthrough]];
      case OpCode::Neg:
      case OpCode::Pow:
        live[ins.a] = true;
        break;
      default:
        break;
    }
  }
  std::vector<std::uint32_t> remap(code.size(), 0);
  Program program;
  for (std::size_t i = 0; i <= result; ++i) {
    if (!live[i]) continue;
    Instruction ins = code[i];
    ins.a = remap[ins.a];
    ins.b = remap[ins.b];
    remap[i] = static_cast<std::uint32_t>(program.code_.size());
    program.code_.push_back(ins);
  }
  // The kernels read the result from the last register, which is `result` here.
  return program;
}

double Program::evaluate(const Point3& p) const {
  std::vector<double> r(code_.size());
  return evaluate(p, r);
}

double Program::evaluate(const Point3& p, std::span<double> r) const {
  if (r.size() < code_.size()) throw std::invalid_argument("register buffer too small");
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instruction& ins = code_[i];
    switch (ins.op) {
      case OpCode::Const:
        r[i] = ins.value;
        break;
      case OpCode::X:
        r[i] = p.x;
        break;
      case OpCode::Y:
        r[i] = p.y;
        break;
      case OpCode::Z:
        r[i] = p.z;
        break;
      case OpCode::Add:
        r[i] = r[ins.a] + r[ins.b];
        break;
      case OpCode::Sub:
        r[i] = r[ins.a] - r[ins.b];
        break;
      case OpCode::Mul:
        r[i] = r[ins.a] * r[ins.b];
        break;
      case OpCode::Div:
        if (r[ins.b] == 0.0) throw EvalError("division by zero");
        r[i] = r[ins.a] / r[ins.b];
        break;
      case OpCode::Neg:
        r[i] = -r[ins.a];
        break;
      case OpCode::Pow:
        r[i] = detail::ipow(r[ins.a], ins.exponent);
        break;
    }
  }
  return r[code_.size() - 1];
}

ValueGradient Program::evaluate_with_gradient(const Point3& p) const {
  struct Dual {
    double v, dx, dy, dz;
  };
  std::vector<Dual> r(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instruction& ins = code_[i];
    switch (ins.op) {
      case OpCode::Const:
        r[i] = {ins.value, 0.0, 0.0, 0.0};
        break;
      case OpCode::X:
        r[i] = {p.x, 1.0, 0.0, 0.0};
        break;
      case OpCode::Y:
        r[i] = {p.y, 0.0, 1.0, 0.0};
        break;
      case OpCode::Z:
        r[i] = {p.z, 0.0, 0.0, 1.0};
        break;
      case OpCode::Add: {
        const Dual a = r[ins.a], b = r[ins.b];
        r[i] = {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dz + b.dz};
        break;
      }
      case OpCode::Sub: {
        const Dual a = r[ins.a], b = r[ins.b];
        r[i] = {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dz - b.dz};
        break;
      }
      case OpCode::Mul: {
        const Dual a = r[ins.a], b = r[ins.b];
        r[i] = {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy, a.dz * b.v + a.v * b.dz};
        break;
      }
      case OpCode::Div: {
        const Dual a = r[ins.a], b = r[ins.b];
        if (b.v == 0.0) throw EvalError("division by zero");
        const double den = b.v * b.v;
        r[i] = {a.v / b.v, (a.dx * b.v - a.v * b.dx) / den, (a.dy * b.v - a.v * b.dy) / den,
                (a.dz * b.v - a.v * b.dz) / den};
        break;
      }
      case OpCode::Neg: {
        const Dual a = r[ins.a];
        r[i] = {-a.v, -a.dx, -a.dy, -a.dz};
        break;
      }
      case OpCode::Pow: {
        const Dual a = r[ins.a];
        const unsigned n = ins.exponent;
        if (n == 0) {
          r[i] = {1.0, 0.0, 0.0, 0.0};
          break;
        }
        const double scale = static_cast<double>(n) * detail::ipow(a.v, n - 1);
        r[i] = {detail::ipow(a.v, n), scale * a.dx, scale * a.dy, scale * a.dz};
        break;
      }
    }
  }
  const Dual& out = r.back();
  return {out.v, {out.dx, out.dy, out.dz}};
}

}  // namespace batik
