#pragma once

// Random equation trees for property tests.

#include <random>

#include "batik/expr.hpp"

namespace batik::testing {

struct RandomExprOptions {
  int max_depth = 8;
  bool allow_division = true;
  bool allow_parameters = true;
  unsigned max_exponent = 5;
};

class RandomExpr {
 public:
  explicit RandomExpr(std::uint64_t seed, RandomExprOptions options = {}) : rng_(seed), opt_(options) {}

  Expr operator()() { return node(opt_.max_depth); }

  std::mt19937_64& rng() { return rng_; }

 private:
  double pick_constant() {
    switch (std::uniform_int_distribution<int>(0, 4)(rng_)) {
      case 0:
        return static_cast<double>(std::uniform_int_distribution<int>(0, 100)(rng_));
      case 1:
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
      case 2:
        return -std::uniform_real_distribution<double>(0.0, 50.0)(rng_);
      case 3:
        return std::uniform_real_distribution<double>(1e-6, 1e-3)(rng_);
      default:
        return -static_cast<double>(std::uniform_int_distribution<int>(0, 9)(rng_));
    }
  }

  Expr leaf() {
    const int choice = std::uniform_int_distribution<int>(0, opt_.allow_parameters ? 5 : 4)(rng_);
    switch (choice) {
      case 0:
      case 1:
        return Expr::constant(pick_constant());
      case 2:
        return Expr::variable(Axis::X);
      case 3:
        return Expr::variable(Axis::Y);
      case 4:
        return Expr::variable(Axis::Z);
      default: {
        static constexpr char kNames[] = "abcdk";
        return Expr::parameter(std::string(1, kNames[std::uniform_int_distribution<int>(0, 4)(rng_)]));
      }
    }
  }

  Expr node(int depth) {
    if (depth <= 1 || std::uniform_int_distribution<int>(0, 9)(rng_) < 3) return leaf();
    const int ops = opt_.allow_division ? 7 : 6;
    switch (std::uniform_int_distribution<int>(0, ops - 1)(rng_)) {
      case 0:
        return Expr::add(node(depth - 1), node(depth - 1));
      case 1:
        return Expr::sub(node(depth - 1), node(depth - 1));
      case 2:
        return Expr::mul(node(depth - 1), node(depth - 1));
      case 3:
        return Expr::neg(node(depth - 1));
      case 4:
      case 5:
        return Expr::power(node(depth - 1), std::uniform_int_distribution<unsigned>(0, opt_.max_exponent)(rng_));
      default:
        return Expr::div(node(depth - 1), node(depth - 1));
    }
  }

  std::mt19937_64 rng_;
  RandomExprOptions opt_;
};

}  // namespace batik::testing
