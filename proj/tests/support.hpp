#pragma once

// Shared fixtures: the three reference systems and a random expression-tree
// generator.

#include <cstdint>
#include <string>

#include "plv/plv.hpp"

namespace plv::fixtures {

inline const Rect kLiouvilleBox{{-2.0, 2.0}, {-1.0, 0.8}};
inline const Rect kComplexBox{{-2.0, 2.0}, {-1.0, 1.0}};
inline const Rect kJordanBox{{-0.9, 0.9}, {0.5, 2.5}};

/// X = 2 + sin x, Y = e^y - 3, Xhat = x, Yhat = y.
inline NaturalSystem liouville_system(const Rect& box = kLiouvilleBox) {
  return make_liouville(FunctionProfile::parse("2 + sin(x)", "x", box.x), FunctionProfile::parse("exp(y) - 3", "y", box.y),
                        FunctionProfile::parse("x", "x", box.x), FunctionProfile::parse("y", "y", box.y));
}

/// h = i (2 + cos z), h1 = z. Im h > 0 needs |y| < acosh(2) ~ 1.317.
inline NaturalSystem complex_system(const Rect& box = kComplexBox) {
  return make_complex_liouville(HolomorphicProfile::parse("i*(2 + cos(z))", box), HolomorphicProfile::parse("z", box));
}

/// Y = sin y, Y1 = y, Y2 = 1; 1 + x Y' > 0 needs |x| < 1.
inline NaturalSystem jordan_system(const Rect& box = kJordanBox, JordanForm form = JordanForm::Standard) {
  return make_jordan_block(FunctionProfile::parse("sin(y)", "y", box.y), FunctionProfile::parse("y", "y", box.y),
                           FunctionProfile::parse("1", "y", box.y), box.x, form);
}

/// Random trees of bounded depth over one variable.
class TreeGenerator {
 public:
  TreeGenerator(std::uint64_t seed, Field field) : rng_(seed), field_(field) {}

  NodePtr operator()(int depth) { return make(depth, false); }

 private:
  NodePtr leaf(bool exponent) {
    const double u = rng_.unit();
    if (!exponent && u < 0.45) return Expr::variable_node();
    if (!exponent && field_ == Field::Complex && u < 0.55) return Expr::imaginary_unit();
    if (u < 0.75) return Expr::number(static_cast<double>(rng_.bits() % 10));
    return Expr::number(rng_.in(0.0, 100.0));
  }

  // Exponents are real constants: no variable and no imaginary unit.
  NodePtr make(int depth, bool exponent) {
    if (depth <= 0 || rng_.unit() < 0.25) return leaf(exponent);
    switch (rng_.bits() % 8) {
      case 0:
        return Expr::neg(make(depth - 1, exponent));
      case 1:
        return Expr::binary(NodeKind::Add, make(depth - 1, exponent), make(depth - 1, exponent));
      case 2:
        return Expr::binary(NodeKind::Sub, make(depth - 1, exponent), make(depth - 1, exponent));
      case 3:
        return Expr::binary(NodeKind::Mul, make(depth - 1, exponent), make(depth - 1, exponent));
      case 4:
        return Expr::binary(NodeKind::Div, make(depth - 1, exponent), make(depth - 1, exponent));
      case 5:
        return Expr::binary(NodeKind::Pow, make(depth - 1, exponent), make(depth - 1, true));
      default:
        return Expr::call(static_cast<Func>(rng_.bits() % 8), make(depth - 1, exponent));
    }
  }

  UniformSource rng_;
  Field field_;
};

/// Central second-order difference of f at t.
template <class F>
double central_difference(const F& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

}  // namespace plv::fixtures
