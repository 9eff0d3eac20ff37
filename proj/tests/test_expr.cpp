#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "support.hpp"

namespace {

using namespace plv;
using Complex = std::complex<double>;

TEST(Parse, ValueOfSumWithSine) {
  const auto p = FunctionProfile::parse("2+sin(x)", "x", {-1.0, 1.0});
  EXPECT_DOUBLE_EQ(p(0.0), 2.0);
}

TEST(Parse, DerivativeOfCube) {
  const auto p = FunctionProfile::parse("x^3", "x", {0.0, 3.0});
  EXPECT_DOUBLE_EQ(p.eval_jet(2.0, 1)[1], 12.0);
}

TEST(Parse, PoleIsAnEvaluationError) {
  EXPECT_THROW(FunctionProfile::parse("1/(x-1)", "x", {0.0, 2.0}), EvalError);
  const Expr e = Expr::parse("1/(x-1)", "x");
  EXPECT_THROW((void)e.evaluate<double>(1.0, 0), EvalError);
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
  struct Case {
    const char* text;
    std::size_t offset;
  };
  for (const Case c : {Case{"2+sin(", 6}, Case{"x*", 2}, Case{"(x", 2}, Case{"x)", 1}, Case{"3 $ x", 2}}) {
    try {
      (void)Expr::parse(c.text, "x");
      ADD_FAILURE() << c.text << " parsed";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.offset(), c.offset) << c.text;
    }
  }
}

TEST(Parse, RejectsForeignNamesAndVariableExponents) {
  EXPECT_THROW((void)Expr::parse("y + 1", "x"), ParseError);
  EXPECT_THROW((void)Expr::parse("foo(x)", "x"), ParseError);
  EXPECT_THROW((void)Expr::parse("x^x", "x"), ParseError);
  EXPECT_THROW((void)Expr::parse("2^sin(x)", "x"), ParseError);
  EXPECT_THROW((void)Expr::parse("i*x", "x", Field::Real), ParseError);
  EXPECT_NO_THROW((void)Expr::parse("i*z", "z", Field::Complex));
}

TEST(Parse, PrecedenceAndAssociativity) {
  const auto v = [](const char* s) { return Expr::parse(s, "x").evaluate<double>(2.0, 0).value(); };
  EXPECT_DOUBLE_EQ(v("1 - x - 3"), -4.0);
  EXPECT_DOUBLE_EQ(v("2^3^2"), 512.0);
  EXPECT_DOUBLE_EQ(v("-x^2"), -4.0);
  EXPECT_DOUBLE_EQ(v("12 / x / 3"), 2.0);
  EXPECT_DOUBLE_EQ(v("1.5e1 + x"), 17.0);
}

TEST(Jet, ExponentialAtZero) {
  const auto j = FunctionProfile::parse("exp(x)", "x", {-1.0, 1.0}).eval_jet(0.0, 2);
  ASSERT_EQ(j.size(), 3u);
  for (double v : j) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Jet, SquareAtThree) {
  const auto j = FunctionProfile::parse("x^2", "x", {0.0, 4.0}).eval_jet(3.0, 2);
  EXPECT_DOUBLE_EQ(j[0], 9.0);
  EXPECT_DOUBLE_EQ(j[1], 6.0);
  EXPECT_DOUBLE_EQ(j[2], 2.0);
}

TEST(Jet, SineMatchesCentralDifference) {
  const auto p = FunctionProfile::parse("sin(x)", "x", {0.0, 1.0});
  const double fd = fixtures::central_difference(p, 0.7, 1e-5);
  const double ad = p.eval_jet(0.7, 1)[1];
  EXPECT_LT(std::abs(ad - fd) / std::abs(ad), 1e-8);
}

TEST(Jet, ThirdDerivativesAgainstClosedForms) {
  const auto d = FunctionProfile::parse("x*exp(x) + cosh(x)", "x", {-1.0, 1.0}).derivs(0.4);
  const double e = std::exp(0.4);
  EXPECT_NEAR(d[1], e + 0.4 * e + std::sinh(0.4), 1e-14);
  EXPECT_NEAR(d[2], 2.0 * e + 0.4 * e + std::cosh(0.4), 1e-14);
  EXPECT_NEAR(d[3], 3.0 * e + 0.4 * e + std::sinh(0.4), 1e-14);
  const auto s = FunctionProfile::parse("sqrt(x)", "x", {1.0, 5.0}).derivs(4.0);
  EXPECT_NEAR(s[3], 3.0 / 8.0 * std::pow(4.0, -2.5), 1e-15);
}

TEST(Jet, DerivativesAgreeWithFiniteDifferences) {
  const char* texts[] = {"2 + sin(x)", "exp(x) - 3", "x^2 - 0.5*x", "log(x + 3)", "tan(x/3)", "sqrt(4 + x^2)",
                         "sinh(x)*cos(x)", "1/(x + 4)", "x^2.5 + 1"};
  UniformSource rng(11);
  for (const char* t : texts) {
    const auto p = FunctionProfile::parse(t, "x", {0.1, 2.0});
    for (int k = 0; k < 100; ++k) {
      const double x = rng.in(0.2, 1.9);
      const double ad = p.eval_jet(x, 1)[1];
      const double fd = fixtures::central_difference(p, x, 1e-5);
      EXPECT_LT(std::abs(ad - fd) / std::max(1.0, std::abs(ad)), 1e-6) << t << " at " << x;
    }
  }
}

TEST(Jet, OrderOutsideRangeIsRejected) {
  const auto p = FunctionProfile::parse("x", "x", {0.0, 1.0});
  EXPECT_THROW((void)p.eval_jet(0.5, 4), Error);
  EXPECT_THROW((void)p.eval_jet(2.0, 1), DomainError);
}

TEST(Holomorphic, SquareAtOnePlusI) {
  const auto h = HolomorphicProfile::parse("z^2", {{0.0, 2.0}, {0.0, 2.0}});
  const auto j = h.eval_holo(1.0, 1.0, 1);
  EXPECT_NEAR(std::abs(j[0] - Complex(0.0, 2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(j[1] - Complex(2.0, 2.0)), 0.0, 1e-15);
}

TEST(Holomorphic, ImaginaryUnitIsConstant) {
  const auto h = HolomorphicProfile::parse("i", {{-1.0, 1.0}, {-1.0, 1.0}});
  const auto d = h.derivs(0.3, -0.7);
  EXPECT_EQ(d[0], Complex(0.0, 1.0));
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(d[k], Complex(0.0));
}

// Partials of u + i v by central differences; u_x = v_y and u_y = -v_x.
double cauchy_riemann_residual(const HolomorphicProfile& h, double x, double y, double step = 1e-5) {
  const Complex dx = (h(x + step, y) - h(x - step, y)) / (2.0 * step);
  const Complex dy = (h(x, y + step) - h(x, y - step)) / (2.0 * step);
  return std::max(std::abs(dx.real() - dy.imag()), std::abs(dx.imag() + dy.real()));
}

TEST(Holomorphic, ExponentialSatisfiesCauchyRiemann) {
  const auto h = HolomorphicProfile::parse("exp(z)", {{0.0, 1.0}, {0.0, 1.0}});
  EXPECT_LT(cauchy_riemann_residual(h, 0.3, 0.4), 1e-8);
  const Complex fd = (h(0.3 + 1e-5, 0.4) - h(0.3 - 1e-5, 0.4)) / 2e-5;
  EXPECT_LT(std::abs(fd - h.eval_holo(0.3, 0.4, 1)[1]), 1e-8);
}

TEST(Holomorphic, AcceptedProfilesSatisfyCauchyRiemann) {
  const Rect box{{0.2, 1.5}, {-0.8, 0.8}};
  UniformSource rng(5);
  for (const char* t : {"i*(2 + cos(z))", "z^3 - 2*z", "log(z)", "sqrt(z + 1)", "sinh(z)/(z + 3)", "z^0.5"}) {
    const auto h = HolomorphicProfile::parse(t, box);
    for (int k = 0; k < 50; ++k) {
      const double x = rng.in(0.3, 1.4), y = rng.in(-0.7, 0.7);
      EXPECT_LT(cauchy_riemann_residual(h, x, y), 1e-8) << t;
    }
  }
}

TEST(Holomorphic, BranchCutInsideRectangleIsRejected) {
  EXPECT_THROW(HolomorphicProfile::parse("log(z)", {{-1.0, 1.0}, {-1.0, 1.0}}), Error);
  EXPECT_THROW(HolomorphicProfile::parse("sqrt(z)", {{-2.0, -1.0}, {-1.0, 1.0}}), DomainError);
  EXPECT_NO_THROW(HolomorphicProfile::parse("sqrt(z)", {{-2.0, -1.0}, {0.5, 1.0}}));
}

TEST(RoundTrip, PrintThenParseIsIdentity) {
  for (Field field : {Field::Real, Field::Complex}) {
    fixtures::TreeGenerator gen(field == Field::Real ? 101 : 202, field);
    const char* var = field == Field::Real ? "x" : "z";
    for (int k = 0; k < 1000; ++k) {
      const Expr e(gen(6), var, field);
      const std::string text = e.print();
      const Expr back = Expr::parse(text, var, field);
      ASSERT_TRUE(back == e) << text;
      EXPECT_EQ(back.print(), text);
    }
  }
}

TEST(RoundTrip, NumbersSurviveExactly) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, 1e-300, 123456789.125}) {
    const Expr e(Expr::number(v), "x", Field::Real);
    EXPECT_EQ(Expr::parse(e.print(), "x").evaluate<double>(0.0, 0).value(), v);
  }
}

}  // namespace
