#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace {

using namespace plv;
using fixtures::complex_system;
using fixtures::jordan_system;
using fixtures::liouville_system;

const Rect kBox{{-1, 1}, {-1, 1}};

NaturalSystem flat_jordan() {
  return make_jordan_block(FunctionProfile::parse("0", "y", kBox.y), FunctionProfile::parse("0", "y", kBox.y),
                           FunctionProfile::parse("0", "y", kBox.y), kBox.x);
}

/// Max |L u - expected| over nodes at depth >= 1.
double interior_error(const DiscreteOperator& L, const GridField& u, double expected) {
  const GridField r = L.apply(u);
  const Grid& g = r.grid();
  double worst = 0.0;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) worst = std::max(worst, std::abs(r(i, j) - expected));
  return worst;
}

TEST(Assemble, FlatNullLaplacianOnBilinear) {
  const Grid g = Grid::centered({0, 0}, 1.6, 0.1);
  const auto H = assemble_H(flat_jordan(), g);
  EXPECT_LT(interior_error(H, GridField::sample(g, [](double x, double y) { return x * y; }), -4.0), 1e-12);
}

TEST(Assemble, ConstantLiouvilleLaplacianOnSquare) {
  const auto sys = make_liouville(FunctionProfile::parse("2", "x", kBox.x), FunctionProfile::parse("0", "y", kBox.y),
                                  FunctionProfile::parse("0", "x", kBox.x), FunctionProfile::parse("0", "y", kBox.y));
  const Grid g = Grid::centered({0, 0}, 1.6, 0.1);
  EXPECT_LT(interior_error(assemble_H(sys, g), GridField::sample(g, [](double x, double) { return x * x; }), -1.0), 1e-12);
}

TEST(Assemble, FlatJordanIntegralOperator) {
  const Grid g = Grid::centered({0, 0}, 1.6, 0.1);
  EXPECT_LT(interior_error(assemble_F(flat_jordan(), g), GridField::sample(g, [](double x, double) { return x * x; }), 2.0),
            1e-12);
}

TEST(Assemble, ConstantComplexIntegralOperator) {
  const auto sys = make_complex_liouville(HolomorphicProfile::parse("i", kBox), HolomorphicProfile::parse("0", kBox));
  const Grid g = Grid::centered({0, 0}, 1.6, 0.1);
  const auto u = GridField::sample(g, [](double x, double y) { return x * x + y * y; });
  EXPECT_LT(interior_error(assemble_F(sys, g), u, 0.0), 1e-12);
}

TEST(Assemble, GridMustFitTheDomain) {
  EXPECT_THROW((void)assemble_H(flat_jordan(), Grid::centered({0.5, 0}, 1.6, 0.1)), DomainError);
  EXPECT_THROW(Grid(4, 10, 0, 0, 0.1, 0.1), Error);
}

TEST(Assemble, BoundaryNodesStayZero) {
  const Grid g = Grid::centered({0, 1.5}, 1.2, 0.1);
  const GridField r = assemble_H(jordan_system(), g).apply(GridField::sample(g, [](double x, double y) { return x + y; }));
  for (int i = 0; i < g.nx; ++i) {
    EXPECT_EQ(r(i, 0), 0.0);
    EXPECT_EQ(r(i, g.ny - 1), 0.0);
  }
}

// The stencil's leading coefficients approach -g^-1 (the symbol of the
// Laplacian is -2H) and F^ij at second order in the spacing.
TEST(Symbol, MatchesMetricAndIntegral) {
  for (const NaturalSystem& sys : {liouville_system(), complex_system(), jordan_system()}) {
    const Point c = sys.domain().center();
    double err[2] = {0, 0};
    int level = 0;
    for (double h : {0.04, 0.02}) {
      const Grid g = Grid::centered(c, 0.8, h);
      const auto H = assemble_H(sys, g);
      const auto F = assemble_F(sys, g);
      for (int j = 1; j < g.ny - 1; j += 3)
        for (int i = 1; i < g.nx - 1; i += 3) {
          const SystemJet s = sys.at(g.x(i), g.y(j));
          const Mat2 dh = H.symbol(i, j) - (-1.0 * s.g.value().inverse());
          const Mat2 df = F.symbol(i, j) - s.F.value();
          err[level] = std::max({err[level], dh.max_abs(), df.max_abs()});
          EXPECT_DOUBLE_EQ(F.zeroth_order(i, j), s.V.v);
          EXPECT_DOUBLE_EQ(H.zeroth_order(i, j), -2.0 * s.U.v);
        }
      ++level;
    }
    EXPECT_LT(err[0], 1e-2) << to_string(sys.case_tag());
    // Liouville fluxes vary only across their own direction, so there the
    // averaging is exact.
    if (err[0] > 1e-12) {
      EXPECT_GT(err[0] / err[1], 3.0) << to_string(sys.case_tag());
    }
  }
}

TEST(Operator, IsLinear) {
  const auto sys = liouville_system();
  const Grid g = Grid::centered({0, 0}, 1.2, 0.05);
  const auto H = assemble_H(sys, g);
  const auto u = GridField::sample(g, [](double x, double y) { return std::sin(x) * y; });
  const auto v = GridField::sample(g, [](double x, double y) { return std::exp(x - y); });
  const GridField lhs = H.apply(2.5 * u + (-0.75) * v);
  const GridField rhs = 2.5 * H.apply(u) + (-0.75) * H.apply(v);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    worst = std::max(worst, std::abs(lhs.values()[k] - rhs.values()[k]));
    scale = std::max(scale, std::abs(rhs.values()[k]));
  }
  EXPECT_LT(worst, 1e-12 * scale);
}

/// A smooth function with the two outer node rings set to zero.
GridField compact(const Grid& g, const TestFunction& f) {
  GridField u = GridField::sample(g, f);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.depth(i, j) < 2) u(i, j) = 0.0;
  return u;
}

TEST(Operator, SelfAdjointInTheWeightedProduct) {
  for (const NaturalSystem& sys : {liouville_system(), complex_system(), jordan_system()}) {
    const Point c = sys.domain().center();
    const Grid g = Grid::centered(c, 1.0, 0.05);
    const auto tests = smooth_test_functions(c, 0.3);
    const GridField u = compact(g, tests[1]), v = compact(g, tests[3]);
    EXPECT_LT(self_adjointness_defect(assemble_H(sys, g), u, v), 1e-10) << to_string(sys.case_tag());
    EXPECT_LT(self_adjointness_defect(assemble_F(sys, g), u, v), 1e-10) << to_string(sys.case_tag());
  }
}

TEST(Operator, SelfAdjointnessNeedsCompactFields) {
  const Grid g = Grid::centered({0, 0}, 1.0, 0.1);
  const auto H = assemble_H(flat_jordan(), g);
  const auto one = GridField::sample(g, [](double, double) { return 1.0; });
  EXPECT_THROW((void)self_adjointness_defect(H, one, one), Error);
}

TEST(Commutator, ConstantCoefficientsCommute) {
  const Grid g = Grid::centered({0, 0}, 1.6, 0.05);
  const auto sys = flat_jordan();
  const auto H = assemble_H(sys, g);
  const auto F = assemble_F(sys, g);
  const Rect region{{-0.5, 0.5}, {-0.5, 0.5}};
  for (const auto& f : smooth_test_functions({0, 0}, 0.6)) {
    const auto v = commutator_residual(H, F, GridField::sample(g, f), region);
    EXPECT_LT(v.residual, 1e-12 * v.scale);
  }
}

TEST(Commutator, SecondOrderForJordanBlock) {
  const auto rep = convergence_study(jordan_system(), {0, 1.5}, 1.7, {0.1, 0.05, 0.025}, smooth_test_functions({0, 1.5}, 0.6));
  ASSERT_EQ(rep.orders.size(), 5u);
  for (double p : rep.orders) {
    EXPECT_GE(p, 1.7);
    EXPECT_LE(p, 2.3);
  }
}

TEST(Commutator, SabotagedPotentialDoesNotConverge) {
  const auto bad = jordan_system().with_potential_V([](const SystemJet& s, double, double) { return -1.0 * s.V; });
  const auto rep = convergence_study(bad, {0, 1.5}, 1.7, {0.1, 0.05, 0.025}, smooth_test_functions({0, 1.5}, 0.6));
  for (double p : rep.orders) EXPECT_LT(p, 0.5);
}

TEST(Commutator, RegionIsInsetByFourCoarseSpacings) {
  const auto rep = convergence_study(flat_jordan(), {0, 0}, 1.6, {0.1, 0.05}, smooth_test_functions({0, 0}, 0.6));
  EXPECT_NEAR(rep.region.x.lo, -0.4, 1e-15);
  EXPECT_NEAR(rep.region.y.hi, 0.4, 1e-15);
  EXPECT_THROW((void)convergence_study(flat_jordan(), {0, 0}, 0.8, {0.1}, smooth_test_functions({0, 0}, 0.6)), Error);
}

TEST(FittedOrder, ExactPowerLaw) {
  EXPECT_NEAR(fitted_order({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3}), 2.0, 1e-12);
  EXPECT_EQ(fitted_order({0.1, 0.05}, {0.0, 1.0}), 0.0);
  EXPECT_THROW((void)fitted_order({0.1}, {1.0}), Error);
}

}  // namespace
