#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

namespace {

using namespace plv;
using fixtures::complex_system;
using fixtures::jordan_system;
using fixtures::liouville_system;

NaturalSystem flat_jordan(Rect box) {
  return make_jordan_block(FunctionProfile::parse("0", "y", box.y), FunctionProfile::parse("0", "y", box.y),
                           FunctionProfile::parse("0", "y", box.y), box.x);
}

double bracket_scale(const NaturalSystem& sys, const PhasePoint& q) {
  const Energies e = hamiltonian(sys, q);
  return 1.0 + std::abs(e.H) + std::abs(e.F);
}

TEST(Hamiltonian, FlatNullMetric) {
  EXPECT_DOUBLE_EQ(hamiltonian(flat_jordan({{-1, 1}, {-1, 1}}), {0, 0, 1, 1}).H, 2.0);
}

TEST(Hamiltonian, JordanWithPotentials) {
  const Rect box{{-0.9, 0.9}, {-1, 1}};
  const auto sys = make_jordan_block(FunctionProfile::parse("sin(y)", "y", box.y), FunctionProfile::parse("y", "y", box.y),
                                     FunctionProfile::parse("1", "y", box.y), box.x);
  EXPECT_DOUBLE_EQ(hamiltonian(sys, {0, 0, 1, 1}).H, 3.0);
}

TEST(Bracket, ConstantCoefficientsGiveZero) {
  const Interval d{-1, 1};
  const Mat2 null = Mat2::of(0, 0.5, 0.5, 0);
  const auto sys = make_custom(null, null, FunctionProfile::parse("1", "x", d), FunctionProfile::parse("1", "y", d));
  for (const PhasePoint& q : sample_phase_points(sys.domain(), 20, 4)) EXPECT_EQ(poisson_bracket(sys, q), 0.0);
}

TEST(Bracket, VanishesForEveryConstructor) {
  for (const NaturalSystem& sys : {liouville_system(), complex_system(), jordan_system()})
    for (const PhasePoint& q : sample_phase_points(sys.domain(), 1000, 77))
      EXPECT_LT(std::abs(poisson_bracket(sys, q)), 1e-9 * bracket_scale(sys, q)) << to_string(sys.case_tag());
}

TEST(Bracket, DroppingThePotentialBreaksIt) {
  const auto sys = liouville_system().with_potential_V([](const SystemJet&, double, double) { return Scalar2::constant(0.0); });
  const PhasePoint q{0.3, -0.2, 0.7, -0.4};
  EXPECT_GT(std::abs(poisson_bracket(sys, q)), 1e-3);
}

TEST(Bracket, SplitsIntoCubicAndLinearParts) {
  for (const NaturalSystem& sys : {liouville_system(), complex_system(), jordan_system()})
    for (const PhasePoint& q : sample_phase_points(sys.domain(), 50, 9)) {
      const BracketParts parts = bracket_parts(sys, q);
      EXPECT_DOUBLE_EQ(parts.total(), poisson_bracket(sys, q));
      EXPECT_LT(std::abs(parts.cubic), 1e-9 * bracket_scale(sys, q));
      // linear = -(2 dU o G - dV)(g^-1 p)
      const auto r = check_potential_condition(sys, q.x, q.y);
      const Mat2 ginv = sys.at(q.x, q.y).g.value().inverse();
      const double vx = ginv(0, 0) * q.px + ginv(0, 1) * q.py, vy = ginv(1, 0) * q.px + ginv(1, 1) * q.py;
      EXPECT_NEAR(parts.linear, -(r[0] * vx + r[1] * vy), 1e-10 * bracket_scale(sys, q));
    }
}

TEST(PotentialCondition, HoldsForEveryConstructor) {
  UniformSource rng(31);
  for (const NaturalSystem& sys : {liouville_system(), complex_system(), jordan_system()}) {
    const Rect& d = sys.domain();
    for (int k = 0; k < 100; ++k) {
      const auto r = check_potential_condition(sys, rng.in(d.x.lo, d.x.hi), rng.in(d.y.lo, d.y.hi));
      EXPECT_LT(std::max(std::abs(r[0]), std::abs(r[1])), 1e-10) << to_string(sys.case_tag());
    }
  }
}

TEST(PotentialCondition, ZeroPotentials) {
  const auto sys = flat_jordan({{-1, 1}, {-1, 1}});
  const auto r = check_potential_condition(sys, 0.2, 0.1);
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 0.0);
}

TEST(PotentialCondition, SignFlipIsDetected) {
  const auto sys = liouville_system().with_potential_V([](const SystemJet& s, double, double) { return -1.0 * s.V; });
  const auto r = check_potential_condition(sys, 0.3, -0.2);
  EXPECT_GT(std::max(std::abs(r[0]), std::abs(r[1])), 1e-3);
}

TEST(Integrate, StraightLineInFlatMetric) {
  const Trajectory tr = integrate(flat_jordan({{-3, 3}, {-3, 3}}), {0, 0, 1, 1}, 1.0, 1e-10);
  ASSERT_EQ(tr.status, OdeStatus::Completed);
  EXPECT_NEAR(tr.samples.back().t, 1.0, 1e-14);
  EXPECT_NEAR(tr.samples.back().q.x, 2.0, 1e-12);
  EXPECT_NEAR(tr.samples.back().q.y, 2.0, 1e-12);
  EXPECT_EQ(tr.samples.size(), 101u);
}

TEST(Integrate, ConservesBothIntegrals) {
  const Rect wide{{-30, 30}, {-6, 1.2}};
  const Trajectory tr = integrate(liouville_system(wide), {0.3, -0.2, 0.4, -0.3}, 10.0, 1e-10);
  ASSERT_EQ(tr.status, OdeStatus::Completed) << tr.message;
  EXPECT_LT(tr.relative_drift(), 1e-6);

  const Trajectory tj = integrate(jordan_system(), {0.5, 1.5, 0.6, 0.0}, 1.0, 1e-10);
  ASSERT_EQ(tj.status, OdeStatus::Completed) << tj.message;
  EXPECT_LT(tj.relative_drift(), 1e-6);
}

TEST(Integrate, TimeSymmetry) {
  const auto sys = liouville_system();
  const PhasePoint q0{0.3, -0.2, 0.4, -0.3};
  const Trajectory fwd = integrate(sys, q0, 1.0, 1e-11);
  ASSERT_EQ(fwd.status, OdeStatus::Completed);
  const Trajectory back = flow(sys, fwd.samples.back().q, 1.0, 0.0, 1e-11, 0.01);
  ASSERT_EQ(back.status, OdeStatus::Completed);
  const PhasePoint q = back.samples.back().q;
  const double scale = 1.0 + std::hypot(q0.x, q0.y, std::hypot(q0.px, q0.py));
  EXPECT_LT(std::max({std::abs(q.x - q0.x), std::abs(q.y - q0.y), std::abs(q.px - q0.px), std::abs(q.py - q0.py)}),
            1e-5 * scale);
  EXPECT_NEAR(back.samples.back().t, 0.0, 1e-14);
}

TEST(Integrate, ExitsTowardTheDegeneracyLine) {
  const Trajectory tr = integrate(jordan_system(), {0.5, 1.5, 3.0, 0.1}, 10.0, 1e-10);
  EXPECT_EQ(tr.status, OdeStatus::DomainExit);
  EXPECT_LT(tr.samples.back().t, 10.0);
  for (const auto& s : tr.samples) {
    EXPECT_TRUE(s.q.is_finite());
    EXPECT_TRUE(std::isfinite(s.H) && std::isfinite(s.F));
  }
}

TEST(Integrate, RejectsBadArguments) {
  const auto sys = liouville_system();
  EXPECT_THROW((void)integrate(sys, {0, 0, 1, 1}, -1.0, 1e-10), Error);
  EXPECT_THROW((void)integrate(sys, {0, 0, 1, 1}, 1.0, 0.0), Error);
  EXPECT_THROW((void)integrate(sys, {0, 0, NAN, 1}, 1.0, 1e-10), Error);
}

TEST(Csv, HeaderAndSeventeenDigits) {
  const Trajectory tr = integrate(flat_jordan({{-3, 3}, {-3, 3}}), {0, 0, 1.0 / 3.0, 1}, 0.05, 1e-10);
  std::ostringstream os;
  write_csv(os, tr);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,y,px,py,H,F");
  std::getline(in, line);
  EXPECT_NE(line.find("0.33333333333333331"), std::string::npos) << line;
  std::size_t rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, tr.samples.size());
}

TEST(Sampling, SeededAndInsideTheBox) {
  const Rect box{{-1, 2}, {3, 4}};
  const auto a = sample_phase_points(box, 200, 99, 1.5);
  const auto b = sample_phase_points(box, 200, 99, 1.5);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].x, b[k].x);
    EXPECT_EQ(a[k].py, b[k].py);
    EXPECT_TRUE(box.contains(a[k].x, a[k].y));
    EXPECT_LE(std::abs(a[k].px), 1.5);
  }
  EXPECT_NE(sample_phase_points(box, 1, 100)[0].x, a[0].x);
}

}  // namespace
