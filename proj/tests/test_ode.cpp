#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "plv/ode.hpp"

namespace {

using namespace plv;

auto oscillator = [](double, const State<2>& y) { return State<2>{y[1], -y[0]}; };

TEST(Dopri, HarmonicOscillatorOverOnePeriod) {
  OdeOptions opt;
  opt.rtol = opt.atol = 1e-11;
  const auto res = solve_ode<2>(oscillator, 0.0, {1.0, 0.0}, 2 * std::numbers::pi, opt);
  EXPECT_EQ(res.status, OdeStatus::Completed);
  EXPECT_DOUBLE_EQ(res.t, 2 * std::numbers::pi);
  EXPECT_NEAR(res.y[0], 1.0, 1e-9);
  EXPECT_NEAR(res.y[1], 0.0, 1e-9);
  EXPECT_GT(res.stats.steps, 10);
  EXPECT_GE(res.stats.evaluations, 6 * res.stats.steps);
}

TEST(Dopri, BackwardIntegration) {
  OdeOptions opt;
  opt.rtol = opt.atol = 1e-11;
  const auto res = solve_ode<2>(oscillator, 1.0, {std::cos(1.0), -std::sin(1.0)}, -0.5, opt);
  EXPECT_NEAR(res.y[0], std::cos(-0.5), 1e-9);
  EXPECT_NEAR(res.y[1], -std::sin(-0.5), 1e-9);
}

TEST(Dopri, ZeroLengthIntervalReturnsTheInitialState) {
  const auto res = solve_ode<2>(oscillator, 0.3, {1.0, 2.0}, 0.3, OdeOptions{});
  EXPECT_EQ(res.y[0], 1.0);
  EXPECT_EQ(res.stats.steps, 0);
}

TEST(Dopri, DenseOutputIsAccurateInsideSteps) {
  OdeOptions opt;
  opt.rtol = opt.atol = 1e-10;
  double worst = 0.0;
  double covered = 0.0;
  std::function<void(const DenseStep<2>&)> on_step = [&](const DenseStep<2>& d) {
    for (double s : {0.1, 0.37, 0.5, 0.81}) {
      const double t = d.t0 + s * d.h;
      worst = std::max(worst, std::abs(d(t)[0] - std::cos(t)));
    }
    EXPECT_EQ(d.t_stop, d.t1());
    covered += d.h;
  };
  (void)solve_ode<2>(oscillator, 0.0, {1.0, 0.0}, 3.0, opt, on_step);
  EXPECT_LT(worst, 1e-8);
  EXPECT_NEAR(covered, 3.0, 1e-12);
}

TEST(Dopri, EventStopsAtTheRoot) {
  OdeOptions opt;
  opt.rtol = opt.atol = 1e-11;
  std::function<double(double, const State<2>&)> event = [](double, const State<2>& y) { return y[0]; };
  const auto res = solve_ode<2>(oscillator, 0.0, {1.0, 0.0}, 10.0, opt, {}, event);
  EXPECT_EQ(res.status, OdeStatus::Event);
  EXPECT_NEAR(res.t, std::numbers::pi / 2, 1e-9);
  EXPECT_NEAR(res.y[1], -1.0, 1e-9);
}

TEST(Dopri, ThrowingRightHandSideIsADomainExit) {
  auto rhs = [](double, const State<1>& y) {
    if (y[0] > 2.0) throw DomainError("left the interval");
    return State<1>{1.0};
  };
  const auto res = solve_ode<1>(rhs, 0.0, {0.0}, 5.0, OdeOptions{});
  EXPECT_EQ(res.status, OdeStatus::DomainExit);
  EXPECT_LE(res.y[0], 2.0);
  EXPECT_GT(res.y[0], 1.9);
  EXPECT_FALSE(res.message.empty());
}

TEST(Dopri, StepBudgetIsEnforced) {
  OdeOptions opt;
  opt.max_steps = 5;
  opt.rtol = opt.atol = 1e-12;
  EXPECT_THROW((void)solve_ode<2>(oscillator, 0.0, {1.0, 0.0}, 100.0, opt), ConvergenceError);
}

TEST(Dopri, FifthOrderConvergenceWithFixedCap) {
  // Loose tolerances with a capped step: the error falls about 32x per halving.
  auto run = [](double hmax) {
    OdeOptions opt;
    opt.rtol = opt.atol = 1.0;
    opt.max_step = hmax;
    opt.initial_step = hmax;
    const auto y = solve_ode<2>(oscillator, 0.0, {1.0, 0.0}, 2.0, opt).y;
    return std::hypot(y[0] - std::cos(2.0), y[1] + std::sin(2.0));
  };
  for (double h : {0.25, 0.125}) {
    const double ratio = run(h) / run(h / 2);
    EXPECT_GT(ratio, 25.0);
    EXPECT_LT(ratio, 40.0);
  }
}

TEST(Quadrature, SmoothAndEndpointSingularIntegrands) {
  const auto a = integrate([](double x) { return std::exp(-x * x); }, -3.0, 3.0, 1e-13);
  EXPECT_NEAR(a.value, std::sqrt(std::numbers::pi) * std::erf(3.0), 1e-13);
  const auto b = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(b.value, 2.0, 1e-9);
  EXPECT_GT(b.intervals, 1);
  EXPECT_DOUBLE_EQ(integrate([](double x) { return x; }, 2.0, 0.0, 1e-12).value, -2.0);
  EXPECT_EQ(integrate([](double x) { return x; }, 1.0, 1.0, 1e-12).value, 0.0);
}

TEST(Quadrature, NonIntegrableSingularityFails) {
  EXPECT_THROW((void)integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10), ConvergenceError);
}

TEST(RootFinder, BracketedRoots) {
  EXPECT_NEAR(find_root([](double x) { return std::cos(x); }, 0.0, 3.0, 1e-15), std::numbers::pi / 2, 1e-14);
  EXPECT_NEAR(find_root([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-15), std::cbrt(2.0), 1e-14);
  EXPECT_THROW((void)find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), ConvergenceError);
}

}  // namespace
