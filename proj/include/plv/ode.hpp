#pragma once

// Dormand-Prince 5(4) with step-size control and fourth-order dense output.
//
// Right-hand sides may throw DomainError, DegenerateError or EvalError; the
// offending step is retried with a smaller step and, once the step size
// underflows, integration stops with OdeStatus::DomainExit at the last
// accepted state.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "plv/errors.hpp"
#include "plv/quadrature.hpp"

namespace plv {

template <std::size_t N>
using State = std::array<double, N>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0: choose automatically
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

struct OdeStats {
  long steps = 0;
  long rejected = 0;
  long evaluations = 0;
};

enum class OdeStatus { Completed, Event, DomainExit };

inline std::string to_string(OdeStatus s) {
  switch (s) {
    case OdeStatus::Completed:
      return "completed";
    case OdeStatus::Event:
      return "event";
    case OdeStatus::DomainExit:
      return "domain-exit";
  }
  return "unknown";
}

template <std::size_t N>
struct OdeResult {
  OdeStatus status = OdeStatus::Completed;
  double t = 0.0;
  State<N> y{};
  OdeStats stats;
  std::string message;
};

/// Interpolant over one accepted step [t0, t0 + h].
template <std::size_t N>
class DenseStep {
 public:
  double t0 = 0.0, h = 0.0;
  double t_stop = 0.0;  // end of the valid range; before t0 + h when an event cut the step
  std::array<State<N>, 5> r{};

  double t1() const noexcept { return t0 + h; }

  State<N> operator()(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i) y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
    return y;
  }
};

namespace detail {

struct DopriTableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [c, k] : terms)
    for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  return out;
}

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t_end (either direction).
///
/// `on_step` sees every accepted step as a dense interpolant. If `event` is
/// given, integration stops at the first sign change of event(t, y) relative
/// to its initial sign, located by root finding on the interpolant.
template <std::size_t N, class Rhs>
OdeResult<N> solve_ode(const Rhs& rhs, double t0, State<N> y0, double t_end, const OdeOptions& opt,
                       const std::function<void(const DenseStep<N>&)>& on_step = {},
                       const std::function<double(double, const State<N>&)>& event = {}) {
  using T = detail::DopriTableau;
  OdeResult<N> res;
  res.t = t0;
  res.y = y0;
  if (t_end == t0) return res;
  const double dir = t_end > t0 ? 1.0 : -1.0;

  auto eval = [&](double t, const State<N>& y) {
    ++res.stats.evaluations;
    State<N> k = rhs(t, y);
    if (!detail::all_finite(k)) throw EvalError("non-finite right-hand side");
    return k;
  };
  auto norm = [&](const State<N>& e, const State<N>& ya, const State<N>& yb) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt.atol + opt.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      s += (e[i] / sk) * (e[i] / sk);
    }
    return std::sqrt(s / N);
  };

  State<N> k1;
  try {
    k1 = eval(t0, y0);
  } catch (const Error& e) {
    res.status = OdeStatus::DomainExit;
    res.message = e.what();
    return res;
  }

  double h = opt.initial_step;
  if (h <= 0.0) {
    const double d0 = norm(y0, y0, y0), d1 = norm(k1, y0, y0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(t_end - t0));
    double h1 = h0;
    try {
      const State<N> y1 = detail::axpy<N>(y0, dir * h0, {{1.0, &k1}});
      const State<N> f1 = eval(t0 + dir * h0, y1);
      State<N> diff;
      for (std::size_t i = 0; i < N; ++i) diff[i] = f1[i] - k1[i];
      const double d2 = norm(diff, y0, y0) / h0;
      const double m = std::max(d1, d2);
      h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    } catch (const Error&) {
      h1 = h0 * 1e-3;
    }
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, opt.max_step, std::abs(t_end - t0)});

  const double ev0 = event ? event(t0, y0) : 0.0;
  double t = t0;
  State<N> y = y0;
  bool last_rejected = false;

  while (dir * (t_end - t) > 0.0) {
    if (res.stats.steps + res.stats.rejected >= opt.max_steps) throw ConvergenceError("ODE step budget exhausted");
    const double hmin = 1e-14 * std::max(1.0, std::abs(t));
    if (h < hmin) {
      res.status = OdeStatus::DomainExit;
      if (res.message.empty()) res.message = "step size underflow";
      break;
    }
    bool final_step = false;
    if (h >= std::abs(t_end - t)) {
      h = std::abs(t_end - t);
      final_step = true;
    }
    const double hs = dir * h;

    State<N> k2, k3, k4, k5, k6, k7, y1;
    try {
      k2 = eval(t + T::c2 * hs, detail::axpy<N>(y, hs, {{T::a21, &k1}}));
      k3 = eval(t + T::c3 * hs, detail::axpy<N>(y, hs, {{T::a31, &k1}, {T::a32, &k2}}));
      k4 = eval(t + T::c4 * hs, detail::axpy<N>(y, hs, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}));
      k5 = eval(t + T::c5 * hs, detail::axpy<N>(y, hs, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}}));
      k6 = eval(t + hs,
                detail::axpy<N>(y, hs, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}}));
      y1 = detail::axpy<N>(y, hs, {{T::a71, &k1}, {T::a73, &k3}, {T::a74, &k4}, {T::a75, &k5}, {T::a76, &k6}});
      k7 = eval(t + hs, y1);
    } catch (const Error& e) {
      // Stage left the admissible region: shrink and retry.
      res.message = e.what();
      ++res.stats.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    State<N> err;
    for (std::size_t i = 0; i < N; ++i)
      err[i] = hs * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
    const double e = norm(err, y, y1);
    if (!std::isfinite(e) || e > 1.0) {
      ++res.stats.rejected;
      const double fac = std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.2;
      h *= fac;
      last_rejected = true;
      continue;
    }

    DenseStep<N> dense;
    dense.t0 = t;
    dense.h = hs;
    dense.t_stop = final_step ? t_end : t + hs;
    for (std::size_t i = 0; i < N; ++i) {
      const double dy = y1[i] - y[i];
      const double bspl = hs * k1[i] - dy;
      dense.r[0][i] = y[i];
      dense.r[1][i] = dy;
      dense.r[2][i] = bspl;
      dense.r[3][i] = dy - hs * k7[i] - bspl;
      dense.r[4][i] = hs * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] + T::d5 * k5[i] + T::d6 * k6[i] + T::d7 * k7[i]);
    }

    if (event) {
      const double ev1 = event(t + hs, y1);
      if ((ev1 > 0.0) != (ev0 > 0.0) || ev1 == 0.0) {
        const double te = find_root([&](double s) { return event(s, dense(s)); }, std::min(t, t + hs),
                                    std::max(t, t + hs), 1e-15);
        dense.t_stop = te;
        ++res.stats.steps;
        if (on_step) on_step(dense);
        res.status = OdeStatus::Event;
        res.t = te;
        res.y = dense(te);
        return res;
      }
    }

    ++res.stats.steps;
    if (on_step) on_step(dense);
    t = final_step ? t_end : t + hs;
    y = y1;
    k1 = k7;
    res.message.clear();

    double fac = 0.9 * std::pow(std::max(e, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, 10.0);
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    h = std::min(h * fac, opt.max_step);
  }
  res.t = t;
  res.y = y;
  return res;
}

}  // namespace plv
