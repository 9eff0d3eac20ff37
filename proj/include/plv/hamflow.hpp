#pragma once

// Hamiltonian flow of H = 1/2 g^ij p_i p_j + U and the candidate integral
// F = F^ij p_i p_j + V: values, Poisson bracket, the potential condition,
// trajectories with conservation monitoring.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "plv/errors.hpp"
#include "plv/metric.hpp"
#include "plv/ode.hpp"
#include "plv/random.hpp"

namespace plv {

struct PhasePoint {
  double x = 0.0, y = 0.0, px = 0.0, py = 0.0;

  bool is_finite() const noexcept {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(px) && std::isfinite(py);
  }
};

struct Energies {
  double H = 0.0;
  double F = 0.0;
};

namespace detail {

inline double quad(const Mat2& A, double px, double py) {
  return A(0, 0) * px * px + 2.0 * A(0, 1) * px * py + A(1, 1) * py * py;
}

/// d/dx^k of a symmetric tensor, as a matrix.
inline Mat2 partial(const SymmetricJet& s, int k) {
  const double xx = s.d(0, 0, k), xy = s.d(0, 1, k), yy = s.d(1, 1, k);
  return Mat2::of(xx, xy, xy, yy);
}

}  // namespace detail

inline Energies hamiltonian(const NaturalSystem& sys, const PhasePoint& q) {
  const SystemJet s = sys.at(q.x, q.y);
  const Mat2 ginv = s.g.value().inverse();
  return {0.5 * detail::quad(ginv, q.px, q.py) + s.U.v, detail::quad(s.F.value(), q.px, q.py) + s.V.v};
}

/// The bracket split by degree in momenta: the cubic part involves only the
/// metric and F^ij, the linear part only the potentials.
struct BracketParts {
  double cubic = 0.0;
  double linear = 0.0;
  double total() const noexcept { return cubic + linear; }
};

inline BracketParts bracket_parts(const NaturalSystem& sys, const PhasePoint& q) {
  const SystemJet s = sys.at(q.x, q.y);
  const SymmetricJet ginv = inverse(s.g);
  const double p[2] = {q.px, q.py};
  BracketParts out;
  for (int i = 0; i < 2; ++i) {
    double dH_dp = 0.0, dF_dp = 0.0;
    for (int j = 0; j < 2; ++j) {
      dH_dp += ginv(i, j).v * p[j];
      dF_dp += 2.0 * s.F(i, j).v * p[j];
    }
    const double dHg_dx = 0.5 * detail::quad(detail::partial(ginv, i), q.px, q.py);
    const double dFg_dx = detail::quad(detail::partial(s.F, i), q.px, q.py);
    out.cubic += dH_dp * dFg_dx - dHg_dx * dF_dp;
    out.linear += dH_dp * s.V.grad(i) - s.U.grad(i) * dF_dp;
  }
  return out;
}

/// {H, F} = sum_i dH/dp_i dF/dx^i - dH/dx^i dF/dp_i.
inline double poisson_bracket(const NaturalSystem& sys, const PhasePoint& q) { return bracket_parts(sys, q).total(); }

/// r_j = 2 G^i_j dU/dx^i - dV/dx^j.
inline std::array<double, 2> check_potential_condition(const NaturalSystem& sys, double x, double y) {
  const SystemJet s = sys.at(x, y);
  const Mat2 G = s.F.value() * s.g.value();
  std::array<double, 2> r{};
  for (int j = 0; j < 2; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) acc += 2.0 * G(i, j) * s.U.grad(i);
    r[j] = acc - s.V.grad(j);
  }
  return r;
}

/// Hamilton's equations (x, y, px, py)' at a phase point.
inline State<4> hamilton_rhs(const NaturalSystem& sys, const State<4>& z) {
  const SystemJet s = sys.at(z[0], z[1]);
  const SymmetricJet ginv = inverse(s.g);
  const double px = z[2], py = z[3];
  State<4> out;
  out[0] = ginv.xx.v * px + ginv.xy.v * py;
  out[1] = ginv.xy.v * px + ginv.yy.v * py;
  out[2] = -(0.5 * detail::quad(detail::partial(ginv, 0), px, py) + s.U.dx);
  out[3] = -(0.5 * detail::quad(detail::partial(ginv, 1), px, py) + s.U.dy);
  return out;
}

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectorySample {
  double t = 0.0;
  PhasePoint q;
  double H = 0.0, F = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  OdeStatus status = OdeStatus::Completed;
  std::string message;
  OdeStats stats;
  double tolerance = 0.0;

  /// max over samples of |H - H0| and |F - F0|, relative to 1 + |H0| + |F0|.
  double relative_drift() const {
    if (samples.empty()) return 0.0;
    const auto& s0 = samples.front();
    const double scale = 1.0 + std::abs(s0.H) + std::abs(s0.F);
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max({worst, std::abs(s.H - s0.H), std::abs(s.F - s0.F)});
    return worst / scale;
  }
};

inline State<4> to_state(const PhasePoint& q) { return {q.x, q.y, q.px, q.py}; }
inline PhasePoint to_phase(const State<4>& z) { return {z[0], z[1], z[2], z[3]}; }

/// Flow from time t0 to t1 (either direction), sampled every `cadence` time
/// units measured from t0, plus the final state. Leaving the domain or
/// reaching a degenerate point truncates the trajectory.
inline Trajectory flow(const NaturalSystem& sys, const PhasePoint& q0, double t0, double t1, double tol,
                       double cadence) {
  if (!q0.is_finite()) throw Error("initial phase point is not finite");
  if (!(tol > 0.0)) throw Error("tolerance must be positive");
  if (!(cadence > 0.0)) throw Error("sample cadence must be positive");
  Trajectory tr;
  tr.tolerance = tol;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  auto record = [&](double t, const State<4>& z) {
    const PhasePoint q = to_phase(z);
    const Energies e = hamiltonian(sys, q);
    tr.samples.push_back({t, q, e.H, e.F});
  };
  record(t0, to_state(q0));
  long next = 1;
  std::function<void(const DenseStep<4>&)> on_step = [&](const DenseStep<4>& d) {
    for (;;) {
      const double ts = t0 + dir * cadence * static_cast<double>(next);
      if (dir * (ts - d.t_stop) > 0.0 || dir * (ts - t1) >= 0.0) break;
      record(ts, d(ts));
      ++next;
    }
  };
  OdeOptions opt;
  opt.rtol = opt.atol = tol;
  const auto res = solve_ode<4>([&sys](double, const State<4>& z) { return hamilton_rhs(sys, z); }, t0, to_state(q0),
                                t1, opt, on_step);
  tr.status = res.status;
  tr.message = res.message;
  tr.stats = res.stats;
  if (dir * (res.t - tr.samples.back().t) > 0.0) record(res.t, res.y);
  return tr;
}

inline Trajectory integrate(const NaturalSystem& sys, const PhasePoint& q0, double T, double tol, double cadence = 0.01) {
  if (!(T > 0.0)) throw Error("integration time must be positive");
  return flow(sys, q0, 0.0, T, tol, cadence);
}

/// CSV with header t,x,y,px,py,H,F and 17 significant digits.
inline void write_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,x,y,px,py,H,F\n";
  char buf[512];
  for (const auto& s : tr.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.q.x, s.q.y, s.q.px, s.q.py,
                  s.H, s.F);
    os << buf;
  }
}

/// Phase points with positions uniform in `box` and momenta uniform in
/// [-pmax, pmax]^2.
inline std::vector<PhasePoint> sample_phase_points(const Rect& box, std::size_t n, std::uint64_t seed,
                                                   double pmax = 2.0) {
  UniformSource rng(seed);
  std::vector<PhasePoint> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    PhasePoint q;
    q.x = rng.in(box.x.lo, box.x.hi);
    q.y = rng.in(box.y.lo, box.y.hi);
    q.px = rng.in(-pmax, pmax);
    q.py = rng.in(-pmax, pmax);
    out.push_back(q);
  }
  return out;
}

}  // namespace plv
