#pragma once

// Integration by quadratures for the three normal forms: momenta from the
// values (H0, F0) of the integrals, the reduced first-order system on the
// surface, the closed form B that annihilates it, and the characteristic
// K = integral of B.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plv/errors.hpp"
#include "plv/hamflow.hpp"
#include "plv/metric.hpp"
#include "plv/ode.hpp"
#include "plv/quadrature.hpp"

namespace plv {

/// Values of the two integrals and the branch selectors. eps2 is used by the
/// Liouville case only.
struct QuadParams {
  double H0 = 0.0;
  double F0 = 0.0;
  int eps1 = 1;
  int eps2 = 1;
};

struct ReducedState {
  double x = 0.0, y = 0.0;
  QuadParams c;
};

using Complex = std::complex<double>;

namespace detail {

inline int check_sign(int e) {
  if (e != 1 && e != -1) throw Error("branch selector must be +1 or -1");
  return e;
}

template <class R, class Fn>
R with_profiles(const NaturalSystem& sys, Fn&& fn) {
  return std::visit(
      [&](const auto& prof) -> R {
        using P = std::decay_t<decltype(prof)>;
        if constexpr (std::is_same_v<P, LiouvilleProfiles> || std::is_same_v<P, ComplexLiouvilleProfiles> ||
                      std::is_same_v<P, JordanProfiles>) {
          return fn(prof);
        } else {
          throw Error("quadratures are defined for the three normal forms only");
        }
      },
      sys.profiles());
}

// Jordan-block data: R = H0 r(y) - Y1 + F0, N = H0 f - x Y1' - Y2 with
// r = Y for the standard form and r = y for the reduced one; f0 = f - x f_x.
struct JordanData {
  Scalar2 R, N, f;
  double f0 = 1.0;
};

inline JordanData jordan_data(const JordanProfiles& prof, double x, double y, double H0, double F0) {
  const auto dY = prof.Y.derivs(y);
  const auto dY1 = prof.Y1.derivs(y);
  const Scalar2 xj = Scalar2::coord_x(x);
  const bool standard = prof.form == JordanForm::Standard;
  const Scalar2 r = standard ? Scalar2::in_y(dY) : Scalar2::coord_y(y);
  const Scalar2 f = standard ? 1.0 + xj * Scalar2::in_y(dY, 1) : Scalar2::in_y(dY) + xj;
  JordanData d;
  d.R = H0 * r - Scalar2::in_y(dY1) + F0;
  d.N = H0 * f - xj * Scalar2::in_y(dY1, 1) - Scalar2::in_y(prof.Y2.derivs(y));
  d.f = f;
  d.f0 = standard ? 1.0 : dY[0];
  return d;
}

inline double require_positive(double r, const char* what, double x, double y) {
  if (!(r > 0.0))
    throw DomainError(std::string(what) + " radicand is not positive at (" + std::to_string(x) + ", " +
                      std::to_string(y) + ")");
  return r;
}

/// The square root of w closest to `hint`, or eps times the principal root.
inline Complex choose_root(Complex w, int eps, const Complex* hint) {
  if (w == Complex(0.0)) throw DomainError("complex radicand vanishes (branch point)");
  Complex s = std::sqrt(w);
  if (hint) {
    if (std::abs(s - *hint) > std::abs(s + *hint)) s = -s;
  } else if (eps < 0) {
    s = -s;
  }
  return s;
}

}  // namespace detail

/// -H0 h + h1 + F0 for a complex-Liouville system.
inline Complex complex_radicand(const ComplexLiouvilleProfiles& prof, double x, double y, double H0, double F0) {
  return -H0 * prof.h(x, y) + prof.h1(x, y) + F0;
}

/// Liouville: (2 H0 X + F0 - Xhat, 2 H0 Y + F0 - Yhat).
inline std::array<double, 2> liouville_radicands(const LiouvilleProfiles& prof, double x, double y, double H0,
                                                 double F0) {
  return {2.0 * H0 * prof.X(x) + F0 - prof.Xhat(x), 2.0 * H0 * prof.Y(y) + F0 - prof.Yhat(y)};
}

/// The smallest real radicand at a point (|w| for the complex case).
inline double min_radicand(const NaturalSystem& sys, double x, double y, const QuadParams& c) {
  return detail::with_profiles<double>(sys, [&](const auto& prof) -> double {
    using P = std::decay_t<decltype(prof)>;
    if constexpr (std::is_same_v<P, LiouvilleProfiles>) {
      const auto r = liouville_radicands(prof, x, y, c.H0, c.F0);
      return std::min(r[0], r[1]);
    } else if constexpr (std::is_same_v<P, ComplexLiouvilleProfiles>) {
      return std::abs(complex_radicand(prof, x, y, c.H0, c.F0));
    } else {
      return detail::jordan_data(prof, x, y, c.H0, c.F0).R.v;
    }
  });
}

/// The square root of the complex radicand that the momenta of `s` use.
inline Complex complex_root(const NaturalSystem& sys, const ReducedState& s, const Complex* hint = nullptr) {
  const auto& prof = std::get<ComplexLiouvilleProfiles>(sys.profiles());
  return detail::choose_root(complex_radicand(prof, s.x, s.y, s.c.H0, s.c.F0), detail::check_sign(s.c.eps1), hint);
}

/// Momenta at (x, y) with H = H0 and F = F0 on the branch chosen by the
/// selectors. For the complex case `hint` picks the root continuous with a
/// previously used one (the selector is then ignored).
inline PhasePoint recover_momenta(const NaturalSystem& sys, const ReducedState& s, const Complex* hint = nullptr) {
  const double x = s.x, y = s.y;
  if (!sys.domain().contains(x, y)) throw DomainError("reduced state outside the domain");
  return detail::with_profiles<PhasePoint>(sys, [&](const auto& prof) -> PhasePoint {
    using P = std::decay_t<decltype(prof)>;
    if constexpr (std::is_same_v<P, LiouvilleProfiles>) {
      const auto r = liouville_radicands(prof, x, y, s.c.H0, s.c.F0);
      if (r[0] < 0.0 || r[1] < 0.0) throw DomainError("negative momentum radicand");
      return {x, y, detail::check_sign(s.c.eps1) * std::sqrt(r[0]), -detail::check_sign(s.c.eps2) * std::sqrt(r[1])};
    } else if constexpr (std::is_same_v<P, ComplexLiouvilleProfiles>) {
      const Complex w = complex_root(sys, s, hint);
      return {x, y, w.real(), -w.imag()};
    } else {
      const auto d = detail::jordan_data(prof, x, y, s.c.H0, s.c.F0);
      const double sq = std::sqrt(detail::require_positive(d.R.v, "momentum", x, y));
      const int e = detail::check_sign(s.c.eps1);
      return {x, y, e * sq, 0.5 * e * d.N.v / sq};
    }
  });
}

/// Integral values and branch selectors of a phase point, so that
/// recover_momenta gives back its momenta.
inline QuadParams quad_params_from(const NaturalSystem& sys, const PhasePoint& q) {
  const Energies e = hamiltonian(sys, q);
  QuadParams c{e.H, e.F, 1, 1};
  auto sign = [](double v) { return v < 0.0 ? -1 : 1; };
  switch (sys.case_tag()) {
    case CaseTag::Liouville:
      c.eps1 = sign(q.px);
      c.eps2 = -sign(q.py);
      break;
    case CaseTag::ComplexLiouville: {
      const Complex s(q.px, -q.py);
      const Complex principal = complex_root(sys, {q.x, q.y, c});
      c.eps1 = sign((s * std::conj(principal)).real());
      break;
    }
    case CaseTag::JordanBlock:
      c.eps1 = sign(q.px);
      break;
    case CaseTag::Custom:
      throw Error("quadratures are defined for the three normal forms only");
  }
  return c;
}

/// Velocity of the reduced system at the state.
inline std::array<double, 2> reduced_rhs(const NaturalSystem& sys, const ReducedState& s, const Complex* hint = nullptr) {
  const double x = s.x, y = s.y;
  if (!sys.domain().contains(x, y)) throw DomainError("reduced state outside the domain");
  return detail::with_profiles<std::array<double, 2>>(sys, [&](const auto& prof) -> std::array<double, 2> {
    using P = std::decay_t<decltype(prof)>;
    if constexpr (std::is_same_v<P, LiouvilleProfiles>) {
      const auto r = liouville_radicands(prof, x, y, s.c.H0, s.c.F0);
      detail::require_positive(r[0], "x", x, y);
      detail::require_positive(r[1], "y", x, y);
      const double D = prof.X(x) - prof.Y(y);
      if (D == 0.0) throw DegenerateError("X = Y", x, y);
      return {detail::check_sign(s.c.eps1) * std::sqrt(r[0]) / D, detail::check_sign(s.c.eps2) * std::sqrt(r[1]) / D};
    } else if constexpr (std::is_same_v<P, ComplexLiouvilleProfiles>) {
      const Complex w = complex_root(sys, s, hint);
      const double I = prof.h(x, y).imag();
      if (I == 0.0) throw DegenerateError("Im h = 0", x, y);
      // The selector is folded into the root.
      return {-2.0 * w.imag() / I, 2.0 * w.real() / I};
    } else {
      const auto d = detail::jordan_data(prof, x, y, s.c.H0, s.c.F0);
      const double sq = std::sqrt(detail::require_positive(d.R.v, "momentum", x, y));
      if (d.f.v == 0.0) throw DegenerateError("metric factor vanishes", x, y);
      const int e = detail::check_sign(s.c.eps1);
      return {e * d.N.v / (d.f.v * sq), 2.0 * e * sq / d.f.v};
    }
  });
}

// ---------------------------------------------------------------------------
// The closed form B and the characteristic

/// Coefficients (B_x, B_y) with their jets; the complex case uses the root
/// continuous with `hint` when given.
inline std::array<Scalar2, 2> form_B(const NaturalSystem& sys, const QuadParams& c, double x, double y,
                                     const Complex* hint = nullptr) {
  return detail::with_profiles<std::array<Scalar2, 2>>(sys, [&](const auto& prof) -> std::array<Scalar2, 2> {
    using P = std::decay_t<decltype(prof)>;
    if constexpr (std::is_same_v<P, LiouvilleProfiles>) {
      const Scalar2 Px = 2.0 * c.H0 * Scalar2::in_x(prof.X.derivs(x)) + c.F0 - Scalar2::in_x(prof.Xhat.derivs(x));
      const Scalar2 Py = 2.0 * c.H0 * Scalar2::in_y(prof.Y.derivs(y)) + c.F0 - Scalar2::in_y(prof.Yhat.derivs(y));
      return {double(detail::check_sign(c.eps1)) * reciprocal(sqrt(Px)),
              -double(detail::check_sign(c.eps2)) * reciprocal(sqrt(Py))};
    } else if constexpr (std::is_same_v<P, ComplexLiouvilleProfiles>) {
      using CJ = SurfaceJet<Complex>;
      const CJ W = (-c.H0) * holomorphic(prof.h.derivs(x, y)) + holomorphic(prof.h1.derivs(x, y)) + Complex(c.F0);
      const Complex root = detail::choose_root(W.v, detail::check_sign(c.eps1), hint);
      const CJ S = sqrt(W, std::abs(std::sqrt(W.v) - root) > std::abs(std::sqrt(W.v) + root));
      const Scalar2 Wr = real_part(W), Wi = imag_part(W);
      const Scalar2 inv_abs = reciprocal(sqrt(Wr * Wr + Wi * Wi));
      return {real_part(S) * inv_abs, imag_part(S) * inv_abs};
    } else {
      const auto d = detail::jordan_data(prof, x, y, c.H0, c.F0);
      const Scalar2 isq = reciprocal(sqrt(d.R));
      return {isq, -0.5 * d.N * isq * isq * isq};
    }
  });
}

/// d B_y / dx - d B_x / dy.
inline double curl_B(const NaturalSystem& sys, const QuadParams& c, double x, double y) {
  const auto B = form_B(sys, c, x, y);
  return B[1].dx - B[0].dy;
}

/// K(p) - K(p0), by one-dimensional quadratures with absolute tolerance `tol`.
/// Near a turning point the integrals grow without bound; a relative
/// tolerance of 1e-12 then takes over.
inline double characteristic(const NaturalSystem& sys, const QuadParams& c, Point p0, Point p, double tol = 1e-10) {
  constexpr double kRel = 1e-12;
  return detail::with_profiles<double>(sys, [&](const auto& prof) -> double {
    using P = std::decay_t<decltype(prof)>;
    if constexpr (std::is_same_v<P, LiouvilleProfiles>) {
      const double H0 = c.H0, F0 = c.F0;
      auto fx = [&](double t) {
        const double r = 2.0 * H0 * prof.X(t) + F0 - prof.Xhat(t);
        return 1.0 / std::sqrt(detail::require_positive(r, "x", t, p0.y));
      };
      auto fy = [&](double t) {
        const double r = 2.0 * H0 * prof.Y(t) + F0 - prof.Yhat(t);
        return 1.0 / std::sqrt(detail::require_positive(r, "y", p0.x, t));
      };
      (void)fx(p.x), (void)fy(p.y);
      const double e = detail::check_sign(c.eps1) * detail::check_sign(c.eps2);
      return integrate(fx, p0.x, p.x, 0.5 * tol, kRel).value - e * integrate(fy, p0.y, p.y, 0.5 * tol, kRel).value;
    } else if constexpr (std::is_same_v<P, ComplexLiouvilleProfiles>) {
      // 2 Re of the integral of dz / sqrt(w) along the segment p0 -> p; the
      // root is continued piece by piece from eps times the principal root.
      const Complex z0(p0.x, p0.y), dz(p.x - p0.x, p.y - p0.y);
      if (dz == Complex(0.0)) return 0.0;
      auto W = [&](double s) { return complex_radicand(prof, p0.x + s * dz.real(), p0.y + s * dz.imag(), c.H0, c.F0); };
      constexpr int kPieces = 64;
      Complex ref = detail::choose_root(W(0.0), detail::check_sign(c.eps1), nullptr);
      double total = 0.0;
      for (int k = 0; k < kPieces; ++k) {
        const double a = double(k) / kPieces, b = double(k + 1) / kPieces;
        const Complex hint = ref;
        auto integrand = [&](double s) { return (dz / detail::choose_root(W(s), 1, &hint)).real(); };
        total += integrate(integrand, a, b, 0.5 * tol / kPieces, kRel).value;
        ref = detail::choose_root(W(b), 1, &hint);
      }
      (void)z0;
      return 2.0 * total;
    } else {
      const double H0 = c.H0, F0 = c.F0;
      auto R = [&](double x, double y) { return detail::jordan_data(prof, x, y, H0, F0); };
      const auto d0 = R(p0.x, p0.y), d1 = R(p.x, p.y);
      detail::require_positive(d0.R.v, "momentum", p0.x, p0.y);
      detail::require_positive(d1.R.v, "momentum", p.x, p.y);
      const double exact = p.x / std::sqrt(d1.R.v) - p0.x / std::sqrt(d0.R.v);
      auto fy = [&](double t) {
        const auto d = R(p0.x, t);
        const double r = detail::require_positive(d.R.v, "momentum", p0.x, t);
        return 0.5 * (prof.Y2(t) - H0 * d.f0) / (r * std::sqrt(r));
      };
      return exact + integrate(fy, p0.y, p.y, tol, kRel).value;
    }
  });
}

// ---------------------------------------------------------------------------
// Turning points

struct TurningPoint {
  bool found = false;
  double parameter = 0.0;  // distance along the scan direction; the horizon when not found
  Point location;
};

/// Scans the ray from (s.x, s.y) along `direction` (normalized internally)
/// for the first zero of a real radicand: bracketing on 1024 samples, then
/// bisection. The complex radicand has isolated zeros only, so nothing is
/// reported for that case.
inline TurningPoint turning_point_scan(const NaturalSystem& sys, const ReducedState& s, Point direction,
                                       double horizon) {
  if (!(horizon > 0.0)) throw Error("scan horizon must be positive");
  const double len = std::hypot(direction.x, direction.y);
  if (!(len > 0.0)) throw Error("scan direction must be nonzero");
  const double ux = direction.x / len, uy = direction.y / len;
  TurningPoint tp;
  tp.parameter = horizon;
  tp.location = {s.x + horizon * ux, s.y + horizon * uy};
  if (sys.case_tag() == CaseTag::ComplexLiouville) return tp;
  auto r = [&](double t) { return min_radicand(sys, s.x + t * ux, s.y + t * uy, s.c); };
  constexpr int kSamples = 1024;
  double prev_t = 0.0, prev = r(0.0);
  for (int k = 1; k <= kSamples; ++k) {
    const double t = horizon * k / kSamples;
    const double v = r(t);
    if ((v > 0.0) != (prev > 0.0) || v == 0.0) {
      const double root = find_root(r, prev_t, t, 1e-15);
      tp.found = true;
      tp.parameter = root;
      tp.location = {s.x + root * ux, s.y + root * uy};
      return tp;
    }
    prev_t = t;
    prev = v;
  }
  return tp;
}

// ---------------------------------------------------------------------------
// Reduced integration

struct ReducedSample {
  double t = 0.0, x = 0.0, y = 0.0;
};

struct ReducedTrajectory {
  std::vector<ReducedSample> samples;
  OdeStatus status = OdeStatus::Completed;
  std::string message;
  OdeStats stats;
  /// Time at which the flow stopped short of a turning point, if it did.
  std::optional<double> stop_time;
  /// Estimated time of reaching the turning point itself.
  std::optional<double> turning_time;
};

/// Integrates the reduced system from s0 until T or until a real radicand
/// (|w| in the complex case) drops to `threshold`. Momentum branches are
/// fixed by the selectors of s0.
inline ReducedTrajectory integrate_reduced(const NaturalSystem& sys, const ReducedState& s0, double T, double tol,
                                           double cadence, double threshold = 1e-6) {
  if (!(T > 0.0)) throw Error("integration time must be positive");
  if (!(min_radicand(sys, s0.x, s0.y, s0.c) > threshold))
    throw DomainError("initial point is at or beyond a turning point");
  const bool complex = sys.case_tag() == CaseTag::ComplexLiouville;
  std::optional<Complex> root;
  if (complex) root = complex_root(sys, s0);

  ReducedTrajectory out;
  auto rhs = [&](double, const State<2>& z) {
    const ReducedState s{z[0], z[1], s0.c};
    const auto v = reduced_rhs(sys, s, root ? &*root : nullptr);
    return State<2>{v[0], v[1]};
  };
  out.samples.push_back({0.0, s0.x, s0.y});
  long next = 1;
  std::function<void(const DenseStep<2>&)> on_step = [&](const DenseStep<2>& d) {
    for (;;) {
      const double ts = cadence * static_cast<double>(next);
      if (ts > d.t_stop || ts >= T) break;
      const State<2> z = d(ts);
      out.samples.push_back({ts, z[0], z[1]});
      ++next;
    }
    if (root) root = complex_root(sys, {d(d.t_stop)[0], d(d.t_stop)[1], s0.c}, &*root);
  };
  std::function<double(double, const State<2>&)> event = [&](double, const State<2>& z) {
    return min_radicand(sys, z[0], z[1], s0.c) - threshold;
  };
  OdeOptions opt;
  opt.rtol = opt.atol = tol;
  const auto res = solve_ode<2>(rhs, 0.0, State<2>{s0.x, s0.y}, T, opt, on_step, event);
  out.status = res.status;
  out.message = res.message;
  out.stats = res.stats;
  if (res.t > out.samples.back().t) out.samples.push_back({res.t, res.y[0], res.y[1]});
  if (res.status == OdeStatus::Event) {
    out.stop_time = res.t;
    if (!complex) {
      // Near a simple zero the closing coordinate moves with speed ~ sqrt of
      // its distance to the zero, so the remaining time is twice
      // distance / speed.
      const ReducedState s{res.y[0], res.y[1], s0.c};
      int axis = 1;
      if (const auto* prof = std::get_if<LiouvilleProfiles>(&sys.profiles())) {
        const auto r = liouville_radicands(*prof, s.x, s.y, s.c.H0, s.c.F0);
        axis = r[0] <= r[1] ? 0 : 1;
      }
      try {
        const auto v = reduced_rhs(sys, s);
        const double speed = std::abs(v[axis]);
        const Point dir = axis == 0 ? Point{v[0] >= 0.0 ? 1.0 : -1.0, 0.0} : Point{0.0, v[1] >= 0.0 ? 1.0 : -1.0};
        const auto tp = turning_point_scan(sys, s, dir, 1e-3 * (1.0 + std::abs(axis == 0 ? s.x : s.y)));
        if (tp.found && speed > 0.0) out.turning_time = res.t + 2.0 * tp.parameter / speed;
      } catch (const Error&) {
        // The scan ran off the domain; leave the estimate unset.
      }
    }
  }
  return out;
}

}  // namespace plv
