#pragma once

// Geodesic (projective) equivalence of metrics: Levi-Civita connections,
// partner metrics of the normal forms, the metric built from a quadratic
// integral, and connection-difference and geodesic-shooting checks.

#include <array>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "plv/errors.hpp"
#include "plv/metric.hpp"
#include "plv/ode.hpp"

namespace plv {

/// Christoffel symbols Gamma^i_jk at a point; symmetric in j, k.
struct Christoffel {
  std::array<std::array<std::array<double, 2>, 2>, 2> c{};
  double operator()(int i, int j, int k) const { return c[i][j][k]; }
};

inline Christoffel christoffel(const SymmetricJet& g) {
  const Mat2 ginv = g.value().inverse();
  Christoffel out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = j; k < 2; ++k) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += ginv(i, l) * (g.d(l, k, j) + g.d(l, j, k) - g.d(j, k, l));
        out.c[i][j][k] = out.c[i][k][j] = 0.5 * s;
      }
  return out;
}

inline Christoffel christoffel(const MetricField& g, double x, double y) { return christoffel(g.components(x, y)); }

/// max |nabla_k g_ij| at a point.
inline double compatibility_residual(const MetricField& metric, double x, double y) {
  const SymmetricJet g = metric.components(x, y);
  const Christoffel G = christoffel(g);
  const Mat2 gv = g.value();
  double worst = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double r = g.d(i, j, k);
        for (int l = 0; l < 2; ++l) r -= G(l, k, i) * gv(l, j) + G(l, k, j) * gv(i, l);
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

// ---------------------------------------------------------------------------
// Partner metrics

/// The metric sharing unparametrized geodesics with the metric of a
/// normal-form system.
inline MetricField partner_metric(const NaturalSystem& sys) {
  const Rect dom = sys.domain();
  return std::visit(
      [&](const auto& prof) -> MetricField {
        using P = std::decay_t<decltype(prof)>;
        if constexpr (std::is_same_v<P, LiouvilleProfiles>) {
          for (const Point& p : validation_points(dom))
            if (!(std::abs(prof.X(p.x)) > 1e-12 && std::abs(prof.Y(p.y)) > 1e-12))
              throw DegenerateError("partner metric needs X != 0 and Y != 0", p.x, p.y);
          return MetricField(
              [prof](double x, double y) {
                const Scalar2 iX = reciprocal(Scalar2::in_x(prof.X.derivs(x)));
                const Scalar2 iY = reciprocal(Scalar2::in_y(prof.Y.derivs(y)));
                const Scalar2 c = iY - iX;
                return SymmetricJet{c * iX, Scalar2::constant(0.0), -(c * iY)};
              },
              dom, Signature::Nondegenerate);
        } else if constexpr (std::is_same_v<P, ComplexLiouvilleProfiles>) {
          for (const Point& p : validation_points(dom))
            if (!(std::abs(prof.h(p.x, p.y)) > 1e-12)) throw DegenerateError("partner metric needs h != 0", p.x, p.y);
          return MetricField(
              [prof](double x, double y) {
                const auto H = holomorphic(prof.h.derivs(x, y));
                const Scalar2 R = real_part(H), I = imag_part(H);
                const Scalar2 iN = reciprocal(R * R + I * I);
                const Scalar2 q = I * iN;
                return SymmetricJet{-(q * q), R * I * iN * iN, q * q};
              },
              dom, Signature::Nondegenerate);
        } else if constexpr (std::is_same_v<P, JordanProfiles>) {
          const bool standard = prof.form == JordanForm::Standard;
          for (const Point& p : validation_points(dom))
            if (!(std::abs(standard ? prof.Y(p.y) : p.y) > 1e-12))
              throw DegenerateError("partner metric needs a nonvanishing denominator", p.x, p.y);
          return MetricField(
              [prof, standard, eval = sys](double x, double y) {
                const Scalar2 f = 2.0 * eval.at(x, y).g.xy;
                const Scalar2 Yr = standard ? Scalar2::in_y(prof.Y.derivs(y)) : Scalar2::coord_y(y);
                const Scalar2 iY = reciprocal(Yr);
                const Scalar2 iY2 = iY * iY;
                return SymmetricJet{Scalar2::constant(0.0), -(f * iY2 * iY), f * f * iY2 * iY2};
              },
              dom, Signature::Nondegenerate);
        } else {
          throw Error("partner metric is defined for the three normal forms only");
        }
      },
      sys.profiles());
}

/// g_bar = (det g / det h)^2 h with h_ij = g_ia g_jb F^ab.
inline MetricField metric_from_integral(const MetricField& g, const QuadraticForm& F) {
  auto eval = [g, F](double x, double y) {
    const SymmetricJet G = g.components(x, y);
    const SymmetricJet Q = F.components(x, y);
    auto h = [&](int i, int j) {
      Scalar2 acc = Scalar2::constant(0.0);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) acc = acc + G(i, a) * G(j, b) * Q(a, b);
      return acc;
    };
    const SymmetricJet hj{h(0, 0), h(0, 1), h(1, 1)};
    const Scalar2 dg = G.xx * G.yy - G.xy * G.xy;
    const Scalar2 dh = hj.xx * hj.yy - hj.xy * hj.xy;
    const double scale = hj.value().max_abs();
    if (!(std::abs(dh.v) > kDegeneracyThreshold * scale * scale)) throw DegenerateError("h = g F g is degenerate", x, y);
    const Scalar2 r = dg * reciprocal(dh);
    const Scalar2 r2 = r * r;
    return SymmetricJet{r2 * hj.xx, r2 * hj.xy, r2 * hj.yy};
  };
  for (const Point& p : validation_points(g.domain())) (void)eval(p.x, p.y);
  return MetricField(eval, g.domain(), Signature::Nondegenerate);
}

// ---------------------------------------------------------------------------
// Projective equivalence

struct OneForm {
  double x = 0.0, y = 0.0;
};

struct ProjectiveFit {
  double max_residual = 0.0;
  std::vector<OneForm> upsilon;  // one per sample point
};

/// Least-squares fit of Gamma(g) - Gamma(g_bar) = Ups_j delta^i_k + Ups_k delta^i_j
/// at one point; returns the fitted form and the max abs misfit over the six
/// independent components.
inline std::pair<OneForm, double> fit_projective(const Christoffel& G, const Christoffel& Gb) {
  auto D = [&](int i, int j, int k) { return G(i, j, k) - Gb(i, j, k); };
  OneForm u{(2.0 * D(0, 0, 0) + D(1, 0, 1)) / 5.0, (D(0, 0, 1) + 2.0 * D(1, 1, 1)) / 5.0};
  const double r[6] = {D(0, 0, 0) - 2.0 * u.x, D(0, 0, 1) - u.y, D(0, 1, 1),
                       D(1, 0, 0),             D(1, 0, 1) - u.x, D(1, 1, 1) - 2.0 * u.y};
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::abs(v));
  return {u, worst};
}

inline ProjectiveFit projective_residual(const MetricField& g, const MetricField& gbar, const std::vector<Point>& points) {
  ProjectiveFit fit;
  fit.upsilon.reserve(points.size());
  for (const Point& p : points) {
    const auto [u, r] = fit_projective(christoffel(g, p.x, p.y), christoffel(gbar, p.x, p.y));
    fit.upsilon.push_back(u);
    fit.max_residual = std::max(fit.max_residual, r);
  }
  return fit;
}

/// The one-form of the connection difference in closed form for a normal-form
/// system paired with its partner metric.
inline OneForm closed_form_upsilon(const NaturalSystem& sys, double x, double y) {
  return std::visit(
      [&](const auto& prof) -> OneForm {
        using P = std::decay_t<decltype(prof)>;
        if constexpr (std::is_same_v<P, LiouvilleProfiles>) {
          const auto X = prof.X.derivs(x);
          const auto Y = prof.Y.derivs(y);
          return {0.5 * X[1] / X[0], 0.5 * Y[1] / Y[0]};
        } else if constexpr (std::is_same_v<P, ComplexLiouvilleProfiles>) {
          const auto H = holomorphic(prof.h.derivs(x, y));
          const Scalar2 I = imag_part(H);
          const double R = H.v.real();
          const double N = R * R + I.v * I.v;
          return {(I.v * I.dx + R * I.dy) / N, (I.v * I.dy - R * I.dx) / N};
        } else if constexpr (std::is_same_v<P, JordanProfiles>) {
          if (prof.form == JordanForm::Reduced) return {0.0, 1.0 / y};
          const auto Y = prof.Y.derivs(y);
          return {0.0, Y[1] / Y[0]};
        } else {
          throw Error("closed-form one-form is defined for the three normal forms only");
        }
      },
      sys.profiles());
}

/// Uniform n x n grid strictly inside a rectangle.
inline std::vector<Point> interior_grid(const Rect& r, int n) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pts.push_back({r.x.lo + r.x.width() * (i + 0.5) / n, r.y.lo + r.y.width() * (j + 0.5) / n});
  return pts;
}

// ---------------------------------------------------------------------------
// Geodesic shooting

struct GeodesicSeed {
  Point position;
  double vx = 1.0, vy = 0.0;
};

/// Integrates the g-geodesic from the seed for time T and returns the
/// largest |r ^ v| / |v|^2 along it, where r = a + Gamma_bar(v, v) and a is
/// the acceleration of the curve. Zero exactly when the curve is a
/// reparametrized g_bar-geodesic. Norms are Euclidean in the coordinates.
inline double unparametrized_geodesic_check(const MetricField& g, const MetricField& gbar, const GeodesicSeed& seed,
                                            double T, double tol = 1e-10) {
  auto accel = [](const Christoffel& G, double vx, double vy) {
    std::array<double, 2> a{};
    const double v[2] = {vx, vy};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) a[i] -= G(i, j, k) * v[j] * v[k];
    return a;
  };
  auto rhs = [&](double, const State<4>& s) {
    const auto a = accel(christoffel(g, s[0], s[1]), s[2], s[3]);
    return State<4>{s[2], s[3], a[0], a[1]};
  };
  double worst = 0.0;
  auto measure = [&](const State<4>& s) {
    const auto a = accel(christoffel(g, s[0], s[1]), s[2], s[3]);
    const auto ab = accel(christoffel(gbar, s[0], s[1]), s[2], s[3]);
    const double rx = a[0] - ab[0], ry = a[1] - ab[1];
    const double v2 = s[2] * s[2] + s[3] * s[3];
    worst = std::max(worst, std::abs(rx * s[3] - ry * s[2]) / v2);
  };
  OdeOptions opt;
  opt.rtol = opt.atol = tol;
  std::function<void(const DenseStep<4>&)> on_step = [&](const DenseStep<4>& d) {
    for (int k = 0; k <= 4; ++k) measure(d(d.t0 + d.h * k / 4.0));
  };
  const auto res =
      solve_ode<4>(rhs, 0.0, State<4>{seed.position.x, seed.position.y, seed.vx, seed.vy}, T, opt, on_step);
  if (res.status != OdeStatus::Completed)
    throw DomainError("geodesic left the domain at t = " + std::to_string(res.t) + ": " + res.message);
  return worst;
}

}  // namespace plv
