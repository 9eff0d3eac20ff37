#pragma once

// Finite-difference versions of the metric Laplacian and of the quantized
// integral, both in divergence form
//   L u = (1/w) sum_ij d_i (w A^ij d_j u) + c u,   w = sqrt|det g|,
// with A = -g^-1, c = -2U for the Laplacian operator and A = F, c = V for
// the integral operator.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "plv/errors.hpp"
#include "plv/geometry.hpp"
#include "plv/metric.hpp"

namespace plv {

/// Uniform node lattice x_i = x0 + i hx, y_j = y0 + j hy.
struct Grid {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, hx = 0.0, hy = 0.0;

  Grid() = default;
  Grid(int nx_, int ny_, double x0_, double y0_, double hx_, double hy_)
      : nx(nx_), ny(ny_), x0(x0_), y0(y0_), hx(hx_), hy(hy_) {
    if (nx < 8 || ny < 8) throw Error("grid needs at least 8 nodes per direction");
    if (!(hx > 0.0 && hy > 0.0)) throw Error("grid spacing must be positive");
  }

  /// Square grid with spacing h centered at c, spanning `extent` per side.
  static Grid centered(Point c, double extent, double h) {
    const int n = static_cast<int>(std::lround(extent / h)) + 1;
    return Grid(n, n, c.x - 0.5 * (n - 1) * h, c.y - 0.5 * (n - 1) * h, h, h);
  }

  double x(int i) const noexcept { return x0 + i * hx; }
  double y(int j) const noexcept { return y0 + j * hy; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * nx + i; }
  Rect bounds() const { return {{x0, x(nx - 1)}, {y0, y(ny - 1)}}; }
  /// Distance (in nodes) to the nearest boundary node row or column.
  int depth(int i, int j) const noexcept { return std::min(std::min(i, nx - 1 - i), std::min(j, ny - 1 - j)); }
};

class GridField {
 public:
  explicit GridField(Grid g) : grid_(g), v_(g.size(), 0.0) {}

  static GridField sample(const Grid& g, const std::function<double(double, double)>& f) {
    GridField u(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) u(i, j) = f(g.x(i), g.y(j));
    return u;
  }

  const Grid& grid() const noexcept { return grid_; }
  double& operator()(int i, int j) { return v_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return v_[grid_.index(i, j)]; }
  const std::vector<double>& values() const noexcept { return v_; }

  friend GridField operator-(const GridField& a, const GridField& b) {
    GridField r = a;
    for (std::size_t k = 0; k < r.v_.size(); ++k) r.v_[k] -= b.v_[k];
    return r;
  }
  friend GridField operator+(const GridField& a, const GridField& b) {
    GridField r = a;
    for (std::size_t k = 0; k < r.v_.size(); ++k) r.v_[k] += b.v_[k];
    return r;
  }
  friend GridField operator*(double s, const GridField& a) {
    GridField r = a;
    for (double& x : r.v_) x *= s;
    return r;
  }

 private:
  Grid grid_;
  std::vector<double> v_;
};

/// Second-order divergence-form operator on a grid. Output is defined on
/// nodes at depth >= 1 and zero on the boundary nodes.
class DiscreteOperator {
 public:
  /// `A` gives the contravariant coefficient matrix at a point, `c` the
  /// zeroth-order coefficient, `w` the density.
  DiscreteOperator(const Grid& g, const std::function<Mat2(double, double)>& A,
                   const std::function<double(double, double)>& c, const std::function<double(double, double)>& w)
      : grid_(g), w_(g.size()), kxx_(g.size()), kxy_(g.size()), kyy_(g.size()), c_(g.size()) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t k = g.index(i, j);
        const double x = g.x(i), y = g.y(j);
        const double wk = w(x, y);
        const Mat2 a = A(x, y);
        w_[k] = wk;
        kxx_[k] = wk * a(0, 0);
        kxy_[k] = wk * a(0, 1);
        kyy_[k] = wk * a(1, 1);
        c_[k] = c(x, y);
      }
  }

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& density() const noexcept { return w_; }

  GridField apply(const GridField& u) const {
    const Grid& g = grid_;
    if (u.grid().nx != g.nx || u.grid().ny != g.ny) throw Error("field and operator grids differ");
    GridField out(g);
    const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy), ihxy = 1.0 / (4.0 * g.hx * g.hy);
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        auto K = [&](const std::vector<double>& a, int di, int dj) { return a[g.index(i + di, j + dj)]; };
        auto U = [&](int di, int dj) { return u(i + di, j + dj); };
        const double kxe = 0.5 * (K(kxx_, 0, 0) + K(kxx_, 1, 0)), kxw = 0.5 * (K(kxx_, 0, 0) + K(kxx_, -1, 0));
        const double kyn = 0.5 * (K(kyy_, 0, 0) + K(kyy_, 0, 1)), kys = 0.5 * (K(kyy_, 0, 0) + K(kyy_, 0, -1));
        double s = (kxe * (U(1, 0) - U(0, 0)) - kxw * (U(0, 0) - U(-1, 0))) * ihx2 +
                   (kyn * (U(0, 1) - U(0, 0)) - kys * (U(0, 0) - U(0, -1))) * ihy2;
        // d_x (K d_y u) + d_y (K d_x u) with centered differences.
        s += (K(kxy_, 1, 0) * (U(1, 1) - U(1, -1)) - K(kxy_, -1, 0) * (U(-1, 1) - U(-1, -1))) * ihxy;
        s += (K(kxy_, 0, 1) * (U(1, 1) - U(-1, 1)) - K(kxy_, 0, -1) * (U(1, -1) - U(-1, -1))) * ihxy;
        out(i, j) = s / w_[g.index(i, j)] + c_[g.index(i, j)] * u(i, j);
      }
    return out;
  }

  /// Leading coefficients read off the stencil at an interior node: the
  /// matrix multiplying (d_x^2, d_x d_y, d_y^2) in the expanded operator.
  Mat2 symbol(int i, int j) const {
    const Grid& g = grid_;
    if (g.depth(i, j) < 1) throw Error("symbol is read at interior nodes only");
    const double w = w_[g.index(i, j)];
    auto K = [&](const std::vector<double>& a, int di, int dj) { return a[g.index(i + di, j + dj)]; };
    const double axx = 0.5 * (K(kxx_, 0, 0) + 0.5 * (K(kxx_, 1, 0) + K(kxx_, -1, 0))) / w;
    const double ayy = 0.5 * (K(kyy_, 0, 0) + 0.5 * (K(kyy_, 0, 1) + K(kyy_, 0, -1))) / w;
    const double axy = 0.25 * (K(kxy_, 1, 0) + K(kxy_, -1, 0) + K(kxy_, 0, 1) + K(kxy_, 0, -1)) / w;
    return Mat2::of(axx, axy, axy, ayy);
  }

  double zeroth_order(int i, int j) const { return c_[grid_.index(i, j)]; }

 private:
  Grid grid_;
  std::vector<double> w_, kxx_, kxy_, kyy_, c_;
};

namespace detail {

inline void check_grid_in_domain(const NaturalSystem& sys, const Grid& g) {
  const Rect b = g.bounds();
  const Rect& d = sys.domain();
  if (!(b.x.lo >= d.x.lo && b.x.hi <= d.x.hi && b.y.lo >= d.y.lo && b.y.hi <= d.y.hi))
    throw DomainError("grid does not fit inside the system's domain");
}

inline double density(const SystemJet& s) { return std::sqrt(std::abs(s.g.value().det())); }

}  // namespace detail

/// Laplacian of the metric minus 2U.
inline DiscreteOperator assemble_H(const NaturalSystem& sys, const Grid& g) {
  detail::check_grid_in_domain(sys, g);
  return DiscreteOperator(
      g, [&sys](double x, double y) { return -1.0 * sys.at(x, y).g.value().inverse(); },
      [&sys](double x, double y) { return -2.0 * sys.at(x, y).U.v; },
      [&sys](double x, double y) { return detail::density(sys.at(x, y)); });
}

/// Quantized quadratic part of F plus V.
inline DiscreteOperator assemble_F(const NaturalSystem& sys, const Grid& g) {
  detail::check_grid_in_domain(sys, g);
  return DiscreteOperator(
      g, [&sys](double x, double y) { return sys.at(x, y).F.value(); },
      [&sys](double x, double y) { return sys.at(x, y).V.v; },
      [&sys](double x, double y) { return detail::density(sys.at(x, y)); });
}

/// Nodes inside `region` (and at depth >= 2, where both compositions are
/// defined).
inline double max_abs_in(const GridField& f, const Rect& region) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int j = 2; j < g.ny - 2; ++j)
    for (int i = 2; i < g.nx - 2; ++i)
      if (region.contains(g.x(i), g.y(j))) m = std::max(m, std::abs(f(i, j)));
  return m;
}

struct CommutatorValue {
  double residual = 0.0;  // max |(HF - FH) u| over the region
  double scale = 0.0;     // max |HF u| + max |FH u| over the region
};

inline CommutatorValue commutator_residual(const DiscreteOperator& H, const DiscreteOperator& F, const GridField& u,
                                           const Rect& region) {
  const GridField hf = H.apply(F.apply(u));
  const GridField fh = F.apply(H.apply(u));
  return {max_abs_in(hf - fh, region), max_abs_in(hf, region) + max_abs_in(fh, region)};
}

/// Weighted inner product sum w u v over the grid.
inline double weighted_dot(const std::vector<double>& w, const GridField& u, const GridField& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * u.values()[k] * v.values()[k];
  return s;
}

/// |<Lu, v>_w - <u, Lv>_w| / (|<Lu, v>_w| + |<u, Lv>_w|) for fields vanishing
/// on the two outer node rings.
inline double self_adjointness_defect(const DiscreteOperator& L, const GridField& u, const GridField& v) {
  const Grid& g = L.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.depth(i, j) < 2 && (u(i, j) != 0.0 || v(i, j) != 0.0))
        throw Error("test fields must vanish on the two outer node rings");
  const double a = weighted_dot(L.density(), L.apply(u), v);
  const double b = weighted_dot(L.density(), u, L.apply(v));
  const double scale = std::abs(a) + std::abs(b);
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// ---------------------------------------------------------------------------
// Smooth test functions and refinement studies

using TestFunction = std::function<double(double, double)>;

/// Five polynomial-times-Gaussian functions centered at c with width sigma.
inline std::vector<TestFunction> smooth_test_functions(Point c, double sigma) {
  auto make = [c, sigma](auto poly) -> TestFunction {
    return [c, sigma, poly](double x, double y) {
      const double u = x - c.x, v = y - c.y;
      return poly(u, v) * std::exp(-(u * u + v * v) / (sigma * sigma));
    };
  };
  return {make([](double, double) { return 1.0; }), make([](double u, double) { return 1.0 + u; }),
          make([](double, double v) { return v - 0.5; }), make([](double u, double v) { return u * v + 0.3; }),
          make([](double u, double v) { return u * u - v * v + 0.2 * u; })};
}

/// Least-squares slope of log r against log h.
inline double fitted_order(const std::vector<double>& h, const std::vector<double>& r) {
  if (h.size() != r.size() || h.size() < 2) throw Error("need at least two ladder levels");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(h[k] > 0.0 && r[k] > 0.0)) return 0.0;
    mx += std::log(h[k]) / n;
    my += std::log(r[k]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double dx = std::log(h[k]) - mx;
    sxy += dx * (std::log(r[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct ConvergenceReport {
  std::vector<double> spacings;
  std::vector<std::vector<double>> residuals;  // [test function][level]
  std::vector<std::vector<double>> scales;     // [test function][level]
  std::vector<double> orders;                  // per test function
  Rect region;
};

/// Commutator residuals on square grids of the given spacings, centered at c
/// with side `extent`. The residual is read on a fixed region inset by four
/// coarsest spacings.
inline ConvergenceReport convergence_study(const NaturalSystem& sys, Point c, double extent,
                                           const std::vector<double>& spacings,
                                           const std::vector<TestFunction>& tests) {
  if (spacings.empty()) throw Error("empty grid ladder");
  ConvergenceReport rep;
  rep.spacings = spacings;
  rep.residuals.assign(tests.size(), {});
  rep.scales.assign(tests.size(), {});
  double hmax = 0.0;
  for (double h : spacings) hmax = std::max(hmax, h);
  const double half = 0.5 * extent - 4.0 * hmax;
  if (!(half > 0.0)) throw Error("grid extent too small for the residual margin");
  rep.region = {{c.x - half, c.x + half}, {c.y - half, c.y + half}};
  for (double h : spacings) {
    const Grid g = Grid::centered(c, extent, h);
    const DiscreteOperator H = assemble_H(sys, g);
    const DiscreteOperator F = assemble_F(sys, g);
    for (std::size_t t = 0; t < tests.size(); ++t) {
      const auto v = commutator_residual(H, F, GridField::sample(g, tests[t]), rep.region);
      rep.residuals[t].push_back(v.residual);
      rep.scales[t].push_back(v.scale);
    }
  }
  for (const auto& r : rep.residuals) rep.orders.push_back(spacings.size() >= 2 ? fitted_order(spacings, r) : 0.0);
  return rep;
}

}  // namespace plv
