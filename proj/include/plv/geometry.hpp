#pragma once

// Small fixed-size value types: intervals, rectangles, points and 2x2 matrices.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <utility>

#include "plv/errors.hpp"

namespace plv {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool empty() const noexcept { return !(hi > lo); }
};

/// The i-th of n equally spaced nodes on [lo, hi], endpoints exact.
inline double grid_node(const Interval& s, int i, int n) {
  if (i <= 0) return s.lo;
  if (i >= n - 1) return s.hi;
  return s.lo + s.width() * i / (n - 1);
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  Interval x;
  Interval y;

  bool contains(double px, double py) const noexcept { return x.contains(px) && y.contains(py); }
  bool contains(Point p) const noexcept { return contains(p.x, p.y); }
  bool empty() const noexcept { return x.empty() || y.empty(); }
  Point center() const noexcept { return {x.mid(), y.mid()}; }

  /// The rectangle shrunk by a fraction of its width on every side.
  Rect inset(double fraction) const noexcept {
    const double dx = fraction * x.width(), dy = fraction * y.width();
    return {{x.lo + dx, x.hi - dx}, {y.lo + dy, y.hi - dy}};
  }
};

/// Real 2x2 matrix, row-major: m[row][col].
struct Mat2 {
  std::array<std::array<double, 2>, 2> m{};

  static Mat2 identity() { return {{{{1.0, 0.0}, {0.0, 1.0}}}}; }
  static Mat2 of(double a, double b, double c, double d) { return {{{{a, b}, {c, d}}}}; }

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  double trace() const noexcept { return m[0][0] + m[1][1]; }
  double det() const noexcept { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  double frobenius() const noexcept {
    return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]);
  }
  double max_abs() const noexcept {
    return std::max(std::max(std::abs(m[0][0]), std::abs(m[0][1])),
                    std::max(std::abs(m[1][0]), std::abs(m[1][1])));
  }

  Mat2 transposed() const { return of(m[0][0], m[1][0], m[0][1], m[1][1]); }

  Mat2 inverse() const {
    const double d = det();
    if (d == 0.0) throw Error("singular 2x2 matrix");
    return of(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d);
  }

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
  }
  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return of(a.m[0][0] + b.m[0][0], a.m[0][1] + b.m[0][1], a.m[1][0] + b.m[1][0], a.m[1][1] + b.m[1][1]);
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    return of(a.m[0][0] - b.m[0][0], a.m[0][1] - b.m[0][1], a.m[1][0] - b.m[1][0], a.m[1][1] - b.m[1][1]);
  }
  friend Mat2 operator*(double s, const Mat2& a) {
    return of(s * a.m[0][0], s * a.m[0][1], s * a.m[1][0], s * a.m[1][1]);
  }
};

/// Eigenvalues of a real 2x2 matrix (possibly a complex-conjugate pair).
inline std::pair<std::complex<double>, std::complex<double>> eigenvalues(const Mat2& a) {
  const double tr = a.trace();
  const double disc = tr * tr - 4.0 * a.det();
  const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
  return {0.5 * (tr + root), 0.5 * (tr - root)};
}

}  // namespace plv
