#pragma once

// Second-order jets of functions of two variables (x, y).
//
// A SurfaceJet carries a value together with its gradient and Hessian at a
// fixed point. Products, quotients and compositions with univariate
// functions follow the chain rule exactly; profile jets are lifted into
// surface jets along a single coordinate.

#include <cmath>
#include <complex>

#include "plv/expr.hpp"
#include "plv/geometry.hpp"

namespace plv {

template <class T>
struct SurfaceJet {
  T v{}, dx{}, dy{}, dxx{}, dxy{}, dyy{};

  static SurfaceJet constant(T c) { return {c, T(0), T(0), T(0), T(0), T(0)}; }

  /// The coordinate function x (resp. y) at the point.
  static SurfaceJet coord_x(double x0) { return {T(x0), T(1), T(0), T(0), T(0), T(0)}; }
  static SurfaceJet coord_y(double y0) { return {T(y0), T(0), T(1), T(0), T(0), T(0)}; }

  /// f^(k) as a function of x alone, from the derivative list of f.
  static SurfaceJet in_x(const Derivs<T>& d, int k = 0) { return {d[k], d[k + 1], T(0), d[k + 2], T(0), T(0)}; }
  static SurfaceJet in_y(const Derivs<T>& d, int k = 0) { return {d[k], T(0), d[k + 1], T(0), T(0), d[k + 2]}; }

  T grad(int i) const { return i == 0 ? dx : dy; }
  T hess(int i, int j) const { return i != j ? dxy : (i == 0 ? dxx : dyy); }

  SurfaceJet operator-() const { return {-v, -dx, -dy, -dxx, -dxy, -dyy}; }

  friend SurfaceJet operator+(const SurfaceJet& a, const SurfaceJet& b) {
    return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
  }
  friend SurfaceJet operator-(const SurfaceJet& a, const SurfaceJet& b) {
    return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
  }
  friend SurfaceJet operator*(const SurfaceJet& a, const SurfaceJet& b) {
    return {a.v * b.v,
            a.dx * b.v + a.v * b.dx,
            a.dy * b.v + a.v * b.dy,
            a.dxx * b.v + T(2) * a.dx * b.dx + a.v * b.dxx,
            a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
            a.dyy * b.v + T(2) * a.dy * b.dy + a.v * b.dyy};
  }
  friend SurfaceJet operator/(const SurfaceJet& a, const SurfaceJet& b) { return a * reciprocal(b); }

  friend SurfaceJet operator*(T s, const SurfaceJet& a) {
    return {s * a.v, s * a.dx, s * a.dy, s * a.dxx, s * a.dxy, s * a.dyy};
  }
  friend SurfaceJet operator*(const SurfaceJet& a, T s) { return s * a; }
  friend SurfaceJet operator+(const SurfaceJet& a, T s) {
    SurfaceJet r = a;
    r.v += s;
    return r;
  }
  friend SurfaceJet operator+(T s, const SurfaceJet& a) { return a + s; }
  friend SurfaceJet operator-(const SurfaceJet& a, T s) { return a + (-s); }
  friend SurfaceJet operator-(T s, const SurfaceJet& a) { return (-a) + s; }
};

/// f(u) for a univariate f with f(u0) = f0, f'(u0) = f1, f''(u0) = f2.
template <class T>
SurfaceJet<T> compose(const SurfaceJet<T>& u, T f0, T f1, T f2) {
  return {f0,
          f1 * u.dx,
          f1 * u.dy,
          f2 * u.dx * u.dx + f1 * u.dxx,
          f2 * u.dx * u.dy + f1 * u.dxy,
          f2 * u.dy * u.dy + f1 * u.dyy};
}

template <class T>
SurfaceJet<T> reciprocal(const SurfaceJet<T>& a) {
  if (a.v == T(0)) throw EvalError("division by zero");
  const T r = T(1) / a.v;
  return compose(a, r, -r * r, T(2) * r * r * r);
}

/// sqrt on the principal branch, optionally negated (`flip`) to follow a
/// tracked branch of the complex square root.
template <class T>
SurfaceJet<T> sqrt(const SurfaceJet<T>& a, bool flip = false) {
  using std::sqrt;
  if constexpr (!is_complex_v<T>) {
    if (!(a.v > 0.0)) throw EvalError("sqrt of non-positive value");
  } else {
    if (a.v == T(0)) throw EvalError("sqrt at a branch point");
  }
  T s = sqrt(a.v);
  if (flip) s = -s;
  return compose(a, s, T(0.5) / s, T(-0.25) / (s * a.v));
}

/// a^p for real p; a must be positive (real case).
inline SurfaceJet<double> pow(const SurfaceJet<double>& a, double p) {
  if (!(a.v > 0.0)) throw EvalError("power of non-positive value");
  const double f0 = std::pow(a.v, p);
  return compose(a, f0, p * f0 / a.v, p * (p - 1.0) * f0 / (a.v * a.v));
}

/// A holomorphic function of z = x + i y lifted from its complex derivatives:
/// d/dx = d/dz and d/dy = i d/dz.
inline SurfaceJet<std::complex<double>> holomorphic(const Derivs<std::complex<double>>& d, int k = 0) {
  const std::complex<double> I(0.0, 1.0);
  return {d[k], d[k + 1], I * d[k + 1], d[k + 2], I * d[k + 2], -d[k + 2]};
}

inline SurfaceJet<double> real_part(const SurfaceJet<std::complex<double>>& a) {
  return {a.v.real(), a.dx.real(), a.dy.real(), a.dxx.real(), a.dxy.real(), a.dyy.real()};
}
inline SurfaceJet<double> imag_part(const SurfaceJet<std::complex<double>>& a) {
  return {a.v.imag(), a.dx.imag(), a.dy.imag(), a.dxx.imag(), a.dxy.imag(), a.dyy.imag()};
}

using Scalar2 = SurfaceJet<double>;

/// Re-express a scalar jet in linear coordinates (u, v) with (x, y) = J (u, v).
inline Scalar2 change_linear(const Scalar2& a, const Mat2& J) {
  Scalar2 r;
  r.v = a.v;
  // gradient: d/du_k = sum_i J_ik d/dx_i
  r.dx = J(0, 0) * a.dx + J(1, 0) * a.dy;
  r.dy = J(0, 1) * a.dx + J(1, 1) * a.dy;
  // Hessian: J^T H J
  auto h = [&](int k, int l) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += J(i, k) * a.hess(i, j) * J(j, l);
    return s;
  };
  r.dxx = h(0, 0);
  r.dxy = h(0, 1);
  r.dyy = h(1, 1);
  return r;
}

}  // namespace plv
