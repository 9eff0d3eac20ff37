#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature and a bracketed
// root finder.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "plv/errors.hpp"

namespace plv {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// Kronrod nodes on [0, 1); odd indices are the embedded Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv;
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  double kronrod = fv[7] * kWgk[7];
  double gauss = fv[7] * kWg[3];
  double resabs = std::abs(fv[7]) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[j] + fv[14 - j];
    kronrod += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  const double w = std::abs(half);
  kronrod *= half;
  gauss *= half;
  resabs *= w;
  resasc *= w;
  // QUADPACK's scaling of |K - G|, with a floor at the rounding level.
  double err = std::abs(kronrod - gauss);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, kronrod, err};
}

}  // namespace detail

/// Integrate f over [a, b] (a > b allowed) until the summed error estimate is
/// below max(abs_tol, rel_tol * |result|).
template <class F>
QuadratureResult integrate(const F& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                           int max_intervals = 4000) {
  if (a == b) return {};
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = a < b ? a : b, hi = a < b ? b : a;

  std::priority_queue<detail::Segment> heap;
  detail::Segment first = detail::gauss_kronrod_15(f, lo, hi);
  double total = first.value, error = first.error;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (intervals >= max_intervals) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "quadrature did not converge: error estimate %.3e", error);
      throw ConvergenceError(buf);
    }
    detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) throw ConvergenceError("quadrature interval underflow");
    const detail::Segment left = detail::gauss_kronrod_15(f, worst.a, mid);
    const detail::Segment right = detail::gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    // Recompute the running sums occasionally to shed accumulated cancellation.
    if (intervals % 64 == 0) {
      auto copy = heap;
      total = error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  if (!std::isfinite(total)) throw ConvergenceError("quadrature produced a non-finite value");
  return {sign * total, error, intervals};
}

/// Root of a continuous f on [lo, hi] with f(lo), f(hi) of opposite signs
/// (Illinois variant of regula falsi, with bisection safeguard).
template <class F>
double find_root(const F& f, double lo, double hi, double x_tol = 1e-14, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw ConvergenceError("root is not bracketed");
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi) || it % 4 == 3) x = 0.5 * (lo + hi);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= x_tol * std::max(1.0, std::abs(lo))) return 0.5 * (lo + hi);
  }
  throw ConvergenceError("root finder did not converge");
}

}  // namespace plv
