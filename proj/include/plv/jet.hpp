#pragma once

// Truncated univariate Taylor arithmetic ("jets") up to third order.
//
// A Jet stores normalized Taylor coefficients c[k] = f^(k)(x0) / k! for
// k = 0..order. All operations use the standard recurrences for products,
// quotients and elementary functions, so derivatives are exact up to
// rounding. The scalar type is either double or std::complex<double>.

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

#include "plv/errors.hpp"

namespace plv {

inline constexpr int kMaxJetOrder = 3;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
inline bool is_finite_scalar(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return std::isfinite(v);
  }
}

template <class T>
class Jet {
 public:
  using value_type = T;

  Jet() = default;

  static Jet constant(T value, int order = kMaxJetOrder) {
    Jet j;
    j.order_ = order;
    j.c_[0] = value;
    return j;
  }

  static Jet variable(T at, int order = kMaxJetOrder) {
    Jet j = constant(at, order);
    if (order >= 1) j.c_[1] = T(1);
    return j;
  }

  int order() const noexcept { return order_; }
  const T& operator[](int k) const { return c_[k]; }
  T& operator[](int k) { return c_[k]; }
  const T& value() const noexcept { return c_[0]; }

  /// k-th derivative, i.e. k! * c[k].
  T derivative(int k) const {
    static constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0};
    return k > order_ ? T(0) : c_[k] * kFactorial[k];
  }

  bool is_finite() const {
    for (int k = 0; k <= order_; ++k)
      if (!is_finite_scalar(c_[k])) return false;
    return true;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r = truncated(a, b);
    for (int k = 0; k <= r.order_; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }

  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r = truncated(a, b);
    for (int k = 0; k <= r.order_; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r = truncated(a, b);
    for (int k = 0; k <= r.order_; ++k) {
      T s(0);
      for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.c_[0] == T(0)) throw EvalError("division by zero");
    Jet r = truncated(a, b);
    for (int k = 0; k <= r.order_; ++k) {
      T s = a.c_[k];
      for (int i = 1; i <= k; ++i) s -= b.c_[i] * r.c_[k - i];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }

  friend Jet operator*(const Jet& a, T s) {
    Jet r = a;
    for (auto& v : r.c_) v *= s;
    return r;
  }
  friend Jet operator*(T s, const Jet& a) { return a * s; }

 private:
  static Jet truncated(const Jet& a, const Jet& b) {
    Jet r;
    r.order_ = a.order_ < b.order_ ? a.order_ : b.order_;
    return r;
  }

  std::array<T, kMaxJetOrder + 1> c_{};
  int order_ = kMaxJetOrder;
};

namespace detail {

// Shared recurrence for (sin, cos) and (sinh, cosh):
//   s_k = 1/k sum j a_j c_{k-j},   c_k = sign/k sum j a_j s_{k-j}
template <class T>
void trig_pair(const Jet<T>& a, Jet<T>& s, Jet<T>& c, double sign) {
  for (int k = 1; k <= a.order(); ++k) {
    T ss(0), cc(0);
    for (int j = 1; j <= k; ++j) {
      ss += double(j) * a[j] * c[k - j];
      cc += double(j) * a[j] * s[k - j];
    }
    s[k] = ss / double(k);
    c[k] = sign * cc / double(k);
  }
}

template <class T>
void require_finite(const Jet<T>& j, const char* what) {
  if (!j.is_finite()) throw EvalError(std::string("non-finite result in ") + what);
}

}  // namespace detail

template <class T>
Jet<T> exp(const Jet<T>& a) {
  using std::exp;
  Jet<T> r = Jet<T>::constant(exp(a[0]), a.order());
  for (int k = 1; k <= a.order(); ++k) {
    T s(0);
    for (int j = 1; j <= k; ++j) s += double(j) * a[j] * r[k - j];
    r[k] = s / double(k);
  }
  detail::require_finite(r, "exp");
  return r;
}

template <class T>
Jet<T> log(const Jet<T>& a) {
  using std::log;
  if constexpr (!is_complex_v<T>) {
    if (!(a[0] > 0.0)) throw EvalError("log of non-positive argument");
  } else {
    if (a[0] == T(0)) throw EvalError("log of zero");
  }
  Jet<T> r = Jet<T>::constant(log(a[0]), a.order());
  for (int k = 1; k <= a.order(); ++k) {
    T s = a[k];
    for (int j = 1; j < k; ++j) s -= double(j) / double(k) * r[j] * a[k - j];
    r[k] = s / a[0];
  }
  detail::require_finite(r, "log");
  return r;
}

template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  using std::sqrt;
  if constexpr (!is_complex_v<T>) {
    if (a[0] < 0.0) throw EvalError("sqrt of negative argument");
  }
  Jet<T> r = Jet<T>::constant(sqrt(a[0]), a.order());
  if (a.order() >= 1 && r[0] == T(0)) throw EvalError("sqrt is not differentiable at zero");
  for (int k = 1; k <= a.order(); ++k) {
    T s = a[k];
    for (int j = 1; j < k; ++j) s -= r[j] * r[k - j];
    r[k] = s / (2.0 * r[0]);
  }
  detail::require_finite(r, "sqrt");
  return r;
}

template <class T>
Jet<T> sin(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  Jet<T> s = Jet<T>::constant(sin(a[0]), a.order());
  Jet<T> c = Jet<T>::constant(cos(a[0]), a.order());
  detail::trig_pair(a, s, c, -1.0);
  return s;
}

template <class T>
Jet<T> cos(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  Jet<T> s = Jet<T>::constant(sin(a[0]), a.order());
  Jet<T> c = Jet<T>::constant(cos(a[0]), a.order());
  detail::trig_pair(a, s, c, -1.0);
  return c;
}

template <class T>
Jet<T> tan(const Jet<T>& a) {
  Jet<T> r = sin(a) / cos(a);
  detail::require_finite(r, "tan");
  return r;
}

template <class T>
Jet<T> sinh(const Jet<T>& a) {
  using std::cosh;
  using std::sinh;
  Jet<T> s = Jet<T>::constant(sinh(a[0]), a.order());
  Jet<T> c = Jet<T>::constant(cosh(a[0]), a.order());
  detail::trig_pair(a, s, c, 1.0);
  detail::require_finite(s, "sinh");
  return s;
}

template <class T>
Jet<T> cosh(const Jet<T>& a) {
  using std::cosh;
  using std::sinh;
  Jet<T> s = Jet<T>::constant(sinh(a[0]), a.order());
  Jet<T> c = Jet<T>::constant(cosh(a[0]), a.order());
  detail::trig_pair(a, s, c, 1.0);
  detail::require_finite(c, "cosh");
  return c;
}

/// a^n for integer n by repeated squaring; negative n goes through a quotient.
template <class T>
Jet<T> pow_int(const Jet<T>& a, long n) {
  Jet<T> result = Jet<T>::constant(T(1), a.order());
  Jet<T> base = a;
  unsigned long m = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  while (m) {
    if (m & 1UL) result = result * base;
    m >>= 1UL;
    if (m) base = base * base;
  }
  if (n < 0) result = Jet<T>::constant(T(1), a.order()) / result;
  detail::require_finite(result, "pow");
  return result;
}

/// a^p for a real constant exponent p; principal branch for complex a.
template <class T>
Jet<T> pow_real(const Jet<T>& a, double p) {
  if constexpr (is_complex_v<T>) {
    return exp(log(a) * T(p));
  } else {
    if (!(a[0] > 0.0)) throw EvalError("non-integer power of non-positive base");
    Jet<T> r = Jet<T>::constant(std::pow(a[0], p), a.order());
    // y_k = 1/(k a_0) sum_{j=1..k} ((p+1) j - k) a_j y_{k-j}
    for (int k = 1; k <= a.order(); ++k) {
      T s(0);
      for (int j = 1; j <= k; ++j) s += ((p + 1.0) * j - k) * a[j] * r[k - j];
      r[k] = s / (double(k) * a[0]);
    }
    detail::require_finite(r, "pow");
    return r;
  }
}

}  // namespace plv
