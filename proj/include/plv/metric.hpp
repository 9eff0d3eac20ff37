#pragma once

// Metrics of signature (+,-) on a surface together with a quadratic form in
// momenta, and the three normal forms (Liouville, complex-Liouville,
// Jordan-block) with their potentials.
//
// Conventions:
//   * A line element f dx dy is stored as g_xy = g_yx = f / 2.
//   * A quadratic form is stored contravariantly,
//       F = F^xx px^2 + 2 F^xy px py + F^yy py^2.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "plv/errors.hpp"
#include "plv/expr.hpp"
#include "plv/geometry.hpp"
#include "plv/quadrature.hpp"
#include "plv/random.hpp"
#include "plv/surface_jet.hpp"

namespace plv {

/// Symmetric 2x2 tensor field components with their jets.
struct SymmetricJet {
  Scalar2 xx, xy, yy;

  const Scalar2& operator()(int i, int j) const { return i != j ? xy : (i == 0 ? xx : yy); }
  Mat2 value() const { return Mat2::of(xx.v, xy.v, xy.v, yy.v); }
  /// d/dx^k of the (i,j) component.
  double d(int i, int j, int k) const { return (*this)(i, j).grad(k); }
};

/// Inverse of a symmetric tensor, jets included.
inline SymmetricJet inverse(const SymmetricJet& s) {
  const Scalar2 det = s.xx * s.yy - s.xy * s.xy;
  const Scalar2 inv = reciprocal(det);
  return {s.yy * inv, -(s.xy * inv), s.xx * inv};
}

using ScalarField = std::function<Scalar2(double, double)>;
using TensorField = std::function<SymmetricJet(double, double)>;

enum class Signature { Lorentzian, Nondegenerate };

/// Relative threshold on |det g| below which a metric is treated as degenerate.
inline constexpr double kDegeneracyThreshold = 1e-12;

/// A pointwise-evaluable metric g_ij with first and second derivatives.
class MetricField {
 public:
  MetricField(TensorField eval, Rect domain, Signature signature = Signature::Lorentzian)
      : eval_(std::move(eval)), domain_(domain), signature_(signature) {}

  const Rect& domain() const noexcept { return domain_; }
  Signature signature() const noexcept { return signature_; }

  /// Components with jets; throws on degenerate or wrong-signature points.
  SymmetricJet components(double x, double y) const {
    if (!domain_.contains(x, y))
      throw DomainError("metric queried outside its domain at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
    SymmetricJet g = eval_(x, y);
    check(g.value(), x, y);
    return g;
  }

  Mat2 at(double x, double y) const { return components(x, y).value(); }

 private:
  void check(const Mat2& g, double x, double y) const {
    const double det = g.det();
    const double scale = g.max_abs();
    if (!std::isfinite(det) || std::abs(det) <= kDegeneracyThreshold * scale * scale)
      throw DegenerateError("degenerate metric", x, y);
    if (signature_ == Signature::Lorentzian && det > 0.0) throw DegenerateError("metric is not of signature (+,-)", x, y);
  }

  TensorField eval_;
  Rect domain_;
  Signature signature_;
};

/// Contravariant quadratic form F^ij p_i p_j.
class QuadraticForm {
 public:
  explicit QuadraticForm(TensorField eval) : eval_(std::move(eval)) {}
  SymmetricJet components(double x, double y) const { return eval_(x, y); }

 private:
  TensorField eval_;
};

enum class CaseTag { Liouville, ComplexLiouville, JordanBlock, Custom };

inline std::string to_string(CaseTag c) {
  switch (c) {
    case CaseTag::Liouville:
      return "liouville";
    case CaseTag::ComplexLiouville:
      return "complex-liouville";
    case CaseTag::JordanBlock:
      return "jordan-block";
    case CaseTag::Custom:
      return "custom";
  }
  return "unknown";
}

enum class JordanForm {
  Standard,  ///< g = (1 + x Y'(y)) dxdy
  Reduced,   ///< g = (Y(y) + x) dxdy, the form obtained by taking Y as coordinate
};

struct LiouvilleProfiles {
  FunctionProfile X, Y, Xhat, Yhat;
};
struct ComplexLiouvilleProfiles {
  HolomorphicProfile h, h1;
};
struct JordanProfiles {
  FunctionProfile Y, Y1, Y2;
  JordanForm form = JordanForm::Standard;
};
struct CustomProfiles {
  Mat2 g0, F0;
};

/// Everything a natural system knows at a point.
struct SystemJet {
  SymmetricJet g;  // covariant metric
  SymmetricJet F;  // contravariant quadratic part of the integral
  Scalar2 U;       // potential in H
  Scalar2 V;       // potential in F
};

using SystemEval = std::function<SystemJet(double, double)>;

/// H = 1/2 g^ij p_i p_j + U together with F = F^ij p_i p_j + V.
class NaturalSystem {
 public:
  using Profiles = std::variant<std::monostate, LiouvilleProfiles, ComplexLiouvilleProfiles, JordanProfiles, CustomProfiles>;

  NaturalSystem(SystemEval eval, Rect domain, CaseTag tag, Profiles profiles = {})
      : eval_(std::make_shared<SystemEval>(std::move(eval))), domain_(domain), tag_(tag), profiles_(std::move(profiles)) {}

  const Rect& domain() const noexcept { return domain_; }
  CaseTag case_tag() const noexcept { return tag_; }
  const Profiles& profiles() const noexcept { return profiles_; }

  /// All fields at (x, y); throws DomainError / DegenerateError.
  SystemJet at(double x, double y) const {
    if (!domain_.contains(x, y))
      throw DomainError("system queried outside its domain at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
    SystemJet s = (*eval_)(x, y);
    const Mat2 g = s.g.value();
    const double det = g.det(), scale = g.max_abs();
    if (!std::isfinite(det) || std::abs(det) <= kDegeneracyThreshold * scale * scale || det > 0.0)
      throw DegenerateError("degenerate metric", x, y);
    return s;
  }

  MetricField metric() const {
    auto eval = eval_;
    return MetricField([eval](double x, double y) { return (*eval)(x, y).g; }, domain_);
  }

  QuadraticForm integral() const {
    auto eval = eval_;
    return QuadraticForm([eval](double x, double y) { return (*eval)(x, y).F; });
  }

  /// Same system with F's potential replaced. Used to build sabotaged inputs.
  NaturalSystem with_potential_V(std::function<Scalar2(const SystemJet&, double, double)> v) const {
    auto eval = eval_;
    return NaturalSystem(
        [eval, v](double x, double y) {
          SystemJet s = (*eval)(x, y);
          s.V = v(s, x, y);
          return s;
        },
        domain_, tag_, profiles_);
  }

 private:
  std::shared_ptr<const SystemEval> eval_;
  Rect domain_;
  CaseTag tag_;
  Profiles profiles_;
};

// ---------------------------------------------------------------------------
// Domain sampling

/// 64x64 grid plus 256 seeded random interior points.
inline std::vector<Point> validation_points(const Rect& r) {
  std::vector<Point> pts;
  constexpr int kN = 64;
  pts.reserve(kN * kN + 256);
  for (int i = 0; i < kN; ++i)
    for (int j = 0; j < kN; ++j) pts.push_back({grid_node(r.x, i, kN), grid_node(r.y, j, kN)});
  UniformSource rng(0x5eed5eedULL);
  for (int k = 0; k < 256; ++k) {
    const double x = rng.in(r.x.lo, r.x.hi);
    pts.push_back({x, rng.in(r.y.lo, r.y.hi)});
  }
  return pts;
}

namespace detail {

inline Rect rect_of(const Interval& x, const Interval& y) { return {x, y}; }

inline void require_same_domain(const HolomorphicProfile& a, const HolomorphicProfile& b) {
  const Rect& r = a.domain();
  const Rect& s = b.domain();
  if (r.x.lo != s.x.lo || r.x.hi != s.x.hi || r.y.lo != s.y.lo || r.y.hi != s.y.hi)
    throw DomainError("holomorphic profiles must share one rectangle");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Normal forms

/// g = (X - Y)(dx^2 - dy^2), F = (X py^2 - Y px^2)/(X - Y) + V,
/// U = (Xhat - Yhat) / (2 (X - Y)), V = (Yhat X - Xhat Y)/(X - Y).
inline NaturalSystem make_liouville(FunctionProfile X, FunctionProfile Y, FunctionProfile Xhat, FunctionProfile Yhat) {
  const Rect domain{X.domain(), Y.domain()};
  double sign = 0.0;
  for (const Point& p : validation_points(domain)) {
    const double d = X(p.x) - Y(p.y);
    if (!(std::abs(d) > 1e-12) || d * sign < 0.0)
      throw DegenerateError("X(x) = Y(y): Liouville metric degenerates", p.x, p.y);
    sign = d;
    (void)Xhat(p.x);
    (void)Yhat(p.y);
  }
  LiouvilleProfiles prof{X, Y, Xhat, Yhat};
  auto eval = [prof](double x, double y) {
    const Scalar2 Xj = Scalar2::in_x(prof.X.derivs(x));
    const Scalar2 Yj = Scalar2::in_y(prof.Y.derivs(y));
    const Scalar2 Xh = Scalar2::in_x(prof.Xhat.derivs(x));
    const Scalar2 Yh = Scalar2::in_y(prof.Yhat.derivs(y));
    const Scalar2 D = Xj - Yj;
    const Scalar2 invD = reciprocal(D);
    const Scalar2 zero = Scalar2::constant(0.0);
    SystemJet s;
    s.g = {D, zero, -D};
    s.F = {-(Yj * invD), zero, Xj * invD};
    s.U = 0.5 * (Xh - Yh) * invD;
    s.V = (Yh * Xj - Xh * Yj) * invD;
    return s;
  };
  return NaturalSystem(eval, domain, CaseTag::Liouville, prof);
}

/// g = Im(h) dxdy, F = px^2 - py^2 + 2 Re(h)/Im(h) px py + V,
/// U = Im(h1)/Im(h), V = Re(h) Im(h1)/Im(h) - Re(h1).
inline NaturalSystem make_complex_liouville(HolomorphicProfile h, HolomorphicProfile h1) {
  detail::require_same_domain(h, h1);
  const Rect domain = h.domain();
  double sign = 0.0;
  for (const Point& p : validation_points(domain)) {
    const double im = h(p.x, p.y).imag();
    if (!(std::abs(im) > 1e-12) || im * sign < 0.0) throw DegenerateError("Im(h) vanishes", p.x, p.y);
    sign = im;
    (void)h1(p.x, p.y);
  }
  ComplexLiouvilleProfiles prof{h, h1};
  auto eval = [prof](double x, double y) {
    const auto H = holomorphic(prof.h.derivs(x, y));
    const auto H1 = holomorphic(prof.h1.derivs(x, y));
    const Scalar2 R = real_part(H), I = imag_part(H);
    const Scalar2 invI = reciprocal(I);
    const Scalar2 zero = Scalar2::constant(0.0);
    SystemJet s;
    s.g = {zero, 0.5 * I, zero};
    s.F = {Scalar2::constant(1.0), R * invI, Scalar2::constant(-1.0)};
    s.U = imag_part(H1) * invI;
    s.V = R * s.U - real_part(H1);
    return s;
  };
  return NaturalSystem(eval, domain, CaseTag::ComplexLiouville, prof);
}

/// g = (1 + x Y') dxdy, F = px^2 - 2 Y/(1 + x Y') px py + V,
/// U = (x Y1' + Y2)/(1 + x Y'), V = -Y U + Y1.
///
/// With JordanForm::Reduced the profile Y plays the role of the function in
/// g = (Y(y) + x) dxdy and F = px^2 - 2 y/(Y + x) px py; the potentials keep
/// the same shape with Y replaced by y.
inline NaturalSystem make_jordan_block(FunctionProfile Y, FunctionProfile Y1, FunctionProfile Y2,
                                       Interval x_range, JordanForm form = JordanForm::Standard) {
  const Rect domain{x_range, Y.domain()};
  if (x_range.empty()) throw DomainError("empty x range");
  for (const Point& p : validation_points(domain)) {
    const auto d = Y.derivs(p.y);
    const double f = form == JordanForm::Standard ? 1.0 + p.x * d[1] : d[0] + p.x;
    if (!(f > 0.0)) throw DegenerateError("Jordan-block metric factor is not positive", p.x, p.y);
    (void)Y1(p.y);
    (void)Y2(p.y);
  }
  JordanProfiles prof{Y, Y1, Y2, form};
  auto eval = [prof](double x, double y) {
    const auto dY = prof.Y.derivs(y);
    const Scalar2 xj = Scalar2::coord_x(x);
    Scalar2 f, Yrole;
    if (prof.form == JordanForm::Standard) {
      f = 1.0 + xj * Scalar2::in_y(dY, 1);
      Yrole = Scalar2::in_y(dY);
    } else {
      f = Scalar2::in_y(dY) + xj;
      Yrole = Scalar2::coord_y(y);
    }
    const auto dY1 = prof.Y1.derivs(y);
    const Scalar2 invf = reciprocal(f);
    const Scalar2 zero = Scalar2::constant(0.0);
    SystemJet s;
    s.g = {zero, 0.5 * f, zero};
    s.F = {Scalar2::constant(1.0), -(Yrole * invf), zero};
    s.U = (xj * Scalar2::in_y(dY1, 1) + Scalar2::in_y(prof.Y2.derivs(y))) * invf;
    s.V = Scalar2::in_y(dY1) - Yrole * s.U;
    return s;
  };
  return NaturalSystem(eval, domain, CaseTag::JordanBlock, prof);
}

/// g = Cx(x) Cy(y) g0 with constant g0, F^ij = F0^ij, U = V = 0.
inline NaturalSystem make_custom(const Mat2& g0, const Mat2& F0, FunctionProfile Cx, FunctionProfile Cy) {
  if (g0(0, 1) != g0(1, 0) || F0(0, 1) != F0(1, 0)) throw Error("custom g0 and F0 must be symmetric");
  if (!(g0.det() < 0.0)) throw Error("custom g0 must have signature (+,-)");
  const Rect domain{Cx.domain(), Cy.domain()};
  for (const Point& p : validation_points(domain))
    if (!(Cx(p.x) * Cy(p.y) > 0.0)) throw DegenerateError("conformal factor is not positive", p.x, p.y);
  auto eval = [g0, F0, Cx, Cy](double x, double y) {
    const Scalar2 c = Scalar2::in_x(Cx.derivs(x)) * Scalar2::in_y(Cy.derivs(y));
    SystemJet s;
    s.g = {g0(0, 0) * c, g0(0, 1) * c, g0(1, 1) * c};
    s.F = {Scalar2::constant(F0(0, 0)), Scalar2::constant(F0(0, 1)), Scalar2::constant(F0(1, 1))};
    s.U = Scalar2::constant(0.0);
    s.V = Scalar2::constant(0.0);
    return s;
  };
  return NaturalSystem(eval, domain, CaseTag::Custom, CustomProfiles{g0, F0});
}

/// The same system in coordinates (u, v) with (x, y) = J (u, v).
/// The returned domain is the bounding box of the preimage of the original
/// rectangle; points outside the original rectangle still raise DomainError.
inline NaturalSystem change_coordinates(const NaturalSystem& sys, const Mat2& J) {
  const Mat2 Jinv = J.inverse();
  double ulo = INFINITY, uhi = -INFINITY, vlo = INFINITY, vhi = -INFINITY;
  const Rect& r = sys.domain();
  for (double x : {r.x.lo, r.x.hi})
    for (double y : {r.y.lo, r.y.hi}) {
      const double u = Jinv(0, 0) * x + Jinv(0, 1) * y, v = Jinv(1, 0) * x + Jinv(1, 1) * y;
      ulo = std::min(ulo, u), uhi = std::max(uhi, u), vlo = std::min(vlo, v), vhi = std::max(vhi, v);
    }
  auto eval = [sys, J, Jinv](double u, double v) {
    const double x = J(0, 0) * u + J(0, 1) * v, y = J(1, 0) * u + J(1, 1) * v;
    const SystemJet s = sys.at(x, y);
    SymmetricJet gc{change_linear(s.g.xx, J), change_linear(s.g.xy, J), change_linear(s.g.yy, J)};
    SymmetricJet Fc{change_linear(s.F.xx, J), change_linear(s.F.xy, J), change_linear(s.F.yy, J)};
    auto lower = [&](int k, int l) {  // g'_kl = J_ik J_jl g_ij
      Scalar2 acc = Scalar2::constant(0.0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc = acc + (J(i, k) * J(j, l)) * gc(i, j);
      return acc;
    };
    auto raise = [&](int k, int l) {  // F'^kl = Jinv_ki Jinv_lj F^ij
      Scalar2 acc = Scalar2::constant(0.0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc = acc + (Jinv(k, i) * Jinv(l, j)) * Fc(i, j);
      return acc;
    };
    SystemJet out;
    out.g = {lower(0, 0), lower(0, 1), lower(1, 1)};
    out.F = {raise(0, 0), raise(0, 1), raise(1, 1)};
    out.U = change_linear(s.U, J);
    out.V = change_linear(s.V, J);
    return out;
  };
  return NaturalSystem(eval, Rect{{ulo, uhi}, {vlo, vhi}}, sys.case_tag(), sys.profiles());
}

// ---------------------------------------------------------------------------
// G tensor and classification

/// G^i_j = sum_a g_{ja} F^{ia}; row = upper index i.
inline Mat2 g_tensor(const NaturalSystem& sys, double x, double y) {
  const SystemJet s = sys.at(x, y);
  return s.F.value() * s.g.value();
}

enum class CaseKind { RealDiagonal, ComplexConjugate, JordanBlock, TrivialProportional };

inline std::string to_string(CaseKind k) {
  switch (k) {
    case CaseKind::RealDiagonal:
      return "liouville";
    case CaseKind::ComplexConjugate:
      return "complex-liouville";
    case CaseKind::JordanBlock:
      return "jordan-block";
    case CaseKind::TrivialProportional:
      return "trivial";
  }
  return "unknown";
}

/// The case a constructor is expected to produce.
inline std::optional<CaseKind> expected_kind(CaseTag tag) {
  switch (tag) {
    case CaseTag::Liouville:
      return CaseKind::RealDiagonal;
    case CaseTag::ComplexLiouville:
      return CaseKind::ComplexConjugate;
    case CaseTag::JordanBlock:
      return CaseKind::JordanBlock;
    default:
      return std::nullopt;
  }
}

struct CaseLabel {
  CaseKind kind = CaseKind::TrivialProportional;
  /// RealDiagonal: the two eigenvalues (larger first). ComplexConjugate:
  /// lambda + i mu and its conjugate. JordanBlock / TrivialProportional:
  /// the double eigenvalue twice.
  std::complex<double> first, second;
  double discriminant = 0.0;
};

inline CaseLabel classify_tensor(const Mat2& G, double tol = 1e-9) {
  CaseLabel label;
  const double scale = G.frobenius();
  const double tr = G.trace();
  label.discriminant = tr * tr - 4.0 * G.det();
  const Mat2 traceless = G - (0.5 * tr) * Mat2::identity();
  if (scale == 0.0 || traceless.max_abs() <= tol * scale) {
    label.kind = CaseKind::TrivialProportional;
    label.first = label.second = 0.5 * tr;
    return label;
  }
  const double D = label.discriminant;
  const double dtol = tol * scale * scale;
  if (D > dtol) {
    label.kind = CaseKind::RealDiagonal;
    label.first = 0.5 * (tr + std::sqrt(D));
    label.second = 0.5 * (tr - std::sqrt(D));
  } else if (D < -dtol) {
    label.kind = CaseKind::ComplexConjugate;
    label.first = {0.5 * tr, 0.5 * std::sqrt(-D)};
    label.second = std::conj(label.first);
  } else {
    label.kind = CaseKind::JordanBlock;
    label.first = label.second = 0.5 * tr;
  }
  return label;
}

/// Pointwise case of (g, F) from the eigenstructure of G. `tol` is relative
/// to the Frobenius norm of G (squared for the discriminant).
inline CaseLabel classify(const NaturalSystem& sys, double x, double y, double tol = 1e-9) {
  return classify_tensor(g_tensor(sys, x, y), tol);
}

// ---------------------------------------------------------------------------
// Quadratic-integral PDE system in null coordinates ds^2 = f dxdy

/// F = a px^2 + b px py + c py^2 for the metric f dxdy.
struct NullForm {
  ScalarField f, a, b, c;
};

/// Max over the samples of |a_y|, |f a_x + f b_y + 2 f_x a + f_y b|,
/// |f b_x + f c_y + f_x b + 2 f_y c| and |c_x|.
inline double verify_killing_pde(const NullForm& form, const std::vector<Point>& points) {
  double worst = 0.0;
  for (const Point& p : points) {
    const Scalar2 f = form.f(p.x, p.y), a = form.a(p.x, p.y), b = form.b(p.x, p.y), c = form.c(p.x, p.y);
    if (!(f.v > 0.0)) throw DegenerateError("null-form factor f is not positive", p.x, p.y);
    const double r1 = a.dy;
    const double r2 = f.v * a.dx + f.v * b.dy + 2.0 * f.dx * a.v + f.dy * b.v;
    const double r3 = f.v * b.dx + f.v * c.dy + f.dx * b.v + 2.0 * f.dy * c.v;
    const double r4 = c.dx;
    for (double r : {r1, r2, r3, r4}) worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// Null form of a system whose metric is already f dxdy (g_xx = g_yy = 0).
inline NullForm null_form_of(const NaturalSystem& sys) {
  auto at = [sys](double x, double y) {
    SystemJet s = sys.at(x, y);
    if (s.g.xx.v != 0.0 || s.g.yy.v != 0.0) throw Error("metric is not in null coordinates");
    return s;
  };
  return {[at](double x, double y) { return 2.0 * at(x, y).g.xy; },
          [at](double x, double y) { return at(x, y).F.xx; },
          [at](double x, double y) { return 2.0 * at(x, y).F.xy; },
          [at](double x, double y) { return at(x, y).F.yy; }};
}

/// (x, y) = J (u, v) with u = x + y, v = x - y turns dx^2 - dy^2 into du dv.
inline Mat2 liouville_null_map() { return Mat2::of(0.5, 0.5, 0.5, -0.5); }

/// The null-coordinate form of any normal-form system. Liouville systems are
/// rewritten in u = x + y, v = x - y first; the returned map takes (x, y) to
/// the coordinates the form is expressed in.
inline std::pair<NullForm, std::function<Point(Point)>> null_coordinates(const NaturalSystem& sys) {
  if (sys.case_tag() == CaseTag::Liouville) {
    return {null_form_of(change_coordinates(sys, liouville_null_map())),
            [](Point p) { return Point{p.x + p.y, p.x - p.y}; }};
  }
  return {null_form_of(sys), [](Point p) { return p; }};
}

// ---------------------------------------------------------------------------
// Normalizing coordinate t -> int_anchor^t ds / sqrt|a(s)|

class NormalizingMap {
 public:
  NormalizingMap(FunctionProfile a, double anchor) : a_(std::move(a)), anchor_(anchor) {
    const Interval& d = a_.domain();
    if (!d.contains(anchor)) throw DomainError("anchor outside the profile domain");
    constexpr int kN = 513;
    double sign = 0.0;
    for (int k = 0; k < kN; ++k) {
      const double t = grid_node(d, k, kN);
      const double v = a_(t);
      if (v == 0.0 || (sign != 0.0 && (v > 0.0) != (sign > 0.0)))
        throw DegenerateError("coefficient vanishes on the interval", t, 0.0);
      sign = v > 0.0 ? 1.0 : -1.0;
    }
    sign_ = sign;
    lo_ = forward(d.lo);
    hi_ = forward(d.hi);
  }

  double sign() const noexcept { return sign_; }
  Interval image() const noexcept { return {lo_, hi_}; }

  double forward(double t) const {
    if (!a_.domain().contains(t)) throw DomainError("normalizing map evaluated outside its interval");
    const auto& a = a_;
    return integrate([&a](double s) { return 1.0 / std::sqrt(std::abs(a(s))); }, anchor_, t, 1e-13, 1e-14).value;
  }

  double inverse(double s) const {
    if (!(s >= lo_ && s <= hi_)) throw DomainError("normalized coordinate outside the image of the interval");
    const Interval& d = a_.domain();
    return find_root([this, s](double t) { return forward(t) - s; }, d.lo, d.hi, 1e-15);
  }

  /// a in the new coordinate, a(x(s)) / (dx/ds)^2, with dx/ds taken by a
  /// central difference of the inverse map. Equals sign(a) when forward and
  /// inverse are consistent.
  double pulled_back_coefficient(double s, double step = 1e-4) const {
    const double dxds = (inverse(s + step) - inverse(s - step)) / (2.0 * step);
    return a_(inverse(s)) / (dxds * dxds);
  }

 private:
  FunctionProfile a_;
  double anchor_;
  double sign_ = 1.0;
  double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace plv
