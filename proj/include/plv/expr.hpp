#pragma once

// Function-profile DSL.
//
// Grammar (EBNF), see also docs/grammar.md:
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;
//   unary   = "-" unary | power ;
//   power   = primary [ "^" unary ] ;          (* right-associative *)
//   primary = number | "pi" | "i" | variable
//           | function "(" expr ")" | "(" expr ")" ;
//   function = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" | "sinh" | "cosh" ;
//   number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//           | "." digits [ exponent ] ;
//
// The exponent of "^" must be a constant (no free variable). "i" is the
// imaginary unit and is only accepted by holomorphic profiles.

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "plv/errors.hpp"
#include "plv/geometry.hpp"
#include "plv/jet.hpp"

namespace plv {

enum class Field { Real, Complex };

enum class NodeKind { Number, Variable, ImagUnit, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh };

inline constexpr std::string_view kFuncNames[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh"};

inline std::string_view func_name(Func f) { return kFuncNames[static_cast<int>(f)]; }

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;  // Number only; always finite and >= 0
  Func func = Func::Sin;
  NodePtr lhs;  // unary operand, call argument, or left operand
  NodePtr rhs;  // right operand / exponent
};

inline bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number:
      return a.number == b.number;
    case NodeKind::Variable:
    case NodeKind::ImagUnit:
      return true;
    case NodeKind::Neg:
      return structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::Call:
      return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

inline bool contains_variable(const Node& n) {
  if (n.kind == NodeKind::Variable) return true;
  if (n.lhs && contains_variable(*n.lhs)) return true;
  return n.rhs && contains_variable(*n.rhs);
}

inline bool contains_imaginary(const Node& n) {
  if (n.kind == NodeKind::ImagUnit) return true;
  if (n.lhs && contains_imaginary(*n.lhs)) return true;
  return n.rhs && contains_imaginary(*n.rhs);
}

/// Immutable expression tree over a single free variable.
class Expr {
 public:
  // Node factories. Used by the parser and by tests that generate trees.
  static NodePtr number(double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("number literals must be finite and non-negative");
    auto n = std::make_shared<Node>();
    n->number = v;
    return n;
  }
  static NodePtr variable_node() { return leaf(NodeKind::Variable); }
  static NodePtr imaginary_unit() { return leaf(NodeKind::ImagUnit); }
  static NodePtr neg(NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Neg;
    n->lhs = std::move(a);
    return n;
  }
  static NodePtr binary(NodeKind op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }
  static NodePtr call(Func f, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->func = f;
    n->lhs = std::move(a);
    return n;
  }

  Expr(NodePtr root, std::string variable, Field field)
      : root_(std::move(root)), variable_(std::move(variable)), field_(field) {}

  static Expr parse(std::string_view text, std::string_view variable, Field field = Field::Real);

  const Node& root() const noexcept { return *root_; }
  const std::string& variable() const noexcept { return variable_; }
  Field field() const noexcept { return field_; }
  bool is_constant() const { return !contains_variable(*root_); }

  std::string print() const;

  /// Evaluate as a jet in the free variable. For complex evaluation, the
  /// arguments of every branch-cut function (log, sqrt, non-integer power)
  /// are appended to `branch_args` in evaluation order when it is non-null.
  template <class T>
  Jet<T> evaluate(T at, int order = kMaxJetOrder, std::vector<T>* branch_args = nullptr) const {
    return eval_node(*root_, Jet<T>::variable(at, order), branch_args);
  }

  friend bool operator==(const Expr& a, const Expr& b) { return structurally_equal(*a.root_, *b.root_); }

 private:
  static NodePtr leaf(NodeKind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
  }

  template <class T>
  static Jet<T> eval_node(const Node& n, const Jet<T>& var, std::vector<T>* branch_args);

  NodePtr root_;
  std::string variable_;
  Field field_;
};

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub:
      return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
      return 2;
    case NodeKind::Neg:
      return 3;
    case NodeKind::Pow:
      return 4;
    default:
      return 5;
  }
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void print_node(const Node& n, const std::string& var, std::string& out);

inline void print_wrapped(const Node& n, bool parens, const std::string& var, std::string& out) {
  if (parens) out += '(';
  print_node(n, var, out);
  if (parens) out += ')';
}

inline void print_node(const Node& n, const std::string& var, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number:
      out += format_number(n.number);
      return;
    case NodeKind::Variable:
      out += var;
      return;
    case NodeKind::ImagUnit:
      out += 'i';
      return;
    case NodeKind::Neg:
      out += '-';
      print_wrapped(*n.lhs, precedence(*n.lhs) < 3, var, out);
      return;
    case NodeKind::Call:
      out += func_name(n.func);
      print_wrapped(*n.lhs, true, var, out);
      return;
    case NodeKind::Pow:
      print_wrapped(*n.lhs, precedence(*n.lhs) <= 4, var, out);
      out += '^';
      print_wrapped(*n.rhs, precedence(*n.rhs) < 3, var, out);
      return;
    default: {
      const int p = precedence(n);
      const char op = n.kind == NodeKind::Add ? '+' : n.kind == NodeKind::Sub ? '-' : n.kind == NodeKind::Mul ? '*' : '/';
      print_wrapped(*n.lhs, precedence(*n.lhs) < p, var, out);
      out += op;
      print_wrapped(*n.rhs, precedence(*n.rhs) <= p, var, out);
      return;
    }
  }
}

}  // namespace detail

inline std::string Expr::print() const {
  std::string out;
  detail::print_node(*root_, variable_, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing: recursive descent over the grammar above.

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, std::string_view variable, Field field)
      : text_(text), variable_(variable), field_(field) {}

  NodePtr parse_all() {
    skip_space();
    if (pos_ >= text_.size()) fail(ParseError::Kind::Syntax, "empty expression");
    NodePtr e = parse_expr();
    skip_space();
    if (pos_ < text_.size()) fail(ParseError::Kind::Syntax, std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg, std::size_t at = npos) const {
    throw ParseError(kind, at == npos ? pos_ : at, msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(NodeKind::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(NodeKind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(NodeKind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expr::binary(NodeKind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return Expr::neg(parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) {
      skip_space();
      const std::size_t at = pos_;
      NodePtr exponent = parse_unary();
      if (contains_variable(*exponent))
        fail(ParseError::Kind::NonConstantExponent, "exponent must not depend on the variable", at);
      if (contains_imaginary(*exponent))
        fail(ParseError::Kind::NonConstantExponent, "exponent must be a real constant", at);
      return Expr::binary(NodeKind::Pow, base, exponent);
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail(ParseError::Kind::Syntax, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(ParseError::Kind::Syntax, std::string("unexpected '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail(ParseError::Kind::Syntax, "malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail(ParseError::Kind::Syntax, "malformed exponent", start);
    }
    const std::string literal(text_.substr(start, pos_ - start));
    const double v = std::strtod(literal.c_str(), nullptr);
    if (!std::isfinite(v)) fail(ParseError::Kind::Syntax, "number out of range", start);
    return Expr::number(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (int f = 0; f < 8; ++f) {
      if (name == kFuncNames[f]) {
        if (!accept('(')) fail(ParseError::Kind::Syntax, "expected '(' after function name");
        NodePtr arg = parse_expr();
        if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
        return Expr::call(static_cast<Func>(f), arg);
      }
    }
    if (name == variable_) return Expr::variable_node();
    if (name == "pi") return Expr::number(3.14159265358979323846);
    if (name == "i" && field_ == Field::Complex) return Expr::imaginary_unit();

    skip_space();
    const bool called = pos_ < text_.size() && text_[pos_] == '(';
    if (!called && name.size() == 1)
      fail(ParseError::Kind::WrongVariable,
           "variable '" + std::string(name) + "' used, expected '" + std::string(variable_) + "'", start);
    fail(ParseError::Kind::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'", start);
  }

  static constexpr std::size_t npos = std::string_view::npos;

  std::string_view text_;
  std::string_view variable_;
  Field field_;
  std::size_t pos_ = 0;
};

inline bool is_reserved_name(std::string_view name, Field field) {
  for (auto f : kFuncNames)
    if (name == f) return true;
  return name == "pi" || (name == "i" && field == Field::Complex);
}

}  // namespace detail

inline Expr Expr::parse(std::string_view text, std::string_view variable, Field field) {
  if (variable.empty() || detail::is_reserved_name(variable, field))
    throw Error("invalid variable name '" + std::string(variable) + "'");
  detail::Parser p(text, variable, field);
  return Expr(p.parse_all(), std::string(variable), field);
}

// ---------------------------------------------------------------------------
// Evaluation

template <class T>
Jet<T> Expr::eval_node(const Node& n, const Jet<T>& var, std::vector<T>* branch_args) {
  const int order = var.order();
  switch (n.kind) {
    case NodeKind::Number:
      return Jet<T>::constant(T(n.number), order);
    case NodeKind::Variable:
      return var;
    case NodeKind::ImagUnit:
      if constexpr (is_complex_v<T>) {
        return Jet<T>::constant(T(0.0, 1.0), order);
      } else {
        throw EvalError("imaginary unit in a real expression");
      }
    case NodeKind::Neg:
      return -eval_node(*n.lhs, var, branch_args);
    case NodeKind::Add:
      return eval_node(*n.lhs, var, branch_args) + eval_node(*n.rhs, var, branch_args);
    case NodeKind::Sub:
      return eval_node(*n.lhs, var, branch_args) - eval_node(*n.rhs, var, branch_args);
    case NodeKind::Mul:
      return eval_node(*n.lhs, var, branch_args) * eval_node(*n.rhs, var, branch_args);
    case NodeKind::Div:
      return eval_node(*n.lhs, var, branch_args) / eval_node(*n.rhs, var, branch_args);
    case NodeKind::Pow: {
      const Jet<T> base = eval_node(*n.lhs, var, branch_args);
      const double p = eval_node<double>(*n.rhs, Jet<double>::constant(0.0, 0), nullptr).value();
      if (std::nearbyint(p) == p && std::abs(p) <= 64.0) return pow_int(base, static_cast<long>(p));
      if (branch_args) branch_args->push_back(base.value());
      return pow_real(base, p);
    }
    case NodeKind::Call: {
      const Jet<T> a = eval_node(*n.lhs, var, branch_args);
      switch (n.func) {
        case Func::Sin:
          return sin(a);
        case Func::Cos:
          return cos(a);
        case Func::Tan:
          return tan(a);
        case Func::Exp:
          return exp(a);
        case Func::Log:
          if (branch_args) branch_args->push_back(a.value());
          return log(a);
        case Func::Sqrt:
          if (branch_args) branch_args->push_back(a.value());
          return sqrt(a);
        case Func::Sinh:
          return sinh(a);
        case Func::Cosh:
          return cosh(a);
      }
    }
  }
  throw EvalError("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Profiles

/// Value and derivatives f, f', f'', f''' at a point.
template <class T>
using Derivs = std::array<T, kMaxJetOrder + 1>;

/// A real function of one real variable on a closed interval, with exact
/// derivatives to third order.
class FunctionProfile {
 public:
  FunctionProfile(Expr expr, Interval domain) : expr_(std::move(expr)), domain_(domain) {
    if (expr_.field() != Field::Real) throw Error("function profile needs a real expression");
    if (domain_.empty()) throw DomainError("empty profile domain");
    validate();
  }

  static FunctionProfile parse(std::string_view text, std::string_view variable, Interval domain) {
    return FunctionProfile(Expr::parse(text, variable, Field::Real), domain);
  }

  static FunctionProfile constant(double c, std::string_view variable, Interval domain) {
    NodePtr n = c < 0.0 ? Expr::neg(Expr::number(-c)) : Expr::number(c);
    return FunctionProfile(Expr(n, std::string(variable), Field::Real), domain);
  }

  const Expr& expr() const noexcept { return expr_; }
  const Interval& domain() const noexcept { return domain_; }

  /// (f, f', ..., f^(order)) at t.
  std::vector<double> eval_jet(double t, int order) const {
    if (order < 0 || order > kMaxJetOrder) throw Error("jet order must be in 0..3");
    const Jet<double> j = jet(t, order);
    std::vector<double> out(order + 1);
    for (int k = 0; k <= order; ++k) out[k] = j.derivative(k);
    return out;
  }

  Derivs<double> derivs(double t) const {
    const Jet<double> j = jet(t, kMaxJetOrder);
    return {j.derivative(0), j.derivative(1), j.derivative(2), j.derivative(3)};
  }

  double operator()(double t) const { return jet(t, 0).value(); }

 private:
  Jet<double> jet(double t, int order) const {
    if (!domain_.contains(t))
      throw DomainError("profile '" + expr_.print() + "' evaluated at " + std::to_string(t) + " outside [" +
                        std::to_string(domain_.lo) + ", " + std::to_string(domain_.hi) + "]");
    Jet<double> j = expr_.evaluate<double>(t, order);
    if (!j.is_finite()) throw EvalError("non-finite value of '" + expr_.print() + "'");
    return j;
  }

  void validate() const {
    constexpr int kSamples = 257;
    for (int k = 0; k < kSamples; ++k) {
      const double t = grid_node(domain_, k, kSamples);
      try {
        (void)jet(t, kMaxJetOrder);
      } catch (const EvalError& e) {
        throw EvalError("profile '" + expr_.print() + "' invalid at " + std::to_string(t) + ": " + e.what());
      }
    }
  }

  Expr expr_;
  Interval domain_;
};

/// A holomorphic function of z = x + i y on an axis-aligned rectangle.
class HolomorphicProfile {
 public:
  using Complex = std::complex<double>;

  HolomorphicProfile(Expr expr, Rect domain) : expr_(std::move(expr)), domain_(domain) {
    if (expr_.field() != Field::Complex) throw Error("holomorphic profile needs a complex expression");
    if (domain_.empty()) throw DomainError("empty profile domain");
    validate();
  }

  static HolomorphicProfile parse(std::string_view text, Rect domain, std::string_view variable = "z") {
    return HolomorphicProfile(Expr::parse(text, variable, Field::Complex), domain);
  }

  const Expr& expr() const noexcept { return expr_; }
  const Rect& domain() const noexcept { return domain_; }

  /// (h, h', ..., h^(order)) at z = x + i y, derivatives taken in z.
  std::vector<Complex> eval_holo(double x, double y, int order) const {
    if (order < 0 || order > kMaxJetOrder) throw Error("jet order must be in 0..3");
    const Jet<Complex> j = jet(x, y, order, nullptr);
    std::vector<Complex> out(order + 1);
    for (int k = 0; k <= order; ++k) out[k] = j.derivative(k);
    return out;
  }

  Derivs<Complex> derivs(double x, double y) const {
    const Jet<Complex> j = jet(x, y, kMaxJetOrder, nullptr);
    return {j.derivative(0), j.derivative(1), j.derivative(2), j.derivative(3)};
  }

  Complex operator()(double x, double y) const { return jet(x, y, 0, nullptr).value(); }

 private:
  Jet<Complex> jet(double x, double y, int order, std::vector<Complex>* branch_args) const {
    if (!domain_.contains(x, y))
      throw DomainError("holomorphic profile evaluated outside its rectangle at (" + std::to_string(x) + ", " +
                        std::to_string(y) + ")");
    Jet<Complex> j = expr_.evaluate<Complex>(Complex(x, y), order, branch_args);
    if (!j.is_finite()) throw EvalError("non-finite value of '" + expr_.print() + "'");
    return j;
  }

  // Samples a 65x65 grid. Every branch-cut argument must stay off the
  // negative real axis and must not cross it between neighbouring samples.
  void validate() const {
    constexpr int kN = 65;
    std::vector<std::vector<Complex>> args(kN * kN);
    for (int i = 0; i < kN; ++i) {
      for (int j = 0; j < kN; ++j) {
        const double x = grid_node(domain_.x, i, kN);
        const double y = grid_node(domain_.y, j, kN);
        auto& a = args[i * kN + j];
        try {
          (void)jet(x, y, kMaxJetOrder, &a);
        } catch (const EvalError& e) {
          throw EvalError("holomorphic profile '" + expr_.print() + "' invalid at (" + std::to_string(x) + ", " +
                          std::to_string(y) + "): " + e.what());
        }
        for (const Complex& w : a)
          if (w.real() <= 0.0 && w.imag() == 0.0)
            throw DomainError("holomorphic profile '" + expr_.print() + "' touches a branch cut at (" +
                              std::to_string(x) + ", " + std::to_string(y) + ")");
      }
    }
    auto crosses = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
      for (std::size_t k = 0; k < a.size() && k < b.size(); ++k)
        if (a[k].real() < 0.0 && b[k].real() < 0.0 && (a[k].imag() > 0.0) != (b[k].imag() > 0.0)) return true;
      return false;
    };
    for (int i = 0; i < kN; ++i)
      for (int j = 0; j < kN; ++j) {
        if (i + 1 < kN && crosses(args[i * kN + j], args[(i + 1) * kN + j]))
          throw DomainError("holomorphic profile '" + expr_.print() + "' crosses a branch cut in its rectangle");
        if (j + 1 < kN && crosses(args[i * kN + j], args[i * kN + j + 1]))
          throw DomainError("holomorphic profile '" + expr_.print() + "' crosses a branch cut in its rectangle");
      }
  }

  Expr expr_;
  Rect domain_;
};

}  // namespace plv
