#pragma once

// Scene files: one JSON document describing a system, an initial condition
// and run parameters. Every validation failure names the offending field.
//
//   {
//     "case": "liouville",
//     "domain": {"x": [-2, 2], "y": [-1, 0.8]},
//     "profiles": {"X": "2+sin(x)", "Y": "exp(y)-3", "Xhat": "x", "Yhat": "y"},
//     "initial": {"x": 0.1, "y": -0.2, "px": 0.5, "py": 0.3},
//     "run": {"T": 10, "tol": 1e-10},
//     "seed": 7
//   }

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plv/errors.hpp"
#include "plv/expr.hpp"
#include "plv/geometry.hpp"
#include "plv/hamflow.hpp"
#include "plv/metric.hpp"
#include "plv/quadint.hpp"

namespace plv {

struct QuadratureRun {
  std::optional<QuadParams> params;  // derived from the initial phase point when absent
  double T = 5.0;
  double threshold = 1e-6;
};

struct QuantumRun {
  std::vector<double> ladder{0.1, 0.05, 0.025};
  std::optional<Point> center;  // default: centre of the domain
  std::optional<double> extent;  // default: fits the domain, at most 2
  double sigma = 0.6;
  double rotation = 0.0;  // the study runs in the chart rotated by this angle
};

struct RunParameters {
  double T = 10.0;
  double tol = 1e-10;
  double cadence = 0.01;
  int samples = 100;       // classify points / bracket points
  int grid = 16;           // equiv-check grid side
  double pmax = 2.0;       // momentum box for bracket-check
  QuadratureRun quadrature;
  QuantumRun quantum;
};

struct SceneConfig {
  CaseTag case_tag = CaseTag::Liouville;
  JordanForm jordan_form = JordanForm::Standard;
  Rect domain;
  std::map<std::string, std::string> profiles;
  Mat2 g0 = Mat2::of(0.0, 0.5, 0.5, 0.0);  // custom case only
  Mat2 F0 = Mat2::identity();
  std::optional<PhasePoint> initial;
  RunParameters run;
  std::uint64_t seed = 0;

  NaturalSystem build() const;
};

namespace detail {

using Json = nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline void reject_unknown(const Json& obj, const std::string& path, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(join_path(path, it.key()), "unknown field");
}

inline const Json& require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "$" : path, "expected an object");
  return j;
}

inline double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

inline double number_field(const Json& obj, const std::string& path, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number_at(obj.at(key), join_path(path, key));
}

inline double positive_field(const Json& obj, const std::string& path, const std::string& key, double fallback) {
  const double v = number_field(obj, path, key, fallback);
  if (!(v > 0.0)) throw ConfigError(join_path(path, key), "must be positive");
  return v;
}

inline int count_field(const Json& obj, const std::string& path, const std::string& key, int fallback, int lo) {
  if (!obj.contains(key)) return fallback;
  const Json& j = obj.at(key);
  if (!j.is_number_integer() || j.get<long long>() < lo || j.get<long long>() > 1'000'000)
    throw ConfigError(join_path(path, key), "expected an integer in [" + std::to_string(lo) + ", 1000000]");
  return static_cast<int>(j.get<long long>());
}

inline int sign_field(const Json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) return 1;
  const Json& j = obj.at(key);
  if (!j.is_number_integer() || (j.get<long long>() != 1 && j.get<long long>() != -1))
    throw ConfigError(join_path(path, key), "expected +1 or -1");
  return static_cast<int>(j.get<long long>());
}

inline Interval interval_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [lo, hi]");
  const double lo = number_at(j[0], path + "[0]"), hi = number_at(j[1], path + "[1]");
  if (!(lo < hi)) throw ConfigError(path, "interval is empty");
  return {lo, hi};
}

inline Mat2 symmetric_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected [xx, xy, yy]");
  const double a = number_at(j[0], path + "[0]"), b = number_at(j[1], path + "[1]"), c = number_at(j[2], path + "[2]");
  return Mat2::of(a, b, b, c);
}

inline QuadratureRun parse_quadrature(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"H0", "F0", "eps1", "eps2", "T", "threshold"});
  QuadratureRun q;
  const bool any = j.contains("H0") || j.contains("F0") || j.contains("eps1") || j.contains("eps2");
  if (any) {
    for (const char* k : {"H0", "F0"})
      if (!j.contains(k)) throw ConfigError(join_path(path, k), "required when integral values are given");
    q.params = QuadParams{number_field(j, path, "H0", 0.0), number_field(j, path, "F0", 0.0),
                          sign_field(j, path, "eps1"), sign_field(j, path, "eps2")};
  }
  q.T = positive_field(j, path, "T", q.T);
  q.threshold = positive_field(j, path, "threshold", q.threshold);
  return q;
}

inline QuantumRun parse_quantum(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"ladder", "center", "extent", "sigma", "rotation"});
  QuantumRun q;
  if (j.contains("ladder")) {
    const std::string lp = join_path(path, "ladder");
    const Json& l = j.at("ladder");
    if (!l.is_array() || l.empty()) throw ConfigError(lp, "expected a nonempty array of spacings");
    q.ladder.clear();
    for (std::size_t k = 0; k < l.size(); ++k) {
      const double h = number_at(l[k], lp + "[" + std::to_string(k) + "]");
      if (!(h > 0.0)) throw ConfigError(lp + "[" + std::to_string(k) + "]", "spacing must be positive");
      q.ladder.push_back(h);
    }
  }
  if (j.contains("center")) {
    const std::string cp = join_path(path, "center");
    const Json& c = j.at("center");
    if (!c.is_array() || c.size() != 2) throw ConfigError(cp, "expected [x, y]");
    q.center = {number_at(c[0], cp + "[0]"), number_at(c[1], cp + "[1]")};
  }
  if (j.contains("extent")) q.extent = positive_field(j, path, "extent", 1.0);
  q.sigma = positive_field(j, path, "sigma", q.sigma);
  q.rotation = number_field(j, path, "rotation", q.rotation);
  return q;
}

inline RunParameters parse_run(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"T", "tol", "cadence", "samples", "grid", "pmax", "quadrature", "quantum"});
  RunParameters r;
  r.T = positive_field(j, path, "T", r.T);
  r.tol = positive_field(j, path, "tol", r.tol);
  r.cadence = positive_field(j, path, "cadence", r.cadence);
  r.samples = count_field(j, path, "samples", r.samples, 1);
  r.grid = count_field(j, path, "grid", r.grid, 1);
  r.pmax = positive_field(j, path, "pmax", r.pmax);
  if (j.contains("quadrature")) r.quadrature = parse_quadrature(j.at("quadrature"), join_path(path, "quadrature"));
  if (j.contains("quantum")) r.quantum = parse_quantum(j.at("quantum"), join_path(path, "quantum"));
  return r;
}

struct ProfileSpec {
  const char* name;
  bool required;
};

inline std::vector<ProfileSpec> profile_specs(CaseTag tag) {
  switch (tag) {
    case CaseTag::Liouville:
      return {{"X", true}, {"Y", true}, {"Xhat", false}, {"Yhat", false}};
    case CaseTag::ComplexLiouville:
      return {{"h", true}, {"h1", false}};
    case CaseTag::JordanBlock:
      return {{"Y", true}, {"Y1", false}, {"Y2", false}};
    case CaseTag::Custom:
      return {{"Cx", false}, {"Cy", false}};
  }
  return {};
}

inline CaseTag case_from(const Json& j) {
  if (!j.is_string()) throw ConfigError("case", "expected a string");
  const std::string s = j.get<std::string>();
  if (s == "liouville") return CaseTag::Liouville;
  if (s == "complex-liouville") return CaseTag::ComplexLiouville;
  if (s == "jordan-block") return CaseTag::JordanBlock;
  if (s == "custom") return CaseTag::Custom;
  throw ConfigError("case", "unknown case '" + s + "'");
}

}  // namespace detail

inline SceneConfig parse_scene(const nlohmann::json& j) {
  using namespace detail;
  require_object(j, "");
  reject_unknown(j, "", {"case", "jordan_form", "domain", "profiles", "custom", "initial", "run", "seed"});
  SceneConfig sc;
  if (!j.contains("case")) throw ConfigError("case", "missing");
  sc.case_tag = case_from(j.at("case"));

  if (!j.contains("domain")) throw ConfigError("domain", "missing");
  const Json& d = require_object(j.at("domain"), "domain");
  reject_unknown(d, "domain", {"x", "y"});
  if (!d.contains("x")) throw ConfigError("domain.x", "missing");
  if (!d.contains("y")) throw ConfigError("domain.y", "missing");
  sc.domain = {interval_at(d.at("x"), "domain.x"), interval_at(d.at("y"), "domain.y")};

  if (j.contains("jordan_form")) {
    const Json& f = j.at("jordan_form");
    if (sc.case_tag != CaseTag::JordanBlock) throw ConfigError("jordan_form", "only valid for case jordan-block");
    if (f == "standard")
      sc.jordan_form = JordanForm::Standard;
    else if (f == "reduced")
      sc.jordan_form = JordanForm::Reduced;
    else
      throw ConfigError("jordan_form", "expected \"standard\" or \"reduced\"");
  }

  const auto specs = profile_specs(sc.case_tag);
  const Json empty = Json::object();
  const Json& p = j.contains("profiles") ? require_object(j.at("profiles"), "profiles") : empty;
  std::set<std::string> known;
  for (const auto& s : specs) known.insert(s.name);
  reject_unknown(p, "profiles", known);
  for (const auto& s : specs) {
    const std::string path = std::string("profiles.") + s.name;
    if (!p.contains(s.name)) {
      if (s.required) throw ConfigError(path, "required for case " + to_string(sc.case_tag));
      continue;
    }
    if (!p.at(s.name).is_string()) throw ConfigError(path, "expected a profile expression string");
    sc.profiles[s.name] = p.at(s.name).get<std::string>();
  }

  if (j.contains("custom")) {
    if (sc.case_tag != CaseTag::Custom) throw ConfigError("custom", "only valid for case custom");
    const Json& c = require_object(j.at("custom"), "custom");
    reject_unknown(c, "custom", {"g0", "F0"});
    if (c.contains("g0")) sc.g0 = symmetric_at(c.at("g0"), "custom.g0");
    if (c.contains("F0")) sc.F0 = symmetric_at(c.at("F0"), "custom.F0");
  }

  if (j.contains("initial")) {
    const Json& q = require_object(j.at("initial"), "initial");
    reject_unknown(q, "initial", {"x", "y", "px", "py"});
    PhasePoint pp;
    for (const char* k : {"x", "y", "px", "py"})
      if (!q.contains(k)) throw ConfigError(std::string("initial.") + k, "missing");
    pp.x = number_at(q.at("x"), "initial.x");
    pp.y = number_at(q.at("y"), "initial.y");
    pp.px = number_at(q.at("px"), "initial.px");
    pp.py = number_at(q.at("py"), "initial.py");
    if (!sc.domain.contains(pp.x, pp.y)) throw ConfigError("initial", "position lies outside the domain");
    sc.initial = pp;
  }

  if (j.contains("run")) sc.run = parse_run(j.at("run"), "run");

  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer");
    sc.seed = s.get<std::uint64_t>();
  }
  return sc;
}

inline SceneConfig parse_scene_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_scene(j);
}

inline SceneConfig load_scene(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("$", "cannot open scene file '" + file + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene_text(ss.str());
}

namespace detail {

/// Parse failures inside a profile keep their byte offset but gain the field path.
class ProfileError : public ConfigError {
 public:
  ProfileError(std::string path, const ParseError& e) : ConfigError(std::move(path), e.what()), offset_(e.offset()) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

template <class Fn>
auto with_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ProfileError(path, e);
  }
}

}  // namespace detail

inline NaturalSystem SceneConfig::build() const {
  using detail::with_path;
  auto text = [&](const char* name, const char* fallback) {
    const auto it = profiles.find(name);
    return it == profiles.end() ? std::string(fallback) : it->second;
  };
  auto real = [&](const char* name, const char* var, Interval dom, const char* fallback) {
    return with_path(std::string("profiles.") + name,
                     [&] { return FunctionProfile::parse(text(name, fallback), var, dom); });
  };
  auto holo = [&](const char* name, const char* fallback) {
    return with_path(std::string("profiles.") + name, [&] { return HolomorphicProfile::parse(text(name, fallback), domain); });
  };
  switch (case_tag) {
    case CaseTag::Liouville:
      return make_liouville(real("X", "x", domain.x, "0"), real("Y", "y", domain.y, "0"),
                            real("Xhat", "x", domain.x, "0"), real("Yhat", "y", domain.y, "0"));
    case CaseTag::ComplexLiouville:
      return make_complex_liouville(holo("h", "0"), holo("h1", "0"));
    case CaseTag::JordanBlock:
      return make_jordan_block(real("Y", "y", domain.y, "0"), real("Y1", "y", domain.y, "0"),
                               real("Y2", "y", domain.y, "0"), domain.x, jordan_form);
    case CaseTag::Custom:
      return make_custom(g0, F0, real("Cx", "x", domain.x, "1"), real("Cy", "y", domain.y, "1"));
  }
  throw ConfigError("case", "unsupported");
}

}  // namespace plv
