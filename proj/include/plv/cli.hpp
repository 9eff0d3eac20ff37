#pragma once

// Command dispatch for the pseudoliouville tool. Each command reads a scene,
// writes <out>/<command>.json (and .csv where a trajectory is produced) and
// returns the JSON document it wrote. Floats are printed with 17 significant
// digits, so identical inputs give byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plv/errors.hpp"
#include "plv/geoequiv.hpp"
#include "plv/hamflow.hpp"
#include "plv/metric.hpp"
#include "plv/quadint.hpp"
#include "plv/quantum.hpp"
#include "plv/scene.hpp"

namespace plv::cli {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write_json(out, it.value(), indent, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        write_json(out, e, indent, depth + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Pretty JSON with %.17g floats and null for non-finite values.
inline std::string to_text(const Json& j) {
  std::string out;
  detail::write_json(out, j, 2, 0);
  out += "\n";
  return out;
}

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"classify",    "bracket-check", "geodesic",
                                              "equiv-check", "quadrature",    "quantum-check"};
  return names;
}

struct Artifacts {
  Json summary;
  std::optional<std::string> csv;
};

namespace detail {

inline Json pair_of(double a, double b) { return Json::array({a, b}); }

inline Json complex_of(std::complex<double> z) { return pair_of(z.real(), z.imag()); }

inline Json eigen_data(const CaseLabel& l) {
  Json j;
  j["case"] = to_string(l.kind);
  switch (l.kind) {
    case CaseKind::RealDiagonal:
      j["eigenvalues"] = pair_of(l.first.real(), l.second.real());
      break;
    case CaseKind::ComplexConjugate:
      j["eigenvalues"] = Json::array({complex_of(l.first), complex_of(l.second)});
      break;
    case CaseKind::JordanBlock:
    case CaseKind::TrivialProportional:
      j["eigenvalue"] = l.first.real();
      break;
  }
  j["discriminant"] = l.discriminant;
  return j;
}

inline int side_for(int samples) { return std::max(1, static_cast<int>(std::lround(std::sqrt(double(samples))))); }

inline const PhasePoint& require_initial(const SceneConfig& sc) {
  if (!sc.initial) throw ConfigError("initial", "required by this command");
  return *sc.initial;
}

inline Json rect_json(const Rect& r) {
  Json j;
  j["x"] = pair_of(r.x.lo, r.x.hi);
  j["y"] = pair_of(r.y.lo, r.y.hi);
  return j;
}

inline Artifacts classify_cmd(const SceneConfig& sc, const NaturalSystem& sys) {
  const Rect& d = sys.domain();
  Json out = eigen_data(classify(sys, d.x.mid(), d.y.mid()));
  out["center"] = pair_of(d.x.mid(), d.y.mid());
  const auto expected = expected_kind(sys.case_tag());
  out["declared"] = to_string(sys.case_tag());
  Json pts = Json::array();
  int agree = 0;
  for (const Point& p : interior_grid(d, side_for(sc.run.samples))) {
    const CaseLabel l = classify(sys, p.x, p.y);
    if (expected && l.kind == *expected) ++agree;
    Json e;
    e["x"] = p.x;
    e["y"] = p.y;
    e.update(eigen_data(l));
    pts.push_back(std::move(e));
  }
  out["points_checked"] = pts.size();
  out["points_matching_declared"] = expected ? Json(agree) : Json(nullptr);
  out["points"] = std::move(pts);
  return {out, std::nullopt};
}

inline Artifacts bracket_cmd(const SceneConfig& sc, const NaturalSystem& sys) {
  double max_abs = 0.0, max_rel = 0.0, max_pot = 0.0;
  const auto pts = sample_phase_points(sys.domain(), static_cast<std::size_t>(sc.run.samples), sc.seed, sc.run.pmax);
  for (const PhasePoint& q : pts) {
    const double b = poisson_bracket(sys, q);
    const Energies e = hamiltonian(sys, q);
    max_abs = std::max(max_abs, std::abs(b));
    max_rel = std::max(max_rel, std::abs(b) / (1.0 + std::abs(e.H) + std::abs(e.F)));
    const auto r = check_potential_condition(sys, q.x, q.y);
    max_pot = std::max({max_pot, std::abs(r[0]), std::abs(r[1])});
  }
  Json out;
  out["max_abs_bracket"] = max_abs;
  out["max_relative_bracket"] = max_rel;
  out["max_potential_residual"] = max_pot;
  out["points"] = pts.size();
  out["pmax"] = sc.run.pmax;
  out["seed"] = sc.seed;
  return {out, std::nullopt};
}

inline Artifacts geodesic_cmd(const SceneConfig& sc, const NaturalSystem& sys) {
  const PhasePoint q0 = require_initial(sc);
  const Trajectory tr = integrate(sys, q0, sc.run.T, sc.run.tol, sc.run.cadence);
  std::ostringstream csv;
  write_csv(csv, tr);
  Json out;
  out["status"] = to_string(tr.status);
  out["t_end"] = tr.samples.back().t;
  out["samples"] = tr.samples.size();
  out["relative_drift"] = tr.relative_drift();
  out["steps"] = tr.stats.steps;
  out["rejected"] = tr.stats.rejected;
  out["evaluations"] = tr.stats.evaluations;
  out["tol"] = sc.run.tol;
  if (!tr.message.empty()) out["message"] = tr.message;
  return {out, csv.str()};
}

inline Artifacts equiv_cmd(const SceneConfig& sc, const NaturalSystem& sys) {
  const auto pts = interior_grid(sys.domain(), sc.run.grid);
  const MetricField g = sys.metric();
  Json out;
  out["grid"] = sc.run.grid;
  const ProjectiveFit own = projective_residual(g, metric_from_integral(g, sys.integral()), pts);
  if (sys.case_tag() == CaseTag::Custom) {
    out["projective_residual"] = nullptr;
    out["upsilon_max_error"] = nullptr;
    out["integral_metric_residual"] = own.max_residual;
    return {out, std::nullopt};
  }
  const ProjectiveFit fit = projective_residual(g, partner_metric(sys), pts);
  double ups_err = 0.0;
  Json samples = Json::array();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const OneForm c = closed_form_upsilon(sys, pts[k].x, pts[k].y);
    const OneForm& u = fit.upsilon[k];
    ups_err = std::max({ups_err, std::abs(u.x - c.x), std::abs(u.y - c.y)});
    Json e;
    e["x"] = pts[k].x;
    e["y"] = pts[k].y;
    e["upsilon"] = pair_of(u.x, u.y);
    e["closed_form"] = pair_of(c.x, c.y);
    samples.push_back(std::move(e));
  }
  out["projective_residual"] = fit.max_residual;
  out["upsilon_max_error"] = ups_err;
  out["integral_metric_residual"] = own.max_residual;
  out["points"] = std::move(samples);
  return {out, std::nullopt};
}

inline Artifacts quadrature_cmd(const SceneConfig& sc, const NaturalSystem& sys) {
  const PhasePoint q0 = require_initial(sc);
  const QuadratureRun& qr = sc.run.quadrature;
  const QuadParams params = qr.params ? *qr.params : quad_params_from(sys, q0);
  const ReducedState s0{q0.x, q0.y, params};
  const ReducedTrajectory tr = integrate_reduced(sys, s0, qr.T, sc.run.tol, sc.run.cadence, qr.threshold);
  std::string csv = "t,x,y,K\n";
  double drift = 0.0;
  char buf[160];
  for (const auto& s : tr.samples) {
    const double K = characteristic(sys, params, {q0.x, q0.y}, {s.x, s.y}, 1e-10);
    drift = std::max(drift, std::abs(K));
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.t, s.x, s.y, K);
    csv += buf;
  }
  Json tp;
  tp["reached"] = tr.stop_time.has_value();
  tp["stop_time"] = tr.stop_time ? Json(*tr.stop_time) : Json(nullptr);
  tp["estimated_time"] = tr.turning_time ? Json(*tr.turning_time) : Json(nullptr);
  Json cfg;
  cfg["x0"] = q0.x;
  cfg["y0"] = q0.y;
  cfg["H0"] = params.H0;
  cfg["F0"] = params.F0;
  cfg["eps1"] = params.eps1;
  cfg["eps2"] = params.eps2;
  cfg["derived_from_initial"] = !qr.params.has_value();
  cfg["T"] = qr.T;
  cfg["tol"] = sc.run.tol;
  cfg["threshold"] = qr.threshold;
  Json out;
  out["turning_point"] = std::move(tp);
  out["K_drift"] = drift;
  out["status"] = to_string(tr.status);
  out["samples"] = tr.samples.size();
  out["config"] = std::move(cfg);
  return {out, csv};
}

inline Artifacts quantum_cmd(const SceneConfig& sc, const NaturalSystem& sys) {
  const QuantumRun& q = sc.run.quantum;
  const double c = std::cos(q.rotation), s = std::sin(q.rotation);
  const NaturalSystem chart = q.rotation == 0.0 ? sys : change_coordinates(sys, Mat2::of(c, -s, s, c));
  const Rect& d = chart.domain();
  const Point center = q.center.value_or(d.center());
  const double hmax = *std::max_element(q.ladder.begin(), q.ladder.end());
  const double extent = q.extent.value_or(std::min(2.0, std::min(d.x.width(), d.y.width()) - 2.0 * hmax));
  const ConvergenceReport rep =
      convergence_study(chart, center, extent, q.ladder, smooth_test_functions(center, q.sigma));
  Json out;
  out["ladder"] = rep.spacings;
  out["residuals"] = rep.residuals;
  out["scales"] = rep.scales;
  out["orders"] = rep.orders;
  double lo = INFINITY, hi = -INFINITY;
  for (double o : rep.orders) lo = std::min(lo, o), hi = std::max(hi, o);
  out["min_order"] = lo;
  out["max_order"] = hi;
  out["region"] = rect_json(rep.region);
  out["center"] = pair_of(center.x, center.y);
  out["extent"] = extent;
  out["sigma"] = q.sigma;
  out["rotation"] = q.rotation;
  return {out, std::nullopt};
}

}  // namespace detail

/// Runs one command on a parsed scene without touching the filesystem.
inline Artifacts execute(const std::string& command, const SceneConfig& sc) {
  const NaturalSystem sys = sc.build();
  if (command == "classify") return detail::classify_cmd(sc, sys);
  if (command == "bracket-check") return detail::bracket_cmd(sc, sys);
  if (command == "geodesic") return detail::geodesic_cmd(sc, sys);
  if (command == "equiv-check") return detail::equiv_cmd(sc, sys);
  if (command == "quadrature") return detail::quadrature_cmd(sc, sys);
  if (command == "quantum-check") return detail::quantum_cmd(sc, sys);
  throw ConfigError("command", "unknown command '" + command + "'");
}

/// Runs a command and writes <out>/<command>.json and, if produced, .csv.
inline Json run(const std::string& command, const std::string& scene_file, const std::filesystem::path& out_dir,
                std::optional<std::uint64_t> seed = std::nullopt) {
  SceneConfig sc = load_scene(scene_file);
  if (seed) sc.seed = *seed;
  Artifacts a = execute(command, sc);
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& ext, const std::string& body) {
    const auto path = out_dir / (command + ext);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << body;
  };
  write(".json", to_text(a.summary));
  if (a.csv) write(".csv", *a.csv);
  return a.summary;
}

/// Machine-readable description of an exception and the process exit code.
inline std::pair<Json, int> describe_error(const std::exception& e) {
  Json err;
  int code = 1;
  err["message"] = e.what();
  if (const auto* pe = dynamic_cast<const plv::detail::ProfileError*>(&e)) {
    err["type"] = "parse";
    err["path"] = pe->path();
    err["offset"] = pe->offset();
    code = 2;
  } else if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    err["type"] = "config";
    err["path"] = ce->path();
    code = 2;
  } else if (const auto* pe2 = dynamic_cast<const ParseError*>(&e)) {
    err["type"] = "parse";
    err["offset"] = pe2->offset();
    code = 2;
  } else if (const auto* de = dynamic_cast<const DegenerateError*>(&e)) {
    err["type"] = "degenerate";
    err["x"] = de->x();
    err["y"] = de->y();
    code = 3;
  } else if (dynamic_cast<const DomainError*>(&e)) {
    err["type"] = "domain";
    code = 3;
  } else if (dynamic_cast<const EvalError*>(&e)) {
    err["type"] = "evaluation";
    code = 3;
  } else if (dynamic_cast<const ConvergenceError*>(&e)) {
    err["type"] = "convergence";
    code = 4;
  } else {
    err["type"] = dynamic_cast<const Error*>(&e) ? "error" : "internal";
  }
  Json out;
  out["error"] = std::move(err);
  return {out, code};
}

}  // namespace plv::cli
