#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "asymptotic.hpp"
#include "exact.hpp"
#include "layer_calculus.hpp"
#include "mixed_fem.hpp"
#include "parallel.hpp"
#include "radial_oracle.hpp"

namespace thinlayer {

inline constexpr const char* version = "0.1.0";

using json = nlohmann::ordered_json;

struct ExcitationSpec {
  std::string type = "plane_wave";  // or "modes"
  double amplitude = 1;
  struct Entry {
    int degree;
    Family family;
    cplx value;
  };
  std::vector<Entry> modes;
};

struct ExperimentConfig {
  MediumTriple media;
  LayeredSphereGeometry geometry;
  ExcitationSpec excitation;
  int truncation = 8;
  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
  std::vector<std::string> models{"background", "corrector", "gitc_general", "gitc_cell"};
  FormulaSet formulas = FormulaSet::standard;
  std::string csv_path, json_path;
  Tolerances tolerances;
  int fem_elements = 400, fem_order = 2;
  int oracle_points = 20000;
  unsigned workers = 0;  // 0: hardware concurrency (capped)

  Excitation make_excitation() const {
    if (excitation.type == "plane_wave") return Excitation::plane_wave(truncation, excitation.amplitude);
    Excitation e(truncation);
    for (auto& m : excitation.modes)
      if (m.degree <= truncation) e.set({m.family, m.degree}, m.value);
    return e;
  }
};

inline const std::set<std::string>& known_models() {
  static const std::set<std::string> s{"exact",    "background", "corrector", "gitc_general",
                                       "gitc_cell", "mixed_fem", "identities"};
  return s;
}

namespace detail {

template <class T>
T get_or(const json& j, const std::string& key, const std::string& path, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError(path + key, "invalid value");
  }
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto* a : keys) ok = ok || k == a;
    if (!ok) throw ConfigError(path + k, "unknown key");
  }
}

inline Medium medium_from(const json& j, const std::string& path, Medium def) {
  reject_unknown(j, path + ".", {"mu", "epsilon", "sigma"});
  Medium m{get_or(j, "mu", path + ".", def.mu), get_or(j, "epsilon", path + ".", def.epsilon),
           get_or(j, "sigma", path + ".", def.sigma)};
  if (!(m.mu > 0)) throw ConfigError(path + ".mu", "must be positive");
  if (!(m.epsilon > 0)) throw ConfigError(path + ".epsilon", "must be positive");
  if (!(m.sigma >= 0)) throw ConfigError(path + ".sigma", "must be nonnegative");
  return m;
}

inline Family family_from(const std::string& s, const std::string& path) {
  if (s == "rotated") return Family::rotated;
  if (s == "gradient") return Family::gradient;
  throw ConfigError(path, "family must be 'rotated' or 'gradient'");
}

inline const char* to_string(FormulaSet f) { return f == FormulaSet::standard ? "standard" : "consistent"; }

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  if (c.truncation < 1 || c.truncation > 64) throw ConfigError("truncation", "must lie in 1..64");
  if (c.eps_list.size() < 3) throw ConfigError("eps_list", "needs at least 3 entries for slope fitting");
  for (size_t i = 0; i < c.eps_list.size(); ++i) {
    if (!(c.eps_list[i] > 0)) throw ConfigError("eps_list", "entries must be positive");
    if (i && !(c.eps_list[i] < c.eps_list[i - 1])) throw ConfigError("eps_list", "must be strictly decreasing");
    if (!(c.eps_list[i] < 0.5 * (c.geometry.r_out - c.geometry.r_gamma)))
      throw ConfigError("eps_list", "entries must stay below (r_out - r_gamma)/2");
  }
  if (!(c.geometry.r_gamma > 0)) throw ConfigError("geometry.r_gamma", "must be positive");
  if (!(c.geometry.r_out > c.geometry.r_gamma + annulus_offset))
    throw ConfigError("geometry.r_out", "must exceed r_gamma + 0.15");
  if (!(c.media.omega > 0)) throw ConfigError("omega", "must be positive");
  for (auto& m : c.models)
    if (!known_models().count(m)) throw ConfigError("models", "unknown model '" + m + "'");
  if (c.fem_order != 1 && c.fem_order != 2) throw ConfigError("fem.order", "must be 1 or 2");
  if (c.fem_elements < 4) throw ConfigError("fem.elements", "must be at least 4");
  if (c.tolerances.quadrature_order < 2) throw ConfigError("tolerances.quadrature_order", "must be >= 2");
  if (c.tolerances.y3_grid < 2) throw ConfigError("tolerances.y3_grid", "must be >= 2");
}

inline ExperimentConfig config_from_json(const json& j) {
  using detail::get_or;
  detail::reject_unknown(j, "", {"media", "omega", "geometry", "excitation", "truncation", "eps_list", "models",
                                 "formulas", "output", "tolerances", "fem", "oracle", "workers"});
  ExperimentConfig c;
  if (j.contains("media")) {
    const auto& m = j["media"];
    detail::reject_unknown(m, "media.", {"cytoplasm", "membrane", "exterior"});
    if (m.contains("cytoplasm")) c.media.cytoplasm = detail::medium_from(m["cytoplasm"], "media.cytoplasm", c.media.cytoplasm);
    if (m.contains("membrane")) c.media.membrane = detail::medium_from(m["membrane"], "media.membrane", c.media.membrane);
    if (m.contains("exterior")) c.media.exterior = detail::medium_from(m["exterior"], "media.exterior", c.media.exterior);
  }
  c.media.omega = get_or(j, "omega", "", c.media.omega);
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    detail::reject_unknown(g, "geometry.", {"r_gamma", "eps_layer", "r_out"});
    c.geometry.r_gamma = get_or(g, "r_gamma", "geometry.", c.geometry.r_gamma);
    c.geometry.eps_layer = get_or(g, "eps_layer", "geometry.", c.geometry.eps_layer);
    c.geometry.r_out = get_or(g, "r_out", "geometry.", c.geometry.r_out);
  }
  if (j.contains("excitation")) {
    const auto& e = j["excitation"];
    detail::reject_unknown(e, "excitation.", {"type", "amplitude", "modes"});
    c.excitation.type = get_or<std::string>(e, "type", "excitation.", "plane_wave");
    if (c.excitation.type != "plane_wave" && c.excitation.type != "modes")
      throw ConfigError("excitation.type", "must be 'plane_wave' or 'modes'");
    c.excitation.amplitude = get_or(e, "amplitude", "excitation.", 1.0);
    if (e.contains("modes")) {
      if (!e["modes"].is_array()) throw ConfigError("excitation.modes", "expected an array");
      for (size_t i = 0; i < e["modes"].size(); ++i) {
        const auto& m = e["modes"][i];
        const std::string p = "excitation.modes[" + std::to_string(i) + "].";
        detail::reject_unknown(m, p, {"degree", "family", "re", "im"});
        if (!m.contains("degree")) throw ConfigError(p + "degree", "missing");
        if (!m.contains("family")) throw ConfigError(p + "family", "missing");
        const int deg = get_or(m, "degree", p, 0);
        if (deg < 1 || deg > 64) throw ConfigError(p + "degree", "must lie in 1..64");
        c.excitation.modes.push_back({deg, detail::family_from(get_or<std::string>(m, "family", p, ""), p + "family"),
                                      cplx(get_or(m, "re", p, 0.0), get_or(m, "im", p, 0.0))});
      }
    }
  }
  c.truncation = get_or(j, "truncation", "", c.truncation);
  if (j.contains("eps_list")) {
    c.eps_list = get_or<std::vector<double>>(j, "eps_list", "", {});
  } else {
    for (auto& e : c.eps_list) e *= c.geometry.r_gamma;
  }
  if (j.contains("models")) c.models = get_or<std::vector<std::string>>(j, "models", "", {});
  if (j.contains("formulas")) {
    const auto f = get_or<std::string>(j, "formulas", "", "standard");
    if (f == "standard") c.formulas = FormulaSet::standard;
    else if (f == "consistent") c.formulas = FormulaSet::consistent;
    else throw ConfigError("formulas", "must be 'standard' or 'consistent'");
  }
  if (j.contains("output")) {
    detail::reject_unknown(j["output"], "output.", {"csv", "json"});
    c.csv_path = get_or<std::string>(j["output"], "csv", "output.", "");
    c.json_path = get_or<std::string>(j["output"], "json", "output.", "");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    detail::reject_unknown(t, "tolerances.", {"condition_cap", "quadrature_order", "y3_grid", "degenerate_error"});
    c.tolerances.condition_cap = get_or(t, "condition_cap", "tolerances.", c.tolerances.condition_cap);
    c.tolerances.quadrature_order = get_or(t, "quadrature_order", "tolerances.", c.tolerances.quadrature_order);
    c.tolerances.y3_grid = get_or(t, "y3_grid", "tolerances.", c.tolerances.y3_grid);
    c.tolerances.degenerate_error = get_or(t, "degenerate_error", "tolerances.", c.tolerances.degenerate_error);
  }
  if (j.contains("fem")) {
    detail::reject_unknown(j["fem"], "fem.", {"elements", "order"});
    c.fem_elements = get_or(j["fem"], "elements", "fem.", c.fem_elements);
    c.fem_order = get_or(j["fem"], "order", "fem.", c.fem_order);
  }
  if (j.contains("oracle")) {
    detail::reject_unknown(j["oracle"], "oracle.", {"grid_points"});
    c.oracle_points = get_or(j["oracle"], "grid_points", "oracle.", c.oracle_points);
  }
  c.workers = get_or(j, "workers", "", 0u);
  validate(c);
  return c;
}

inline json config_to_json(const ExperimentConfig& c) {
  auto med = [](const Medium& m) { return json{{"mu", m.mu}, {"epsilon", m.epsilon}, {"sigma", m.sigma}}; };
  json j;
  j["media"] = {{"cytoplasm", med(c.media.cytoplasm)}, {"membrane", med(c.media.membrane)}, {"exterior", med(c.media.exterior)}};
  j["omega"] = c.media.omega;
  j["geometry"] = {{"r_gamma", c.geometry.r_gamma}, {"eps_layer", c.geometry.eps_layer}, {"r_out", c.geometry.r_out}};
  json e = {{"type", c.excitation.type}, {"amplitude", c.excitation.amplitude}};
  if (!c.excitation.modes.empty()) {
    e["modes"] = json::array();
    for (auto& m : c.excitation.modes)
      e["modes"].push_back({{"degree", m.degree}, {"family", to_string(m.family)}, {"re", m.value.real()}, {"im", m.value.imag()}});
  }
  j["excitation"] = e;
  j["truncation"] = c.truncation;
  j["eps_list"] = c.eps_list;
  j["models"] = c.models;
  j["formulas"] = detail::to_string(c.formulas);
  j["output"] = {{"csv", c.csv_path}, {"json", c.json_path}};
  j["tolerances"] = {{"condition_cap", c.tolerances.condition_cap},
                     {"quadrature_order", c.tolerances.quadrature_order},
                     {"y3_grid", c.tolerances.y3_grid},
                     {"degenerate_error", c.tolerances.degenerate_error}};
  j["fem"] = {{"elements", c.fem_elements}, {"order", c.fem_order}};
  j["oracle"] = {{"grid_points", c.oracle_points}};
  j["workers"] = c.workers;
  return j;
}

inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot read config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

// FNV-1a over the canonical serialization; output paths and worker count are excluded
// because they do not change the numbers.
inline std::string config_hash(const ExperimentConfig& c) {
  json j = config_to_json(c);
  j.erase("output");
  j.erase("workers");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

// Solver failure inside an experiment, tagged with where it happened.
struct ExperimentError : std::runtime_error {
  std::string model;
  double eps;
  std::optional<ModeIndex> mode;
  ExperimentError(std::string m, double e, std::optional<ModeIndex> mi, const std::string& what)
      : std::runtime_error(m + " eps=" + std::to_string(e) +
                           (mi ? " n=" + std::to_string(mi->degree) + " " + to_string(mi->family) : std::string()) +
                           ": " + what),
        model(std::move(m)), eps(e), mode(mi) {}
};

namespace detail {

template <class Fn>
auto with_context(const std::string& model, double eps, std::optional<ModeIndex> mi, Fn&& fn) {
  try {
    return fn();
  } catch (const ExperimentError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExperimentError(model, eps, mi, e.what());
  }
}

}  // namespace detail

struct ReportRow {
  std::string model, region;
  double eps = 0;
  double error = 0;
  std::optional<double> slope;  // empty: not applicable
  bool degenerate = false;      // slope undefined because the errors vanish
  std::optional<bool> pass;     // empty: no expectation attached
  bool operator==(const ReportRow&) const = default;
};

struct IdentityRow {
  int degree;
  Family family;
  IdentityResiduals r;
};

struct ConditionRow {
  std::string model;
  double eps;
  double max_condition;
  bool operator==(const ConditionRow&) const = default;
};

struct ConvergenceReport {
  std::string config_hash;
  std::string formulas;
  std::vector<ReportRow> rows;
  std::vector<IdentityRow> identities;
  std::vector<ConditionRow> conditions;
};

namespace detail {

// Expected orders: background [0.9, 1.3]; corrector [1.8, 2.4]; in-layer and GITC >= 1.8.
struct Expectation {
  double lo, hi;
};

inline void add_series(ConvergenceReport& rep, const std::string& model, const std::string& region,
                       const std::vector<double>& eps, const std::vector<double>& err, std::optional<Expectation> ex,
                       const Tolerances& tol) {
  bool degenerate = true;
  for (double e : err) degenerate = degenerate && e <= tol.degenerate_error;
  std::optional<double> slope;
  std::optional<bool> pass;
  if (degenerate) {
    pass = true;
  } else {
    bool fit_ok = true;
    for (double e : err) fit_ok = fit_ok && e > 0;
    if (fit_ok) {
      std::vector<ConvergencePoint> pts;
      for (size_t i = 0; i < eps.size(); ++i) pts.push_back({eps[i], err[i]});
      slope = fit_loglog_slope(pts);
    }
    if (ex) pass = slope && *slope >= ex->lo && *slope <= ex->hi;
  }
  for (size_t i = 0; i < eps.size(); ++i) rep.rows.push_back({model, region, eps[i], err[i], slope, degenerate, pass});
}

inline void add_threshold(ConvergenceReport& rep, const std::string& model, const std::string& region, double eps,
                          double err, double threshold) {
  rep.rows.push_back({model, region, eps, err, std::nullopt, false, err <= threshold});
}

}  // namespace detail

// Gamma-trace and lambda discrepancies of the mixed FEM against the modal GITC, all modes.
struct FemComparison {
  double trace_error = 0;   // sqrt(sum |diff|^2 / sum |ref|^2) over modes and both sides
  double lambda_error = 0;  // max over modes with a multiplier
  double max_schur_condition = 0;
  double max_residual = 0;
};

inline FemComparison compare_fem(const MediumTriple& md, const LayeredSphereGeometry& g, const Excitation& exc,
                                 double eps, Variant v, int elements, int order, const ModelOptions& opt = {},
                                 unsigned workers = 0) {
  const auto modes = exc.modes();
  std::vector<double> num(modes.size()), den(modes.size()), lam(modes.size()), cond(modes.size()), res(modes.size());
  const RadialMesh mesh = make_radial_mesh(g, elements, order);
  parallel_for(
      modes.size(),
      [&](size_t i) { detail::with_context("mixed_fem", eps, modes[i], [&] {
        const auto gm = solve_gitc_mode(modes[i], md, g, exc, eps, v, opt);
        const auto fs = solve_saddle(assemble_mode(modes[i], v, mesh, md, g, eps, exc, opt));
        const Traces a = gm.field.traces(g.r_gamma, Side::minus), b = gm.field.traces(g.r_gamma, Side::plus);
        num[i] = std::norm(fs.minus.te - a.te) + std::norm(fs.plus.te - b.te);
        den[i] = std::norm(a.te) + std::norm(b.te);
        lam[i] = recovered_lambda_check(fs, gm, g.r_gamma);
        cond[i] = fs.schur_condition;
        res[i] = fs.residual;
      }); },
      workers);
  FemComparison c;
  double sn = 0, sd = 0;
  for (size_t i = 0; i < modes.size(); ++i) {
    sn += num[i], sd += den[i];
    c.lambda_error = std::max(c.lambda_error, lam[i]);
    c.max_schur_condition = std::max(c.max_schur_condition, cond[i]);
    c.max_residual = std::max(c.max_residual, res[i]);
  }
  c.trace_error = sd > 0 ? std::sqrt(sn / sd) : std::sqrt(sn);
  return c;
}

// Max relative surface-trace discrepancy, exact solver vs radial oracle, over all modes.
inline double oracle_discrepancy(const MediumTriple& md, const LayeredSphereGeometry& g, const Excitation& exc,
                                 int grid_points, unsigned workers = 0) {
  const auto modes = exc.modes();
  std::vector<double> err(modes.size());
  parallel_for(
      modes.size(),
      [&](size_t i) { detail::with_context("exact", g.eps_layer, modes[i], [&] {
        const auto ex = solve_exact_mode(modes[i], md, g, exc);
        const auto o = radial_ode_oracle(modes[i], md, g, exc, grid_points);
        const double R = g.r_gamma, Re = R + g.eps_layer;
        const Traces t[4] = {ex.field.traces(R, Side::minus), ex.field.traces(R, Side::plus),
                             ex.field.traces(Re, Side::minus), ex.field.traces(Re, Side::plus)};
        const Traces u[4] = {o.gamma_minus, o.gamma_plus, o.outer_minus, o.outer_plus};
        double num = 0, den = 0;
        for (int k = 0; k < 4; ++k) {
          num += std::norm(t[k].te - u[k].te) + std::norm(t[k].th - u[k].th);
          den += std::norm(t[k].te) + std::norm(t[k].th);
        }
        err[i] = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
      }); },
      workers);
  double m = 0;
  for (double e : err) m = std::max(m, e);
  return m;
}

// Off-layer norms of E^eps - model for a two-region model, summed over modes.
struct OffLayerErrors {
  double cytoplasm = 0, annulus = 0, max_condition = 0;
};

template <class ModelFn>
OffLayerErrors off_layer_errors(const std::string& label, const MediumTriple& md, const LayeredSphereGeometry& g, const Excitation& exc,
                                ModelFn&& model, const Tolerances& tol, unsigned workers = 0) {
  const auto modes = exc.modes();
  std::vector<double> cy(modes.size()), an(modes.size()), cond(modes.size());
  parallel_for(
      modes.size(),
      [&](size_t i) { detail::with_context(label, g.eps_layer, modes[i], [&] {
        const auto ex = solve_exact_mode(modes[i], md, g, exc, ShellBasis::j_y, tol);
        const TwoRegionModalSolution m = model(modes[i]);
        FieldCombination d;
        d.add(ex.field).add(m.field, -1.0);
        auto f = [&](double r) { return d.sample(r); };
        cy[i] = mode_norm_sq(f, 0.0, g.r_gamma, tol.quadrature_order);
        an[i] = mode_norm_sq(f, g.r_gamma + annulus_offset, g.r_out, tol.quadrature_order);
        cond[i] = std::max(ex.condition, m.condition);
      }); },
      workers);
  OffLayerErrors e;
  for (size_t i = 0; i < modes.size(); ++i) e.cytoplasm += cy[i], e.annulus += an[i], e.max_condition = std::max(e.max_condition, cond[i]);
  e.cytoplasm = std::sqrt(e.cytoplasm);
  e.annulus = std::sqrt(e.annulus);
  return e;
}

inline ConvergenceReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ConvergenceReport rep;
  rep.config_hash = config_hash(cfg);
  rep.formulas = detail::to_string(cfg.formulas);
  const Excitation exc = cfg.make_excitation();
  const auto& tol = cfg.tolerances;
  ModelOptions opt;
  opt.formulas = cfg.formulas;
  const auto& E = cfg.eps_list;
  auto at = [&](double eps) {
    LayeredSphereGeometry g = cfg.geometry;
    g.eps_layer = eps;
    return g;
  };
  const detail::Expectation first{0.9, 1.3}, second{1.8, 2.4}, at_least_second{1.8, INFINITY};

  for (const auto& model : cfg.models) {
    if (model == "exact") {
      for (double eps : E)
        detail::add_threshold(rep, "exact", "traces", eps, oracle_discrepancy(cfg.media, at(eps), exc, cfg.oracle_points, cfg.workers), 1e-6);
    } else if (model == "background" || model == "corrector") {
      const int m = model == "background" ? 0 : 1;
      const auto r = detail::with_context(model, E.front(), std::nullopt, [&] { return remainder_norms(m, E, cfg.media, cfg.geometry, exc, cfg.truncation, Variant::general, opt, tol); });
      std::vector<double> cy, an, sh, sup;
      for (auto& row : r.rows) cy.push_back(row.cytoplasm), an.push_back(row.annulus), sh.push_back(row.shell), sup.push_back(row.shell_sup);
      const auto ex = m == 0 ? first : second;
      detail::add_series(rep, model, "cytoplasm", E, cy, ex, tol);
      detail::add_series(rep, model, "annulus", E, an, ex, tol);
      detail::add_series(rep, model, "shell", E, sh, std::nullopt, tol);
      detail::add_series(rep, model, "layer_sup", E, sup, m == 0 ? first : at_least_second, tol);
      if (m == 1)
        for (auto& row : r.rows) {
          detail::add_threshold(rep, model, "jump_gamma", row.eps, row.jump_gamma, 1e-10);
          detail::add_threshold(rep, model, "jump_gamma_eps", row.eps, row.jump_gamma_eps, 1e-10);
        }
    } else if (model == "gitc_general" || model == "gitc_cell") {
      const Variant v = model == "gitc_general" ? Variant::general : Variant::cell;
      const MediumTriple md = v == Variant::cell ? cfg.media.cell_variant() : cfg.media;
      std::vector<double> cy, an;
      for (double eps : E) {
        const auto g = at(eps);
        const auto e = off_layer_errors(model, md, g, exc, [&](const ModeIndex& mi) { return solve_gitc_mode(mi, md, g, exc, eps, v, opt); }, tol, cfg.workers);
        cy.push_back(e.cytoplasm), an.push_back(e.annulus);
        rep.conditions.push_back({model, eps, e.max_condition});
      }
      detail::add_series(rep, model, "cytoplasm", E, cy, at_least_second, tol);
      detail::add_series(rep, model, "annulus", E, an, at_least_second, tol);
    } else if (model == "mixed_fem") {
      for (Variant v : {Variant::general, Variant::cell}) {
        const MediumTriple md = v == Variant::cell ? cfg.media.cell_variant() : cfg.media;
        if (v == Variant::general && md.membrane.mu == md.exterior.mu) continue;  // formulation needs B != 0
        const std::string tag = v == Variant::general ? "general" : "cell";
        for (double eps : E) {
          const auto c = compare_fem(md, at(eps), exc, eps, v, cfg.fem_elements, cfg.fem_order, opt, cfg.workers);
          detail::add_threshold(rep, "mixed_fem", "gamma_trace_" + tag, eps, c.trace_error, 1e-5);
          detail::add_threshold(rep, "mixed_fem", "lambda_" + tag, eps, c.lambda_error, 1e-5);
          rep.conditions.push_back({"mixed_fem_" + tag, eps, c.max_schur_condition});
        }
      }
    } else if (model == "identities") {
      double mx[4] = {0, 0, 0, 0};
      for (const auto& mi : exc.modes()) {
        const auto r = detail::with_context("identities", cfg.geometry.eps_layer, mi, [&] {
          return check_layer_identities(solve_background_mode(mi, cfg.media, cfg.geometry, exc), mi, cfg.media, cfg.geometry);
        });
        rep.identities.push_back({mi.degree, mi.family, r});
        mx[0] = std::max(mx[0], r.normal_jump), mx[1] = std::max(mx[1], r.tangential_jump), mx[2] = std::max(mx[2], r.curl_trace);
        mx[3] = std::max(mx[3], r.curl_trace_corrected);
      }
      const char* names[4] = {"normal_jump", "tangential_jump", "curl_trace", "curl_trace_corrected"};
      for (int k = 0; k < 4; ++k) detail::add_threshold(rep, "identities", names[k], 0.0, mx[k], 1e-10);
    }
  }
  return rep;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string report_to_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << "model,region,eps,error,slope,pass\n";
  for (auto& r : rep.rows) {
    os << r.model << ',' << r.region << ',' << format_number(r.eps) << ',' << format_number(r.error) << ',';
    if (r.degenerate) os << "degenerate";
    else if (r.slope) os << format_number(*r.slope);
    os << ',';
    if (r.pass) os << (*r.pass ? "true" : "false");
    os << '\n';
  }
  return os.str();
}

inline json report_to_json(const ConvergenceReport& rep) {
  json j;
  j["metadata"] = {{"config_hash", rep.config_hash}, {"version", version}, {"formulas", rep.formulas}};
  j["rows"] = json::array();
  for (auto& r : rep.rows) {
    json row = {{"model", r.model}, {"region", r.region}, {"eps", r.eps}, {"error", r.error}};
    row["slope"] = r.slope ? json(*r.slope) : json(nullptr);
    row["degenerate"] = r.degenerate;
    row["pass"] = r.pass ? json(*r.pass) : json(nullptr);
    j["rows"].push_back(row);
  }
  j["identities"] = json::array();
  for (auto& i : rep.identities)
    j["identities"].push_back({{"degree", i.degree},
                               {"family", to_string(i.family)},
                               {"normal_jump", i.r.normal_jump},
                               {"tangential_jump", i.r.tangential_jump},
                               {"curl_trace", i.r.curl_trace},
                               {"curl_trace_corrected", i.r.curl_trace_corrected}});
  j["conditions"] = json::array();
  for (auto& c : rep.conditions) j["conditions"].push_back({{"model", c.model}, {"eps", c.eps}, {"max_condition", c.max_condition}});
  return j;
}

inline ConvergenceReport report_from_json(const json& j) {
  ConvergenceReport rep;
  rep.config_hash = j.at("metadata").at("config_hash").get<std::string>();
  rep.formulas = j.at("metadata").value("formulas", "");
  for (auto& r : j.at("rows")) {
    ReportRow row;
    row.model = r.at("model").get<std::string>();
    row.region = r.at("region").get<std::string>();
    row.eps = r.at("eps").get<double>();
    row.error = r.at("error").get<double>();
    if (!r.at("slope").is_null()) row.slope = r.at("slope").get<double>();
    row.degenerate = r.at("degenerate").get<bool>();
    if (!r.at("pass").is_null()) row.pass = r.at("pass").get<bool>();
    rep.rows.push_back(row);
  }
  for (auto& i : j.at("identities")) {
    IdentityRow row{i.at("degree").get<int>(), detail::family_from(i.at("family").get<std::string>(), "family"), {}};
    row.r.normal_jump = i.at("normal_jump").get<double>();
    row.r.tangential_jump = i.at("tangential_jump").get<double>();
    row.r.curl_trace = i.at("curl_trace").get<double>();
    row.r.curl_trace_corrected = i.at("curl_trace_corrected").get<double>();
    rep.identities.push_back(row);
  }
  for (auto& c : j.at("conditions"))
    rep.conditions.push_back({c.at("model").get<std::string>(), c.at("eps").get<double>(), c.at("max_condition").get<double>()});
  return rep;
}

enum class ReportFormat { csv, json };

inline void emit_report(const ConvergenceReport& rep, ReportFormat fmt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write report to " + path);
  if (fmt == ReportFormat::csv) out << report_to_csv(rep);
  else out << report_to_json(rep).dump(2) << '\n';
  if (!out) throw std::ios_base::failure("write failed for " + path);
}

}  // namespace thinlayer
