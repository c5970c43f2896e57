#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "thinlayer/experiment.hpp"

using namespace thinlayer;

namespace {

// Every flag maps onto one config key; unset flags leave the config untouched.
struct Overrides {
  std::optional<double> omega, r_gamma, eps_layer, r_out, amplitude;
  std::optional<int> truncation, fem_elements, fem_order, oracle_points, quadrature_order, y3_grid;
  std::optional<unsigned> workers;
  std::vector<double> eps_list;
  std::vector<std::string> models;
  std::optional<std::string> formulas, csv, json_out;

  void attach(CLI::App& app) {
    app.add_option("--omega", omega, "omega");
    app.add_option("--r-gamma", r_gamma, "geometry.r_gamma");
    app.add_option("--eps-layer", eps_layer, "geometry.eps_layer");
    app.add_option("--r-out", r_out, "geometry.r_out");
    app.add_option("--amplitude", amplitude, "excitation.amplitude");
    app.add_option("--truncation", truncation, "truncation");
    app.add_option("--eps-list", eps_list, "eps_list")->delimiter(',');
    app.add_option("--models", models, "models")->delimiter(',');
    app.add_option("--formulas", formulas, "formulas (standard|consistent)");
    app.add_option("--csv", csv, "output.csv");
    app.add_option("--json", json_out, "output.json");
    app.add_option("--fem-elements", fem_elements, "fem.elements");
    app.add_option("--fem-order", fem_order, "fem.order");
    app.add_option("--oracle-points", oracle_points, "oracle.grid_points");
    app.add_option("--quadrature-order", quadrature_order, "tolerances.quadrature_order");
    app.add_option("--y3-grid", y3_grid, "tolerances.y3_grid");
    app.add_option("--workers", workers, "workers");
  }

  void apply(json& j) const {
    if (omega) j["omega"] = *omega;
    if (r_gamma) j["geometry"]["r_gamma"] = *r_gamma;
    if (eps_layer) j["geometry"]["eps_layer"] = *eps_layer;
    if (r_out) j["geometry"]["r_out"] = *r_out;
    if (amplitude) j["excitation"]["amplitude"] = *amplitude;
    if (truncation) j["truncation"] = *truncation;
    if (!eps_list.empty()) j["eps_list"] = eps_list;
    if (!models.empty()) j["models"] = models;
    if (formulas) j["formulas"] = *formulas;
    if (csv) j["output"]["csv"] = *csv;
    if (json_out) j["output"]["json"] = *json_out;
    if (fem_elements) j["fem"]["elements"] = *fem_elements;
    if (fem_order) j["fem"]["order"] = *fem_order;
    if (oracle_points) j["oracle"]["grid_points"] = *oracle_points;
    if (quadrature_order) j["tolerances"]["quadrature_order"] = *quadrature_order;
    if (y3_grid) j["tolerances"]["y3_grid"] = *y3_grid;
    if (workers) j["workers"] = *workers;
  }
};

ExperimentConfig load(const std::string& path, const Overrides& ov, std::optional<std::vector<std::string>> force_models = {}) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot read config file");
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(path, std::string("malformed JSON: ") + e.what());
    }
  }
  ov.apply(j);
  if (force_models) j["models"] = *force_models;
  return config_from_json(j);
}

json traces_json(const Traces& t) {
  return {{"te", {t.te.real(), t.te.imag()}}, {"th", {t.th.real(), t.th.imag()}}};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::ios_base::failure("cannot write " + path);
}

void emit(const ConvergenceReport& rep, const ExperimentConfig& cfg) {
  if (!cfg.csv_path.empty()) emit_report(rep, ReportFormat::csv, cfg.csv_path);
  if (!cfg.json_path.empty()) emit_report(rep, ReportFormat::json, cfg.json_path);
  if (cfg.csv_path.empty() && cfg.json_path.empty()) std::cout << report_to_csv(rep);
}

json per_mode(const ExperimentConfig& cfg, const std::string& model) {
  const Excitation exc = cfg.make_excitation();
  const auto modes = exc.modes();
  const auto& g = cfg.geometry;
  ModelOptions opt;
  opt.formulas = cfg.formulas;
  std::vector<json> out(modes.size());
  parallel_for(
      modes.size(),
      [&](size_t i) {
        const auto& mi = modes[i];
        json m = {{"degree", mi.degree}, {"family", to_string(mi.family)}};
        if (model == "exact") {
          const auto s = solve_exact_mode(mi, cfg.media, g, exc, ShellBasis::j_y, cfg.tolerances);
          m["gamma_minus"] = traces_json(s.field.traces(g.r_gamma, Side::minus));
          m["gamma_plus"] = traces_json(s.field.traces(g.r_gamma, Side::plus));
          m["outer_minus"] = traces_json(s.field.traces(g.r_gamma + g.eps_layer, Side::minus));
          m["outer_plus"] = traces_json(s.field.traces(g.r_gamma + g.eps_layer, Side::plus));
          m["condition"] = s.condition;
          m["residual"] = s.residual;
        } else {
          TwoRegionModalSolution s;
          if (model == "background") s = solve_background_mode(mi, cfg.media, g, exc);
          else if (model == "corrector") s = solve_corrector_mode(mi, cfg.media, g, solve_background_mode(mi, cfg.media, g, exc), Variant::general, opt);
          else if (model == "gitc_general") s = solve_gitc_mode(mi, cfg.media, g, exc, g.eps_layer, Variant::general, opt);
          else s = solve_gitc_mode(mi, cfg.media.cell_variant(), g, exc, g.eps_layer, Variant::cell, opt);
          m["gamma_minus"] = traces_json(s.field.traces(g.r_gamma, Side::minus));
          m["gamma_plus"] = traces_json(s.field.traces(g.r_gamma, Side::plus));
          m["condition"] = s.condition;
        }
        out[i] = m;
      },
      cfg.workers);
  json j;
  j["metadata"] = {{"config_hash", config_hash(cfg)}, {"version", version}, {"model", model}};
  j["modes"] = out;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thin-layer Maxwell asymptotics on concentric spheres"};
  app.require_subcommand(1);
  std::string config;
  Overrides ov;
  std::string model = "gitc_general";

  auto* exact = app.add_subcommand("solve-exact", "per-mode traces of the three-region solution");
  auto* smodel = app.add_subcommand("solve-model", "per-mode Gamma traces of a two-region model");
  auto* conv = app.add_subcommand("converge", "eps sweep for the configured models");
  auto* ident = app.add_subcommand("verify-identities", "layer-calculus identity residuals");
  auto* fem = app.add_subcommand("fem-compare", "mixed FEM vs modal GITC");
  for (auto* s : {exact, smodel, conv, ident, fem}) {
    s->add_option("-c,--config", config, "JSON config file");
    ov.attach(*s);
  }
  smodel->add_option("-m,--model", model, "background|corrector|gitc_general|gitc_cell")
      ->check(CLI::IsMember({"background", "corrector", "gitc_general", "gitc_cell"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (exact->parsed() || smodel->parsed()) {
      const auto cfg = load(config, ov);
      const json j = per_mode(cfg, exact->parsed() ? "exact" : model);
      write_text(cfg.json_path, j.dump(2) + "\n");
    } else if (conv->parsed()) {
      const auto cfg = load(config, ov);
      emit(run_experiment(cfg), cfg);
    } else if (ident->parsed()) {
      const auto cfg = load(config, ov, std::vector<std::string>{"identities"});
      emit(run_experiment(cfg), cfg);
    } else if (fem->parsed()) {
      const auto cfg = load(config, ov, std::vector<std::string>{"mixed_fem"});
      emit(run_experiment(cfg), cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
