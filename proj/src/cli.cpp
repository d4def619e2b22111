#include "tradenet/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "tradenet/csvio.hpp"
#include "tradenet/facts.hpp"
#include "tradenet/granular.hpp"
#include "tradenet/population.hpp"
#include "tradenet/regression.hpp"
#include "tradenet/shiftshare.hpp"
#include "tradenet/shock.hpp"
#include "tradenet/synth.hpp"

namespace tradenet {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 20240801ULL;
  bool seed_set = false;
  std::string out_dir;
  int threads = 0;
  bool emit_json = true;
  bool emit_csv = true;

  ModelParams params = calibrated_default();
  SearchConfig search;
  int n_firms = 5000;

  ShockExperiment shock;
  std::string sensitivity_axis = "f_s";
  std::vector<double> sensitivity_grid;
  SynthConfig synth;
  FactsOptions facts;
  PriceChangeDef change_def = PriceChangeDef::log_diff;
  RegressSpec regress;
  int granular_k = 3, granular_q = 3;
  std::string input_panel;   // CSV path for panel-consuming commands
  std::string input_shocks;  // shock series CSV for regress
  json calibration_block;    // parsed lazily by build_calibration_problem
};

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config: " + key + " must be a number");
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("config: " + key + " must be a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config: " + key + " must be a string");
  return v.get<std::string>();
}

// Dotted-path overrides onto the run configuration. Unknown keys reject the
// whole config.
void apply_override(RunConfig& cfg, const std::string& key, const json& value) {
  static const std::map<std::string, double ModelParams::*> param_fields = {
      {"rho", &ModelParams::rho},         {"alpha", &ModelParams::alpha},
      {"theta", &ModelParams::theta},     {"varphi", &ModelParams::varphi},
      {"tau_f", &ModelParams::tau_f},     {"tau_d", &ModelParams::tau_d},
      {"w", &ModelParams::w},             {"F_e", &ModelParams::F_e},
      {"f_s", &ModelParams::f_s},         {"mu", &ModelParams::mu},
      {"beta", &ModelParams::beta},       {"mu_z", &ModelParams::mu_z},
      {"sigma_z", &ModelParams::sigma_z}, {"p_lo", &ModelParams::p_lo},
      {"p_hi", &ModelParams::p_hi},       {"P_d", &ModelParams::P_d},
      {"Y_d", &ModelParams::Y_d},         {"P_f", &ModelParams::P_f},
      {"Y_f", &ModelParams::Y_f},
  };

  const auto dot = key.find('.');
  const std::string head = dot == std::string::npos ? key : key.substr(0, dot);
  const std::string tail = dot == std::string::npos ? "" : key.substr(dot + 1);

  if (head == "params") {
    const auto it = param_fields.find(tail);
    if (it == param_fields.end()) throw ConfigError("config: unknown key " + key);
    cfg.params.*(it->second) = as_number(value, key);
  } else if (head == "search") {
    if (tail == "quadrature_nodes")
      cfg.search.quadrature_nodes = static_cast<int>(as_number(value, key));
    else if (tail == "max_rounds")
      cfg.search.max_rounds = static_cast<int>(as_number(value, key));
    else if (tail == "cost_indexing") {
      const std::string s = as_string(value, key);
      if (s == "current_k") cfg.search.cost_indexing = SearchCostIndexing::current_k;
      else if (s == "next_k") cfg.search.cost_indexing = SearchCostIndexing::next_k;
      else throw ConfigError("config: search.cost_indexing must be current_k or next_k");
    } else
      throw ConfigError("config: unknown key " + key);
  } else if (head == "sim") {
    if (tail == "n_firms") cfg.n_firms = static_cast<int>(as_number(value, key));
    else throw ConfigError("config: unknown key " + key);
  } else if (head == "shock") {
    if (tail == "size") cfg.shock.shock_size = as_number(value, key);
    else if (tail == "re_search") cfg.shock.re_search = as_bool(value, key);
    else if (tail == "log_differences") cfg.shock.log_differences = as_bool(value, key);
    else throw ConfigError("config: unknown key " + key);
  } else if (head == "synth") {
    if (tail == "n_periods") cfg.synth.n_periods = static_cast<int>(as_number(value, key));
    else if (tail == "n_suppliers") cfg.synth.n_suppliers = static_cast<int>(as_number(value, key));
    else if (tail == "n_products") cfg.synth.n_products = static_cast<int>(as_number(value, key));
    else if (tail == "n_countries") cfg.synth.n_countries = static_cast<int>(as_number(value, key));
    else if (tail == "supplier_shock_sd") cfg.synth.supplier_shock_sd = as_number(value, key);
    else if (tail == "firm_shock_sd") cfg.synth.firm_shock_sd = as_number(value, key);
    else if (tail == "noise_sd") cfg.synth.noise_sd = as_number(value, key);
    else throw ConfigError("config: unknown key " + key);
  } else if (head == "facts") {
    if (tail == "burn_in") cfg.facts.burn_in_periods = static_cast<int>(as_number(value, key));
    else throw ConfigError("config: unknown key " + key);
  } else if (head == "changes") {
    if (tail == "definition") {
      const std::string s = as_string(value, key);
      if (s == "log_diff") cfg.change_def = PriceChangeDef::log_diff;
      else if (s == "pct_diff") cfg.change_def = PriceChangeDef::pct_diff;
      else throw ConfigError("config: changes.definition must be log_diff or pct_diff");
    } else
      throw ConfigError("config: unknown key " + key);
  } else if (head == "regress") {
    if (tail == "outcome_lags") cfg.regress.outcome_lags = static_cast<int>(as_number(value, key));
    else if (tail == "shock_lags") cfg.regress.shock_lags = static_cast<int>(as_number(value, key));
    else if (tail == "covariate") cfg.regress.include_covariate = as_bool(value, key);
    else if (tail == "cluster_a") cfg.regress.cluster_a = as_string(value, key);
    else if (tail == "cluster_b") cfg.regress.cluster_b = as_string(value, key);
    else throw ConfigError("config: unknown key " + key);
  } else if (head == "granular") {
    if (tail == "k") cfg.granular_k = static_cast<int>(as_number(value, key));
    else if (tail == "q") cfg.granular_q = static_cast<int>(as_number(value, key));
    else throw ConfigError("config: unknown key " + key);
  } else {
    throw ConfigError("config: unknown key " + key);
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  json doc;
  try {
    is >> doc;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");

  for (const auto& [key, value] : doc.items()) {
    if (key == "command") cfg.command = as_string(value, key);
    else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(as_number(value, key));
      cfg.seed_set = true;
    } else if (key == "out") cfg.out_dir = as_string(value, key);
    else if (key == "threads") cfg.threads = static_cast<int>(as_number(value, key));
    else if (key == "format") {
      const std::string s = as_string(value, key);
      cfg.emit_json = s == "json" || s == "both";
      cfg.emit_csv = s == "csv" || s == "both";
      if (!cfg.emit_json && !cfg.emit_csv)
        throw ConfigError("config: format must be json, csv or both");
    } else if (key == "overrides") {
      if (!value.is_object()) throw ConfigError("config: overrides must be an object");
      for (const auto& [k, v] : value.items()) apply_override(cfg, k, v);
    } else if (key == "sensitivity") {
      if (!value.is_object()) throw ConfigError("config: sensitivity must be an object");
      for (const auto& [k, v] : value.items()) {
        if (k == "axis") cfg.sensitivity_axis = as_string(v, "sensitivity.axis");
        else if (k == "grid") {
          if (!v.is_array()) throw ConfigError("config: sensitivity.grid must be an array");
          cfg.sensitivity_grid.clear();
          for (const auto& g : v) cfg.sensitivity_grid.push_back(as_number(g, "grid"));
        } else
          throw ConfigError("config: unknown key sensitivity." + k);
      }
    } else if (key == "inputs") {
      if (!value.is_object()) throw ConfigError("config: inputs must be an object");
      for (const auto& [k, v] : value.items()) {
        if (k == "panel") cfg.input_panel = as_string(v, "inputs.panel");
        else if (k == "shocks") cfg.input_shocks = as_string(v, "inputs.shocks");
        else throw ConfigError("config: unknown key inputs." + k);
      }
    } else if (key == "calibration") {
      if (!value.is_object()) throw ConfigError("config: calibration must be an object");
      cfg.calibration_block = value;
    } else {
      throw ConfigError("config: unknown key " + key);
    }
  }
}

json params_json(const ModelParams& p) {
  return json{{"rho", p.rho},     {"alpha", p.alpha},     {"theta", p.theta},
              {"varphi", p.varphi}, {"tau_f", p.tau_f},   {"tau_d", p.tau_d},
              {"w", p.w},         {"F_e", p.F_e},         {"f_s", p.f_s},
              {"mu", p.mu},       {"beta", p.beta},       {"mu_z", p.mu_z},
              {"sigma_z", p.sigma_z}, {"p_lo", p.p_lo},   {"p_hi", p.p_hi},
              {"P_d", p.P_d},     {"Y_d", p.Y_d},         {"P_f", p.P_f},
              {"Y_f", p.Y_f}};
}

json meta_json(const RunConfig& cfg) {
  return json{{"schema_version", 1},
              {"seed", cfg.seed},
              {"build", build_id()},
              {"params", params_json(cfg.params)}};
}

void write_json_artifact(const RunConfig& cfg, const fs::path& path, json body) {
  body["meta"] = meta_json(cfg);
  write_text_atomic(path, body.dump(2) + "\n");
}

CalibrationProblem build_calibration_problem(const RunConfig& cfg) {
  CalibrationProblem problem = default_calibration_problem();
  problem.fixed = cfg.params;
  problem.seed = cfg.seed;
  problem.n_firms = cfg.n_firms;
  problem.search = cfg.search;
  problem.threads = cfg.threads;

  const json& block = cfg.calibration_block;
  if (block.is_object()) {
    for (const auto& [key, value] : block.items()) {
      if (key == "free") {
        if (!value.is_array()) throw ConfigError("config: calibration.free must be an array");
        problem.free.clear();
        for (const auto& f : value) {
          FreeParam fp;
          fp.name = as_string(f.at("name"), "calibration.free.name");
          fp.lower = as_number(f.at("lower"), "calibration.free.lower");
          fp.upper = as_number(f.at("upper"), "calibration.free.upper");
          fp.start = as_number(f.at("start"), "calibration.free.start");
          problem.free.push_back(fp);
        }
      } else if (key == "targets") {
        for (const auto& [k, v] : value.items()) {
          if (k == "mean_k") problem.targets.mean_k = as_number(v, k);
          else if (k == "median_k") problem.targets.median_k = as_number(v, k);
          else if (k == "mean_top_share") problem.targets.mean_top_share = as_number(v, k);
          else if (k == "exporter_share") problem.targets.exporter_share = as_number(v, k);
          else if (k == "import_share_curve") {
            problem.targets.import_share_curve.clear();
            for (const auto& c : v)
              problem.targets.import_share_curve.push_back(as_number(c, k));
          } else
            throw ConfigError("config: unknown key calibration.targets." + k);
        }
      } else if (key == "weights") {
        for (const auto& [k, v] : value.items()) {
          if (k == "mean_k") problem.weights.mean_k = as_number(v, k);
          else if (k == "median_k") problem.weights.median_k = as_number(v, k);
          else if (k == "mean_top_share") problem.weights.mean_top_share = as_number(v, k);
          else if (k == "exporter_share") problem.weights.exporter_share = as_number(v, k);
          else if (k == "curve") problem.weights.curve = as_number(v, k);
          else throw ConfigError("config: unknown key calibration.weights." + k);
        }
      } else if (key == "max_evaluations") {
        problem.minimizer.max_evaluations = static_cast<int>(as_number(value, key));
      } else if (key == "tolerance") {
        problem.minimizer.tolerance = as_number(value, key);
      } else if (key == "initial_scale") {
        problem.minimizer.initial_scale = as_number(value, key);
      } else if (key == "n_firms") {
        problem.n_firms = static_cast<int>(as_number(value, key));
      } else if (key == "no_curve_target") {
        if (as_bool(value, key)) problem.targets.import_share_curve.clear();
      } else {
        throw ConfigError("config: unknown key calibration." + key);
      }
    }
  }
  return problem;
}

// ---- command bodies ---------------------------------------------------------

void cmd_simulate(const RunConfig& cfg, const fs::path& out) {
  const Population pop = simulate_population(cfg.params, cfg.search, cfg.n_firms, cfg.threads);
  const MomentSet moments = compute_moments(pop);

  if (cfg.emit_csv) {
    CsvWriter csv("firm_panel",
                  {"id", "z", "k", "top_share", "exports", "import_value", "export_value"});
    csv.set_meta(cfg.seed);
    csv.set_params_line(params_json(cfg.params).dump());
    for (std::size_t i = 0; i < pop.firms.size(); ++i) {
      const auto& f = pop.firms[i];
      const auto& o = pop.outcomes[i];
      csv.add_row({std::to_string(f.id), CsvWriter::format_double(f.z),
                   std::to_string(f.supplier_prices.size()),
                   CsvWriter::format_double(o.top_share), o.exports ? "1" : "0",
                   CsvWriter::format_double(o.import_value),
                   CsvWriter::format_double(o.export_value)});
    }
    csv.write(out / "firms.csv");
  }
  if (cfg.emit_json) {
    json body;
    body["moments"] = {{"mean_k", moments.mean_k},
                       {"median_k", moments.median_k},
                       {"mean_top_share", moments.mean_top_share},
                       {"exporter_share", moments.exporter_share},
                       {"import_share_curve", moments.import_share_curve}};
    body["round_cap_hits"] = pop.round_cap_hits;
    write_json_artifact(cfg, out / "moments.json", std::move(body));

    json firms = json::array();
    for (std::size_t i = 0; i < pop.firms.size(); ++i) {
      const auto& f = pop.firms[i];
      const auto& o = pop.outcomes[i];
      firms.push_back({{"id", f.id},
                       {"z", f.z},
                       {"supplier_prices", f.supplier_prices},
                       {"exports", o.exports},
                       {"total_profit", o.total_profit},
                       {"import_value", o.import_value},
                       {"export_value", o.export_value},
                       {"top_share", o.top_share}});
    }
    write_json_artifact(cfg, out / "population.json", json{{"firms", std::move(firms)}});
  }
}

void cmd_calibrate(const RunConfig& cfg, const fs::path& out) {
  const CalibrationProblem problem = build_calibration_problem(cfg);
  const CalibrationResult result = calibrate(problem);

  CsvWriter log_csv("calibration_log", [&] {
    std::vector<std::string> header;
    for (const auto& f : problem.free) header.push_back(f.name);
    header.push_back("objective");
    header.push_back("penalized");
    return header;
  }());
  log_csv.set_meta(cfg.seed);
  log_csv.set_params_line(params_json(cfg.params).dump());
  for (const auto& rec : result.log) {
    std::vector<std::string> row;
    for (double v : rec.theta) row.push_back(CsvWriter::format_double(v));
    row.push_back(CsvWriter::format_double(rec.objective));
    row.push_back(rec.penalized ? "1" : "0");
    log_csv.add_row(row);
  }
  log_csv.write(out / "evaluations.csv");

  json body;
  json fitted;
  for (std::size_t i = 0; i < problem.free.size(); ++i)
    fitted[problem.free[i].name] = result.fitted[i];
  body["fitted"] = fitted;
  body["objective"] = result.objective;
  body["converged"] = result.converged;
  body["evaluations"] = result.evaluations;
  json residuals;
  for (std::size_t i = 0; i < result.residual_names.size(); ++i)
    residuals[result.residual_names[i]] = result.residuals[i];
  body["residuals"] = residuals;
  body["moments"] = {{"mean_k", result.moments.mean_k},
                     {"median_k", result.moments.median_k},
                     {"mean_top_share", result.moments.mean_top_share},
                     {"exporter_share", result.moments.exporter_share},
                     {"import_share_curve", result.moments.import_share_curve}};
  write_json_artifact(cfg, out / "calibration.json", std::move(body));
}

void cmd_shock(const RunConfig& cfg, const fs::path& out) {
  const Population pop = simulate_population(cfg.params, cfg.search, cfg.n_firms, cfg.threads);
  const ImpactCurve curve = apply_top_supplier_shock(pop, cfg.shock);

  CsvWriter csv("impact_curve",
                {"firm", "z", "k_before", "exported_before", "exports_t", "exports_t1",
                 "searched_t1", "import_change_t", "export_change_t", "import_change_t1",
                 "export_change_t1", "import_value_change_t", "drop_ratio_t", "interior"});
  csv.set_meta(cfg.seed);
  csv.set_params_line(params_json(cfg.params).dump());
  for (const auto& f : curve.firms) {
    csv.add_row({std::to_string(f.firm_id), CsvWriter::format_double(f.z),
                 std::to_string(f.k_before), f.exported_before ? "1" : "0",
                 f.exports_t ? "1" : "0", f.exports_t1 ? "1" : "0", f.searched_t1 ? "1" : "0",
                 CsvWriter::format_double(f.import_change_t),
                 CsvWriter::format_double(f.export_change_t),
                 CsvWriter::format_double(f.import_change_t1),
                 CsvWriter::format_double(f.export_change_t1),
                 CsvWriter::format_double(f.import_value_change_t),
                 CsvWriter::format_double(f.drop_ratio_t), f.interior ? "1" : "0"});
  }
  csv.write(out / "curves.csv");

  if (cfg.emit_json) {
    write_json_artifact(cfg, out / "impact_summary.json",
                        json{{"mean_drop_ratio", curve.mean_drop_ratio},
                             {"median_drop_ratio", curve.median_drop_ratio},
                             {"interior_count", curve.interior_count},
                             {"stopped_exporting", curve.stopped_exporting}});
  }
}

void cmd_sensitivity(const RunConfig& cfg, const fs::path& out) {
  if (cfg.sensitivity_grid.empty())
    throw ConfigError("sensitivity: config must provide sensitivity.grid");
  const auto rows = sensitivity_sweep(cfg.params, cfg.search, cfg.sensitivity_axis,
                                      cfg.sensitivity_grid, cfg.n_firms, cfg.shock,
                                      cfg.threads);
  CsvWriter csv("sensitivity",
                {"axis", "value", "mean_k", "mean_top_share", "mean_import_impact"});
  csv.set_meta(cfg.seed);
  csv.set_params_line(params_json(cfg.params).dump());
  for (const auto& r : rows)
    csv.add_row({r.axis, CsvWriter::format_double(r.value), CsvWriter::format_double(r.mean_k),
                 CsvWriter::format_double(r.mean_top_share),
                 CsvWriter::format_double(r.mean_import_impact)});
  csv.write(out / "sensitivity.csv");
}

void cmd_synthgen(const RunConfig& cfg, const fs::path& out) {
  const Population pop = simulate_population(cfg.params, cfg.search, cfg.n_firms, cfg.threads);
  SynthConfig synth = cfg.synth;
  synth.seed = cfg.seed;
  const SyntheticPanel result = generate_synthetic_panel(pop, synth);
  result.panel.write_csv(out / "panel.csv", cfg.seed);

  json truth;
  for (const auto& [s, shocks] : result.truth.supplier_log_shock)
    truth["supplier"][std::to_string(s)] = shocks;
  for (const auto& [f, shocks] : result.truth.firm_log_shock)
    truth["firm"][std::to_string(f)] = shocks;
  write_json_artifact(cfg, out / "truth.json", json{{"planted", truth}});
}

TransactionPanel load_input_panel(const RunConfig& cfg) {
  if (cfg.input_panel.empty())
    throw ConfigError("config: inputs.panel is required for this command");
  return TransactionPanel::read_csv(cfg.input_panel);
}

void cmd_facts(const RunConfig& cfg, const fs::path& out) {
  const TransactionPanel panel = load_input_panel(cfg);
  const FactsReport report = stylized_facts(panel, cfg.facts);

  CsvWriter csv("stylized_facts",
                {"period", "n_firms", "k_mean", "k_p50", "k_p75", "k_p90", "k_p95", "k_p99",
                 "top_mean", "top_p10", "top_p25", "top_p50", "top_p75", "top_p90",
                 "share_firms_new_link", "import_share_new_links"});
  csv.set_meta(cfg.seed);
  csv.set_params_line(params_json(cfg.params).dump());
  const auto emit = [&](const PeriodFacts& pf) {
    csv.add_row_numeric({static_cast<double>(pf.period), static_cast<double>(pf.n_firms),
                         pf.suppliers_per_firm.mean, pf.suppliers_per_firm.p50,
                         pf.suppliers_per_firm.p75, pf.suppliers_per_firm.p90,
                         pf.suppliers_per_firm.p95, pf.suppliers_per_firm.p99,
                         pf.top_supplier_share.mean, pf.top_supplier_share.p10,
                         pf.top_supplier_share.p25, pf.top_supplier_share.p50,
                         pf.top_supplier_share.p75, pf.top_supplier_share.p90,
                         pf.share_firms_with_new_link, pf.import_share_of_new_links});
  };
  for (const auto& pf : report.per_period) emit(pf);
  emit(report.pooled);
  csv.write(out / "facts.csv");

  // Survival and persistence companions.
  CsvWriter surv("survival", {"horizon", "class", "probability", "beta0", "beta1", "beta1_fe", "n"});
  surv.set_meta(cfg.seed);
  surv.set_params_line(params_json(cfg.params).dump());
  const int span = panel.max_period() - panel.min_period();
  for (int s = 1; s <= 3 && s <= span; ++s) {
    for (const auto& [cls, name] :
         std::vector<std::pair<LinkClass, std::string>>{{LinkClass::all, "all"},
                                                        {LinkClass::top, "top"},
                                                        {LinkClass::fresh, "new"}}) {
      const SurvivalResult r = survival_stats(panel, s, cls, cfg.facts);
      surv.add_row({std::to_string(s), name, CsvWriter::format_double(r.probability),
                    CsvWriter::format_double(r.beta0), CsvWriter::format_double(r.beta1),
                    CsvWriter::format_double(r.beta1_fe), std::to_string(r.n)});
    }
  }
  surv.write(out / "survival.csv");

  CsvWriter pers("persistence", {"horizon", "unconditional", "conditional", "n"});
  pers.set_meta(cfg.seed);
  pers.set_params_line(params_json(cfg.params).dump());
  for (int s = 1; s <= 3 && s <= span; ++s) {
    const PersistenceResult r = top_supplier_persistence(panel, s);
    pers.add_row({std::to_string(s), CsvWriter::format_double(r.unconditional),
                  CsvWriter::format_double(r.conditional), std::to_string(r.n_unconditional)});
  }
  pers.write(out / "persistence.csv");

  const GranularResult gr = granular_residual(panel, cfg.granular_k, cfg.granular_q);
  write_json_artifact(cfg, out / "granular.json",
                      json{{"k", cfg.granular_k},
                           {"q", cfg.granular_q},
                           {"r2", gr.r2},
                           {"adjusted_r2", gr.adjusted_r2},
                           {"degenerate", gr.degenerate},
                           {"dropped_periods", gr.dropped_periods}});
}

void cmd_shiftshare(const RunConfig& cfg, const fs::path& out) {
  const TransactionPanel panel = load_input_panel(cfg);
  const PriceChangePanel changes = price_changes(panel, cfg.change_def);
  const FEEstimate fe = fe_extract(changes);
  const ShockSeries shocks = build_shock(fe, panel, cfg.change_def);

  CsvWriter csv("shock_series", {"firm", "period", "shock"});
  csv.set_meta(cfg.seed);
  csv.set_params_line(params_json(cfg.params).dump());
  for (const auto& row : shocks.rows)
    csv.add_row({std::to_string(row.firm), std::to_string(row.period),
                 CsvWriter::format_double(row.shock)});
  csv.write(out / "shocks.csv");

  const ShockStats stats = shock_descriptive_stats(shocks);
  CsvWriter stat_csv("shock_stats", {"period", "mean", "sd"});
  stat_csv.set_meta(cfg.seed);
  stat_csv.set_params_line(params_json(cfg.params).dump());
  for (std::size_t i = 0; i < stats.periods.size(); ++i)
    stat_csv.add_row({std::to_string(stats.periods[i]), CsvWriter::format_double(stats.mean[i]),
                      CsvWriter::format_double(stats.sd[i])});
  stat_csv.add_row({"pooled", CsvWriter::format_double(stats.pooled_mean),
                    CsvWriter::format_double(stats.pooled_sd)});
  stat_csv.write(out / "shock_stats.csv");
}

ShockSeries load_shock_series(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int c_firm = table.column("firm");
  const int c_period = table.column("period");
  const int c_shock = table.column("shock");
  if (c_firm < 0 || c_period < 0 || c_shock < 0)
    throw std::runtime_error("shock series CSV: missing required column");
  ShockSeries out;
  for (const auto& row : table.rows)
    out.rows.push_back(
        {std::stoll(row[c_firm]), std::stoi(row[c_period]), std::stod(row[c_shock])});
  return out;
}

void cmd_regress(const RunConfig& cfg, const fs::path& out) {
  const TransactionPanel panel = load_input_panel(cfg);
  ShockSeries shocks;
  if (!cfg.input_shocks.empty()) {
    shocks = load_shock_series(cfg.input_shocks);
  } else {
    const PriceChangePanel changes = price_changes(panel, cfg.change_def);
    shocks = build_shock(fe_extract(changes), panel, cfg.change_def);
  }
  const RegressionResult result = panel_regress(panel, shocks, cfg.regress);

  CsvWriter csv("regression", {"name", "coef", "se"});
  csv.set_meta(cfg.seed);
  csv.set_params_line(params_json(cfg.params).dump());
  for (std::size_t i = 0; i < result.names.size(); ++i)
    csv.add_row({result.names[i], CsvWriter::format_double(result.coef[i]),
                 CsvWriter::format_double(result.se[i])});
  csv.write(out / "regression.csv");

  json body;
  body["n"] = result.n;
  body["clusters_a"] = result.clusters_a;
  body["clusters_b"] = result.clusters_b;
  body["r2_within"] = result.r2_within;
  body["dropped"] = result.dropped;
  json coefs;
  for (std::size_t i = 0; i < result.names.size(); ++i)
    coefs[result.names[i]] = {{"coef", result.coef[i]}, {"se", result.se[i]}};
  body["coefficients"] = coefs;
  write_json_artifact(cfg, out / "regression.json", std::move(body));
}

}  // namespace

std::vector<double> default_import_curve_target() {
  // Cumulative import-share curve at the calibrated default point (5000
  // firms, seed 20240801), frozen from a reference `tradenet simulate` run.
    return {0.000000, 0.000025, 0.000070, 0.000126, 0.000192, 0.000267, 0.000352, 0.000446, 
            0.000548, 0.000657, 0.000775, 0.000900, 0.001034, 0.001176, 0.001326, 0.001484, 0.001651, 
            0.001829, 0.002015, 0.002211, 0.002416, 0.002633, 0.002864, 0.003107, 0.003364, 0.003635, 
            0.003920, 0.004216, 0.004524, 0.004850, 0.005192, 0.005550, 0.005924, 0.006316, 0.006726, 
            0.007155, 0.007603, 0.008070, 0.008560, 0.009077, 0.009620, 0.010190, 0.010790, 0.011420, 
            0.012073, 0.012761, 0.013485, 0.014253, 0.015057, 0.015899, 0.016772, 0.017682, 0.018629, 
            0.019621, 0.020663, 0.021754, 0.022896, 0.024092, 0.025338, 0.026643, 0.028003, 0.029419, 
            0.030890, 0.032437, 0.034060, 0.035761, 0.037535, 0.039401, 0.041362, 0.043423, 0.045600, 
            0.047887, 0.050304, 0.052866, 0.055591, 0.058496, 0.061551, 0.064789, 0.068252, 0.071956, 
            0.075850, 0.079970, 0.084340, 0.089025, 0.094122, 0.099604, 0.105565, 0.112091, 0.119246, 
            0.127438, 0.137426, 0.150801, 0.166027, 0.183573, 0.204144, 0.228978, 0.259756, 0.298752, 
            0.353682, 0.451715, 1.000000};
}

CalibrationProblem default_calibration_problem() {
  CalibrationProblem problem;
  problem.free = {
      {"f_s", 0.003, 0.80, reference_parametrization().f_s},
      {"mu", 0.05, 3.00, reference_parametrization().mu},
      {"p_hi", 1.20, 12.0, reference_parametrization().p_hi},
      {"sigma_z", 0.004, 0.50, reference_parametrization().sigma_z},
      {"F_e", 0.0005, 0.25, reference_parametrization().F_e},
  };
  problem.fixed = calibrated_default();
  problem.targets.mean_k = 6.0668;
  problem.targets.median_k = 2.0;
  problem.targets.mean_top_share = 0.6462;
  problem.targets.exporter_share = 0.102;
  problem.targets.import_share_curve = default_import_curve_target();
  problem.n_firms = 5000;
  problem.minimizer.max_evaluations = 600;
  return problem;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out_stream,
            std::ostream& err_stream) {
  RunConfig cfg;
  std::string command;
  std::string config_path;

  // CLI flags override config-file fields.
  std::optional<std::uint64_t> flag_seed;
  std::optional<std::string> flag_out;
  std::optional<int> flag_threads;
  std::optional<std::string> flag_format;

  static const std::set<std::string> commands = {"simulate", "calibrate",  "shock",
                                                 "sensitivity", "synthgen", "facts",
                                                 "shiftshare", "regress"};
  try {
    std::size_t i = 0;
    if (i < args.size() && !args[i].starts_with("--")) command = args[i++];
    for (; i < args.size(); ++i) {
      const std::string& arg = args[i];
      const auto need_value = [&]() -> const std::string& {
        if (i + 1 >= args.size()) throw ConfigError("missing value for " + arg);
        return args[++i];
      };
      if (arg == "--config") config_path = need_value();
      else if (arg == "--seed") flag_seed = std::stoull(need_value());
      else if (arg == "--out") flag_out = need_value();
      else if (arg == "--threads") flag_threads = std::stoi(need_value());
      else if (arg == "--format") flag_format = need_value();
      else if (arg == "--help" || arg == "-h") {
        out_stream << "usage: tradenet <command> [--config file.json] [--seed N] [--out dir]\n"
                      "                [--threads N] [--format json|csv|both]\n"
                      "commands: simulate calibrate shock sensitivity synthgen facts\n"
                      "          shiftshare regress\n";
        return 0;
      } else {
        throw ConfigError("unknown flag " + arg);
      }
    }

    if (!config_path.empty()) load_config_file(cfg, config_path);
    if (!command.empty()) cfg.command = command;
    if (flag_seed) {
      cfg.seed = *flag_seed;
      cfg.seed_set = true;
    }
    if (flag_out) cfg.out_dir = *flag_out;
    if (flag_threads) cfg.threads = *flag_threads;
    if (flag_format) {
      cfg.emit_json = *flag_format == "json" || *flag_format == "both";
      cfg.emit_csv = *flag_format == "csv" || *flag_format == "both";
      if (!cfg.emit_json && !cfg.emit_csv)
        throw ConfigError("--format must be json, csv or both");
    }
    if (cfg.command.empty()) throw ConfigError("no command given (see --help)");
    if (!commands.contains(cfg.command)) throw ConfigError("unknown command " + cfg.command);

    cfg.search.rng_seed = cfg.seed;
    cfg.params.validate();
    cfg.search.validate();

    if (cfg.out_dir.empty()) {
      const char* root = std::getenv("TRADENET_OUT_ROOT");
      cfg.out_dir = (fs::path(root ? root : "out") / cfg.command).string();
    }
  } catch (const ConfigError& e) {
    err_stream << "{\"error\":\"validation\",\"message\":\"" << e.what() << "\"}\n";
    return 1;
  } catch (const DomainError& e) {
    err_stream << "{\"error\":\"validation\",\"message\":\"" << e.what() << "\"}\n";
    return 1;
  } catch (const std::exception& e) {
    err_stream << "{\"error\":\"validation\",\"message\":\"" << e.what() << "\"}\n";
    return 1;
  }

  const fs::path out(cfg.out_dir);
  const fs::path failed_marker = out / (cfg.command + ".failed");
  try {
    fs::create_directories(out);
    fs::remove(failed_marker);
    if (cfg.command == "simulate") cmd_simulate(cfg, out);
    else if (cfg.command == "calibrate") cmd_calibrate(cfg, out);
    else if (cfg.command == "shock") cmd_shock(cfg, out);
    else if (cfg.command == "sensitivity") cmd_sensitivity(cfg, out);
    else if (cfg.command == "synthgen") cmd_synthgen(cfg, out);
    else if (cfg.command == "facts") cmd_facts(cfg, out);
    else if (cfg.command == "shiftshare") cmd_shiftshare(cfg, out);
    else if (cfg.command == "regress") cmd_regress(cfg, out);
    out_stream << "{\"ok\":true,\"command\":\"" << cfg.command << "\",\"out\":\""
               << out.string() << "\"}\n";
    return 0;
  } catch (const ConfigError& e) {
    std::ofstream(failed_marker) << e.what() << "\n";
    err_stream << "{\"error\":\"validation\",\"message\":\"" << e.what() << "\"}\n";
    return 1;
  } catch (const DomainError& e) {
    std::ofstream(failed_marker) << e.what() << "\n";
    err_stream << "{\"error\":\"validation\",\"message\":\"" << e.what() << "\"}\n";
    return 1;
  } catch (const std::exception& e) {
    std::ofstream(failed_marker) << e.what() << "\n";
    err_stream << "{\"error\":\"runtime\",\"message\":\"" << e.what() << "\"}\n";
    return 2;
  }
}

}  // namespace tradenet
