#include "tradenet/shock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tradenet/numeric.hpp"
#include "tradenet/search.hpp"

namespace tradenet {

namespace {

double pct_change(double new_value, double old_value, bool log_differences) {
  if (old_value == 0.0) return 0.0;
  if (log_differences) return 100.0 * std::log(new_value / old_value);
  return 100.0 * (new_value - old_value) / old_value;
}

double total_bundle(const FirmOutcome& o) { return o.domestic.bundle + o.foreign.bundle; }

}  // namespace

ImpactCurve apply_top_supplier_shock(const Population& population,
                                     const ShockExperiment& experiment) {
  if (experiment.shock_size <= -1.0)
    throw DomainError("ShockExperiment: shock_size must be > -1");
  if (population.firms.size() != population.outcomes.size())
    throw DomainError("apply_top_supplier_shock: population must be solved");

  const ModelParams& params = population.params;
  const SearchEngine engine(params, population.search);

  ImpactCurve curve;
  curve.firms.resize(population.firms.size());
  std::vector<double> ratios;

  for (std::size_t i = 0; i < population.firms.size(); ++i) {
    const Firm& firm = population.firms[i];
    const FirmOutcome& base = population.outcomes[i];

    Firm shocked = firm;
    shocked.supplier_prices[base.top_supplier] *= 1.0 + experiment.shock_size;
    // A positive shock can push the top supplier's price past p_hi; the
    // shocked price is taken as given, so validation is relaxed here by
    // solving from raw prices.
    FirmOutcome at_t = solve_firm_unchecked(shocked, params);

    FirmImpact impact;
    impact.firm_id = firm.id;
    impact.z = firm.z;
    impact.k_before = static_cast<int>(firm.supplier_prices.size());
    impact.exported_before = base.exports;
    impact.exports_t = at_t.exports;
    impact.import_change_t =
        pct_change(total_bundle(at_t), total_bundle(base), experiment.log_differences);
    impact.import_value_change_t =
        pct_change(at_t.import_value, base.import_value, experiment.log_differences);
    impact.export_change_t = base.exports && at_t.exports
                                 ? pct_change(at_t.foreign.quantity, base.foreign.quantity,
                                              experiment.log_differences)
                                 : 0.0;
    impact.interior = base.exports && at_t.exports;
    if (base.exports && !at_t.exports) ++curve.stopped_exporting;

    if (experiment.re_search) {
      Firm next = shocked;
      const double log_sum = bundle_log_sum(next.supplier_prices, params.varphi);
      impact.searched_t1 = engine.should_search(
          next.z, log_sum, static_cast<int>(next.supplier_prices.size()));
      if (impact.searched_t1) {
        Rng rng = Rng::for_purpose(population.master_seed,
                                   static_cast<std::uint64_t>(firm.id), experiment.rng_salt);
        next.supplier_prices.push_back(rng.uniform(params.p_lo, params.p_hi));
      }
      const FirmOutcome at_t1 =
          impact.searched_t1 ? solve_firm_unchecked(next, params) : at_t;
      impact.exports_t1 = at_t1.exports;
      impact.import_change_t1 =
          pct_change(total_bundle(at_t1), total_bundle(base), experiment.log_differences);
      impact.export_change_t1 = base.exports && at_t1.exports
                                    ? pct_change(at_t1.foreign.quantity, base.foreign.quantity,
                                                 experiment.log_differences)
                                    : 0.0;
    } else {
      impact.exports_t1 = impact.exports_t;
      impact.import_change_t1 = impact.import_change_t;
      impact.export_change_t1 = impact.export_change_t;
    }

    if (impact.interior && impact.import_value_change_t != 0.0) {
      impact.drop_ratio_t = impact.export_change_t / impact.import_value_change_t;
      ratios.push_back(impact.drop_ratio_t);
    }
    curve.firms[i] = impact;
  }

  curve.interior_count = static_cast<int>(ratios.size());
  if (!ratios.empty()) {
    double sum = 0.0;
    for (double r : ratios) sum += r;
    curve.mean_drop_ratio = sum / static_cast<double>(ratios.size());
    std::sort(ratios.begin(), ratios.end());
    curve.median_drop_ratio = median_sorted(ratios);
  }
  return curve;
}

std::vector<SensitivityRow> sensitivity_sweep(const ModelParams& base_params,
                                              const SearchConfig& config,
                                              const std::string& axis,
                                              const std::vector<double>& grid, int n_firms,
                                              const ShockExperiment& experiment, int threads) {
  if (grid.empty()) throw DomainError("sensitivity_sweep: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw DomainError("sensitivity_sweep: grid must be sorted");

  double ModelParams::*field = nullptr;
  if (axis == "f_s") field = &ModelParams::f_s;
  else if (axis == "mu") field = &ModelParams::mu;
  else if (axis == "p_hi") field = &ModelParams::p_hi;
  else if (axis == "varphi") field = &ModelParams::varphi;
  else throw DomainError("sensitivity_sweep: axis must be one of f_s, mu, p_hi, varphi");

  // Validate the whole grid before any simulation runs.
  for (double value : grid) {
    ModelParams probe = base_params;
    probe.*field = value;
    probe.validate();
  }

  std::vector<SensitivityRow> rows;
  rows.reserve(grid.size());
  for (double value : grid) {
    ModelParams params = base_params;
    params.*field = value;
    const Population pop = simulate_population(params, config, n_firms, threads);
    const MomentSet moments = compute_moments(pop);
    const ImpactCurve impact = apply_top_supplier_shock(pop, experiment);
    double sum_import = 0.0;
    for (const auto& f : impact.firms) sum_import += f.import_change_t;
    SensitivityRow row;
    row.axis = axis;
    row.value = value;
    row.mean_k = moments.mean_k;
    row.mean_top_share = moments.mean_top_share;
    row.mean_import_impact = sum_import / static_cast<double>(impact.firms.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tradenet
