#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tradenet/population.hpp"

namespace tradenet {

struct ShockExperiment {
  double shock_size = 0.15;  // fractional price increase at the top supplier
  bool re_search = true;     // allow one search round after the shock (period t+1)
  bool log_differences = false;  // report 100*ln(new/old) instead of 100*(new-old)/old
  std::uint64_t rng_salt = 0x73686f636bULL;  // stream salt for post-shock draws
};

struct FirmImpact {
  std::int64_t firm_id = 0;
  double z = 0.0;
  int k_before = 0;
  bool exported_before = false;
  bool exports_t = false;
  bool exports_t1 = false;
  bool searched_t1 = false;
  double import_change_t = 0.0;   // percent change of the composite bundle, both lines
  double export_change_t = 0.0;   // percent change of exported quantity
  double import_change_t1 = 0.0;
  double export_change_t1 = 0.0;
  double import_value_change_t = 0.0;  // percent change of total import spending
  // Export drop over import-value drop, interior firms only. Spending is the
  // measure a customs ledger observes, and it is the one whose ratio lines up
  // with the published mean/median; the composite-quantity change above is
  // reported alongside.
  double drop_ratio_t = 0.0;
  bool interior = false;          // exports before and at t (ratio well defined)
};

struct ImpactCurve {
  std::vector<FirmImpact> firms;
  double mean_drop_ratio = 0.0;
  double median_drop_ratio = 0.0;
  int interior_count = 0;
  int stopped_exporting = 0;  // exporters at baseline that do not export at t
};

// 15%-style cost increase at each firm's minimum-price supplier: re-solve the
// statics at t, optionally grant one post-shock search round for t+1.
ImpactCurve apply_top_supplier_shock(const Population& population,
                                     const ShockExperiment& experiment);

struct SensitivityRow {
  std::string axis;
  double value = 0.0;
  double mean_k = 0.0;
  double mean_top_share = 0.0;
  double mean_import_impact = 0.0;  // mean percent import change at t
};

// Re-simulate with common random numbers at each grid value of one parameter
// axis (f_s, mu, p_hi or varphi) and report the aggregate moments plus the
// standard shock's mean import impact.
std::vector<SensitivityRow> sensitivity_sweep(const ModelParams& base_params,
                                              const SearchConfig& config,
                                              const std::string& axis,
                                              const std::vector<double>& grid, int n_firms,
                                              const ShockExperiment& experiment,
                                              int threads = 0);

}  // namespace tradenet
