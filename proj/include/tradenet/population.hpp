#pragma once

#include <cstdint>
#include <vector>

#include "tradenet/model.hpp"
#include "tradenet/params.hpp"
#include "tradenet/search.hpp"

namespace tradenet {

struct Population {
  std::vector<Firm> firms;          // converged supplier sets
  std::vector<FirmOutcome> outcomes;
  ModelParams params;
  SearchConfig search;
  std::uint64_t master_seed = 0;
  int round_cap_hits = 0;
};

// Aggregate moment set used for calibration and the model-side facts.
struct MomentSet {
  double mean_k = 0.0;
  double median_k = 0.0;
  double mean_top_share = 0.0;
  double exporter_share = 0.0;
  // Cumulative share of total import value held by firms at or below each of
  // 101 evenly spaced import-value quantiles (a Lorenz curve).
  std::vector<double> import_share_curve;
  std::vector<double> sorted_import_values;
};

inline constexpr int kImportCurvePoints = 101;

// z_i ~ LogNormal(mu_z, sigma_z); first supplier price uniform on the
// support; supplier sets converged through the search engine; statics solved.
// Firm draws come from per-firm streams, so results are identical under any
// thread count.
Population simulate_population(const ModelParams& params, const SearchConfig& config,
                               int n_firms, int threads = 0);

// Re-solve outcomes for the stored firms (used after price edits).
void resolve_outcomes(Population& population, int threads = 0);

MomentSet compute_moments(const Population& population);

// Lorenz curve on the fixed quantile grid from per-firm values.
std::vector<double> cumulative_share_curve(std::vector<double> values);

}  // namespace tradenet
