#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tradenet/panel.hpp"

namespace tradenet {

enum class PriceChangeDef {
  log_diff,  // ln P_t - ln P_{t-1}
  pct_diff,  // (P_t - P_{t-1}) / (0.5 (P_t + P_{t-1}))
};

struct PriceChange {
  std::int64_t firm = 0;
  std::int64_t supplier = 0;
  std::int64_t product = 0;
  std::int64_t country = 0;
  int period = 0;     // the later of the two joined periods
  double delta = 0.0;
};

struct PriceChangePanel {
  PriceChangeDef definition = PriceChangeDef::log_diff;
  std::vector<PriceChange> records;
  int rejected_nonpositive = 0;  // records dropped for non-positive prices
};

// Joins consecutive-period observations of each instance; instances without a
// t-1 match contribute no change observation.
PriceChangePanel price_changes(const TransactionPanel& panel, PriceChangeDef definition);

struct FEEstimate {
  // Keyed by (firm, period) and (supplier, period).
  std::map<std::pair<std::int64_t, int>, double> firm_time;
  std::map<std::pair<std::int64_t, int>, double> supplier_time;
  std::vector<double> residuals;            // aligned with the input records
  std::vector<int> component;               // per-record connected component label
  int singleton_components = 0;             // one-firm/one-supplier components
  int sweeps = 0;
  double final_residual_change = 0.0;
  bool diagnostic_firm_only = false;        // set by the firm-time-only mode
};

struct FEOptions {
  // Stop when every absorbed indicator's inner product with the residuals is
  // below tolerance * (1 + max |delta|); this is the orthogonality the
  // estimates must satisfy, and it binds tighter than a residual-norm test.
  double tolerance = 1e-11;
  int max_sweeps = 10000;
  bool firm_time_only = false;  // diagnostic mode: no supplier effects
};

// Least squares of delta on firm-time + supplier-time indicators by
// alternating projections, period by period. Within each (period, connected
// component) the supplier effects are normalized to transaction-weighted mean
// zero, the level being absorbed into the firm effects.
FEEstimate fe_extract(const PriceChangePanel& changes, const FEOptions& options = {});

struct ShockRow {
  std::int64_t firm = 0;
  int period = 0;
  double shock = 0.0;
};

struct ShockSeries {
  PriceChangeDef definition = PriceChangeDef::log_diff;
  std::vector<ShockRow> rows;
  // Lagged supplier expenditure shares used as weights, keyed by
  // (firm, supplier, weight period t-1).
  std::map<std::tuple<std::int64_t, std::int64_t, int>, double> weights;

  double shock_for(std::int64_t firm, int period) const;
};

// Supplier-supply shock: shock_{i,t} = sum_s w_{i,s,t-1} gamma_{s,t}, weights
// = supplier shares of the firm's total imports at t-1. Suppliers without an
// estimated gamma at t contribute zero; firms absent at t-1 get no row.
ShockSeries build_shock(const FEEstimate& fe, const TransactionPanel& panel,
                        PriceChangeDef definition);

struct ShockStats {
  std::vector<int> periods;
  std::vector<double> mean;
  std::vector<double> sd;
  double pooled_mean = 0.0;
  double pooled_sd = 0.0;
};

ShockStats shock_descriptive_stats(const ShockSeries& shocks);

}  // namespace tradenet
