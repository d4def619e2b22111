#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tradenet/panel.hpp"
#include "tradenet/regression.hpp"

namespace tradenet {

struct DistributionStats {
  double mean = 0.0;
  double p10 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p90 = 0.0, p95 = 0.0, p99 = 0.0;
};

DistributionStats distribution_stats(std::vector<double> values);

struct PeriodFacts {
  int period = 0;
  long n_firms = 0;
  DistributionStats suppliers_per_firm;
  DistributionStats top_supplier_share;
  double share_firms_with_new_link = 0.0;  // after the burn-in window
  double import_share_of_new_links = 0.0;
};

struct FactsReport {
  std::vector<PeriodFacts> per_period;
  PeriodFacts pooled;  // period = -1; new-link shares averaged over periods
  int burn_in_periods = 2;
};

struct FactsOptions {
  int burn_in_periods = 2;  // periods dropped before a first appearance counts as new
};

FactsReport stylized_facts(const TransactionPanel& panel, const FactsOptions& options = {});

enum class LinkClass { all, top, fresh };

struct SurvivalResult {
  double probability = 0.0;   // raw frequency; equals the no-FE constant
  long n = 0;
  double beta0 = 0.0;         // regression constant (no FE)
  double beta1 = 0.0;         // class-indicator coefficient (when class != all)
  double beta1_fe = 0.0;      // same with firm and year FE absorbed
  bool has_indicator = false;
};

// P(link active at t and t+s), optionally conditioned on the link class at t.
// Implemented as the indicator regressions, so the constant is exactly the
// empirical frequency.
SurvivalResult survival_stats(const TransactionPanel& panel, int horizon, LinkClass link_class,
                              const FactsOptions& options = {});

struct PersistenceResult {
  double unconditional = 0.0;  // P(top at t and top at t+s)
  double conditional = 0.0;    // P(top at t+s | top at t, link active at t+s)
  long n_unconditional = 0;
  long n_conditional = 0;
};

// Persistence of the top-supplier linkage over the given horizon.
PersistenceResult top_supplier_persistence(const TransactionPanel& panel, int horizon);

}  // namespace tradenet
