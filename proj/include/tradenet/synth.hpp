#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tradenet/panel.hpp"
#include "tradenet/population.hpp"

namespace tradenet {

// Data-generating process standing in for confidential customs records: model
// firms, shared supplier ids, planted supplier-time and firm-time log price
// shocks, quantities re-solved through the static model each period.
struct SynthConfig {
  int n_periods = 6;            // T >= 3 (lags are needed downstream)
  int n_suppliers = 50;         // shared supplier id pool
  int n_products = 12;
  int n_countries = 8;
  double supplier_shock_sd = 0.10;  // sd of planted gamma*_{s,t}, log scale
  double firm_shock_sd = 0.05;      // sd of planted firm-time delta*_{i,t}
  double noise_sd = 0.0;            // idiosyncratic measurement noise, log scale
  double value_scale = 1000.0;      // currency units per model expenditure unit
  std::uint64_t seed = 7ULL;
};

struct PlantedTruth {
  // gamma*[supplier][t] and delta*[firm][t] for t = 1..T-1 (period-0 levels
  // carry no change observation).
  std::map<std::int64_t, std::vector<double>> supplier_log_shock;
  std::map<std::int64_t, std::vector<double>> firm_log_shock;
  int n_periods = 0;
};

struct SyntheticPanel {
  TransactionPanel panel;
  PlantedTruth truth;
};

SyntheticPanel generate_synthetic_panel(const Population& population, const SynthConfig& config);

}  // namespace tradenet
