#pragma once

#include <vector>

#include "tradenet/panel.hpp"

namespace tradenet {

struct GranularResult {
  std::vector<int> periods;      // periods entering the regression
  std::vector<double> gamma;     // granular residual per period
  std::vector<double> aggregate_growth;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  bool degenerate = false;       // zero-variance Gamma (e.g. K = Q = 1 economy)
  int dropped_periods = 0;       // fewer than K eligible suppliers
};

// Size-weighted sum of demeaned idiosyncratic growth among the top-K
// suppliers (by lagged value), demeaning with the median growth among the
// top-Q, regressed against aggregate import growth.
GranularResult granular_residual(const TransactionPanel& panel, int top_k, int top_q);

}  // namespace tradenet
