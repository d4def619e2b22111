#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tradenet/panel.hpp"
#include "tradenet/shiftshare.hpp"

namespace tradenet {

// One observation row for the absorb-OLS engine: outcome, named regressors,
// fixed-effect group keys (one id per absorbed dimension) and the two cluster
// ids.
struct DesignRow {
  double y = 0.0;
  std::vector<double> x;
  std::vector<std::int64_t> fe_keys;
  std::int64_t cluster_a = 0;
  std::int64_t cluster_b = 0;
};

struct DesignTable {
  std::vector<std::string> x_names;
  std::vector<std::string> fe_names;
  std::vector<DesignRow> rows;
};

struct RegressionResult {
  std::vector<std::string> names;      // surviving regressors
  std::vector<double> coef;
  std::vector<double> se;              // two-way cluster-robust
  std::vector<std::vector<double>> vcov;
  std::vector<std::string> dropped;    // collinear after demeaning
  long n = 0;
  int clusters_a = 0;
  int clusters_b = 0;
  std::vector<long> fe_levels;         // absorbed level counts per dimension
  double r2_within = 0.0;

  double coef_for(const std::string& name) const;
  double se_for(const std::string& name) const;
};

struct AbsorbOptions {
  double tolerance = 1e-11;  // relative residual change per demeaning sweep
  int max_sweeps = 10000;
  double collinearity_tol = 1e-9;
};

// Absorbs the FE dimensions by alternating within-group demeaning of y and
// every column of X, runs OLS on the demeaned data, and returns
// Cameron-Gelbach-Miller two-way clustered errors:
//   V = V(A) + V(B) - V(A intersect B)
// each piece scaled by (N-1)/(N-k), negative eigenvalues floored at zero.
RegressionResult ols_absorb(const DesignTable& design, const AbsorbOptions& options = {});

// Panel regression of ln quantity at the instance level on the firm-period
// shock, with configurable absorbed FE, outcome/shock lags and the optional
// covariate column.
struct RegressSpec {
  // Dimensions to absorb; each entry is a subset of
  // {"firm","supplier","product","country"} combined into one key, or "period".
  std::vector<std::vector<std::string>> fe_dims = {
      {"firm", "product", "country", "supplier"}, {"period"}};
  int outcome_lags = 0;  // t-1..t-lags controls of the outcome
  int shock_lags = 0;    // t-1..t-lags controls of the shock
  bool include_covariate = false;
  std::string cluster_a = "firm";
  std::string cluster_b = "country";
};

RegressionResult panel_regress(const TransactionPanel& outcomes, const ShockSeries& shocks,
                               const RegressSpec& spec, const AbsorbOptions& options = {});

// Builds the design table without running it (used by tests).
DesignTable build_design(const TransactionPanel& outcomes, const ShockSeries& shocks,
                         const RegressSpec& spec);

}  // namespace tradenet
