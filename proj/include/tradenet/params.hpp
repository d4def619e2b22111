#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tradenet {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Which cardinality the search fixed cost is evaluated at when deciding to
// move from K to K+1 suppliers. `current_k` charges F(K) (the literal search
// condition; the first paid search then happens at K=2), `next_k` charges
// F(K+1) (the first draw beyond the free one already costs f_s).
enum class SearchCostIndexing { current_k, next_k };

// Structural constants: preferences, technology, search costs, supplier price
// support, market sizes. Markets are exogenous (P_j = Y_j = 1, w = 1).
struct ModelParams {
  double rho = 5.0;        // demand elasticity, > 1
  double alpha = 2.0 / 3;  // labor weight, first production tier
  double theta = 0.5;      // first-tier CES exponent, in (0,1)
  double varphi = 0.75;    // second-tier CES exponent, in (0,1)
  double tau_f = 1.5;      // export iceberg multiplier
  double tau_d = 1.0;      // domestic iceberg multiplier (identity: no cost)
  double w = 1.0;          // wage
  double F_e = 0.0049;     // per-period export fixed cost, labor units
  double f_s = 0.0046;     // search fixed-cost scale
  double mu = 0.6079;      // search-cost convexity, > 0
  double beta = 0.96;      // discount factor
  double mu_z = 0.5;       // log-productivity location
  double sigma_z = 0.0267; // log-productivity scale
  double p_lo = 0.5;       // supplier price support, lower bound
  double p_hi = 4.4974;    // supplier price support, upper bound
  double P_d = 1.0, Y_d = 1.0, P_f = 1.0, Y_f = 1.0;

  void validate() const;
};

// Table-style parametrization used by the original calibration write-up.
ModelParams reference_parametrization();

// This artifact's calibrated point: a simulated-method-of-moments fit of
// {f_s, mu, p_hi, sigma_z, F_e} against the published moment targets with
// beta = 0.96. Frozen from tools/calibrate output (see README).
ModelParams calibrated_default();

struct SearchConfig {
  int quadrature_nodes = 64;  // Gauss-Legendre node count over [p_lo, p_hi]
  int max_rounds = 512;       // safety cap on search iterations
  std::uint64_t rng_seed = 20240801ULL;
  SearchCostIndexing cost_indexing = SearchCostIndexing::current_k;

  void validate() const;
};

}  // namespace tradenet
