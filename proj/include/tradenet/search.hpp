#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tradenet/model.hpp"
#include "tradenet/numeric.hpp"
#include "tradenet/params.hpp"
#include "tradenet/rng.hpp"

namespace tradenet {

// F^S(K) = f_s * (K-1)^mu; the first supplier is free.
double search_fixed_cost(int K, double f_s, double mu);

struct SearchRound {
  int k_before = 0;
  double expected_payoff = 0.0;
  double fixed_cost = 0.0;
  bool searched = false;
  double drawn_price = 0.0;  // valid only when searched
};

struct SearchTrace {
  std::int64_t firm_id = 0;
  std::vector<SearchRound> rounds;
  int terminal_k = 0;
  bool hit_round_cap = false;

  std::string to_json_line() const;  // debugging format, not a stable contract
};

// Expected-payoff integration and the stopping rule, with the per-parameter
// constants hoisted out of the per-firm loop.
class SearchEngine {
 public:
  SearchEngine(const ModelParams& params, const SearchConfig& config);

  // E_p[ pi(z, S + {p}) ] - pi(z, S) under p ~ Uniform[p_lo, p_hi].
  // The export fixed cost kinks the integrand where the draw tips the firm
  // across the export threshold; the integral is split at that point so each
  // Gauss-Legendre panel sees a smooth function.
  double expected_payoff(double z, double bundle_log_sum) const;

  // (beta/(1-beta)) * expected_payoff >= F^S at the configured indexing.
  bool should_search(double z, double bundle_log_sum, int k_current) const;

  double fixed_cost_for_decision(int k_current) const;

  // Draws suppliers from the firm's stream until the stopping rule or the
  // round cap fires. Appends to firm.supplier_prices.
  SearchTrace converge(Firm& firm, Rng& rng) const;

  const ProfitEvaluator& evaluator() const { return evaluator_; }
  const SearchConfig& config() const { return config_; }

 private:
  ProfitEvaluator evaluator_;
  SearchConfig config_;
  GaussLegendre quad_;
  double discount_factor_;  // beta/(1-beta)
  double cost_star_;        // unit cost at which the export line breaks even
};

// Free-function wrappers over SearchEngine for one-off evaluation.
double expected_search_payoff(const Firm& firm, const ModelParams& params,
                              const SearchConfig& config);
bool should_search(const Firm& firm, const ModelParams& params, const SearchConfig& config);
SearchTrace converge_supplier_set(Firm& firm, const ModelParams& params,
                                  const SearchConfig& config, Rng& rng);

}  // namespace tradenet
