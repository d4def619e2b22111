#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tradenet/params.hpp"

namespace tradenet {

enum class Market { domestic, foreign };

struct Firm {
  std::int64_t id = 0;
  double z = 1.0;                       // idiosyncratic productivity
  std::vector<double> supplier_prices;  // matched supplier prices, K >= 1

  void validate(const ModelParams& params) const;
};

struct LineOutcome {
  double price = 0.0;
  double quantity = 0.0;      // quantity sold in the market
  double labor = 0.0;         // production labor (excludes export fixed cost)
  double bundle = 0.0;        // imported-input composite used by the line
  double gross_profit = 0.0;  // before any fixed cost
};

// Solved static allocation of one firm.
struct FirmOutcome {
  double p_M = 0.0;     // import-bundle price index
  double C = 0.0;       // first-tier unit cost
  double z_bar = 0.0;   // export productivity threshold
  bool exports = false; // z >= z_bar (inclusive tie-break)
  LineOutcome domestic;
  LineOutcome foreign;  // zeroed when not exporting
  std::vector<double> supplier_quantity;     // m_k summed over lines
  std::vector<double> supplier_expenditure;  // p_k * m_k summed over lines
  std::vector<double> expenditure_share;     // per line (identical across lines)
  double total_profit = 0.0;   // pi_d + max(pi_f - w F_e, 0)
  double import_value = 0.0;   // sum_k p_k m_k over both lines
  double export_value = 0.0;   // p_f * x_f
  std::size_t top_supplier = 0;      // argmin price == argmax expenditure share
  double top_share = 1.0;            // expenditure share of the top supplier
};

// --- second production tier -------------------------------------------------

// log of S = sum_k p_k^(varphi/(varphi-1)); p_M = S^((varphi-1)/varphi).
// Kept in log space so large negative exponents (varphi near 1, p near p_lo)
// cannot overflow.
double bundle_log_sum(std::span<const double> prices, double varphi);
double bundle_log_sum_append(double log_sum, double price, double varphi);
double bundle_price_from_log_sum(double log_sum, double varphi);

// p_M of a supplier set; appending any supplier strictly decreases it.
double bundle_price(std::span<const double> prices, double varphi);

// --- first production tier --------------------------------------------------

double unit_cost(double w, double p_M, double alpha, double theta);

struct InputDemand {
  double labor = 0.0;
  double bundle = 0.0;
};

// Cost-minimizing (L, M) that produce `x_target` units of the first-tier
// composite (z = 1 scale).
InputDemand input_demands(double C, double w, double p_M, double x_target, double alpha,
                          double theta);

// Per-variety demands m_k for a given composite quantity M.
std::vector<double> supplier_quantities(std::span<const double> prices, double p_M, double M,
                                        double varphi);

// Expenditure shares p_k m_k / (p_M M); sum to one, decreasing in p_k.
std::vector<double> expenditure_shares(std::span<const double> prices, double p_M,
                                       double varphi);

// --- selling ------------------------------------------------------------------

// Productivity threshold above which serving the foreign market covers the
// export fixed cost.
double export_threshold(double C, const ModelParams& params);

struct LineProfit {
  double quantity = 0.0;
  double price = 0.0;
  double gross_profit = 0.0;
};

LineProfit line_profit(double z, double C, Market market, const ModelParams& params);

// Fast path used by the search loop: per-period profit (domestic plus the
// export line when it clears the fixed cost) as a function of the bundle
// log-sum alone. Precomputes everything that does not depend on the supplier
// set.
class ProfitEvaluator {
 public:
  explicit ProfitEvaluator(const ModelParams& params);

  double profit_from_log_sum(double z, double log_sum) const;
  double profit(double z, std::span<const double> prices) const;
  double unit_cost_from_log_sum(double log_sum) const;

  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  double lt_labor_;       // log of alpha^(1/(1-theta)) w^(theta/(theta-1))
  double coef_material_;  // log of (1-alpha)^(1/(1-theta))
  double cost_exp_;       // (theta-1)/theta
  double theta_ratio_;    // theta/(theta-1)
  double inv_q_;          // (varphi-1)/varphi
  double demand_d_, demand_f_;  // P_j^rho Y_j (rho/(rho-1))^(-rho) / (rho-1)
};

FirmOutcome solve_firm(const Firm& firm, const ModelParams& params);

// Same statics without the supplier-price support check; shock experiments
// push a price past p_hi on purpose.
FirmOutcome solve_firm_unchecked(const Firm& firm, const ModelParams& params);

}  // namespace tradenet
