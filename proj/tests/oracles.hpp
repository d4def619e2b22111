#pragma once

// Independent numerical oracles for the closed-form economics. These stay in
// test code and never call the implementation paths they check.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "tradenet/numeric.hpp"
#include "tradenet/params.hpp"
#include "tradenet/rng.hpp"

namespace tradenet::oracle {

// Cheapest way to buy one unit of the two-variety CES bundle: golden-section
// over m1 with m2 pinned by the constraint (sum m_k^phi)^(1/phi) = 1.
inline double bundle_price_two_goods(double p1, double p2, double varphi) {
  const auto expenditure = [&](double m1) {
    const double rest = 1.0 - std::pow(m1, varphi);
    if (rest <= 0.0) return 1e30;
    const double m2 = std::pow(rest, 1.0 / varphi);
    return p1 * m1 + p2 * m2;
  };
  const double m1_star = golden_minimize(expenditure, 1e-12, 1.0 - 1e-12, 1e-13);
  return expenditure(m1_star);
}

// Cheapest way to produce one unit of the first-tier composite: golden-section
// over the bundle quantity with labor pinned by the constraint.
inline double unit_cost_minimized(double w, double p_M, double alpha, double theta) {
  if (alpha >= 1.0) return w;
  if (alpha <= 0.0) return p_M;
  const double m_max = std::pow(1.0 / (1.0 - alpha), 1.0 / theta);
  const auto cost = [&](double m) {
    const double rest = 1.0 - (1.0 - alpha) * std::pow(m, theta);
    if (rest <= 0.0) return 1e30;
    const double labor = std::pow(rest / alpha, 1.0 / theta);
    return w * labor + p_M * m;
  };
  const double m_star = golden_minimize(cost, 1e-12, m_max * (1.0 - 1e-12), 1e-13);
  return cost(m_star);
}

struct PriceSearch {
  double price = 0.0;
  double quantity = 0.0;
  double profit = 0.0;
};

// Profit-maximizing price against the CES demand curve, by golden search over
// the markup bracket.
inline PriceSearch best_price(double marginal_cost, double rho, double P, double Y) {
  const auto negative_profit = [&](double price) {
    const double quantity = std::pow(price, -rho) * std::pow(P, rho) * Y;
    return -(price - marginal_cost) * quantity;
  };
  PriceSearch out;
  out.price = golden_minimize(negative_profit, marginal_cost * (1.0 + 1e-9),
                              marginal_cost * 25.0, 1e-13);
  out.quantity = std::pow(out.price, -rho) * std::pow(P, rho) * Y;
  out.profit = (out.price - marginal_cost) * out.quantity;
  return out;
}

// Gross foreign profit at the oracle's best price, as a function of z.
inline double foreign_gross_profit(double z, double C, const ModelParams& p) {
  return best_price(p.tau_f * C / z, p.rho, p.P_f, p.Y_f).profit;
}

// Export threshold by bisection on pi_f(z) - w F_e in log z.
inline double export_threshold_bisect(double C, const ModelParams& p) {
  if (p.F_e == 0.0) return 0.0;
  const auto gap = [&](double ln_z) {
    return foreign_gross_profit(std::exp(ln_z), C, p) - p.w * p.F_e;
  };
  const double ln_z = bisect_root(gap, std::log(1e-8), std::log(1e8), 1e-13);
  return std::exp(ln_z);
}

// Plain Monte Carlo estimate of the expected search payoff.
template <typename ProfitFn>
double monte_carlo_payoff(ProfitFn&& profit_with_draw, double current_profit, double p_lo,
                          double p_hi, long draws, std::uint64_t seed) {
  Rng rng(seed);
  double acc = 0.0;
  for (long i = 0; i < draws; ++i) acc += profit_with_draw(rng.uniform(p_lo, p_hi));
  return acc / static_cast<double>(draws) - current_profit;
}

}  // namespace tradenet::oracle
