#include "tradenet/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tradenet/numeric.hpp"

namespace tradenet {

void Firm::validate(const ModelParams& params) const {
  if (z <= 0.0) throw DomainError("Firm: productivity must be > 0");
  if (supplier_prices.empty()) throw DomainError("Firm: supplier set must be non-empty");
  for (double p : supplier_prices) {
    if (!(p > 0.0)) throw DomainError("Firm: supplier price must be > 0");
    if (p < params.p_lo - 1e-12 || p > params.p_hi + 1e-12)
      throw DomainError("Firm: supplier price outside [p_lo, p_hi]");
  }
}

double bundle_log_sum(std::span<const double> prices, double varphi) {
  if (prices.empty()) throw DomainError("bundle_price: empty supplier list");
  const double q = varphi / (varphi - 1.0);
  double acc = -std::numeric_limits<double>::infinity();
  for (double p : prices) {
    if (!(p > 0.0)) throw DomainError("bundle_price: non-positive price");
    acc = log_sum_exp(acc, q * std::log(p));
  }
  return acc;
}

double bundle_log_sum_append(double log_sum, double price, double varphi) {
  if (!(price > 0.0)) throw DomainError("bundle_price: non-positive price");
  const double q = varphi / (varphi - 1.0);
  return log_sum_exp(log_sum, q * std::log(price));
}

double bundle_price_from_log_sum(double log_sum, double varphi) {
  return std::exp(log_sum * (varphi - 1.0) / varphi);
}

double bundle_price(std::span<const double> prices, double varphi) {
  return bundle_price_from_log_sum(bundle_log_sum(prices, varphi), varphi);
}

double unit_cost(double w, double p_M, double alpha, double theta) {
  if (!(w > 0.0) || !(p_M > 0.0)) throw DomainError("unit_cost: inputs must be > 0");
  const double lt_ratio = theta / (theta - 1.0);
  // alpha in {0,1} degenerates to a single input; -inf terms drop out of the
  // log-sum-exp.
  const double lt_labor = (alpha > 0.0)
                              ? std::log(alpha) / (1.0 - theta) + lt_ratio * std::log(w)
                              : -std::numeric_limits<double>::infinity();
  const double lt_material = (alpha < 1.0)
                                 ? std::log(1.0 - alpha) / (1.0 - theta) + lt_ratio * std::log(p_M)
                                 : -std::numeric_limits<double>::infinity();
  return std::exp((theta - 1.0) / theta * log_sum_exp(lt_labor, lt_material));
}

InputDemand input_demands(double C, double w, double p_M, double x_target, double alpha,
                          double theta) {
  if (x_target < 0.0) throw DomainError("input_demands: x_target must be >= 0");
  if (!(C > 0.0) || !(w > 0.0) || !(p_M > 0.0))
    throw DomainError("input_demands: inputs must be > 0");
  if (x_target == 0.0) return {};
  const double e = 1.0 / (1.0 - theta);
  InputDemand d;
  d.labor = std::pow(alpha * C / w, e) * x_target;
  d.bundle = std::pow((1.0 - alpha) * C / p_M, e) * x_target;
  return d;
}

std::vector<double> supplier_quantities(std::span<const double> prices, double p_M, double M,
                                        double varphi) {
  std::vector<double> m(prices.size());
  const double e = 1.0 / (1.0 - varphi);
  for (std::size_t k = 0; k < prices.size(); ++k)
    m[k] = std::pow(p_M / prices[k], e) * M;
  return m;
}

std::vector<double> expenditure_shares(std::span<const double> prices, double p_M,
                                       double varphi) {
  std::vector<double> s(prices.size());
  const double e = varphi / (1.0 - varphi);
  for (std::size_t k = 0; k < prices.size(); ++k)
    s[k] = std::pow(p_M / prices[k], e);
  return s;
}

double export_threshold(double C, const ModelParams& params) {
  if (!(C > 0.0)) throw DomainError("export_threshold: C must be > 0");
  if (params.F_e == 0.0) return 0.0;
  const double rho = params.rho;
  const double inner = std::pow(rho, rho) * params.w * params.F_e /
                       (std::pow(params.P_f, rho) * params.Y_f);
  return params.tau_f * C / (rho - 1.0) * std::pow(inner, 1.0 / (rho - 1.0));
}

LineProfit line_profit(double z, double C, Market market, const ModelParams& params) {
  if (!(z > 0.0) || !(C > 0.0)) throw DomainError("line_profit: z and C must be > 0");
  const double tau = market == Market::foreign ? params.tau_f : params.tau_d;
  const double P = market == Market::foreign ? params.P_f : params.P_d;
  const double Y = market == Market::foreign ? params.Y_f : params.Y_d;
  const double rho = params.rho;
  const double markup = rho / (rho - 1.0);
  const double mc = tau * C / z;
  LineProfit out;
  out.quantity = std::pow(mc, -rho) * std::pow(P, rho) * Y * std::pow(markup, -rho);
  out.price = markup * mc;
  out.gross_profit = std::pow(mc, 1.0 - rho) * std::pow(P, rho) * Y * std::pow(markup, -rho) /
                     (rho - 1.0);
  return out;
}

ProfitEvaluator::ProfitEvaluator(const ModelParams& params) : params_(params) {
  params_.validate();
  const double theta = params_.theta;
  theta_ratio_ = theta / (theta - 1.0);
  cost_exp_ = (theta - 1.0) / theta;
  lt_labor_ = (params_.alpha > 0.0)
                  ? std::log(params_.alpha) / (1.0 - theta) + theta_ratio_ * std::log(params_.w)
                  : -std::numeric_limits<double>::infinity();
  coef_material_ = (params_.alpha < 1.0)
                       ? std::log(1.0 - params_.alpha) / (1.0 - theta)
                       : -std::numeric_limits<double>::infinity();
  inv_q_ = (params_.varphi - 1.0) / params_.varphi;
  const double rho = params_.rho;
  const double markup_pow = std::pow(rho / (rho - 1.0), -rho);
  demand_d_ = std::pow(params_.P_d, rho) * params_.Y_d * markup_pow / (rho - 1.0);
  demand_f_ = std::pow(params_.P_f, rho) * params_.Y_f * markup_pow / (rho - 1.0);
}

double ProfitEvaluator::unit_cost_from_log_sum(double log_sum) const {
  const double ln_pm = log_sum * inv_q_;
  const double lt_material = coef_material_ + theta_ratio_ * ln_pm;
  return std::exp(cost_exp_ * log_sum_exp(lt_labor_, lt_material));
}

double ProfitEvaluator::profit_from_log_sum(double z, double log_sum) const {
  const double C = unit_cost_from_log_sum(log_sum);
  const double rho = params_.rho;
  const double pi_d = std::pow(params_.tau_d * C / z, 1.0 - rho) * demand_d_;
  const double pi_f = std::pow(params_.tau_f * C / z, 1.0 - rho) * demand_f_;
  return pi_d + std::max(pi_f - params_.w * params_.F_e, 0.0);
}

double ProfitEvaluator::profit(double z, std::span<const double> prices) const {
  return profit_from_log_sum(z, bundle_log_sum(prices, params_.varphi));
}

FirmOutcome solve_firm(const Firm& firm, const ModelParams& params) {
  params.validate();
  firm.validate(params);
  return solve_firm_unchecked(firm, params);
}

FirmOutcome solve_firm_unchecked(const Firm& firm, const ModelParams& params) {
  if (!(firm.z > 0.0)) throw DomainError("Firm: productivity must be > 0");
  if (firm.supplier_prices.empty()) throw DomainError("Firm: supplier set must be non-empty");

  FirmOutcome out;
  out.p_M = bundle_price(firm.supplier_prices, params.varphi);
  out.C = unit_cost(params.w, out.p_M, params.alpha, params.theta);
  out.z_bar = export_threshold(out.C, params);
  out.exports = firm.z >= out.z_bar;

  const auto solve_line = [&](Market market) {
    const LineProfit lp = line_profit(firm.z, out.C, market, params);
    const double tau = market == Market::foreign ? params.tau_f : params.tau_d;
    // Delivering x units melts tau x through the iceberg; the first-tier
    // composite needed is tau x / z.
    const InputDemand d =
        input_demands(out.C, params.w, out.p_M, tau * lp.quantity / firm.z, params.alpha,
                      params.theta);
    LineOutcome line;
    line.price = lp.price;
    line.quantity = lp.quantity;
    line.labor = d.labor;
    line.bundle = d.bundle;
    line.gross_profit = lp.gross_profit;
    return line;
  };

  out.domestic = solve_line(Market::domestic);
  double pi_f_net = 0.0;
  if (out.exports) {
    out.foreign = solve_line(Market::foreign);
    pi_f_net = out.foreign.gross_profit - params.w * params.F_e;
    out.export_value = out.foreign.price * out.foreign.quantity;
  }
  out.total_profit = out.domestic.gross_profit + pi_f_net;

  const double total_bundle = out.domestic.bundle + out.foreign.bundle;
  out.supplier_quantity =
      supplier_quantities(firm.supplier_prices, out.p_M, total_bundle, params.varphi);
  out.expenditure_share = expenditure_shares(firm.supplier_prices, out.p_M, params.varphi);
  out.supplier_expenditure.resize(firm.supplier_prices.size());
  for (std::size_t k = 0; k < firm.supplier_prices.size(); ++k)
    out.supplier_expenditure[k] = firm.supplier_prices[k] * out.supplier_quantity[k];
  out.import_value = out.p_M * total_bundle;

  out.top_supplier = static_cast<std::size_t>(
      std::min_element(firm.supplier_prices.begin(), firm.supplier_prices.end()) -
      firm.supplier_prices.begin());
  out.top_share = out.expenditure_share[out.top_supplier];
  return out;
}

}  // namespace tradenet
