#include "tradenet/search.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tradenet {

double search_fixed_cost(int K, double f_s, double mu) {
  if (K < 1) throw DomainError("search_fixed_cost: K must be >= 1");
  if (K == 1) return 0.0;
  return f_s * std::pow(static_cast<double>(K - 1), mu);
}

std::string SearchTrace::to_json_line() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"firm\":" << firm_id << ",\"terminal_k\":" << terminal_k
     << ",\"hit_round_cap\":" << (hit_round_cap ? "true" : "false") << ",\"rounds\":[";
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const auto& r = rounds[i];
    if (i) os << ",";
    os << "{\"k\":" << r.k_before << ",\"payoff\":" << r.expected_payoff
       << ",\"cost\":" << r.fixed_cost << ",\"searched\":" << (r.searched ? "true" : "false");
    if (r.searched) os << ",\"draw\":" << r.drawn_price;
    os << "}";
  }
  os << "]}";
  return os.str();
}

SearchEngine::SearchEngine(const ModelParams& params, const SearchConfig& config)
    : evaluator_(params), config_(config), quad_(config.quadrature_nodes) {
  config_.validate();
  discount_factor_ = params.beta / (1.0 - params.beta);
  // Export line breaks even where gross foreign profit equals w F_e; gross
  // profit is decreasing in C, so exports happen iff C <= cost_star_.
  if (params.F_e == 0.0) {
    cost_star_ = std::numeric_limits<double>::infinity();
  } else {
    const double rho = params.rho;
    const double inner = std::pow(rho, rho) * params.w * params.F_e /
                         (std::pow(params.P_f, rho) * params.Y_f);
    // Inverting z_bar(C) = z at C: same expression with z in the numerator.
    cost_star_ = (rho - 1.0) / params.tau_f * std::pow(inner, -1.0 / (rho - 1.0));
  }
}

double SearchEngine::expected_payoff(double z, double bundle_log_sum) const {
  const ModelParams& p = evaluator_.params();
  const double current = evaluator_.profit_from_log_sum(z, bundle_log_sum);

  const auto profit_with_draw = [&](double price) {
    return evaluator_.profit_from_log_sum(
        z, bundle_log_sum_append(bundle_log_sum, price, p.varphi));
  };

  if (p.p_hi == p.p_lo)  // point-mass supplier distribution
    return profit_with_draw(p.p_lo) - current;

  const double c_star_z = cost_star_ * z;
  const auto cost_with_draw = [&](double price) {
    return evaluator_.unit_cost_from_log_sum(
        bundle_log_sum_append(bundle_log_sum, price, p.varphi));
  };

  // C is increasing in the drawn price, so the export region is [p_lo, p_kink].
  double split = p.p_lo;
  const double c_lo = cost_with_draw(p.p_lo);
  const double c_hi = cost_with_draw(p.p_hi);
  if (c_hi <= c_star_z) {
    split = p.p_hi;  // exports for every draw
  } else if (c_lo < c_star_z) {
    split = bisect_root([&](double price) { return cost_with_draw(price) - c_star_z; },
                        p.p_lo, p.p_hi, 1e-14);
  }

  double integral = 0.0;
  if (split > p.p_lo) integral += quad_.integrate(p.p_lo, split, profit_with_draw);
  if (split < p.p_hi) integral += quad_.integrate(split, p.p_hi, profit_with_draw);
  return integral / (p.p_hi - p.p_lo) - current;
}

double SearchEngine::fixed_cost_for_decision(int k_current) const {
  const ModelParams& p = evaluator_.params();
  const int k_for_cost =
      config_.cost_indexing == SearchCostIndexing::current_k ? k_current : k_current + 1;
  return search_fixed_cost(k_for_cost, p.f_s, p.mu);
}

bool SearchEngine::should_search(double z, double bundle_log_sum, int k_current) const {
  return discount_factor_ * expected_payoff(z, bundle_log_sum) >=
         fixed_cost_for_decision(k_current);
}

SearchTrace SearchEngine::converge(Firm& firm, Rng& rng) const {
  const ModelParams& p = evaluator_.params();
  firm.validate(p);
  SearchTrace trace;
  trace.firm_id = firm.id;
  double log_sum = bundle_log_sum(firm.supplier_prices, p.varphi);

  for (int round = 0; round < config_.max_rounds; ++round) {
    SearchRound rec;
    rec.k_before = static_cast<int>(firm.supplier_prices.size());
    rec.expected_payoff = expected_payoff(firm.z, log_sum);
    rec.fixed_cost = fixed_cost_for_decision(rec.k_before);
    rec.searched = discount_factor_ * rec.expected_payoff >= rec.fixed_cost;
    if (!rec.searched) {
      trace.rounds.push_back(rec);
      break;
    }
    rec.drawn_price = rng.uniform(p.p_lo, p.p_hi);
    firm.supplier_prices.push_back(rec.drawn_price);
    log_sum = bundle_log_sum_append(log_sum, rec.drawn_price, p.varphi);
    trace.rounds.push_back(rec);
  }

  trace.hit_round_cap = !trace.rounds.empty() && trace.rounds.back().searched;
  trace.terminal_k = static_cast<int>(firm.supplier_prices.size());
  return trace;
}

double expected_search_payoff(const Firm& firm, const ModelParams& params,
                              const SearchConfig& config) {
  firm.validate(params);
  SearchEngine engine(params, config);
  return engine.expected_payoff(firm.z, bundle_log_sum(firm.supplier_prices, params.varphi));
}

bool should_search(const Firm& firm, const ModelParams& params, const SearchConfig& config) {
  firm.validate(params);
  SearchEngine engine(params, config);
  return engine.should_search(firm.z, bundle_log_sum(firm.supplier_prices, params.varphi),
                              static_cast<int>(firm.supplier_prices.size()));
}

SearchTrace converge_supplier_set(Firm& firm, const ModelParams& params,
                                  const SearchConfig& config, Rng& rng) {
  SearchEngine engine(params, config);
  return engine.converge(firm, rng);
}

}  // namespace tradenet
