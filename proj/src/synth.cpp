#include "tradenet/synth.hpp"

#include <cmath>
#include <set>
#include <tuple>

#include "tradenet/rng.hpp"

namespace tradenet {

SyntheticPanel generate_synthetic_panel(const Population& population,
                                        const SynthConfig& config) {
  if (config.n_periods < 3)
    throw DomainError("generate_synthetic_panel: need T >= 3 for lagged regressions");
  if (config.n_suppliers < 1 || config.n_products < 1 || config.n_countries < 1)
    throw DomainError("generate_synthetic_panel: id pools must be non-empty");
  if (population.firms.empty())
    throw DomainError("generate_synthetic_panel: population is empty");

  const ModelParams& params = population.params;
  const int T = config.n_periods;

  SyntheticPanel out;
  out.truth.n_periods = T;

  // Planted supplier-time log shocks, gamma*_{s,t} for t >= 1.
  for (std::int64_t s = 0; s < config.n_suppliers; ++s) {
    Rng rng = Rng::for_purpose(config.seed, static_cast<std::uint64_t>(s), 0x67616d6dULL);
    std::vector<double> shocks(T, 0.0);
    for (int t = 1; t < T; ++t) shocks[t] = config.supplier_shock_sd * rng.normal();
    out.truth.supplier_log_shock[s] = std::move(shocks);
  }

  for (std::size_t i = 0; i < population.firms.size(); ++i) {
    const Firm& firm = population.firms[i];
    Rng rng = Rng::for_purpose(config.seed, static_cast<std::uint64_t>(firm.id), 0x6669726dULL);

    std::vector<double> firm_shocks(T, 0.0);
    for (int t = 1; t < T; ++t) firm_shocks[t] = config.firm_shock_sd * rng.normal();
    out.truth.firm_log_shock[firm.id] = firm_shocks;

    // Each model link gets a shared supplier id plus fixed product/country
    // cells, so suppliers connect many firms and the two-way effects are
    // identified. Cells are de-collided within the firm: a merged record's
    // unit price would be a quantity-weighted average and no longer carry the
    // planted shock exactly.
    const std::size_t K = firm.supplier_prices.size();
    std::vector<std::int64_t> link_supplier(K), link_product(K), link_country(K);
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> used;
    for (std::size_t k = 0; k < K; ++k) {
      std::int64_t s = static_cast<std::int64_t>(rng.next_u64() % config.n_suppliers);
      std::int64_t p = static_cast<std::int64_t>(rng.next_u64() % config.n_products);
      std::int64_t c = static_cast<std::int64_t>(rng.next_u64() % config.n_countries);
      for (int probe = 0; probe < config.n_products * config.n_countries &&
                          used.contains({s, p, c});
           ++probe) {
        p = (p + 1) % config.n_products;
        if (probe % config.n_products == config.n_products - 1)
          c = (c + 1) % config.n_countries;
      }
      while (used.contains({s, p, c})) s = (s + 1) % config.n_suppliers;
      used.insert({s, p, c});
      link_supplier[k] = s;
      link_product[k] = p;
      link_country[k] = c;
    }

    std::vector<double> log_price(K);
    for (std::size_t k = 0; k < K; ++k) log_price[k] = std::log(firm.supplier_prices[k]);

    for (int t = 0; t < T; ++t) {
      if (t >= 1) {
        for (std::size_t k = 0; k < K; ++k) {
          const double gamma = out.truth.supplier_log_shock[link_supplier[k]][t];
          const double eps = config.noise_sd > 0.0 ? config.noise_sd * rng.normal() : 0.0;
          log_price[k] += gamma + firm_shocks[t] + eps;
        }
      }
      Firm current = firm;
      for (std::size_t k = 0; k < K; ++k) current.supplier_prices[k] = std::exp(log_price[k]);
      const FirmOutcome outcome = solve_firm_unchecked(current, params);

      for (std::size_t k = 0; k < K; ++k) {
        Transaction rec;
        rec.firm = firm.id;
        rec.supplier = link_supplier[k];
        rec.product = link_product[k];
        rec.country = link_country[k];
        rec.period = t;
        rec.quantity = config.value_scale * outcome.supplier_quantity[k];
        rec.value = rec.quantity * current.supplier_prices[k];
        if (rec.quantity > 0.0 && rec.value > 0.0) out.panel.records.push_back(rec);
      }
    }
  }

  out.panel.validate();
  return out;
}

}  // namespace tradenet
