#include "tradenet/population.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "tradenet/numeric.hpp"

namespace tradenet {

namespace {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static partition over firm indices; the per-firm work is pure so the
// schedule cannot affect results.
template <typename F>
void parallel_for(int n, int threads, F&& body) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(64); i < n; i = next.fetch_add(64))
        for (int j = i; j < std::min(i + 64, n); ++j) body(j);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Population simulate_population(const ModelParams& params, const SearchConfig& config,
                               int n_firms, int threads) {
  if (n_firms < 1) throw DomainError("simulate_population: n_firms must be >= 1");
  params.validate();
  config.validate();

  Population pop;
  pop.params = params;
  pop.search = config;
  pop.master_seed = config.rng_seed;
  pop.firms.resize(n_firms);
  pop.outcomes.resize(n_firms);

  const SearchEngine engine(params, config);
  std::atomic<int> cap_hits{0};

  parallel_for(n_firms, resolve_thread_count(threads), [&](int i) {
    Rng rng = Rng::for_firm(config.rng_seed, static_cast<std::uint64_t>(i));
    Firm& firm = pop.firms[i];
    firm.id = i;
    firm.z = rng.lognormal(params.mu_z, params.sigma_z);
    firm.supplier_prices = {rng.uniform(params.p_lo, params.p_hi)};
    const SearchTrace trace = engine.converge(firm, rng);
    if (trace.hit_round_cap) cap_hits.fetch_add(1);
    pop.outcomes[i] = solve_firm(firm, params);
  });

  pop.round_cap_hits = cap_hits.load();
  return pop;
}

void resolve_outcomes(Population& population, int threads) {
  population.outcomes.resize(population.firms.size());
  parallel_for(static_cast<int>(population.firms.size()), resolve_thread_count(threads),
               [&](int i) {
                 population.outcomes[i] = solve_firm(population.firms[i], population.params);
               });
}

std::vector<double> cumulative_share_curve(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> cum(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += values[i];
    cum[i] = acc;
  }
  const double total = acc;
  std::vector<double> curve(kImportCurvePoints, 0.0);
  if (total <= 0.0) return curve;
  for (int j = 0; j < kImportCurvePoints; ++j) {
    const double q = static_cast<double>(j) / (kImportCurvePoints - 1);
    // Share of total value held by the lowest q fraction of firms, with
    // linear interpolation between whole firms.
    const double pos = q * static_cast<double>(n);
    const auto whole = static_cast<std::size_t>(pos);
    double share = whole > 0 ? cum[whole - 1] : 0.0;
    if (whole < n) share += (pos - static_cast<double>(whole)) * values[whole];
    curve[j] = share / total;
  }
  return curve;
}

MomentSet compute_moments(const Population& population) {
  if (population.firms.empty() || population.outcomes.size() != population.firms.size())
    throw DomainError("compute_moments: population is empty or unsolved");
  const std::size_t n = population.firms.size();

  // Sorted reductions keep every moment exactly invariant to firm order.
  std::vector<double> ks(n), tops(n), imports(n);
  std::size_t exporters = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ks[i] = static_cast<double>(population.firms[i].supplier_prices.size());
    tops[i] = population.outcomes[i].top_share;
    imports[i] = population.outcomes[i].import_value;
    exporters += population.outcomes[i].exports ? 1 : 0;
  }
  std::sort(ks.begin(), ks.end());
  std::sort(tops.begin(), tops.end());

  MomentSet m;
  double sum_k = 0.0;
  for (double k : ks) sum_k += k;
  double sum_top = 0.0;
  for (double s : tops) sum_top += s;
  m.mean_k = sum_k / static_cast<double>(n);
  m.median_k = median_sorted(ks);
  m.mean_top_share = sum_top / static_cast<double>(n);
  m.exporter_share = static_cast<double>(exporters) / static_cast<double>(n);
  m.sorted_import_values = imports;
  std::sort(m.sorted_import_values.begin(), m.sorted_import_values.end());
  m.import_share_curve = cumulative_share_curve(std::move(imports));
  return m;
}

}  // namespace tradenet
