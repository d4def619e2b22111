#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tradenet/population.hpp"
#include "tradenet/rng.hpp"

using namespace tradenet;

TEST_CASE("single firm with a fixed seed is a deterministic trace") {
  const ModelParams p = calibrated_default();
  SearchConfig cfg;
  cfg.rng_seed = 12345;
  const Population a = simulate_population(p, cfg, 1, 1);
  const Population b = simulate_population(p, cfg, 1, 1);
  CHECK(a.firms[0].z == b.firms[0].z);
  CHECK(a.firms[0].supplier_prices == b.firms[0].supplier_prices);
  CHECK(a.outcomes[0].total_profit == b.outcomes[0].total_profit);
}

TEST_CASE("parallel and serial simulation agree bit for bit") {
  const ModelParams p = calibrated_default();
  SearchConfig cfg;
  cfg.rng_seed = 99;
  const Population serial = simulate_population(p, cfg, 300, 1);
  const Population parallel = simulate_population(p, cfg, 300, 2);
  for (int i = 0; i < 300; ++i) {
    CHECK(serial.firms[i].z == parallel.firms[i].z);
    CHECK(serial.firms[i].supplier_prices == parallel.firms[i].supplier_prices);
    CHECK(serial.outcomes[i].total_profit == parallel.outcomes[i].total_profit);
  }
}

TEST_CASE("degenerate sigma_z collapses productivity, K still varies by draws") {
  ModelParams p = calibrated_default();
  p.sigma_z = 0.0;
  SearchConfig cfg;
  cfg.rng_seed = 7;
  const Population pop = simulate_population(p, cfg, 200, 2);
  int k_min = 1 << 20, k_max = 0;
  for (const auto& firm : pop.firms) {
    CHECK(firm.z == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
    k_min = std::min(k_min, static_cast<int>(firm.supplier_prices.size()));
    k_max = std::max(k_max, static_cast<int>(firm.supplier_prices.size()));
  }
  CHECK(k_max > k_min);
}

TEST_CASE("moments: trivial cases and the even-count median convention") {
  Population pop;
  pop.params = calibrated_default();
  pop.firms = {Firm{0, 1.6, {1.0}}};
  pop.outcomes = {solve_firm(pop.firms[0], pop.params)};
  const MomentSet single = compute_moments(pop);
  CHECK(single.mean_top_share == doctest::Approx(1.0));
  CHECK(single.median_k == doctest::Approx(1.0));

  // K = 2 and K = 4 firms: midpoint convention gives median 3.
  pop.firms = {Firm{0, 1.6, {1.0, 1.5}}, Firm{1, 1.6, {1.0, 1.5, 2.0, 0.9}}};
  pop.outcomes = {solve_firm(pop.firms[0], pop.params), solve_firm(pop.firms[1], pop.params)};
  CHECK(compute_moments(pop).median_k == doctest::Approx(3.0));

  pop.firms.clear();
  pop.outcomes.clear();
  CHECK_THROWS_AS(compute_moments(pop), DomainError);
}

TEST_CASE("moments are invariant to firm ordering") {
  const ModelParams p = calibrated_default();
  SearchConfig cfg;
  cfg.rng_seed = 31;
  Population pop = simulate_population(p, cfg, 400, 2);
  const MomentSet base = compute_moments(pop);

  // Deterministic shuffle.
  Rng rng(17);
  for (std::size_t i = pop.firms.size(); i > 1; --i) {
    const std::size_t j = rng.next_u64() % i;
    std::swap(pop.firms[i - 1], pop.firms[j]);
    std::swap(pop.outcomes[i - 1], pop.outcomes[j]);
  }
  const MomentSet shuffled = compute_moments(pop);
  CHECK(base.mean_k == shuffled.mean_k);
  CHECK(base.median_k == shuffled.median_k);
  CHECK(base.mean_top_share == shuffled.mean_top_share);
  CHECK(base.exporter_share == shuffled.exporter_share);
  CHECK(base.import_share_curve == shuffled.import_share_curve);
}

TEST_CASE("every firm's top share respects the 1/K pigeonhole floor") {
  const ModelParams p = calibrated_default();
  SearchConfig cfg;
  cfg.rng_seed = 41;
  const Population pop = simulate_population(p, cfg, 500, 2);
  for (std::size_t i = 0; i < pop.firms.size(); ++i) {
    const double k = static_cast<double>(pop.firms[i].supplier_prices.size());
    CHECK(pop.outcomes[i].top_share >= 1.0 / k - 1e-12);
    CHECK(pop.outcomes[i].top_share <= 1.0 + 1e-12);
  }
}

TEST_CASE("mean K is non-increasing in the search cost scale (common random numbers)") {
  ModelParams p = calibrated_default();
  SearchConfig cfg;
  cfg.rng_seed = 2024;
  double last = 1e18;
  for (double f_s : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    p.f_s = f_s;
    const MomentSet m = compute_moments(simulate_population(p, cfg, 800, 2));
    CHECK(m.mean_k <= last + 1e-12);
    last = m.mean_k;
  }
}

TEST_CASE("cumulative import-share curve is a proper Lorenz curve") {
  const ModelParams p = calibrated_default();
  SearchConfig cfg;
  cfg.rng_seed = 5150;
  const MomentSet m = compute_moments(simulate_population(p, cfg, 600, 2));
  REQUIRE(m.import_share_curve.size() == 101);
  CHECK(m.import_share_curve.front() == 0.0);
  CHECK(m.import_share_curve.back() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < m.import_share_curve.size(); ++i)
    CHECK(m.import_share_curve[i] >= m.import_share_curve[i - 1] - 1e-15);
  // Convexity of the sorted-ascending cumulative share: below the diagonal.
  for (std::size_t i = 0; i < m.import_share_curve.size(); ++i)
    CHECK(m.import_share_curve[i] <= static_cast<double>(i) / 100.0 + 1e-12);
}

TEST_CASE("calibrated defaults reproduce the frozen moment set") {
  const ModelParams p = calibrated_default();
  SearchConfig cfg;
  cfg.rng_seed = 20240801ULL;
  const MomentSet m = compute_moments(simulate_population(p, cfg, 5000, 2));
  CHECK(m.median_k == doctest::Approx(2.0));
  CHECK(m.mean_k == doctest::Approx(6.0598).epsilon(1e-4));
  CHECK(m.mean_top_share == doctest::Approx(0.662362).epsilon(1e-4));
  CHECK(m.exporter_share == doctest::Approx(0.102).epsilon(1e-6));
}

TEST_CASE("resolve_outcomes refreshes statics after a price edit") {
  const ModelParams p = calibrated_default();
  SearchConfig cfg;
  cfg.rng_seed = 8;
  Population pop = simulate_population(p, cfg, 20, 1);
  const double before = pop.outcomes[0].total_profit;
  pop.firms[0].supplier_prices[0] = p.p_lo;  // better top supplier
  resolve_outcomes(pop, 1);
  CHECK(pop.outcomes[0].total_profit >= before);
}
