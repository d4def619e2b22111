#include "tradenet/shiftshare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tradenet/params.hpp"

namespace tradenet {

PriceChangePanel price_changes(const TransactionPanel& panel, PriceChangeDef definition) {
  PriceChangePanel out;
  out.definition = definition;

  std::map<std::pair<InstanceKey, int>, double> price_at;
  for (const auto& t : panel.records) {
    if (!(t.value > 0.0) || !(t.quantity > 0.0)) {
      ++out.rejected_nonpositive;
      continue;
    }
    price_at[{instance_of(t), t.period}] = t.unit_price();
  }

  for (const auto& [key, price] : price_at) {
    const auto prev = price_at.find({key.first, key.second - 1});
    if (prev == price_at.end()) continue;
    const double p1 = price, p0 = prev->second;
    PriceChange rec;
    rec.firm = key.first.firm;
    rec.supplier = key.first.supplier;
    rec.product = key.first.product;
    rec.country = key.first.country;
    rec.period = key.second;
    rec.delta = definition == PriceChangeDef::log_diff
                    ? std::log(p1) - std::log(p0)
                    : (p1 - p0) / (0.5 * (p1 + p0));
    out.records.push_back(rec);
  }
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

FEEstimate fe_extract(const PriceChangePanel& changes, const FEOptions& options) {
  if (changes.records.empty()) throw DomainError("fe_extract: no records");

  FEEstimate est;
  est.diagnostic_firm_only = options.firm_time_only;
  est.residuals.resize(changes.records.size(), 0.0);
  est.component.resize(changes.records.size(), -1);

  // The normal equations are block-diagonal by period: solve each period's
  // bipartite firm-supplier layout on its own.
  std::map<int, std::vector<std::size_t>> by_period;
  for (std::size_t r = 0; r < changes.records.size(); ++r)
    by_period[changes.records[r].period].push_back(r);

  int component_base = 0;
  for (auto& [period, rows] : by_period) {
    // Dense local ids for this period's firms and suppliers.
    std::map<std::int64_t, int> firm_id, supplier_id;
    for (const auto r : rows) {
      firm_id.emplace(changes.records[r].firm, static_cast<int>(firm_id.size()));
      supplier_id.emplace(changes.records[r].supplier, static_cast<int>(supplier_id.size()));
    }
    const int nf = static_cast<int>(firm_id.size());
    const int ns = static_cast<int>(supplier_id.size());

    std::vector<int> rf(rows.size()), rs(rows.size());
    std::vector<double> delta(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& rec = changes.records[rows[j]];
      rf[j] = firm_id[rec.firm];
      rs[j] = supplier_id[rec.supplier];
      delta[j] = rec.delta;
    }

    std::vector<double> fe(nf, 0.0), ge(ns, 0.0);
    std::vector<double> firm_count(nf, 0.0), supplier_count(ns, 0.0);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      firm_count[rf[j]] += 1.0;
      supplier_count[rs[j]] += 1.0;
    }

    double delta_scale = 1.0;
    for (double d : delta) delta_scale = std::max(delta_scale, std::abs(d));
    const double tol = options.tolerance * delta_scale;

    // Gauss-Seidel alternating projections on the two indicator blocks. After
    // the supplier update that block is exactly orthogonal to the residuals,
    // so the firm-side inner products measure the remaining error. Weakly
    // connected graphs (chains) contract at a rate near one; when the
    // per-sweep step settles into a single geometric mode, a Lyusternik jump
    // ge += r/(1-r) * step skips the remaining tail. The orthogonality test
    // below stays the only stopping rule, so the jump can only save sweeps,
    // never change the solution.
    std::vector<double> ge_prev(ns, 0.0);
    double step_prev = -1.0, rate_prev = -1.0;
    int sweep = 0;
    for (; sweep < options.max_sweeps; ++sweep) {
      std::vector<double> acc(nf, 0.0);
      for (std::size_t j = 0; j < rows.size(); ++j) acc[rf[j]] += delta[j] - ge[rs[j]];
      for (int f = 0; f < nf; ++f) fe[f] = acc[f] / firm_count[f];

      if (options.firm_time_only) {
        ++sweep;
        est.final_residual_change = 0.0;
        break;  // a single within-firm pass is the exact projection
      }

      ge_prev = ge;
      std::vector<double> acc_s(ns, 0.0);
      for (std::size_t j = 0; j < rows.size(); ++j) acc_s[rs[j]] += delta[j] - fe[rf[j]];
      for (int s = 0; s < ns; ++s) ge[s] = acc_s[s] / supplier_count[s];

      double step = 0.0;
      for (int s = 0; s < ns; ++s) step += (ge[s] - ge_prev[s]) * (ge[s] - ge_prev[s]);
      step = std::sqrt(step);
      bool jumped = false;
      if (step_prev > 0.0 && step > 0.0) {
        const double rate = step / step_prev;
        if (rate_prev > 0.0 && rate < 0.99999 && rate > 0.2 &&
            std::abs(rate - rate_prev) < 0.02 * rate) {
          const double jump = rate / (1.0 - rate);
          for (int s = 0; s < ns; ++s) ge[s] += jump * (ge[s] - ge_prev[s]);
          jumped = true;
          step = -1.0;  // rate history no longer meaningful after the jump
        }
        rate_prev = rate;
      }
      step_prev = step;
      if (jumped) continue;  // fe is stale against the jumped ge; refresh first

      std::vector<double> firm_dot(nf, 0.0);
      for (std::size_t j = 0; j < rows.size(); ++j)
        firm_dot[rf[j]] += delta[j] - fe[rf[j]] - ge[rs[j]];
      double worst = 0.0;
      for (int f = 0; f < nf; ++f) worst = std::max(worst, std::abs(firm_dot[f]));
      est.final_residual_change = worst;
      if (worst < tol) {
        ++sweep;
        break;
      }
    }
    est.sweeps = std::max(est.sweeps, sweep);

    // Connected components of the period's bipartite graph.
    UnionFind uf(nf + ns);
    for (std::size_t j = 0; j < rows.size(); ++j) uf.unite(rf[j], nf + rs[j]);
    std::map<int, int> component_label;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const int root = uf.find(rf[j]);
      component_label.emplace(root, component_base + static_cast<int>(component_label.size()));
      est.component[rows[j]] = component_label[root];
    }

    // Normalization: within each component, supplier effects have
    // transaction-weighted (record-count) mean zero; the level moves into the
    // firm effects. Singleton components (one firm, one supplier) come out
    // with gamma = 0 and the firm effect absorbing everything.
    std::map<int, double> comp_sum, comp_n;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const int c = est.component[rows[j]];
      comp_sum[c] += ge[rs[j]];
      comp_n[c] += 1.0;
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const int c = est.component[rows[j]];
      const double shift = comp_sum[c] / comp_n[c];
      est.residuals[rows[j]] = delta[j] - fe[rf[j]] - ge[rs[j]];
      est.firm_time[{changes.records[rows[j]].firm, period}] = fe[rf[j]] + shift;
      est.supplier_time[{changes.records[rows[j]].supplier, period}] = ge[rs[j]] - shift;
    }

    // Count single-firm single-supplier components.
    std::map<int, std::pair<std::set<int>, std::set<int>>> members;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      auto& m = members[est.component[rows[j]]];
      m.first.insert(rf[j]);
      m.second.insert(rs[j]);
    }
    for (const auto& [c, m] : members)
      if (m.first.size() == 1 && m.second.size() == 1) ++est.singleton_components;

    component_base += static_cast<int>(component_label.size());
  }
  return est;
}

double ShockSeries::shock_for(std::int64_t firm, int period) const {
  for (const auto& row : rows)
    if (row.firm == firm && row.period == period) return row.shock;
  return 0.0;
}

ShockSeries build_shock(const FEEstimate& fe, const TransactionPanel& panel,
                        PriceChangeDef definition) {
  ShockSeries out;
  out.definition = definition;

  // Supplier expenditure totals per (firm, period) and firm totals.
  std::map<std::pair<std::int64_t, int>, std::map<std::int64_t, double>> firm_supplier_value;
  for (const auto& t : panel.records)
    firm_supplier_value[{t.firm, t.period}][t.supplier] += t.value;

  for (const auto& [key, suppliers] : firm_supplier_value) {
    const auto& [firm, lag_period] = key;
    const int period = lag_period + 1;
    double total = 0.0;
    for (const auto& [s, v] : suppliers) total += v;
    if (total <= 0.0) continue;

    double shock = 0.0;
    bool any_gamma = false;
    for (const auto& [s, v] : suppliers) {
      const double weight = v / total;
      out.weights[{firm, s, lag_period}] = weight;
      const auto it = fe.supplier_time.find({s, period});
      if (it != fe.supplier_time.end()) {
        shock += weight * it->second;
        any_gamma = true;
      }
    }
    // A firm present at t-1 gets a row even when only some of its suppliers
    // have estimated effects at t; absent firms get none.
    if (any_gamma) out.rows.push_back({firm, period, shock});
  }
  return out;
}

ShockStats shock_descriptive_stats(const ShockSeries& shocks) {
  ShockStats stats;
  std::map<int, std::vector<double>> by_period;
  std::vector<double> pooled;
  for (const auto& row : shocks.rows) {
    by_period[row.period].push_back(row.shock);
    pooled.push_back(row.shock);
  }
  const auto mean_sd = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var = xs.size() > 1 ? var / (n - 1.0) : 0.0;
    return std::pair{mean, std::sqrt(var)};
  };
  for (const auto& [period, xs] : by_period) {
    const auto [m, s] = mean_sd(xs);
    stats.periods.push_back(period);
    stats.mean.push_back(m);
    stats.sd.push_back(s);
  }
  if (!pooled.empty()) {
    const auto [m, s] = mean_sd(pooled);
    stats.pooled_mean = m;
    stats.pooled_sd = s;
  }
  return stats;
}

}  // namespace tradenet
