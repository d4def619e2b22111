#include "tradenet/granular.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tradenet/numeric.hpp"
#include "tradenet/params.hpp"

namespace tradenet {

GranularResult granular_residual(const TransactionPanel& panel, int top_k, int top_q) {
  if (top_k < 1 || top_q < top_k)
    throw DomainError("granular_residual: need Q >= K >= 1");
  const int first_period = panel.min_period();
  const int last_period = panel.max_period();
  if (last_period - first_period < 2)
    throw DomainError("granular_residual: panel must span >= 3 periods");

  // Supplier and aggregate import value per period.
  std::map<int, std::map<std::int64_t, double>> supplier_value;
  std::map<int, double> aggregate;
  for (const auto& t : panel.records) {
    supplier_value[t.period][t.supplier] += t.value;
    aggregate[t.period] += t.value;
  }

  GranularResult out;
  for (int t = first_period + 1; t <= last_period; ++t) {
    const auto prev = supplier_value.find(t - 1);
    const auto curr = supplier_value.find(t);
    if (prev == supplier_value.end() || curr == supplier_value.end()) {
      ++out.dropped_periods;
      continue;
    }

    // Suppliers ranked by lagged value; growth needs both periods.
    std::vector<std::pair<double, std::int64_t>> ranked;
    for (const auto& [s, v] : prev->second)
      if (curr->second.contains(s)) ranked.push_back({v, s});
    if (static_cast<int>(ranked.size()) < top_k) {
      ++out.dropped_periods;
      continue;
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });

    const int q_count = std::min<int>(top_q, static_cast<int>(ranked.size()));
    std::vector<double> growth_q;
    for (int i = 0; i < q_count; ++i) {
      const auto& [lagged, s] = ranked[i];
      growth_q.push_back(curr->second.at(s) / lagged - 1.0);
    }
    std::vector<double> sorted_growth = growth_q;
    std::sort(sorted_growth.begin(), sorted_growth.end());
    const double median_growth = median_sorted(sorted_growth);

    const double lagged_total = aggregate.at(t - 1);
    double gamma = 0.0;
    for (int i = 0; i < top_k; ++i)
      gamma += (ranked[i].first / lagged_total) * (growth_q[i] - median_growth);

    out.periods.push_back(t);
    out.gamma.push_back(gamma);
    out.aggregate_growth.push_back(aggregate.at(t) / lagged_total - 1.0);
  }

  const std::size_t n = out.gamma.size();
  if (n < 2) {
    out.degenerate = true;
    return out;
  }
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += out.gamma[i];
    mean_y += out.aggregate_growth[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = out.gamma[i] - mean_x;
    const double dy = out.aggregate_growth[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    out.degenerate = true;
    return out;
  }
  out.slope = sxy / sxx;
  out.intercept = mean_y - out.slope * mean_x;
  out.r2 = (sxy * sxy) / (sxx * syy);
  const double dof = static_cast<double>(n) - 2.0;
  out.adjusted_r2 = dof > 0.0 ? 1.0 - (1.0 - out.r2) * (static_cast<double>(n) - 1.0) / dof
                              : out.r2;
  return out;
}

}  // namespace tradenet
