#include "tradenet/facts.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tradenet/numeric.hpp"
#include "tradenet/params.hpp"

namespace tradenet {

namespace {

using FirmPeriod = std::pair<std::int64_t, int>;
using Link = std::pair<std::int64_t, std::int64_t>;  // (firm, supplier)

// Supplier expenditure per (firm, period).
std::map<FirmPeriod, std::map<std::int64_t, double>> supplier_values(
    const TransactionPanel& panel) {
  std::map<FirmPeriod, std::map<std::int64_t, double>> out;
  for (const auto& t : panel.records) out[{t.firm, t.period}][t.supplier] += t.value;
  return out;
}

// Top supplier per (firm, period): max expenditure, lowest id on ties.
std::int64_t top_of(const std::map<std::int64_t, double>& values) {
  std::int64_t best = values.begin()->first;
  double best_value = values.begin()->second;
  for (const auto& [s, v] : values) {
    if (v > best_value) {
      best = s;
      best_value = v;
    }
  }
  return best;
}

}  // namespace

DistributionStats distribution_stats(std::vector<double> values) {
  if (values.empty()) throw DomainError("distribution_stats: empty data");
  std::sort(values.begin(), values.end());
  DistributionStats s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.p10 = percentile_sorted(values, 0.10);
  s.p25 = percentile_sorted(values, 0.25);
  s.p50 = percentile_sorted(values, 0.50);
  s.p75 = percentile_sorted(values, 0.75);
  s.p90 = percentile_sorted(values, 0.90);
  s.p95 = percentile_sorted(values, 0.95);
  s.p99 = percentile_sorted(values, 0.99);
  return s;
}

FactsReport stylized_facts(const TransactionPanel& panel, const FactsOptions& options) {
  if (panel.records.empty()) throw DomainError("stylized_facts: empty panel");
  const auto values = supplier_values(panel);
  const int first_period = panel.min_period();
  const int last_period = panel.max_period();

  // First appearance of each (firm, supplier) link.
  std::map<Link, int> first_seen;
  for (const auto& t : panel.records) {
    const auto it = first_seen.find({t.firm, t.supplier});
    if (it == first_seen.end() || t.period < it->second)
      first_seen[{t.firm, t.supplier}] = t.period;
  }
  const int new_link_start = first_period + options.burn_in_periods;

  FactsReport report;
  report.burn_in_periods = options.burn_in_periods;

  std::vector<double> pooled_k, pooled_top;
  std::vector<double> new_share_by_period, new_import_by_period;

  for (int period = first_period; period <= last_period; ++period) {
    std::vector<double> ks, tops;
    long firms_with_new = 0, firms_total = 0;
    double value_total = 0.0, value_new = 0.0;
    for (const auto& [key, suppliers] : values) {
      if (key.second != period) continue;
      ++firms_total;
      ks.push_back(static_cast<double>(suppliers.size()));
      double total = 0.0, top = 0.0;
      bool any_new = false;
      for (const auto& [s, v] : suppliers) {
        total += v;
        top = std::max(top, v);
        if (period >= new_link_start && first_seen[{key.first, s}] == period) {
          any_new = true;
          value_new += v;
        }
      }
      tops.push_back(top / total);
      value_total += total;
      if (any_new) ++firms_with_new;
    }
    if (firms_total == 0) continue;

    PeriodFacts pf;
    pf.period = period;
    pf.n_firms = firms_total;
    pf.suppliers_per_firm = distribution_stats(ks);
    pf.top_supplier_share = distribution_stats(tops);
    if (period >= new_link_start) {
      pf.share_firms_with_new_link = static_cast<double>(firms_with_new) / firms_total;
      pf.import_share_of_new_links = value_total > 0.0 ? value_new / value_total : 0.0;
      new_share_by_period.push_back(pf.share_firms_with_new_link);
      new_import_by_period.push_back(pf.import_share_of_new_links);
    }
    report.per_period.push_back(pf);
    pooled_k.insert(pooled_k.end(), ks.begin(), ks.end());
    pooled_top.insert(pooled_top.end(), tops.begin(), tops.end());
  }

  report.pooled.period = -1;
  report.pooled.n_firms = static_cast<long>(pooled_k.size());
  report.pooled.suppliers_per_firm = distribution_stats(pooled_k);
  report.pooled.top_supplier_share = distribution_stats(pooled_top);
  const auto mean_of = [](const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
  };
  report.pooled.share_firms_with_new_link = mean_of(new_share_by_period);
  report.pooled.import_share_of_new_links = mean_of(new_import_by_period);
  return report;
}

SurvivalResult survival_stats(const TransactionPanel& panel, int horizon, LinkClass link_class,
                              const FactsOptions& options) {
  if (horizon < 1) throw DomainError("survival_stats: horizon must be >= 1");
  const int first_period = panel.min_period();
  const int last_period = panel.max_period();
  if (last_period - first_period < horizon)
    throw DomainError("survival_stats: panel spans too few periods for this horizon");

  const auto values = supplier_values(panel);
  std::set<std::tuple<std::int64_t, std::int64_t, int>> active;
  for (const auto& [key, suppliers] : values)
    for (const auto& [s, v] : suppliers) active.insert({key.first, s, key.second});

  std::map<Link, int> first_seen;
  for (const auto& t : panel.records) {
    const auto it = first_seen.find({t.firm, t.supplier});
    if (it == first_seen.end() || t.period < it->second)
      first_seen[{t.firm, t.supplier}] = t.period;
  }
  const int new_link_start = first_period + options.burn_in_periods;

  // One observation per (firm, supplier, t) with t + horizon inside the panel.
  DesignTable design;
  design.x_names = {"const"};
  const bool indicator = link_class != LinkClass::all;
  if (indicator) design.x_names.push_back("type_link");
  design.fe_names = {};

  long n_class = 0, survived_class = 0;
  for (const auto& [key, suppliers] : values) {
    const auto& [firm, period] = key;
    if (period + horizon > last_period) continue;
    const std::int64_t top = top_of(suppliers);
    for (const auto& [s, v] : suppliers) {
      const bool is_top = s == top;
      const bool is_new = period >= new_link_start && first_seen[{firm, s}] == period;
      const bool in_class = link_class == LinkClass::all || (link_class == LinkClass::top && is_top) ||
                            (link_class == LinkClass::fresh && is_new);
      const bool survives = active.contains({firm, s, period + horizon});
      DesignRow row;
      row.y = survives ? 1.0 : 0.0;
      row.x.push_back(1.0);
      if (indicator) row.x.push_back(in_class ? 1.0 : 0.0);
      row.cluster_a = firm;
      row.cluster_b = period;
      design.rows.push_back(row);
      if (in_class) {
        ++n_class;
        if (survives) ++survived_class;
      }
    }
  }
  if (design.rows.empty()) throw DomainError("survival_stats: no observations");

  SurvivalResult result;
  result.n = n_class;
  result.probability =
      n_class > 0 ? static_cast<double>(survived_class) / static_cast<double>(n_class) : 0.0;
  result.has_indicator = indicator;

  const RegressionResult reg = ols_absorb(design);
  result.beta0 = reg.coef_for("const");
  if (indicator && std::find(reg.names.begin(), reg.names.end(), "type_link") != reg.names.end())
    result.beta1 = reg.coef_for("type_link");

  // Firm and year FE variant; the constant is absorbed. Skipped when the
  // class indicator has no variation (nothing to estimate).
  const bool varies = n_class > 0 && n_class < static_cast<long>(design.rows.size());
  if (indicator && varies) {
    DesignTable fe_design;
    fe_design.x_names = {"type_link"};
    fe_design.fe_names = {"firm", "year"};
    for (std::size_t i = 0; i < design.rows.size(); ++i) {
      DesignRow row;
      row.y = design.rows[i].y;
      row.x.push_back(design.rows[i].x[1]);
      row.fe_keys = {design.rows[i].cluster_a, design.rows[i].cluster_b};
      row.cluster_a = design.rows[i].cluster_a;
      row.cluster_b = design.rows[i].cluster_b;
      fe_design.rows.push_back(row);
    }
    RegressionResult reg_fe;
    try {
      reg_fe = ols_absorb(fe_design);
    } catch (const DomainError&) {
      return result;  // indicator absorbed by the FE layout: leave beta1_fe at 0
    }
    if (!reg_fe.names.empty() && reg_fe.names[0] == "type_link") result.beta1_fe = reg_fe.coef[0];
  }
  return result;
}

PersistenceResult top_supplier_persistence(const TransactionPanel& panel, int horizon) {
  if (horizon < 1) throw DomainError("top_supplier_persistence: horizon must be >= 1");
  const int last_period = panel.max_period();
  const auto values = supplier_values(panel);

  PersistenceResult out;
  long stay_uncond = 0, stay_cond = 0;
  for (const auto& [key, suppliers] : values) {
    const auto& [firm, period] = key;
    if (period + horizon > last_period) continue;
    const std::int64_t top_now = top_of(suppliers);
    ++out.n_unconditional;
    const auto later = values.find({firm, period + horizon});
    const bool still_active =
        later != values.end() && later->second.contains(top_now);
    const bool still_top = later != values.end() && top_of(later->second) == top_now;
    if (still_top) ++stay_uncond;
    if (still_active) {
      ++out.n_conditional;
      if (still_top) ++stay_cond;
    }
  }
  if (out.n_unconditional > 0)
    out.unconditional = static_cast<double>(stay_uncond) / out.n_unconditional;
  if (out.n_conditional > 0)
    out.conditional = static_cast<double>(stay_cond) / out.n_conditional;
  return out;
}

}  // namespace tradenet
