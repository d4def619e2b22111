#include "tradenet/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "tradenet/params.hpp"

namespace tradenet {

double RegressionResult::coef_for(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return coef[i];
  throw DomainError("RegressionResult: no coefficient named " + name);
}

double RegressionResult::se_for(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return se[i];
  throw DomainError("RegressionResult: no coefficient named " + name);
}

namespace {

// Iterated within-group demeaning over all FE dimensions applied jointly to
// y and X (same projection, so the Frisch-Waugh residuals stay aligned).
void demean_columns(std::vector<DesignRow>& rows, std::size_t n_fe,
                    std::vector<long>* fe_levels, const AbsorbOptions& options) {
  if (n_fe == 0) return;
  const std::size_t n = rows.size();
  const std::size_t n_x = rows.empty() ? 0 : rows[0].x.size();

  std::vector<std::vector<int>> group(n_fe, std::vector<int>(n));
  std::vector<int> group_counts(n_fe, 0);
  for (std::size_t d = 0; d < n_fe; ++d) {
    std::map<std::int64_t, int> ids;
    for (std::size_t r = 0; r < n; ++r) {
      const auto it = ids.emplace(rows[r].fe_keys[d], static_cast<int>(ids.size()));
      group[d][r] = it.first->second;
    }
    group_counts[d] = static_cast<int>(ids.size());
    if (fe_levels) fe_levels->push_back(static_cast<long>(ids.size()));
  }

  double prev_norm = -1.0;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    for (std::size_t d = 0; d < n_fe; ++d) {
      const int g = group_counts[d];
      std::vector<double> count(g, 0.0);
      std::vector<double> mean_y(g, 0.0);
      std::vector<std::vector<double>> mean_x(n_x, std::vector<double>(g, 0.0));
      for (std::size_t r = 0; r < n; ++r) {
        const int k = group[d][r];
        count[k] += 1.0;
        mean_y[k] += rows[r].y;
        for (std::size_t c = 0; c < n_x; ++c) mean_x[c][k] += rows[r].x[c];
      }
      for (int k = 0; k < g; ++k) {
        mean_y[k] /= count[k];
        for (std::size_t c = 0; c < n_x; ++c) mean_x[c][k] /= count[k];
      }
      for (std::size_t r = 0; r < n; ++r) {
        const int k = group[d][r];
        rows[r].y -= mean_y[k];
        for (std::size_t c = 0; c < n_x; ++c) rows[r].x[c] -= mean_x[c][k];
      }
    }
    double norm = 0.0;
    for (const auto& row : rows) {
      norm += row.y * row.y;
      for (double v : row.x) norm += v * v;
    }
    norm = std::sqrt(norm);
    if (n_fe == 1) break;  // a single dimension demeans exactly in one pass
    if (prev_norm >= 0.0 && std::abs(prev_norm - norm) < options.tolerance * (1.0 + norm))
      break;
    prev_norm = norm;
  }
}

}  // namespace

RegressionResult ols_absorb(const DesignTable& design, const AbsorbOptions& options) {
  if (design.rows.empty()) throw DomainError("ols_absorb: no rows");
  const std::size_t n = design.rows.size();
  const std::size_t n_x_in = design.x_names.size();
  for (const auto& row : design.rows)
    if (row.x.size() != n_x_in || row.fe_keys.size() != design.fe_names.size())
      throw DomainError("ols_absorb: ragged design row");

  RegressionResult result;
  result.n = static_cast<long>(n);

  std::vector<DesignRow> rows = design.rows;
  demean_columns(rows, design.fe_names.size(), &result.fe_levels, options);

  // Drop regressors that the absorbed effects annihilate (column norm ~ 0)
  // and exact collinear combinations, via column-pivoted QR.
  Eigen::MatrixXd X_full(n, n_x_in);
  Eigen::VectorXd y(n);
  for (std::size_t r = 0; r < n; ++r) {
    y(static_cast<Eigen::Index>(r)) = rows[r].y;
    for (std::size_t c = 0; c < n_x_in; ++c)
      X_full(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r].x[c];
  }

  std::vector<int> keep;
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X_full);
    qr.setThreshold(options.collinearity_tol);
    const int rank = static_cast<int>(qr.rank());
    std::vector<char> kept(n_x_in, 0);
    for (int i = 0; i < rank; ++i) kept[qr.colsPermutation().indices()(i)] = 1;
    for (std::size_t c = 0; c < n_x_in; ++c) {
      if (kept[c])
        keep.push_back(static_cast<int>(c));
      else
        result.dropped.push_back(design.x_names[c]);
    }
  }
  if (keep.empty()) throw DomainError("ols_absorb: all regressors collinear with the FE");

  const std::size_t k = keep.size();
  Eigen::MatrixXd X(n, k);
  for (std::size_t c = 0; c < k; ++c) X.col(c) = X_full.col(keep[c]);
  for (std::size_t c = 0; c < k; ++c) result.names.push_back(design.x_names[keep[c]]);

  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::MatrixXd xtx_inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::VectorXd beta = xtx_inv * (X.transpose() * y);
  const Eigen::VectorXd resid = y - X * beta;

  result.coef.assign(beta.data(), beta.data() + k);
  const double sst = y.squaredNorm();
  result.r2_within = sst > 0.0 ? 1.0 - resid.squaredNorm() / sst : 0.0;

  // CGM two-way clustered variance. Each piece is a one-way clustered
  // sandwich over a partition: A, B, and the intersection A x B.
  const auto cluster_meat = [&](auto&& key_of) {
    std::map<std::pair<std::int64_t, std::int64_t>, Eigen::VectorXd> sums;
    for (std::size_t r = 0; r < n; ++r) {
      auto [it, inserted] = sums.try_emplace(key_of(design.rows[r]), Eigen::VectorXd::Zero(k));
      (void)inserted;
      it->second += X.row(static_cast<Eigen::Index>(r)).transpose() *
                    resid(static_cast<Eigen::Index>(r));
    }
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [key, g] : sums) meat += g * g.transpose();
    return std::pair{meat, static_cast<int>(sums.size())};
  };

  const auto [meat_a, n_a] = cluster_meat(
      [](const DesignRow& row) { return std::pair<std::int64_t, std::int64_t>{row.cluster_a, 0}; });
  const auto [meat_b, n_b] = cluster_meat(
      [](const DesignRow& row) { return std::pair<std::int64_t, std::int64_t>{row.cluster_b, 0}; });
  const auto [meat_ab, n_ab] = cluster_meat([](const DesignRow& row) {
    return std::pair<std::int64_t, std::int64_t>{row.cluster_a, row.cluster_b};
  });
  (void)n_ab;
  result.clusters_a = n_a;
  result.clusters_b = n_b;

  const double dof = static_cast<double>(n) > static_cast<double>(k) + 1.0
                         ? (static_cast<double>(n) - 1.0) / (static_cast<double>(n) - k)
                         : 1.0;
  Eigen::MatrixXd V = dof * (xtx_inv * (meat_a + meat_b - meat_ab) * xtx_inv);

  // The CGM difference is not guaranteed PSD in small samples: floor the
  // spectrum at zero.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (V + V.transpose()));
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  V = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();

  result.vcov.assign(k, std::vector<double>(k));
  result.se.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) result.vcov[i][j] = V(i, j);
    result.se[i] = std::sqrt(std::max(V(i, i), 0.0));
  }
  return result;
}

DesignTable build_design(const TransactionPanel& outcomes, const ShockSeries& shocks,
                         const RegressSpec& spec) {
  DesignTable design;
  design.x_names.push_back("shock");
  for (int l = 1; l <= spec.outcome_lags; ++l)
    design.x_names.push_back("outcome_lag" + std::to_string(l));
  for (int l = 1; l <= spec.shock_lags; ++l)
    design.x_names.push_back("shock_lag" + std::to_string(l));
  if (spec.include_covariate) design.x_names.push_back("covariate");

  for (const auto& dims : spec.fe_dims) {
    std::string name;
    for (const auto& d : dims) name += (name.empty() ? "" : "x") + d;
    design.fe_names.push_back(name);
  }

  std::map<std::pair<std::int64_t, int>, double> shock_at;
  for (const auto& row : shocks.rows) shock_at[{row.firm, row.period}] = row.shock;

  std::map<std::pair<InstanceKey, int>, const Transaction*> obs;
  for (const auto& t : outcomes.records) obs[{instance_of(t), t.period}] = &t;

  const auto key_part = [](const Transaction& t, const std::string& dim) -> std::int64_t {
    if (dim == "firm") return t.firm;
    if (dim == "supplier") return t.supplier;
    if (dim == "product") return t.product;
    if (dim == "country") return t.country;
    if (dim == "period") return t.period;
    throw DomainError("build_design: unknown FE dimension " + dim);
  };

  for (const auto& t : outcomes.records) {
    const auto shock_it = shock_at.find({t.firm, t.period});
    if (shock_it == shock_at.end()) continue;

    DesignRow row;
    row.y = std::log(t.quantity);
    row.x.push_back(shock_it->second);

    bool complete = true;
    for (int l = 1; l <= spec.outcome_lags && complete; ++l) {
      const auto prev = obs.find({instance_of(t), t.period - l});
      if (prev == obs.end())
        complete = false;
      else
        row.x.push_back(std::log(prev->second->quantity));
    }
    for (int l = 1; l <= spec.shock_lags && complete; ++l) {
      const auto prev = shock_at.find({t.firm, t.period - l});
      if (prev == shock_at.end())
        complete = false;
      else
        row.x.push_back(prev->second);
    }
    if (spec.include_covariate) {
      if (t.covariate)
        row.x.push_back(*t.covariate);
      else
        complete = false;
    }
    if (!complete) continue;

    for (const auto& dims : spec.fe_dims) {
      // 64-bit mix of the dimension parts; ids are small so collisions are
      // out of reach for any panel this project produces.
      std::uint64_t key = 1469598103934665603ULL;
      for (const auto& d : dims) {
        key ^= static_cast<std::uint64_t>(key_part(t, d)) + 0x9e3779b97f4a7c15ULL;
        key *= 1099511628211ULL;
      }
      row.fe_keys.push_back(static_cast<std::int64_t>(key));
    }
    row.cluster_a = key_part(t, spec.cluster_a);
    row.cluster_b = key_part(t, spec.cluster_b);
    design.rows.push_back(std::move(row));
  }
  return design;
}

RegressionResult panel_regress(const TransactionPanel& outcomes, const ShockSeries& shocks,
                               const RegressSpec& spec, const AbsorbOptions& options) {
  return ols_absorb(build_design(outcomes, shocks, spec), options);
}

}  // namespace tradenet
