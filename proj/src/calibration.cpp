#include "tradenet/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace tradenet {

namespace {

using FieldPtr = double ModelParams::*;

const std::map<std::string, FieldPtr>& field_map() {
  static const std::map<std::string, FieldPtr> fields = {
      {"rho", &ModelParams::rho},         {"alpha", &ModelParams::alpha},
      {"theta", &ModelParams::theta},     {"varphi", &ModelParams::varphi},
      {"tau_f", &ModelParams::tau_f},     {"tau_d", &ModelParams::tau_d},
      {"w", &ModelParams::w},             {"F_e", &ModelParams::F_e},
      {"f_s", &ModelParams::f_s},         {"mu", &ModelParams::mu},
      {"beta", &ModelParams::beta},       {"mu_z", &ModelParams::mu_z},
      {"sigma_z", &ModelParams::sigma_z}, {"p_lo", &ModelParams::p_lo},
      {"p_hi", &ModelParams::p_hi},       {"P_d", &ModelParams::P_d},
      {"Y_d", &ModelParams::Y_d},         {"P_f", &ModelParams::P_f},
      {"Y_f", &ModelParams::Y_f},
  };
  return fields;
}

FieldPtr field_for(const std::string& name) {
  const auto it = field_map().find(name);
  if (it == field_map().end())
    throw DomainError("calibration: unknown parameter name '" + name + "'");
  return it->second;
}

struct ActiveMoments {
  std::vector<std::string> names;
  std::vector<double> weights;
  std::vector<double> targets;
};

double default_weight(double target) {
  return target != 0.0 ? 1.0 / (target * target) : 1.0;
}

ActiveMoments active_scalar_moments(const CalibrationProblem& p) {
  ActiveMoments act;
  const auto add = [&](const char* name, std::optional<double> w, double target) {
    const double weight = w.has_value() ? *w : default_weight(target);
    if (weight <= 0.0) return;
    act.names.emplace_back(name);
    act.weights.push_back(weight);
    act.targets.push_back(target);
  };
  add("mean_k", p.weights.mean_k, p.targets.mean_k);
  add("median_k", p.weights.median_k, p.targets.median_k);
  add("mean_top_share", p.weights.mean_top_share, p.targets.mean_top_share);
  add("exporter_share", p.weights.exporter_share, p.targets.exporter_share);
  return act;
}

double scalar_moment(const MomentSet& m, const std::string& name) {
  if (name == "mean_k") return m.mean_k;
  if (name == "median_k") return m.median_k;
  if (name == "mean_top_share") return m.mean_top_share;
  return m.exporter_share;
}

}  // namespace

void CalibrationProblem::validate() const {
  if (free.empty()) throw DomainError("CalibrationProblem: no free parameters");
  for (const auto& f : free) {
    field_for(f.name);
    if (!(f.lower < f.upper) || !std::isfinite(f.lower) || !std::isfinite(f.upper))
      throw DomainError("CalibrationProblem: bounds must be finite and ordered for " + f.name);
    if (f.start < f.lower || f.start > f.upper)
      throw DomainError("CalibrationProblem: start outside bounds for " + f.name);
  }
  if (n_firms < 1) throw DomainError("CalibrationProblem: n_firms must be >= 1");
  const auto act = active_scalar_moments(*this);
  const bool curve_active = weights.curve > 0.0 && !targets.import_share_curve.empty();
  if (act.names.empty() && !curve_active)
    throw DomainError("CalibrationProblem: all moment weights are zero");
  if (!targets.import_share_curve.empty() &&
      targets.import_share_curve.size() != static_cast<std::size_t>(kImportCurvePoints))
    throw DomainError("CalibrationProblem: target curve must have 101 points");
}

ModelParams apply_free_params(const ModelParams& base, const std::vector<FreeParam>& names,
                              const std::vector<double>& values) {
  if (names.size() != values.size())
    throw DomainError("apply_free_params: size mismatch");
  ModelParams params = base;
  for (std::size_t i = 0; i < names.size(); ++i) params.*field_for(names[i].name) = values[i];
  return params;
}

double smm_objective(const std::vector<double>& theta_free, const CalibrationProblem& problem,
                     std::vector<EvaluationRecord>* log) {
  if (theta_free.size() != problem.free.size())
    throw DomainError("smm_objective: theta size mismatch");

  // Finite out-of-bounds penalty: large base plus the scaled violation, so a
  // minimizer stepping outside is pushed back without NaN cliffs.
  double violation = 0.0;
  for (std::size_t i = 0; i < theta_free.size(); ++i) {
    const auto& f = problem.free[i];
    const double range = f.upper - f.lower;
    if (theta_free[i] < f.lower) violation += (f.lower - theta_free[i]) / range;
    if (theta_free[i] > f.upper) violation += (theta_free[i] - f.upper) / range;
  }
  if (violation > 0.0) {
    const double value = 1e12 * (1.0 + violation);
    if (log) log->push_back({theta_free, value, true});
    return value;
  }

  const ModelParams params = apply_free_params(problem.fixed, problem.free, theta_free);
  SearchConfig search = problem.search;
  search.rng_seed = problem.seed;  // common random numbers across evaluations
  const Population pop = simulate_population(params, search, problem.n_firms, problem.threads);
  const MomentSet m = compute_moments(pop);

  const ActiveMoments act = active_scalar_moments(problem);
  double objective = 0.0;
  for (std::size_t i = 0; i < act.names.size(); ++i) {
    const double gap = scalar_moment(m, act.names[i]) - act.targets[i];
    objective += act.weights[i] * gap * gap;
  }
  if (problem.weights.curve > 0.0 && !problem.targets.import_share_curve.empty()) {
    double l2 = 0.0;
    for (int j = 0; j < kImportCurvePoints; ++j) {
      const double gap = m.import_share_curve[j] - problem.targets.import_share_curve[j];
      l2 += gap * gap;
    }
    objective += problem.weights.curve * l2;
  }
  if (log) log->push_back({theta_free, objective, false});
  return objective;
}

CalibrationResult calibrate(const CalibrationProblem& problem) {
  problem.validate();
  const std::size_t dim = problem.free.size();

  CalibrationResult result;
  auto& log = result.log;
  const auto evaluate = [&](const std::vector<double>& theta) {
    return smm_objective(theta, problem, &log);
  };
  const int max_evals = problem.minimizer.max_evaluations;
  const auto budget_left = [&] { return static_cast<int>(log.size()) < max_evals; };

  // One Nelder-Mead descent with box bounds handled by the objective penalty.
  // Returns true when the simplex diameter dropped below tolerance.
  const auto nelder_mead_pass = [&](const std::vector<double>& start, double scale) {
    std::vector<std::vector<double>> simplex(dim + 1);
    std::vector<double> values(dim + 1);
    simplex[0] = start;
    values[0] = evaluate(start);
    for (std::size_t i = 0; i < dim; ++i) {
      auto vertex = start;
      const auto& f = problem.free[i];
      double step = scale * (f.upper - f.lower);
      if (vertex[i] + step > f.upper) step = -step;
      vertex[i] = std::clamp(vertex[i] + step, f.lower, f.upper);
      simplex[i + 1] = vertex;
      values[i + 1] = evaluate(vertex);
    }

    const double alpha = 1.0, gamma = 2.0, rho_c = 0.5, sigma = 0.5;
    while (budget_left()) {
      std::vector<std::size_t> order(dim + 1);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      {
        std::vector<std::vector<double>> s2(dim + 1);
        std::vector<double> v2(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
          s2[i] = simplex[order[i]];
          v2[i] = values[order[i]];
        }
        simplex.swap(s2);
        values.swap(v2);
      }

      // Relative simplex diameter against the bound ranges.
      double diameter = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        double lo = simplex[0][i], hi = simplex[0][i];
        for (std::size_t v = 1; v <= dim; ++v) {
          lo = std::min(lo, simplex[v][i]);
          hi = std::max(hi, simplex[v][i]);
        }
        diameter =
            std::max(diameter, (hi - lo) / (problem.free[i].upper - problem.free[i].lower));
      }
      if (diameter < problem.minimizer.tolerance) return true;

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t v = 0; v < dim; ++v)
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v][i] / dim;

      const auto blend = [&](double t) {
        std::vector<double> point(dim);
        for (std::size_t i = 0; i < dim; ++i)
          point[i] = centroid[i] + t * (centroid[i] - simplex[dim][i]);
        return point;
      };

      const auto reflected = blend(alpha);
      const double f_reflected = evaluate(reflected);
      if (f_reflected < values[0]) {
        const auto expanded = blend(gamma);
        const double f_expanded = evaluate(expanded);
        if (f_expanded < f_reflected) {
          simplex[dim] = expanded;
          values[dim] = f_expanded;
        } else {
          simplex[dim] = reflected;
          values[dim] = f_reflected;
        }
      } else if (f_reflected < values[dim - 1]) {
        simplex[dim] = reflected;
        values[dim] = f_reflected;
      } else {
        const bool outside = f_reflected < values[dim];
        const auto contracted = blend(outside ? rho_c : -rho_c);
        const double f_contracted = evaluate(contracted);
        if (f_contracted < (outside ? f_reflected : values[dim])) {
          simplex[dim] = contracted;
          values[dim] = f_contracted;
        } else {
          for (std::size_t v = 1; v <= dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i)
              simplex[v][i] = simplex[0][i] + sigma * (simplex[v][i] - simplex[0][i]);
            values[v] = evaluate(simplex[v]);
            if (!budget_left()) break;
          }
        }
      }
    }
    return false;
  };

  std::vector<double> start(dim);
  for (std::size_t i = 0; i < dim; ++i) start[i] = problem.free[i].start;

  // Basin selection: evaluate a coarse grid (and the configured start) on a
  // reduced-size simulation, refine once around the winner, then descend from
  // the cheapest point found. Spacing is logarithmic because the free
  // parameters span decades. The scan is deterministic and kept out of the
  // replay log because its objective values are drawn at a different
  // simulation size.
  if (problem.minimizer.prescan_per_dim >= 2 && dim >= 1) {
    CalibrationProblem coarse = problem;
    coarse.n_firms = std::max(50, problem.minimizer.prescan_n_firms);
    const int per_dim = problem.minimizer.prescan_per_dim;

    const auto to_theta = [&](const std::vector<double>& frac) {
      std::vector<double> theta(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        const auto& f = problem.free[i];
        if (f.lower > 0.0) {
          theta[i] = f.lower * std::exp(frac[i] * std::log(f.upper / f.lower));
        } else {
          theta[i] = f.lower + frac[i] * (f.upper - f.lower);
        }
        theta[i] = std::clamp(theta[i], f.lower, f.upper);
      }
      return theta;
    };

    double best_value = smm_objective(start, coarse, nullptr);
    std::vector<double> best_frac;  // empty: configured start still winning
    const auto scan = [&](const std::vector<double>& center, double spread) {
      std::vector<int> idx(dim, 0);
      while (true) {
        std::vector<double> frac(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          const double offset = per_dim == 1 ? 0.0
                                             : (static_cast<double>(idx[i]) / (per_dim - 1) - 0.5);
          frac[i] = std::clamp(center[i] + 2.0 * spread * offset, 0.0, 1.0);
        }
        const double value = smm_objective(to_theta(frac), coarse, nullptr);
        if (value < best_value) {
          best_value = value;
          best_frac = frac;
        }
        std::size_t d = 0;
        for (; d < dim; ++d) {
          if (++idx[d] < per_dim) break;
          idx[d] = 0;
        }
        if (d == dim) break;
      }
    };

    scan(std::vector<double>(dim, 0.5), 0.38);  // grid over [0.12, 0.88] of each range
    if (!best_frac.empty()) {
      const auto coarse_best = best_frac;
      scan(coarse_best, 0.38 / (per_dim - 1));
    }
    if (!best_frac.empty()) start = to_theta(best_frac);
  }

  // Discrete moments (the median) flatten the surface into steps the simplex
  // can collapse onto; restart around the incumbent best with a fresh spread
  // until the budget runs out or a restart stops improving.
  bool converged = nelder_mead_pass(start, problem.minimizer.initial_scale);
  double best_before = 1e308;
  for (int restart = 0; restart < 6 && budget_left(); ++restart) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < log.size(); ++i)
      if (log[i].objective < log[best].objective) best = i;
    if (converged && log[best].objective >= best_before * (1.0 - 1e-9) &&
        log[best].objective < problem.minimizer.tolerance)
      break;
    best_before = log[best].objective;
    const double scale = std::max(0.05, problem.minimizer.initial_scale / (restart + 2.0));
    converged = nelder_mead_pass(log[best].theta, scale) || converged;
  }

  // Best point ever evaluated, not just the best simplex vertex.
  std::size_t best = 0;
  for (std::size_t i = 1; i < log.size(); ++i)
    if (log[i].objective < log[best].objective) best = i;
  result.fitted = log[best].theta;
  result.objective = log[best].objective;
  result.evaluations = static_cast<int>(log.size());
  result.converged = converged;

  const ModelParams params = apply_free_params(problem.fixed, problem.free, result.fitted);
  SearchConfig search = problem.search;
  search.rng_seed = problem.seed;
  const Population pop = simulate_population(params, search, problem.n_firms, problem.threads);
  result.moments = compute_moments(pop);
  const ActiveMoments act = active_scalar_moments(problem);
  for (std::size_t i = 0; i < act.names.size(); ++i) {
    result.residual_names.push_back(act.names[i]);
    result.residuals.push_back(scalar_moment(result.moments, act.names[i]) - act.targets[i]);
  }
  return result;
}

}  // namespace tradenet
