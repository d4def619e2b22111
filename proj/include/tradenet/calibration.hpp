#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tradenet/params.hpp"
#include "tradenet/population.hpp"

namespace tradenet {

struct FreeParam {
  std::string name;  // any scalar ModelParams field, e.g. "f_s", "p_hi"
  double lower = 0.0;
  double upper = 0.0;
  double start = 0.0;
};

struct MomentTargets {
  double mean_k = 0.0;
  double median_k = 0.0;
  double mean_top_share = 0.0;
  double exporter_share = 0.0;
  // Optional 101-point cumulative import-share target curve.
  std::vector<double> import_share_curve;
};

struct MomentWeights {
  // Scalar moments default to inverse squared targets (relative errors);
  // zero disables a moment.
  std::optional<double> mean_k;
  std::optional<double> median_k;
  std::optional<double> mean_top_share;
  std::optional<double> exporter_share;
  double curve = 1.0;
};

struct MinimizerSettings {
  double initial_scale = 0.20;  // simplex edge as a fraction of the bound range
  double tolerance = 1e-7;      // simplex diameter (relative) stopping rule
  int max_evaluations = 600;
  // Discrete moments (the integer-valued median) leave flat steps that a
  // simplex can settle on; a coarse deterministic grid at reduced simulation
  // size picks the descent's start basin. 0 or 1 disables the scan.
  int prescan_per_dim = 3;
  int prescan_n_firms = 800;
};

struct CalibrationProblem {
  std::vector<FreeParam> free;
  ModelParams fixed;  // values of everything not being fitted
  MomentTargets targets;
  MomentWeights weights;
  int n_firms = 5000;
  std::uint64_t seed = 20240801ULL;
  SearchConfig search;
  MinimizerSettings minimizer;
  int threads = 0;

  void validate() const;
};

struct EvaluationRecord {
  std::vector<double> theta;
  double objective = 0.0;
  bool penalized = false;  // out-of-bounds penalty, no simulation run
};

struct CalibrationResult {
  std::vector<double> fitted;
  double objective = 0.0;
  std::vector<std::string> residual_names;
  std::vector<double> residuals;  // model - target per active moment
  MomentSet moments;              // at the fitted point
  int evaluations = 0;
  bool converged = false;
  std::vector<EvaluationRecord> log;
};

// Applies named free-parameter values onto a ModelParams copy.
ModelParams apply_free_params(const ModelParams& base, const std::vector<FreeParam>& names,
                              const std::vector<double>& values);

// Weighted sum of squared moment gaps at theta, simulated under common random
// numbers (the problem seed is reused on every call). Out-of-bounds thetas
// get a finite penalty that grows with the violation.
double smm_objective(const std::vector<double>& theta_free, const CalibrationProblem& problem,
                     std::vector<EvaluationRecord>* log = nullptr);

// Nelder-Mead descent from the configured start. Never returns a point worse
// than the start; the evaluation log allows exact replay.
CalibrationResult calibrate(const CalibrationProblem& problem);

}  // namespace tradenet
