#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tradenet/calibration.hpp"
#include "tradenet/params.hpp"

namespace tradenet {

// Exit codes: 0 ok, 1 validation (config or domain), 2 runtime failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Default five-parameter calibration problem targeting the published moment
// set (beta fixed at 0.96).
CalibrationProblem default_calibration_problem();

// Import-share target curve used by the default calibration problem; frozen
// from a reference run of this artifact.
std::vector<double> default_import_curve_target();

}  // namespace tradenet
