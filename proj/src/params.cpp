#include "tradenet/params.hpp"

namespace tradenet {

void ModelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("ModelParams: ") + what);
  };
  require(rho > 1.0, "rho must be > 1");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must be in [0,1]");
  require(theta > 0.0 && theta < 1.0, "theta must be in (0,1)");
  require(varphi > 0.0 && varphi < 1.0, "varphi must be in (0,1)");
  require(tau_f >= 1.0, "tau_f must be >= 1");
  require(tau_d > 0.0, "tau_d must be > 0");
  require(w > 0.0, "w must be > 0");
  require(F_e >= 0.0, "F_e must be >= 0");
  require(f_s >= 0.0, "f_s must be >= 0");
  require(mu > 0.0, "mu must be > 0");
  require(beta > 0.0 && beta < 1.0, "beta must be in (0,1)");
  require(sigma_z >= 0.0, "sigma_z must be >= 0");
  require(p_lo > 0.0, "p_lo must be > 0");
  require(p_lo <= p_hi, "p_lo must be <= p_hi");
  require(P_d > 0.0 && Y_d > 0.0 && P_f > 0.0 && Y_f > 0.0, "market sizes must be > 0");
}

ModelParams reference_parametrization() { return ModelParams{}; }

ModelParams calibrated_default() {
  // Five-parameter SMM fit against the published moment targets (mean and
  // median supplier counts, mean top-supplier share, exporter share, import
  // distribution) with beta = 0.96 and seed 20240801; see tools README for
  // the reproduction command. Moments at this point, 5000 firms:
  //   mean_k 6.0598, median_k 2, mean_top_share 0.6624, exporter_share 0.1020.
  ModelParams p;
  p.f_s = 0.2486002719;
  p.mu = 0.4490470822;
  p.p_hi = 2.560500481;
  p.sigma_z = 0.282331966;
  p.F_e = 0.1105202846;
  return p;
}

void SearchConfig::validate() const {
  if (quadrature_nodes < 8) throw DomainError("SearchConfig: quadrature_nodes must be >= 8");
  if (max_rounds < 1) throw DomainError("SearchConfig: max_rounds must be >= 1");
}

}  // namespace tradenet
