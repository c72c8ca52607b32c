#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "p3ls/bspline.hpp"
#include "p3ls/grid.hpp"
#include "p3ls/point_pattern.hpp"
#include "p3ls/rng.hpp"

namespace p3ls {

/// Parameters of the synthetic log-Gaussian Cox study generator.
struct SimConfig {
  double eta = 10.0;
  double mean_shift = 2.8;
  int n_bspline = 20;
  double window_start = 0.0;
  double window_end = 24.0;
  int grid_size = 100;
  int case_id = 1;
  double noise_sd = 1.0;
  double intercept = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LogIntensityDraw {
  Curve log_intensity;
  Eigen::VectorXd coefficients;  // omega_j / eta + mean_shift
};

/// Deterministic core: log-intensity for given basis weights omega.
LogIntensityDraw sim_log_intensity_from_omegas(const SimConfig& cfg, const BSplineBasis& basis,
                                               const Grid& grid, const Eigen::VectorXd& omegas);

/// Random log-intensity: omega_1 = 0, omega_2 and omega_last ~ N(12, 4^2),
/// the rest ~ N(20, 10^2), all independent.
LogIntensityDraw sample_sim_log_intensity(const SimConfig& cfg, const BSplineBasis& basis,
                                          const Grid& grid, Rng& rng);

/// Cox construction given a sampled log-intensity: per grid cell k draw
/// N_k ~ Poisson(exp(X(t_k)) * step) and place the N_k points uniformly in
/// the cell (conditional uniformity of Poisson processes).
PointPattern simulate_inhomogeneous_poisson(const Curve& log_intensity, Rng& rng,
                                            std::string subject_id = "");

}  // namespace p3ls
