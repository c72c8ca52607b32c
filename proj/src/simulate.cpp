#include "p3ls/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace p3ls {

void SimConfig::validate() const {
  if (!(eta > 0.0)) throw Error("sim config: eta must be positive");
  if (case_id < 1 || case_id > 4) throw UnknownCase("sim config: case must be 1..4");
  if (noise_sd < 0.0) throw Error("sim config: noise sd must be nonnegative");
  if (!(window_end > window_start)) throw InvalidWindow("sim config: window degenerate");
  if (grid_size < 2) throw InvalidWindow("sim config: grid size must be at least 2");
  if (n_bspline < 4) throw Error("sim config: need at least 4 basis functions");
}

LogIntensityDraw sim_log_intensity_from_omegas(const SimConfig& cfg, const BSplineBasis& basis,
                                               const Grid& grid, const Eigen::VectorXd& omegas) {
  if (omegas.size() != basis.size()) throw DimensionMismatch("omega count != basis size");
  LogIntensityDraw draw;
  draw.coefficients = omegas / cfg.eta + Eigen::VectorXd::Constant(omegas.size(), cfg.mean_shift);
  draw.log_intensity = basis.combine(draw.coefficients, grid);
  return draw;
}

LogIntensityDraw sample_sim_log_intensity(const SimConfig& cfg, const BSplineBasis& basis,
                                          const Grid& grid, Rng& rng) {
  cfg.validate();
  const int n = basis.size();
  Eigen::VectorXd omegas(n);
  omegas(0) = 0.0;
  for (int j = 1; j < n; ++j) {
    const bool boundary = (j == 1 || j == n - 1);
    omegas(j) = boundary ? rng.normal(12.0, 4.0) : rng.normal(20.0, 10.0);
  }
  return sim_log_intensity_from_omegas(cfg, basis, grid, omegas);
}

PointPattern simulate_inhomogeneous_poisson(const Curve& log_intensity, Rng& rng,
                                            std::string subject_id) {
  if (!log_intensity.values.allFinite())
    throw NonFiniteEntry("log intensity has non-finite values");
  const Grid& grid = log_intensity.grid;
  PointPattern out;
  out.subject_id = std::move(subject_id);
  out.window_start = grid.start;
  out.window_end = grid.end;
  for (int k = 0; k < grid.size; ++k) {
    const double cell_mean = std::exp(log_intensity.values(k)) * grid.step;
    if (!(cell_mean <= 1e9))
      throw IntensityOverflow("expected events per cell exceed 1e9 at t=" +
                              std::to_string(grid.point(k)));
    const long count = rng.poisson(cell_mean);
    const double lo = grid.start + grid.step * k;
    const double hi = (k + 1 == grid.size) ? grid.end : grid.start + grid.step * (k + 1);
    const size_t begin = out.events.size();
    for (long c = 0; c < count; ++c) out.events.push_back(rng.uniform(lo, hi));
    std::sort(out.events.begin() + static_cast<long>(begin), out.events.end());
  }
  return out;
}

}  // namespace p3ls
