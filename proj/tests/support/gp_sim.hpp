// Test-only helper: draw log-Gaussian Cox patterns with a prescribed
// covariance function, the known-truth oracle for covariance estimation.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <vector>

#include "p3ls/grid.hpp"
#include "p3ls/numerics.hpp"
#include "p3ls/point_pattern.hpp"
#include "p3ls/rng.hpp"
#include "p3ls/simulate.hpp"

namespace p3ls::testsupport {

inline GridMatrix covariance_on_grid(const Grid& grid,
                                     const std::function<double(double, double)>& k) {
  Eigen::MatrixXd m(grid.size, grid.size);
  for (int s = 0; s < grid.size; ++s)
    for (int t = 0; t < grid.size; ++t) m(s, t) = k(grid.point(s), grid.point(t));
  return GridMatrix(grid, std::move(m));
}

/// Factorized sampler of a mean-zero Gaussian process with the given
/// covariance matrix on the grid (negative eigenvalues clipped).
class GpSampler {
 public:
  explicit GpSampler(const GridMatrix& cov) : grid_(cov.grid) {
    const SymEigen eig = sym_eigen(cov.entries);
    root_ = eig.eigenvectors * eig.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  Curve draw(Rng& rng, double mean_level) const {
    Eigen::VectorXd z(root_.cols());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return Curve(grid_, (root_ * z).array() + mean_level);
  }

 private:
  Grid grid_;
  Eigen::MatrixXd root_;
};

/// n LGCP patterns whose log-intensity is mean_level + GP(cov).
inline std::vector<PointPattern> draw_lgcp_patterns(const GpSampler& sampler, int n,
                                                    double mean_level, Rng& rng) {
  std::vector<PointPattern> patterns;
  patterns.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Curve x = sampler.draw(rng, mean_level);
    patterns.push_back(simulate_inhomogeneous_poisson(x, rng, "g" + std::to_string(i)));
  }
  return patterns;
}

inline double grid_rms(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace p3ls::testsupport
