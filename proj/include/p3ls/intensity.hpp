#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "p3ls/covariance.hpp"
#include "p3ls/grid.hpp"
#include "p3ls/point_pattern.hpp"

namespace p3ls {

/// The leading q covariance eigenfunctions, sampled on the grid and at the
/// bin midpoints where the count regressions run.
struct EigenBasis {
  Grid grid;
  BinPartition partition;
  std::vector<Curve> functions;  // q curves, unit L2 norm
  Eigen::MatrixXd at_midpoints;  // q x M

  int q() const { return static_cast<int>(functions.size()); }
};

EigenBasis make_eigen_basis(const CovarianceEstimate& cov, int q, const BinPartition& partition);

/// Also usable with any explicit set of basis curves (test hooks).
EigenBasis make_eigen_basis(std::vector<Curve> functions, const BinPartition& partition);

/// Per-subject fitted scores and the reconstructed log-intensity curve.
struct IntensityEstimate {
  std::string subject_id;
  Eigen::VectorXd scores;
  Curve curve;
  bool converged = false;
  int iterations = 0;
  double loglik = 0.0;
  std::vector<double> loglik_path;  // one entry per Newton iterate, nondecreasing
};

/// Maximum-likelihood fit of the Poisson log-linear model
///   N_l ~ Poisson(|B_l| exp(eta_l)),  eta_l = sum_j scores_j basis_j(tbar_l)
/// by Newton iterations with step halving. Initialization is the least
/// squares projection of log((N_l + 0.5)/|B_l|) onto the basis.
IntensityEstimate fit_scores(const CountVector& counts, const EigenBasis& basis);

/// Exact linear combination of the basis curves.
Curve reconstruct_log_intensity(const Eigen::VectorXd& scores, const EigenBasis& basis);

}  // namespace p3ls
