#pragma once

#include <Eigen/Core>
#include <vector>

#include "p3ls/grid.hpp"
#include "p3ls/numerics.hpp"
#include "p3ls/point_pattern.hpp"

namespace p3ls {

/// Kernel estimates of the second-order structure of the latent intensities:
/// same_subject(s,t) estimates E[lambda(s) lambda(t)] from within-subject
/// event pairs, cross_subject(s,t) estimates E[lambda(s)] E[lambda(t)] from
/// between-subject pairs. Both carry the edge correction in the denominator.
struct SecondOrderEstimate {
  Grid grid;
  GridMatrix same_subject;
  GridMatrix cross_subject;
  double h = 0.0;
};

SecondOrderEstimate estimate_second_order(const std::vector<PointPattern>& patterns,
                                          const Grid& grid, double h);

/// Direct evaluation of the defining double sums. Quadratic in the event
/// counts; kept as the reference for equivalence tests of the fast path.
SecondOrderEstimate estimate_second_order_bruteforce(const std::vector<PointPattern>& patterns,
                                                     const Grid& grid, double h);

/// Grid-evaluated estimate of the log-intensity covariance with its
/// eigendecomposition attached.
struct CovarianceEstimate {
  Grid grid;
  GridMatrix khat;
  Eigen::VectorXd eigenvalues;   // descending, of khat as a matrix
  Eigen::MatrixXd eigenvectors;  // unit Euclidean norm columns
  double h = 0.0;
  int floored_cells = 0;  // entries zeroed because an estimate was <= 1e-12

  /// Eigenfunction with unit L2 norm under grid quadrature: v_l / sqrt(step).
  Curve eigenfunction(int ell) const {
    return Curve(grid, eigenvectors.col(ell) / std::sqrt(grid.step));
  }
};

/// Log-ratio plug-in estimator of the covariance: khat = log(same/cross)
/// elementwise, with nonpositive cells floored to zero covariance, then
/// symmetrized and eigendecomposed.
CovarianceEstimate estimate_covariance(const std::vector<PointPattern>& patterns,
                                       const Grid& grid, double h);

/// Smallest q whose positive eigenvalues explain at least the requested share
/// of the total positive variance. Negative eigenvalues are excluded from
/// numerator and denominator.
int select_q(const Eigen::VectorXd& eigenvalues, double threshold);

inline int select_q(const CovarianceEstimate& cov, double threshold) {
  return select_q(cov.eigenvalues, threshold);
}

}  // namespace p3ls
