#pragma once

#include <Eigen/Core>
#include <vector>

#include "p3ls/grid.hpp"

namespace p3ls {

/// Clamped B-spline basis on a window, with each basis function rescaled so
/// its maximum equals one.
class BSplineBasis {
public:
  BSplineBasis(int n_basis, double window_start, double window_end, int degree = 3);

  int size() const { return n_basis_; }
  double window_start() const { return start_; }
  double window_end() const { return end_; }

  double value(int j, double t) const { return peak_scale_(j) * raw_value(j, t); }

  Eigen::VectorXd values_at(double t) const {
    Eigen::VectorXd v(n_basis_);
    for (int j = 0; j < n_basis_; ++j) v(j) = value(j, t);
    return v;
  }

  /// T x n_basis matrix of basis values at the grid midpoints.
  Eigen::MatrixXd sample(const Grid& grid) const;

  /// Grid curve of sum_j coefs[j] * basis_j.
  Curve combine(const Eigen::VectorXd& coefs, const Grid& grid) const;

private:
  double raw_value(int j, double t) const;

  int n_basis_;
  int degree_;
  double start_;
  double end_;
  std::vector<double> knots_;
  Eigen::VectorXd peak_scale_;
};

}  // namespace p3ls
