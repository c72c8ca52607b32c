#pragma once

#include <Eigen/Core>

#include "p3ls/grid.hpp"

namespace p3ls {

/// Epanechnikov kernel scaled by bandwidth: k_h(u) = k(u/h)/h with
/// k(v) = 0.75 (1 - v^2) on |v| <= 1. Integrates to one over the real line.
double kernel_weight(double u, double h);

/// Kernel mass inside the window: a(s;h) = integral of k_h(s - x) dx over
/// [start, end], evaluated in closed form. Divides kernel estimates near the
/// boundary to remove edge bias. Value in (0, 1].
double edge_correction(double s, double h, double window_start, double window_end);

struct SymEigen {
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd eigenvectors; // orthonormal columns, matching order
};

/// Eigendecomposition of (M + M^T)/2 with eigenvalues sorted descending.
SymEigen sym_eigen(const Eigen::MatrixXd& m);

/// Minimum-norm least squares solution of design * w ~= response.
/// Singular values below 1e-10 times the largest are truncated.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design,
                                    const Eigen::VectorXd& response);

}  // namespace p3ls
