#include "p3ls/numerics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

namespace p3ls {

double kernel_weight(double u, double h) {
  if (!(h > 0.0)) throw InvalidBandwidth("bandwidth must be positive, got " + std::to_string(h));
  const double v = u / h;
  if (std::abs(v) > 1.0) return 0.0;
  return 0.75 * (1.0 - v * v) / h;
}

namespace {
// Antiderivative of the standardized Epanechnikov kernel on [-1, 1].
double epanechnikov_cdf_core(double v) { return 0.75 * (v - v * v * v / 3.0); }
}  // namespace

double edge_correction(double s, double h, double window_start, double window_end) {
  if (!(h > 0.0)) throw InvalidBandwidth("bandwidth must be positive, got " + std::to_string(h));
  if (s < window_start || s > window_end)
    throw OutOfWindow("point " + std::to_string(s) + " outside window [" +
                      std::to_string(window_start) + ", " + std::to_string(window_end) + "]");
  // a(s;h) = int_{x in window} k_h(s-x) dx; substitute v = (s-x)/h.
  const double lo = std::clamp((s - window_end) / h, -1.0, 1.0);
  const double hi = std::clamp((s - window_start) / h, -1.0, 1.0);
  return epanechnikov_cdf_core(hi) - epanechnikov_cdf_core(lo);
}

SymEigen sym_eigen(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw NonFiniteEntry("matrix passed to sym_eigen has non-finite entries");
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  const Eigen::Index n = sym.rows();
  SymEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  // SelfAdjointEigenSolver returns ascending order; flip to descending.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design,
                                    const Eigen::VectorXd& response) {
  if (design.rows() != response.size())
    throw DimensionMismatch("least squares: design has " + std::to_string(design.rows()) +
                            " rows but response has " + std::to_string(response.size()));
  if (design.rows() < 1 || design.cols() < 1)
    throw DimensionMismatch("least squares: empty system");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  return svd.solve(response);
}

}  // namespace p3ls
