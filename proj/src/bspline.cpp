#include "p3ls/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace p3ls {

BSplineBasis::BSplineBasis(int n_basis, double window_start, double window_end, int degree)
    : n_basis_(n_basis), degree_(degree), start_(window_start), end_(window_end) {
  if (!(window_end > window_start)) throw InvalidWindow("b-spline window degenerate");
  if (n_basis < degree + 1)
    throw DimensionMismatch("b-spline basis needs at least degree+1 functions, got " +
                            std::to_string(n_basis));
  // Clamped knot vector: degree+1 copies at each end, the rest equally spaced.
  const int n_spans = n_basis - degree;
  knots_.reserve(static_cast<size_t>(n_basis + degree + 1));
  for (int i = 0; i <= degree; ++i) knots_.push_back(window_start);
  for (int i = 1; i < n_spans; ++i)
    knots_.push_back(window_start + (window_end - window_start) * static_cast<double>(i) /
                                        static_cast<double>(n_spans));
  for (int i = 0; i <= degree; ++i) knots_.push_back(window_end);

  // Per-function peak found on a fine sampling of the window.
  peak_scale_.resize(n_basis_);
  const int n_probe = 4096;
  for (int j = 0; j < n_basis_; ++j) {
    double peak = 0.0;
    for (int i = 0; i <= n_probe; ++i) {
      const double t =
          window_start + (window_end - window_start) * static_cast<double>(i) / n_probe;
      peak = std::max(peak, raw_value(j, t));
    }
    peak_scale_(j) = 1.0 / peak;
  }
}

double BSplineBasis::raw_value(int j, double t) const {
  if (t < start_ || t > end_) return 0.0;
  // Cox-de Boor recursion, iterative over degrees. The closed right end is
  // handled by treating the final span as inclusive.
  const int d = degree_;
  std::vector<double> b(static_cast<size_t>(d + 1), 0.0);
  for (int i = 0; i <= d; ++i) {
    const double lo = knots_[static_cast<size_t>(j + i)];
    const double hi = knots_[static_cast<size_t>(j + i + 1)];
    const bool in_span = (t >= lo && t < hi) || (t == end_ && hi == end_ && lo < hi);
    b[static_cast<size_t>(i)] = in_span ? 1.0 : 0.0;
  }
  for (int r = 1; r <= d; ++r) {
    for (int i = 0; i <= d - r; ++i) {
      const double lo_i = knots_[static_cast<size_t>(j + i)];
      const double hi_i = knots_[static_cast<size_t>(j + i + r)];
      const double lo_n = knots_[static_cast<size_t>(j + i + 1)];
      const double hi_n = knots_[static_cast<size_t>(j + i + r + 1)];
      double left = 0.0;
      if (hi_i > lo_i) left = (t - lo_i) / (hi_i - lo_i) * b[static_cast<size_t>(i)];
      double right = 0.0;
      if (hi_n > lo_n) right = (hi_n - t) / (hi_n - lo_n) * b[static_cast<size_t>(i + 1)];
      b[static_cast<size_t>(i)] = left + right;
    }
  }
  return b[0];
}

Eigen::MatrixXd BSplineBasis::sample(const Grid& grid) const {
  Eigen::MatrixXd out(grid.size, n_basis_);
  for (int k = 0; k < grid.size; ++k)
    for (int j = 0; j < n_basis_; ++j) out(k, j) = value(j, grid.point(k));
  return out;
}

Curve BSplineBasis::combine(const Eigen::VectorXd& coefs, const Grid& grid) const {
  if (coefs.size() != n_basis_)
    throw DimensionMismatch("coefficient count != basis size");
  return Curve(grid, sample(grid) * coefs);
}

}  // namespace p3ls
