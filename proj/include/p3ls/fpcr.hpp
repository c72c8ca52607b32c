#pragma once

#include <Eigen/Core>
#include <vector>

#include "p3ls/grid.hpp"
#include "p3ls/numerics.hpp"
#include "p3ls/point_pattern.hpp"

namespace p3ls {

/// Edge-corrected kernel estimate of the intensity on the grid:
/// lambda~(t) = sum_{x in Phi} k_h(x - t) / a(t; h).
Curve kernel_intensity(const PointPattern& pattern, const Grid& grid, double h);

/// Functional principal component regression on kernel-smoothed
/// log-intensities: the comparison method.
struct FpcrModel {
  Grid grid;
  int p = 0;
  double h = 0.0;
  Curve mean_curve;
  std::vector<Curve> components;  // L2-orthonormal, sign-fixed
  Eigen::VectorXd coefficients;   // p slopes on the component scores
  double intercept = 0.0;
  double training_rss = 0.0;
};

/// The per-dataset part shared across candidate p: smoothed log curves,
/// their mean, and the eigendecomposition of the empirical covariance.
struct FpcrWorkspace {
  Grid grid;
  double h = 0.0;
  std::vector<Curve> xtildes;  // log-floored smoothed curves
  Curve mean_curve;
  SymEigen eig;
  Eigen::VectorXd y;
};

FpcrWorkspace prepare_fpcr(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                           const Grid& grid, double h);

FpcrModel fpcr_model_for_p(const FpcrWorkspace& ws, int p);

FpcrModel fit_fpcr(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                   const Grid& grid, int p, double h);

double predict_fpcr(const FpcrModel& model, const Curve& xtilde);
double predict_fpcr(const FpcrModel& model, const PointPattern& newdata);

/// Coefficient curve implied by the score regression: sum_j coef_j comp_j.
/// Makes the estimation error comparable with a coefficient-curve target.
Curve fpcr_coefficient_curve(const FpcrModel& model);

/// The smoothing + log-floor transform used throughout FPCR.
Curve fpcr_log_curve(const PointPattern& pattern, const Grid& grid, double h);

}  // namespace p3ls
