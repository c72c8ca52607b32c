#include "p3ls/fpcr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace p3ls {

namespace {
constexpr double kLogFloor = 1e-6;
}

Curve kernel_intensity(const PointPattern& pattern, const Grid& grid, double h) {
  if (!(h > 0.0)) throw InvalidBandwidth("bandwidth must be positive");
  Eigen::VectorXd values = Eigen::VectorXd::Zero(grid.size);
  for (double x : pattern.events) {
    int lo = static_cast<int>(std::ceil((x - h - grid.start) / grid.step - 0.5));
    int hi = static_cast<int>(std::floor((x + h - grid.start) / grid.step - 0.5));
    lo = std::max(lo, 0);
    hi = std::min(hi, grid.size - 1);
    for (int k = lo; k <= hi; ++k) values(k) += kernel_weight(grid.point(k) - x, h);
  }
  for (int k = 0; k < grid.size; ++k)
    values(k) /= edge_correction(grid.point(k), h, grid.start, grid.end);
  return Curve(grid, std::move(values));
}

Curve fpcr_log_curve(const PointPattern& pattern, const Grid& grid, double h) {
  Curve lam = kernel_intensity(pattern, grid, h);
  for (int k = 0; k < grid.size; ++k)
    lam.values(k) = std::log(std::max(lam.values(k), kLogFloor));
  return lam;
}

FpcrWorkspace prepare_fpcr(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                           const Grid& grid, double h) {
  const auto n = static_cast<long>(patterns.size());
  if (n < 2) throw TooFewSubjects("FPCR needs at least 2 subjects");
  if (y.size() != n) throw DimensionMismatch("response length != pattern count");

  FpcrWorkspace ws;
  ws.grid = grid;
  ws.h = h;
  ws.y = y;
  ws.xtildes.reserve(static_cast<size_t>(n));
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(grid.size);
  for (const auto& pattern : patterns) {
    Curve c = fpcr_log_curve(pattern, grid, h);
    mean += c.values;
    ws.xtildes.push_back(std::move(c));
  }
  mean /= static_cast<double>(n);
  ws.mean_curve = Curve(grid, mean);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(grid.size, grid.size);
  for (const auto& c : ws.xtildes) {
    const Eigen::VectorXd centered = c.values - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  cov /= static_cast<double>(n);
  cov.triangularView<Eigen::StrictlyUpper>() =
      cov.triangularView<Eigen::StrictlyLower>().transpose();
  ws.eig = sym_eigen(cov);
  return ws;
}

FpcrModel fpcr_model_for_p(const FpcrWorkspace& ws, int p) {
  const auto n = static_cast<long>(ws.xtildes.size());
  if (p < 1) throw DimensionMismatch("FPCR needs at least one component");
  if (n <= p) throw TooFewSubjects("FPCR needs more subjects than components");

  // Effective rank of the empirical covariance; identical curves give zero.
  const double scale = std::max(std::abs(ws.eig.eigenvalues(0)), 1.0);
  int rank = 0;
  for (int i = 0; i < ws.eig.eigenvalues.size(); ++i)
    if (ws.eig.eigenvalues(i) > 1e-12 * scale) ++rank;
  if (rank < p)
    throw RankDeficient("empirical covariance has rank " + std::to_string(rank) +
                        " but " + std::to_string(p) + " components were requested");

  FpcrModel model;
  model.grid = ws.grid;
  model.p = p;
  model.h = ws.h;
  model.mean_curve = ws.mean_curve;
  model.components.reserve(static_cast<size_t>(p));
  const double inv_sqrt_step = 1.0 / std::sqrt(ws.grid.step);
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd v = ws.eig.eigenvectors.col(j) * inv_sqrt_step;
    // Deterministic sign: the entry of largest magnitude is positive.
    int arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    model.components.emplace_back(ws.grid, std::move(v));
  }

  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd centered =
        ws.xtildes[static_cast<size_t>(i)].values - ws.mean_curve.values;
    for (int j = 0; j < p; ++j)
      design(i, j + 1) =
          ws.grid.step * centered.dot(model.components[static_cast<size_t>(j)].values);
  }
  const Eigen::VectorXd coef = solve_least_squares(design, ws.y);
  model.intercept = coef(0);
  model.coefficients = coef.tail(p);
  model.training_rss = (ws.y - design * coef).squaredNorm();
  return model;
}

FpcrModel fit_fpcr(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                   const Grid& grid, int p, double h) {
  return fpcr_model_for_p(prepare_fpcr(patterns, y, grid, h), p);
}

double predict_fpcr(const FpcrModel& model, const Curve& xtilde) {
  require_same_grid(model.grid, xtilde.grid, "predict_fpcr");
  const Eigen::VectorXd centered = xtilde.values - model.mean_curve.values;
  double yhat = model.intercept;
  for (int j = 0; j < model.p; ++j)
    yhat += model.coefficients(j) * model.grid.step *
            centered.dot(model.components[static_cast<size_t>(j)].values);
  return yhat;
}

double predict_fpcr(const FpcrModel& model, const PointPattern& newdata) {
  return predict_fpcr(model, fpcr_log_curve(newdata, model.grid, model.h));
}

Curve fpcr_coefficient_curve(const FpcrModel& model) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(model.grid.size);
  for (int j = 0; j < model.p; ++j)
    values += model.coefficients(j) * model.components[static_cast<size_t>(j)].values;
  return Curve(model.grid, std::move(values));
}

}  // namespace p3ls
