#include "p3ls/intensity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "p3ls/numerics.hpp"

namespace p3ls {

namespace {

Eigen::MatrixXd sample_at_midpoints(const std::vector<Curve>& functions,
                                    const BinPartition& partition) {
  const int q = static_cast<int>(functions.size());
  const int m = partition.size();
  Eigen::MatrixXd at(q, m);
  for (int j = 0; j < q; ++j) {
    const Curve& f = functions[static_cast<size_t>(j)];
    const bool aligned = (m == f.grid.size && partition.window_start == f.grid.start &&
                          partition.window_end == f.grid.end);
    for (int l = 0; l < m; ++l)
      at(j, l) = aligned ? f.values(l) : f.interpolate(partition.midpoints(l));
  }
  return at;
}

double poisson_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& counts,
                      const Eigen::VectorXd& widths) {
  double ll = 0.0;
  for (int l = 0; l < eta.size(); ++l)
    ll += counts(l) * eta(l) - widths(l) * std::exp(eta(l));
  return ll;
}

}  // namespace

EigenBasis make_eigen_basis(const CovarianceEstimate& cov, int q, const BinPartition& partition) {
  if (q < 1 || q > cov.grid.size) throw DimensionMismatch("eigen basis: q out of range");
  std::vector<Curve> functions;
  functions.reserve(static_cast<size_t>(q));
  for (int ell = 0; ell < q; ++ell) functions.push_back(cov.eigenfunction(ell));
  return make_eigen_basis(std::move(functions), partition);
}

EigenBasis make_eigen_basis(std::vector<Curve> functions, const BinPartition& partition) {
  if (functions.empty()) throw DimensionMismatch("eigen basis: no functions");
  const Grid grid = functions.front().grid;
  for (const auto& f : functions) require_same_grid(grid, f.grid, "eigen basis");
  if (partition.window_start != grid.start || partition.window_end != grid.end)
    throw WindowMismatch("eigen basis: partition does not span the grid window");
  EigenBasis basis;
  basis.grid = grid;
  basis.partition = partition;
  basis.at_midpoints = sample_at_midpoints(functions, partition);
  basis.functions = std::move(functions);
  return basis;
}

IntensityEstimate fit_scores(const CountVector& counts, const EigenBasis& basis) {
  const int m = basis.partition.size();
  const int q = basis.q();
  if (!congruent_partitions(counts.partition, basis.partition))
    throw WindowMismatch("counts partition differs from basis partition");
  if (m < q) throw DimensionMismatch("fewer bins than basis functions");
  if (counts.counts.maxCoeff() <= 0)
    throw DegenerateLikelihood("all counts are zero for subject " + counts.subject_id +
                               "; Poisson MLE diverges");

  const Eigen::MatrixXd design = basis.at_midpoints.transpose();  // m x q
  const Eigen::VectorXd n = counts.counts.cast<double>();
  const Eigen::VectorXd widths = counts.partition.widths;

  // Initial value: least squares on log((N + 0.5)/|B|).
  Eigen::VectorXd target(m);
  for (int l = 0; l < m; ++l) target(l) = std::log((n(l) + 0.5) / widths(l));
  Eigen::VectorXd scores = solve_least_squares(design, target);

  IntensityEstimate out;
  out.subject_id = counts.subject_id;

  constexpr int kMaxIter = 100;
  constexpr double kGradTol = 1e-8;
  double ll = poisson_loglik(design * scores, n, widths);
  out.loglik_path.push_back(ll);
  bool converged = false;
  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd eta = design * scores;
    Eigen::VectorXd mu(m);
    for (int l = 0; l < m; ++l) mu(l) = widths(l) * std::exp(eta(l));
    const Eigen::VectorXd grad = design.transpose() * (n - mu);
    if (grad.lpNorm<Eigen::Infinity>() < kGradTol) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd hess = design.transpose() * mu.asDiagonal() * design;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) step = grad;  // fall back to steepest ascent
    // Step halving keeps the concave log-likelihood nondecreasing.
    double scale = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      const Eigen::VectorXd trial = scores + scale * step;
      const double trial_ll = poisson_loglik(design * trial, n, widths);
      if (trial_ll >= ll) {
        scores = trial;
        ll = trial_ll;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    out.loglik_path.push_back(ll);
    if (!improved) break;  // no ascent direction left at working precision
  }

  out.scores = scores;
  out.curve = reconstruct_log_intensity(scores, basis);
  out.converged = converged;
  out.iterations = iter;
  out.loglik = ll;
  return out;
}

Curve reconstruct_log_intensity(const Eigen::VectorXd& scores, const EigenBasis& basis) {
  if (scores.size() != basis.q()) throw DimensionMismatch("score count != basis size");
  Eigen::VectorXd values = Eigen::VectorXd::Zero(basis.grid.size);
  for (int j = 0; j < basis.q(); ++j)
    values += scores(j) * basis.functions[static_cast<size_t>(j)].values;
  return Curve(basis.grid, std::move(values));
}

}  // namespace p3ls
