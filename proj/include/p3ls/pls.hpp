#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "p3ls/covariance.hpp"
#include "p3ls/grid.hpp"
#include "p3ls/intensity.hpp"
#include "p3ls/point_pattern.hpp"

namespace p3ls {

/// The covariance-weighted inner product <u,v> = step^2 u^T Kplus v, where
/// Kplus is the covariance matrix with negative eigenvalues clipped to zero
/// so that norms stay nonnegative.
struct WeightedInnerProduct {
  Grid grid;
  Eigen::MatrixXd cov_psd;
};

WeightedInnerProduct make_weighted_inner_product(const CovarianceEstimate& cov);
WeightedInnerProduct make_weighted_inner_product(const GridMatrix& psd_matrix);

double weighted_inner(const Curve& u, const Curve& v, const WeightedInnerProduct& ip);
double weighted_norm(const Curve& u, const WeightedInnerProduct& ip);

/// Empirical cross-covariance curve (1/n) sum_i [Xhat_i - Xbar] (y_i - ybar).
Curve estimate_kb(const std::vector<Curve>& xhats, const Eigen::VectorXd& y);

/// Iterates of the covariance integral operator applied to kb: the j-th
/// output is the curve obtained by applying t -> step * sum_s f(s) K(s,t)
/// j-1 times to kb. Uses the raw (unclipped) covariance.
std::vector<Curve> iterate_kb(const Curve& kb, const CovarianceEstimate& cov, int p);

/// Modified Gram-Schmidt under the weighted inner product. Candidates whose
/// orthogonalized residual norm falls below 1e-8 * (original norm + 1e-30)
/// are dropped, so the output may be shorter than the input.
std::vector<Curve> gram_schmidt(const std::vector<Curve>& candidates,
                                const WeightedInnerProduct& ip);

/// Least squares coefficients of centered y on the projections
/// z_ij = quadrature((Xhat_i - Xbar) * psi_j).
Eigen::VectorXd fit_beta(const std::vector<Curve>& xhats, const Eigen::VectorXd& y,
                         const std::vector<Curve>& psis);

Curve assemble_bhat(const Eigen::VectorXd& betas, const std::vector<Curve>& psis);

struct FitConfig {
  double window_start = 0.0;
  double window_end = 24.0;
  int grid_size = 100;
  int bins = 0;  // 0: one bin per grid cell
  double h = 2.0;
  double var_threshold = 0.9;
  int fixed_q = 0;  // 0: select by variance threshold
  int p = 1;        // fixed basis count when select_bic is false
  int p_max = 10;   // candidate range for BIC selection
  bool select_bic = false;

  int effective_bins() const { return bins > 0 ? bins : grid_size; }
  void validate() const;
};

struct PlsModel {
  Grid grid;
  FitConfig config;
  int q = 0;
  int p = 0;            // retained basis functions
  int p_requested = 0;  // what the caller asked for (drops can shrink p)
  std::vector<Curve> psis;
  Eigen::VectorXd betas;
  Curve bhat;
  Curve xbar;
  double ybar = 0.0;
  EigenBasis basis;                   // training eigenbasis, used to score new subjects
  Eigen::VectorXd spectrum;           // full covariance eigenvalue sequence
  CovarianceEstimate cov;             // in-memory only; not serialized
  double gram_deviation = 0.0;        // max |Gram(psis) - I| under the weighted inner product
  double training_rss = 0.0;
  std::vector<std::string> warnings;
};

/// Everything that is shared across candidate values of p for one dataset:
/// covariance, eigenbasis, per-subject scores, the kb iterates and their
/// orthonormalization, and the projection matrix.
struct PlsWorkspace {
  Grid grid;
  BinPartition partition;
  FitConfig config;
  CovarianceEstimate cov;
  EigenBasis basis;
  WeightedInnerProduct ip;
  int q = 0;
  std::vector<Curve> xhats;
  Curve xbar;
  Eigen::VectorXd y;
  double ybar = 0.0;
  Curve kb;
  std::vector<Curve> iterates;      // p_max iterates (empty if kb ~ 0)
  std::vector<Curve> psis_all;      // orthonormalized, possibly fewer than p_max
  std::vector<int> psi_candidate;   // 1-based iterate index each psi came from
  Eigen::MatrixXd projections;      // n x psis_all.size()
  std::vector<std::string> warnings;
};

PlsWorkspace prepare_p3ls(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                          const FitConfig& cfg);

/// Model using the orthonormal directions built from the first p iterates.
PlsModel model_for_p(const PlsWorkspace& ws, int p);

/// Full pipeline: covariance -> q -> scores -> kb -> iterates -> Gram-Schmidt
/// -> least squares, with p fixed or selected by BIC.
PlsModel fit_p3ls(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                  const FitConfig& cfg);

double predict(const PlsModel& model, const Curve& xhat0);
double predict(const PlsModel& model, const CountVector& newdata);
double predict(const PlsModel& model, const PointPattern& newdata);

/// Finite-dimensional cross-check of the coefficient expansion in the
/// iterate basis: gamma = H^-1 alpha with H_jk = quad(K^{j+1}(b) K^k(b)) and
/// alpha_j = quad(K(b) K^j(b)). One extra iterate is computed internally.
struct GammaCrossCheck {
  Eigen::VectorXd gamma;
  Eigen::MatrixXd H;
  Eigen::VectorXd alpha;
  bool ill_conditioned = false;
  double min_eigenvalue = 0.0;  // smallest eigenvalue of H
  double condition = 0.0;
};

GammaCrossCheck gamma_cross_check(const std::vector<Curve>& kb_iterates,
                                  const CovarianceEstimate& cov);

}  // namespace p3ls
