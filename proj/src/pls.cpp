#include "p3ls/pls.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "p3ls/numerics.hpp"

namespace p3ls {

void FitConfig::validate() const {
  if (!(window_end > window_start)) throw InvalidWindow("fit config: window degenerate");
  if (grid_size < 2) throw InvalidWindow("fit config: grid size must be at least 2");
  if (!(h > 0.0)) throw InvalidBandwidth("fit config: bandwidth must be positive");
  if (!(var_threshold > 0.0 && var_threshold <= 1.0))
    throw Error("fit config: variance threshold must be in (0, 1]");
  if (!select_bic && p < 0) throw Error("fit config: p must be nonnegative");
  if (select_bic && p_max < 1) throw Error("fit config: p_max must be positive");
}

WeightedInnerProduct make_weighted_inner_product(const CovarianceEstimate& cov) {
  const Eigen::VectorXd clipped = cov.eigenvalues.cwiseMax(0.0);
  WeightedInnerProduct ip;
  ip.grid = cov.grid;
  ip.cov_psd =
      cov.eigenvectors * clipped.asDiagonal() * cov.eigenvectors.transpose();
  return ip;
}

WeightedInnerProduct make_weighted_inner_product(const GridMatrix& psd_matrix) {
  WeightedInnerProduct ip;
  ip.grid = psd_matrix.grid;
  ip.cov_psd = psd_matrix.entries;
  return ip;
}

double weighted_inner(const Curve& u, const Curve& v, const WeightedInnerProduct& ip) {
  require_same_grid(u.grid, ip.grid, "weighted_inner");
  require_same_grid(v.grid, ip.grid, "weighted_inner");
  const double step = ip.grid.step;
  return step * step * u.values.dot(ip.cov_psd * v.values);
}

double weighted_norm(const Curve& u, const WeightedInnerProduct& ip) {
  return std::sqrt(std::max(weighted_inner(u, u, ip), 0.0));
}

Curve estimate_kb(const std::vector<Curve>& xhats, const Eigen::VectorXd& y) {
  const auto n = static_cast<long>(xhats.size());
  if (n < 2) throw TooFewSubjects("cross-covariance needs at least 2 subjects");
  if (y.size() != n) throw DimensionMismatch("response length != curve count");
  const Grid grid = xhats.front().grid;
  const double ybar = y.mean();
  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(grid.size);
  for (const auto& x : xhats) {
    require_same_grid(grid, x.grid, "estimate_kb");
    xbar += x.values;
  }
  xbar /= static_cast<double>(n);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.size);
  for (long i = 0; i < n; ++i) acc += (xhats[static_cast<size_t>(i)].values - xbar) * (y(i) - ybar);
  return Curve(grid, acc / static_cast<double>(n));
}

std::vector<Curve> iterate_kb(const Curve& kb, const CovarianceEstimate& cov, int p) {
  if (p < 1) throw DimensionMismatch("iterate count must be at least 1");
  require_same_grid(kb.grid, cov.grid, "iterate_kb");
  std::vector<Curve> out;
  out.reserve(static_cast<size_t>(p));
  out.push_back(kb);
  for (int j = 1; j < p; ++j) {
    // K^{j+1}(b)(t) = step * sum_s K^j(b)(s) Khat(s,t)
    Eigen::VectorXd next = cov.grid.step * (cov.khat.entries.transpose() * out.back().values);
    out.emplace_back(cov.grid, std::move(next));
  }
  return out;
}

std::vector<Curve> gram_schmidt(const std::vector<Curve>& candidates,
                                const WeightedInnerProduct& ip) {
  if (candidates.empty()) throw DimensionMismatch("gram_schmidt: no candidates");
  std::vector<Curve> basis;
  for (const auto& candidate : candidates) {
    const double original_norm = weighted_norm(candidate, ip);
    Curve u = candidate;
    // Modified form: re-project against each retained direction in turn.
    for (const auto& b : basis) {
      const double coeff = weighted_inner(u, b, ip);
      u.values -= coeff * b.values;
    }
    const double residual_norm = weighted_norm(u, ip);
    if (residual_norm < 1e-8 * (original_norm + 1e-30)) continue;
    u.values /= residual_norm;
    basis.push_back(std::move(u));
  }
  if (basis.empty())
    throw NoIndependentCandidates("all candidates were dropped as numerically dependent");
  return basis;
}

namespace {

Eigen::MatrixXd projection_matrix(const std::vector<Curve>& xhats, const Curve& xbar,
                                  const std::vector<Curve>& psis) {
  const auto n = static_cast<long>(xhats.size());
  const auto p = static_cast<long>(psis.size());
  Eigen::MatrixXd z(n, p);
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd centered = xhats[static_cast<size_t>(i)].values - xbar.values;
    for (long j = 0; j < p; ++j)
      z(i, j) = xbar.grid.step * centered.dot(psis[static_cast<size_t>(j)].values);
  }
  return z;
}

}  // namespace

Eigen::VectorXd fit_beta(const std::vector<Curve>& xhats, const Eigen::VectorXd& y,
                         const std::vector<Curve>& psis) {
  const auto n = static_cast<long>(xhats.size());
  if (n < 1) throw DimensionMismatch("fit_beta: no subjects");
  if (y.size() != n) throw DimensionMismatch("fit_beta: response length != curve count");
  if (psis.empty()) throw DimensionMismatch("fit_beta: no basis curves");
  const Grid grid = xhats.front().grid;
  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(grid.size);
  for (const auto& x : xhats) xbar += x.values;
  xbar /= static_cast<double>(n);
  const Eigen::MatrixXd z = projection_matrix(xhats, Curve(grid, xbar), psis);
  const Eigen::VectorXd yc = y.array() - y.mean();
  return solve_least_squares(z, yc);
}

Curve assemble_bhat(const Eigen::VectorXd& betas, const std::vector<Curve>& psis) {
  if (betas.size() != static_cast<long>(psis.size()))
    throw DimensionMismatch("assemble_bhat: coefficient count != basis count");
  if (psis.empty()) throw DimensionMismatch("assemble_bhat: no basis curves");
  Eigen::VectorXd values = Eigen::VectorXd::Zero(psis.front().grid.size);
  for (long j = 0; j < betas.size(); ++j)
    values += betas(j) * psis[static_cast<size_t>(j)].values;
  return Curve(psis.front().grid, std::move(values));
}

PlsWorkspace prepare_p3ls(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                          const FitConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<long>(patterns.size());
  if (n < 3) throw TooFewSubjects("fit needs at least 3 subjects");
  if (y.size() != n) throw DimensionMismatch("response length != pattern count");

  PlsWorkspace ws;
  ws.config = cfg;
  ws.grid = make_uniform_grid(cfg.window_start, cfg.window_end, cfg.grid_size);
  ws.partition = uniform_partition(cfg.window_start, cfg.window_end, cfg.effective_bins());

  const double bin_bound =
      (cfg.window_end - cfg.window_start) / std::sqrt(static_cast<double>(n));
  if (ws.partition.widths.maxCoeff() > bin_bound + 1e-12)
    ws.warnings.push_back("bin width " + std::to_string(ws.partition.widths.maxCoeff()) +
                          " exceeds |I| n^{-1/2} = " + std::to_string(bin_bound));

  ws.cov = estimate_covariance(patterns, ws.grid, cfg.h);
  ws.q = cfg.fixed_q > 0 ? cfg.fixed_q : select_q(ws.cov, cfg.var_threshold);
  ws.basis = make_eigen_basis(ws.cov, ws.q, ws.partition);
  ws.ip = make_weighted_inner_product(ws.cov);

  ws.xhats.reserve(static_cast<size_t>(n));
  for (const auto& pattern : patterns) {
    const CountVector counts = bin_counts(pattern, ws.partition);
    IntensityEstimate est = fit_scores(counts, ws.basis);
    if (!est.converged)
      ws.warnings.push_back("score fit did not converge for subject " + pattern.subject_id);
    ws.xhats.push_back(std::move(est.curve));
  }

  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(ws.grid.size);
  for (const auto& x : ws.xhats) xbar += x.values;
  ws.xbar = Curve(ws.grid, xbar / static_cast<double>(n));
  ws.y = y;
  ws.ybar = y.mean();

  ws.kb = estimate_kb(ws.xhats, y);
  const int p_needed = cfg.select_bic ? cfg.p_max : std::max(cfg.p, 1);
  ws.iterates = iterate_kb(ws.kb, ws.cov, p_needed);
  // Modified Gram-Schmidt over the iterates, remembering which iterate each
  // retained direction came from so a fit at level p uses exactly the
  // directions built from the first p iterates.
  for (int j = 0; j < p_needed; ++j) {
    Curve u = ws.iterates[static_cast<size_t>(j)];
    const double original_norm = weighted_norm(u, ws.ip);
    for (const auto& b : ws.psis_all) {
      const double coeff = weighted_inner(u, b, ws.ip);
      u.values -= coeff * b.values;
    }
    const double residual_norm = weighted_norm(u, ws.ip);
    if (residual_norm < 1e-8 * (original_norm + 1e-30)) continue;
    u.values /= residual_norm;
    ws.psis_all.push_back(std::move(u));
    ws.psi_candidate.push_back(j + 1);
  }
  if (ws.psis_all.empty())
    ws.warnings.push_back("cross-covariance is numerically zero; intercept-only model");
  ws.projections = projection_matrix(ws.xhats, ws.xbar, ws.psis_all);
  return ws;
}

PlsModel model_for_p(const PlsWorkspace& ws, int p) {
  if (p < 0) throw DimensionMismatch("model_for_p: p must be nonnegative");
  PlsModel model;
  model.grid = ws.grid;
  model.config = ws.config;
  model.q = ws.q;
  model.p_requested = p;
  model.basis = ws.basis;
  model.spectrum = ws.cov.eigenvalues;
  model.cov = ws.cov;
  model.xbar = ws.xbar;
  model.ybar = ws.ybar;
  model.warnings = ws.warnings;

  long keep = 0;
  while (keep < static_cast<long>(ws.psi_candidate.size()) &&
         ws.psi_candidate[static_cast<size_t>(keep)] <= p)
    ++keep;

  if (keep == 0) {
    model.p = 0;
    model.betas = Eigen::VectorXd();
    model.bhat = Curve::zero(ws.grid);
    const Eigen::VectorXd yc = ws.y.array() - ws.ybar;
    model.training_rss = yc.squaredNorm();
    return model;
  }

  model.psis.assign(ws.psis_all.begin(), ws.psis_all.begin() + keep);
  const Eigen::MatrixXd z = ws.projections.leftCols(keep);
  const Eigen::VectorXd yc = ws.y.array() - ws.ybar;
  model.betas = solve_least_squares(z, yc);
  model.bhat = assemble_bhat(model.betas, model.psis);
  model.p = static_cast<int>(keep);
  model.training_rss = (yc - z * model.betas).squaredNorm();

  double dev = 0.0;
  for (long i = 0; i < keep; ++i)
    for (long j = 0; j < keep; ++j) {
      const double g = weighted_inner(model.psis[static_cast<size_t>(i)],
                                      model.psis[static_cast<size_t>(j)], ws.ip);
      dev = std::max(dev, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  model.gram_deviation = dev;
  return model;
}

PlsModel fit_p3ls(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                  const FitConfig& cfg) {
  PlsWorkspace ws = prepare_p3ls(patterns, y, cfg);
  if (!cfg.select_bic) return model_for_p(ws, cfg.p);

  const auto n = static_cast<double>(patterns.size());
  PlsModel best;
  double best_bic = std::numeric_limits<double>::infinity();
  bool any = false;
  std::string last_failure;
  for (int p = 1; p <= cfg.p_max; ++p) {
    try {
      PlsModel candidate = model_for_p(ws, p);
      const double rss = std::max(candidate.training_rss, 1e-300);
      const double bic = n * std::log(rss / n) + static_cast<double>(p) * std::log(n);
      if (bic < best_bic) {
        best_bic = bic;
        best = std::move(candidate);
        any = true;
      }
    } catch (const Error& e) {
      last_failure = e.what();
    }
  }
  if (!any) throw PSelectionFailed("no candidate p produced a model: " + last_failure);
  return best;
}

double predict(const PlsModel& model, const Curve& xhat0) {
  require_same_grid(model.grid, xhat0.grid, "predict");
  if (model.p == 0) return model.ybar;
  const Eigen::VectorXd centered = xhat0.values - model.xbar.values;
  return model.ybar + model.grid.step * centered.dot(model.bhat.values);
}

double predict(const PlsModel& model, const CountVector& newdata) {
  const IntensityEstimate est = fit_scores(newdata, model.basis);
  return predict(model, est.curve);
}

double predict(const PlsModel& model, const PointPattern& newdata) {
  if (newdata.window_start != model.config.window_start ||
      newdata.window_end != model.config.window_end)
    throw WindowMismatch("new pattern window differs from the training window");
  return predict(model, bin_counts(newdata, model.basis.partition));
}

GammaCrossCheck gamma_cross_check(const std::vector<Curve>& kb_iterates,
                                  const CovarianceEstimate& cov) {
  const auto p = static_cast<long>(kb_iterates.size());
  if (p < 1) throw DimensionMismatch("gamma_cross_check: needs at least one iterate");
  for (const auto& c : kb_iterates) require_same_grid(c.grid, cov.grid, "gamma_cross_check");

  // h_jk consumes iterate j+1, so extend the sequence by one application of
  // the covariance operator.
  std::vector<Curve> ext = kb_iterates;
  Eigen::VectorXd next = cov.grid.step * (cov.khat.entries.transpose() * ext.back().values);
  ext.emplace_back(cov.grid, std::move(next));

  GammaCrossCheck out;
  out.H.resize(p, p);
  out.alpha.resize(p);
  for (long j = 0; j < p; ++j) {
    out.alpha(j) = l2_inner(ext[0], ext[static_cast<size_t>(j)]);
    for (long k = 0; k < p; ++k)
      out.H(j, k) = l2_inner(ext[static_cast<size_t>(j) + 1], ext[static_cast<size_t>(k)]);
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.H,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition < 1e8);
  out.min_eigenvalue = sym_eigen(out.H).eigenvalues.minCoeff();
  out.gamma = svd.solve(out.alpha);
  return out;
}

}  // namespace p3ls
