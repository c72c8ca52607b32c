#include "p3ls/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace p3ls {

namespace {

void check_inputs(const std::vector<PointPattern>& patterns, const Grid& grid, double h) {
  if (patterns.size() < 2)
    throw TooFewSubjects("second-order estimation needs at least 2 subjects, got " +
                         std::to_string(patterns.size()));
  if (!(h > 0.0)) throw InvalidBandwidth("bandwidth must be positive");
  for (const auto& p : patterns) {
    if (p.window_start != grid.start || p.window_end != grid.end)
      throw WindowMismatch("pattern window differs from grid window for subject " + p.subject_id);
  }
}

Eigen::VectorXd edge_corrections(const Grid& grid, double h) {
  Eigen::VectorXd a(grid.size);
  for (int k = 0; k < grid.size; ++k)
    a(k) = edge_correction(grid.point(k), h, grid.start, grid.end);
  return a;
}

// Range of grid indices whose midpoints lie within h of x.
std::pair<int, int> support_range(const Grid& grid, double x, double h) {
  int lo = static_cast<int>(std::ceil((x - h - grid.start) / grid.step - 0.5));
  int hi = static_cast<int>(std::floor((x + h - grid.start) / grid.step - 0.5));
  lo = std::max(lo, 0);
  hi = std::min(hi, grid.size - 1);
  return {lo, hi};
}

}  // namespace

SecondOrderEstimate estimate_second_order(const std::vector<PointPattern>& patterns,
                                          const Grid& grid, double h) {
  check_inputs(patterns, grid, h);
  const int T = grid.size;
  const auto n = static_cast<double>(patterns.size());
  const Eigen::VectorXd a = edge_corrections(grid, h);

  // The defining sums factorize through the per-subject kernel profiles
  //   w_i(s) = sum_{x in Phi_i} k_h(s-x) / a(s)
  // as
  //   same(s,t)  = (1/n) sum_i [w_i(s) w_i(t)] - (1/n) C(s,t)
  //   cross(s,t) = [W(s) W(t) - sum_i w_i(s) w_i(t)] / (n (n-1))
  // with W = sum_i w_i and C(s,t) the x = y diagonal summed over all events.
  Eigen::VectorXd w_total = Eigen::VectorXd::Zero(T);
  Eigen::MatrixXd sum_outer = Eigen::MatrixXd::Zero(T, T);  // sum_i w_i w_i^T
  Eigen::MatrixXd diag_corr = Eigen::MatrixXd::Zero(T, T);  // C

  // Accumulate in a canonical subject order so the result is bitwise
  // independent of how the caller ordered the patterns.
  std::vector<const PointPattern*> ordered;
  ordered.reserve(patterns.size());
  for (const auto& p : patterns) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const PointPattern* a, const PointPattern* b) {
    if (a->subject_id != b->subject_id) return a->subject_id < b->subject_id;
    return a->events < b->events;
  });

  Eigen::VectorXd w_i(T);
  std::vector<double> kvec;
  for (const PointPattern* pattern_ptr : ordered) {
    const PointPattern& pattern = *pattern_ptr;
    w_i.setZero();
    for (double x : pattern.events) {
      const auto [lo, hi] = support_range(grid, x, h);
      kvec.resize(static_cast<size_t>(std::max(0, hi - lo + 1)));
      for (int k = lo; k <= hi; ++k) {
        const double kw = kernel_weight(grid.point(k) - x, h) / a(k);
        kvec[static_cast<size_t>(k - lo)] = kw;
        w_i(k) += kw;
      }
      for (int k = lo; k <= hi; ++k) {
        const double kk = kvec[static_cast<size_t>(k - lo)];
        if (kk == 0.0) continue;
        double* col = diag_corr.data() + static_cast<long>(k) * T;  // lower triangle of col k
        for (int l = k; l <= hi; ++l) col[l] += kk * kvec[static_cast<size_t>(l - lo)];
      }
    }
    sum_outer.selfadjointView<Eigen::Lower>().rankUpdate(w_i);
    w_total += w_i;
  }
  // Mirror the triangles that were accumulated one-sided.
  for (int k = 0; k < T; ++k)
    for (int l = k + 1; l < T; ++l) {
      diag_corr(k, l) = diag_corr(l, k);
      sum_outer(k, l) = sum_outer(l, k);
    }

  SecondOrderEstimate out;
  out.grid = grid;
  out.h = h;
  out.same_subject = GridMatrix(grid, (sum_outer - diag_corr) / n);
  out.cross_subject =
      GridMatrix(grid, (w_total * w_total.transpose() - sum_outer) / (n * (n - 1.0)));
  return out;
}

SecondOrderEstimate estimate_second_order_bruteforce(const std::vector<PointPattern>& patterns,
                                                     const Grid& grid, double h) {
  check_inputs(patterns, grid, h);
  const int T = grid.size;
  const auto n = static_cast<double>(patterns.size());
  const Eigen::VectorXd a = edge_corrections(grid, h);

  Eigen::MatrixXd same = Eigen::MatrixXd::Zero(T, T);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(T, T);
  for (int s = 0; s < T; ++s) {
    for (int t = 0; t < T; ++t) {
      const double ts = grid.point(s);
      const double tt = grid.point(t);
      double acc_same = 0.0;
      double acc_cross = 0.0;
      for (size_t i = 0; i < patterns.size(); ++i) {
        const auto& ev_i = patterns[i].events;
        for (size_t j = 0; j < patterns.size(); ++j) {
          const auto& ev_j = patterns[j].events;
          for (size_t xi = 0; xi < ev_i.size(); ++xi) {
            for (size_t yi = 0; yi < ev_j.size(); ++yi) {
              if (i == j && xi == yi) continue;  // the x != y exclusion is by event identity
              const double f = kernel_weight(ts - ev_i[xi], h) * kernel_weight(tt - ev_j[yi], h);
              if (i == j)
                acc_same += f;
              else
                acc_cross += f;
            }
          }
        }
      }
      same(s, t) = acc_same / (n * a(s) * a(t));
      cross(s, t) = acc_cross / (n * (n - 1.0) * a(s) * a(t));
    }
  }
  SecondOrderEstimate out;
  out.grid = grid;
  out.h = h;
  out.same_subject = GridMatrix(grid, std::move(same));
  out.cross_subject = GridMatrix(grid, std::move(cross));
  return out;
}

CovarianceEstimate estimate_covariance(const std::vector<PointPattern>& patterns,
                                       const Grid& grid, double h) {
  const SecondOrderEstimate so = estimate_second_order(patterns, grid, h);
  const int T = grid.size;
  constexpr double kFloor = 1e-12;

  Eigen::MatrixXd khat(T, T);
  int floored = 0;
  for (int s = 0; s < T; ++s) {
    for (int t = 0; t < T; ++t) {
      const double num = so.same_subject.entries(s, t);
      const double den = so.cross_subject.entries(s, t);
      if (num <= kFloor || den <= kFloor) {
        khat(s, t) = 0.0;  // zero covariance is the neutral element downstream
        ++floored;
      } else {
        khat(s, t) = std::log(num / den);
      }
    }
  }
  if (floored == T * T)
    throw AllCellsFloored("every covariance cell was floored; bandwidth too small or no data");

  khat = 0.5 * (khat + khat.transpose()).eval();
  SymEigen eig = sym_eigen(khat);

  CovarianceEstimate out;
  out.grid = grid;
  out.khat = GridMatrix(grid, std::move(khat));
  out.eigenvalues = std::move(eig.eigenvalues);
  out.eigenvectors = std::move(eig.eigenvectors);
  out.h = h;
  out.floored_cells = floored;
  return out;
}

int select_q(const Eigen::VectorXd& eigenvalues, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error("select_q: threshold must be in (0, 1]");
  double total = 0.0;
  for (int i = 0; i < eigenvalues.size(); ++i) total += std::max(eigenvalues(i), 0.0);
  if (!(total > 0.0)) throw NoPositiveEigenvalues("covariance spectrum has no positive part");
  double cum = 0.0;
  for (int i = 0; i < eigenvalues.size(); ++i) {
    cum += std::max(eigenvalues(i), 0.0);
    if (cum / total >= threshold) return i + 1;
  }
  return static_cast<int>(eigenvalues.size());
}

}  // namespace p3ls
