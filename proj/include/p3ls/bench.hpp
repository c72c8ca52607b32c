#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "p3ls/fpcr.hpp"
#include "p3ls/grid.hpp"
#include "p3ls/pls.hpp"
#include "p3ls/point_pattern.hpp"
#include "p3ls/rng.hpp"
#include "p3ls/simulate.hpp"

namespace p3ls {

struct StudyConfig {
  int case_id = 1;
  int n_total = 200;
  int n_train = 100;
  int n_test = 100;
  int replicates = 20;
  int p_min = 1;
  int p_max = 10;
  double h = 2.0;
  int bins = 100;
  int grid_size = 100;
  double var_threshold = 0.9;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  SimConfig sim;    // eta, mean shift, window; case/seed/grid are overridden

  void validate() const;
  SimConfig sim_config() const;
  FitConfig fit_config() const;
};

struct StudyRecord {
  int replicate = 0;
  std::string method;  // "p3ls" or "fpcr"
  int p = 0;
  double rmsee = 0.0;
  double rmspe = 0.0;
  std::string status;  // "ok" or a failure tag
};

struct StudyResult {
  StudyConfig config;
  std::vector<StudyRecord> records;
  double max_gram_deviation = 0.0;  // across all fitted models
};

/// Truth weights of the coefficient function for the four study cases.
Eigen::VectorXd case_coefficients(int case_id);

struct Replicate {
  std::vector<PointPattern> patterns;
  Eigen::VectorXd y;
  Curve truth_b;
  std::vector<Curve> truth_x;
};

Replicate generate_replicate(const StudyConfig& cfg, Rng& rng);

/// Integrated squared difference of two coefficient curves.
double mse_estimation(const Curve& b_true, const Curve& b_est);

/// Mean squared difference of predictions and held-out responses.
double mspe(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);

/// Full simulation study: per replicate, generate, split, fit both methods
/// for every p in range, and score. Deterministic given the seed; replicates
/// run on disjoint substreams and may execute in parallel.
StudyResult run_study(const StudyConfig& cfg);

struct CvRecord {
  double h = 0.0;
  int fold = 0;
  double rmspe_value = 0.0;
  std::string status;
};

struct CvTable {
  std::vector<CvRecord> records;
  std::vector<std::pair<double, double>> averages;  // (h, mean rMSPE of ok folds)
};

/// Contiguous-block k-fold bandwidth sweep: for each h, fit on each fold
/// complement and score the held-out block.
CvTable cross_validate_h(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                         const FitConfig& base, const std::vector<double>& h_grid, int folds,
                         int threads = 0);

/// Deterministic parallel map over [0, count): results land by index.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace p3ls
