#include "p3ls/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>

#include "p3ls/bspline.hpp"

namespace p3ls {

void StudyConfig::validate() const {
  if (case_id < 1 || case_id > 4) throw UnknownCase("study case must be 1..4");
  if (n_train + n_test > n_total) throw Error("study config: n_train + n_test > n_total");
  if (replicates < 1) throw Error("study config: replicates must be positive");
  if (p_min < 1 || p_max < p_min) throw Error("study config: bad p range");
}

SimConfig StudyConfig::sim_config() const {
  SimConfig s = sim;
  s.case_id = case_id;
  s.grid_size = grid_size;
  s.noise_sd = noise_sd;
  s.seed = seed;
  return s;
}

FitConfig StudyConfig::fit_config() const {
  FitConfig f;
  f.window_start = sim.window_start;
  f.window_end = sim.window_end;
  f.grid_size = grid_size;
  f.bins = bins;
  f.h = h;
  f.var_threshold = var_threshold;
  return f;
}

Eigen::VectorXd case_coefficients(int case_id) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(20);
  auto fill = [&theta](int lo, int hi, double v) {
    for (int j = lo; j <= hi; ++j) theta(j - 1) = v;  // 1-based index ranges
  };
  switch (case_id) {
    case 1:
      fill(2, 20, 1.0);
      break;
    case 2:
      fill(2, 10, 1.0);
      fill(11, 20, -1.0);
      break;
    case 3:
      fill(2, 6, 1.0);
      fill(7, 12, -1.0);
      fill(13, 20, 1.0);
      break;
    case 4:
      fill(2, 5, -1.0);
      fill(6, 10, 1.0);
      fill(11, 15, -1.0);
      fill(16, 20, 1.0);
      break;
    default:
      throw UnknownCase("study case must be 1..4, got " + std::to_string(case_id));
  }
  return theta;
}

Replicate generate_replicate(const StudyConfig& cfg, Rng& rng) {
  cfg.validate();
  const SimConfig sim = cfg.sim_config();
  sim.validate();
  const Grid grid = make_uniform_grid(sim.window_start, sim.window_end, sim.grid_size);
  const BSplineBasis basis(sim.n_bspline, sim.window_start, sim.window_end);
  const Eigen::VectorXd theta = case_coefficients(cfg.case_id);

  Replicate rep;
  rep.truth_b = basis.combine(theta, grid);
  rep.patterns.reserve(static_cast<size_t>(cfg.n_total));
  rep.truth_x.reserve(static_cast<size_t>(cfg.n_total));
  rep.y.resize(cfg.n_total);
  for (int i = 0; i < cfg.n_total; ++i) {
    LogIntensityDraw draw = sample_sim_log_intensity(sim, basis, grid, rng);
    rep.y(i) = sim.intercept + l2_inner(rep.truth_b, draw.log_intensity) +
               sim.noise_sd * rng.normal();
    char id[16];
    std::snprintf(id, sizeof(id), "s%04d", i + 1);
    rep.patterns.push_back(simulate_inhomogeneous_poisson(draw.log_intensity, rng, id));
    rep.truth_x.push_back(std::move(draw.log_intensity));
  }
  return rep;
}

double mse_estimation(const Curve& b_true, const Curve& b_est) {
  require_same_grid(b_true.grid, b_est.grid, "mse_estimation");
  const Eigen::VectorXd diff = b_true.values - b_est.values;
  return b_true.grid.step * diff.squaredNorm();
}

double mspe(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  if (y.size() != yhat.size()) throw DimensionMismatch("mspe: length mismatch");
  if (y.size() == 0) throw DimensionMismatch("mspe: empty vectors");
  return (y - yhat).squaredNorm() / static_cast<double>(y.size());
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= count) break;
          body(i);
        }
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

struct ReplicateScores {
  std::vector<StudyRecord> records;
  double max_gram_deviation = 0.0;
};

ReplicateScores score_replicate(const StudyConfig& cfg, int replicate_index) {
  ReplicateScores out;
  Rng rng(Rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(replicate_index)));
  const Replicate rep = generate_replicate(cfg, rng);

  std::vector<PointPattern> train(rep.patterns.begin(), rep.patterns.begin() + cfg.n_train);
  const Eigen::VectorXd y_train = rep.y.head(cfg.n_train);
  std::vector<PointPattern> test(rep.patterns.begin() + cfg.n_train,
                                 rep.patterns.begin() + cfg.n_train + cfg.n_test);
  const Eigen::VectorXd y_test = rep.y.segment(cfg.n_train, cfg.n_test);

  auto emit = [&](const std::string& method, int p, double rmsee, double rmspe_v,
                  std::string status) {
    out.records.push_back({replicate_index, method, p, rmsee, rmspe_v, std::move(status)});
  };

  // P3LS: one shared preparation, then a model per p.
  FitConfig fit_cfg = cfg.fit_config();
  fit_cfg.p = cfg.p_max;
  std::string p3ls_failure;
  PlsWorkspace ws;
  bool prepared = false;
  try {
    ws = prepare_p3ls(train, y_train, fit_cfg);
    prepared = true;
  } catch (const std::exception& e) {
    p3ls_failure = e.what();
  }
  std::vector<Curve> test_xhats;
  if (prepared) {
    try {
      test_xhats.reserve(test.size());
      for (const auto& pattern : test) {
        const CountVector counts = bin_counts(pattern, ws.partition);
        test_xhats.push_back(fit_scores(counts, ws.basis).curve);
      }
    } catch (const std::exception& e) {
      prepared = false;
      p3ls_failure = e.what();
    }
  }
  for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
    if (!prepared) {
      emit("p3ls", p, 0.0, 0.0, "failed: " + p3ls_failure);
      continue;
    }
    try {
      const PlsModel model = model_for_p(ws, p);
      out.max_gram_deviation = std::max(out.max_gram_deviation, model.gram_deviation);
      Eigen::VectorXd yhat(cfg.n_test);
      for (int i = 0; i < cfg.n_test; ++i)
        yhat(i) = predict(model, test_xhats[static_cast<size_t>(i)]);
      emit("p3ls", p, std::sqrt(mse_estimation(rep.truth_b, model.bhat)),
           std::sqrt(mspe(y_test, yhat)), "ok");
    } catch (const std::exception& e) {
      emit("p3ls", p, 0.0, 0.0, std::string("failed: ") + e.what());
    }
  }

  // FPCR: shared smoothing + eigendecomposition, then a model per p.
  const Grid grid = make_uniform_grid(fit_cfg.window_start, fit_cfg.window_end, cfg.grid_size);
  std::string fpcr_failure;
  FpcrWorkspace fws;
  bool fpcr_prepared = false;
  try {
    fws = prepare_fpcr(train, y_train, grid, cfg.h);
    fpcr_prepared = true;
  } catch (const std::exception& e) {
    fpcr_failure = e.what();
  }
  std::vector<Curve> test_xtildes;
  if (fpcr_prepared) {
    test_xtildes.reserve(test.size());
    for (const auto& pattern : test)
      test_xtildes.push_back(fpcr_log_curve(pattern, grid, cfg.h));
  }
  for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
    if (!fpcr_prepared) {
      emit("fpcr", p, 0.0, 0.0, "failed: " + fpcr_failure);
      continue;
    }
    try {
      const FpcrModel model = fpcr_model_for_p(fws, p);
      Eigen::VectorXd yhat(cfg.n_test);
      for (int i = 0; i < cfg.n_test; ++i)
        yhat(i) = predict_fpcr(model, test_xtildes[static_cast<size_t>(i)]);
      emit("fpcr", p, std::sqrt(mse_estimation(rep.truth_b, fpcr_coefficient_curve(model))),
           std::sqrt(mspe(y_test, yhat)), "ok");
    } catch (const std::exception& e) {
      emit("fpcr", p, 0.0, 0.0, std::string("failed: ") + e.what());
    }
  }
  return out;
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  StudyResult result;
  result.config = cfg;
  std::vector<ReplicateScores> per_replicate(static_cast<size_t>(cfg.replicates));
  parallel_for(cfg.replicates, cfg.threads,
               [&](int r) { per_replicate[static_cast<size_t>(r)] = score_replicate(cfg, r); });
  for (auto& rep : per_replicate) {
    result.max_gram_deviation = std::max(result.max_gram_deviation, rep.max_gram_deviation);
    for (auto& rec : rep.records) result.records.push_back(std::move(rec));
  }
  return result;
}

CvTable cross_validate_h(const std::vector<PointPattern>& patterns, const Eigen::VectorXd& y,
                         const FitConfig& base, const std::vector<double>& h_grid, int folds,
                         int threads) {
  if (folds < 2) throw Error("cross validation needs at least 2 folds");
  if (h_grid.empty()) throw Error("cross validation needs a nonempty h grid");
  const auto n = static_cast<int>(patterns.size());
  if (y.size() != n) throw DimensionMismatch("response length != pattern count");
  if (n < folds) throw TooFewSubjects("fewer subjects than folds");

  const int cells = static_cast<int>(h_grid.size()) * folds;
  std::vector<CvRecord> records(static_cast<size_t>(cells));
  parallel_for(cells, threads, [&](int cell) {
    const int hi = cell / folds;
    const int fold = cell % folds;
    const double h = h_grid[static_cast<size_t>(hi)];
    const int block_lo = fold * n / folds;
    const int block_hi = (fold + 1) * n / folds;
    std::vector<PointPattern> train;
    std::vector<PointPattern> held;
    Eigen::VectorXd y_train(n - (block_hi - block_lo));
    Eigen::VectorXd y_held(block_hi - block_lo);
    int ti = 0;
    int hi_i = 0;
    for (int i = 0; i < n; ++i) {
      if (i >= block_lo && i < block_hi) {
        held.push_back(patterns[static_cast<size_t>(i)]);
        y_held(hi_i++) = y(i);
      } else {
        train.push_back(patterns[static_cast<size_t>(i)]);
        y_train(ti++) = y(i);
      }
    }
    CvRecord rec;
    rec.h = h;
    rec.fold = fold;
    try {
      FitConfig cfg = base;
      cfg.h = h;
      const PlsModel model = fit_p3ls(train, y_train, cfg);
      Eigen::VectorXd yhat(y_held.size());
      for (long i = 0; i < y_held.size(); ++i)
        yhat(i) = predict(model, held[static_cast<size_t>(i)]);
      rec.rmspe_value = std::sqrt(mspe(y_held, yhat));
      rec.status = "ok";
    } catch (const std::exception& e) {
      rec.status = std::string("failed: ") + e.what();
    }
    records[static_cast<size_t>(cell)] = std::move(rec);
  });

  CvTable table;
  table.records = std::move(records);
  for (size_t hi = 0; hi < h_grid.size(); ++hi) {
    double sum = 0.0;
    int ok = 0;
    for (int fold = 0; fold < folds; ++fold) {
      const CvRecord& rec = table.records[hi * static_cast<size_t>(folds) +
                                          static_cast<size_t>(fold)];
      if (rec.status == "ok") {
        sum += rec.rmspe_value;
        ++ok;
      }
    }
    table.averages.emplace_back(h_grid[hi], ok > 0 ? sum / ok : std::nan(""));
  }
  return table;
}

}  // namespace p3ls
