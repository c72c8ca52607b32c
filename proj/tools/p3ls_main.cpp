#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "p3ls/bench.hpp"
#include "p3ls/io.hpp"
#include "p3ls/pls.hpp"
#include "p3ls/rng.hpp"
#include "p3ls/simulate.hpp"

namespace {

using namespace p3ls;

std::uint64_t env_seed() {
  if (const char* s = std::getenv("P3LS_SEED")) return std::strtoull(s, nullptr, 10);
  return 0;
}

std::optional<std::pair<double, double>> parse_window(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  const auto comma = spec.find(',');
  if (comma == std::string::npos)
    throw ParseError("--window expects 'start,end', got '" + spec + "'");
  const double lo = std::stod(spec.substr(0, comma));
  const double hi = std::stod(spec.substr(comma + 1));
  return std::make_pair(lo, hi);
}

/// Align patterns with the response map; both sides must match exactly.
Eigen::VectorXd match_responses(const std::vector<PointPattern>& patterns,
                                const std::map<std::string, double>& responses) {
  if (patterns.size() != responses.size())
    throw ParseError("have " + std::to_string(patterns.size()) + " subjects but " +
                     std::to_string(responses.size()) + " responses");
  Eigen::VectorXd y(static_cast<long>(patterns.size()));
  for (size_t i = 0; i < patterns.size(); ++i) {
    const auto it = responses.find(patterns[i].subject_id);
    if (it == responses.end())
      throw ParseError("no response for subject " + patterns[i].subject_id);
    y(static_cast<long>(i)) = it->second;
  }
  return y;
}

/// Events from an events file, or jittered from a counts file.
std::vector<PointPattern> load_patterns(const std::string& events_path,
                                        const std::string& counts_path,
                                        const std::optional<std::pair<double, double>>& window,
                                        std::uint64_t seed) {
  if (!events_path.empty()) return load_events(events_path, window);
  const std::vector<CountVector> counts = load_counts(counts_path);
  Rng rng(Rng::derive_seed(seed, 0x6a69747465720000ull));
  std::vector<PointPattern> patterns;
  patterns.reserve(counts.size());
  for (const auto& cv : counts) patterns.push_back(jitter_histogram(cv, rng));
  return patterns;
}

void emit_warnings(const PlsModel& model) {
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"P3LS: scalar-on-point-process regression via partial least squares"};
  app.require_subcommand(1);

  // ---- simulate ----------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic study dataset");
  int sim_case = 1;
  int sim_n = 200;
  std::uint64_t sim_seed = env_seed();
  double sim_noise = 1.0;
  int sim_grid = 100;
  std::string sim_out_events;
  std::string sim_out_responses;
  std::string sim_out_truth;
  sim_cmd->add_option("--case", sim_case, "Coefficient case 1..4")->check(CLI::Range(1, 4));
  sim_cmd->add_option("--n", sim_n, "Number of subjects");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed (overrides P3LS_SEED)");
  sim_cmd->add_option("--noise-sd", sim_noise, "Response noise standard deviation");
  sim_cmd->add_option("--grid-size", sim_grid, "Intensity sampling grid size");
  sim_cmd->add_option("--out-events", sim_out_events, "Events CSV to write")->required();
  sim_cmd->add_option("--out-responses", sim_out_responses, "Responses CSV to write")->required();
  sim_cmd->add_option("--out-truth", sim_out_truth, "True coefficient curve CSV to write");
  sim_cmd->callback([&]() {
    StudyConfig cfg;
    cfg.case_id = sim_case;
    cfg.n_total = sim_n;
    cfg.n_train = sim_n;
    cfg.n_test = 0;
    cfg.grid_size = sim_grid;
    cfg.noise_sd = sim_noise;
    cfg.seed = sim_seed;
    Rng rng(Rng::derive_seed(cfg.seed, 0));
    const Replicate rep = generate_replicate(cfg, rng);
    save_events(sim_out_events, rep.patterns);
    std::vector<std::string> ids;
    for (const auto& p : rep.patterns) ids.push_back(p.subject_id);
    save_responses(sim_out_responses, ids, rep.y);
    if (!sim_out_truth.empty()) save_curve(sim_out_truth, rep.truth_b, "b");
  });

  // ---- fit ---------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model from events or counts");
  std::string fit_events;
  std::string fit_counts;
  std::string fit_responses;
  std::string fit_out_model;
  std::string fit_window;
  std::string fit_select_p;
  FitConfig fit_cfg;
  int fit_p = 0;
  std::uint64_t fit_seed = env_seed();
  auto* fit_ev_opt = fit_cmd->add_option("--events", fit_events, "Events CSV");
  auto* fit_ct_opt = fit_cmd->add_option("--counts", fit_counts, "Counts CSV (histogram data)");
  fit_ev_opt->excludes(fit_ct_opt);
  fit_cmd->add_option("--responses", fit_responses, "Responses CSV")->required();
  fit_cmd->add_option("--h", fit_cfg.h, "Kernel bandwidth (minutes)");
  fit_cmd->add_option("--bins", fit_cfg.bins, "Count bins (default: grid size)");
  fit_cmd->add_option("--grid-size", fit_cfg.grid_size, "Evaluation grid size");
  fit_cmd->add_option("--var-threshold", fit_cfg.var_threshold,
                      "Variance share for choosing q");
  fit_cmd->add_option("--q", fit_cfg.fixed_q, "Fix q instead of selecting by variance");
  auto* fit_p_opt = fit_cmd->add_option("--p", fit_p, "Fixed number of basis functions");
  auto* fit_sel_opt =
      fit_cmd->add_option("--select-p", fit_select_p, "Selection rule for p (bic)")
          ->check(CLI::IsMember({"bic"}));
  fit_p_opt->excludes(fit_sel_opt);
  fit_cmd->add_option("--p-max", fit_cfg.p_max, "Largest p considered by --select-p");
  fit_cmd->add_option("--window", fit_window, "Observation window 'start,end'");
  fit_cmd->add_option("--seed", fit_seed, "Seed for histogram jitter (overrides P3LS_SEED)");
  fit_cmd->add_option("--out-model", fit_out_model, "Model JSON to write")->required();
  fit_cmd->callback([&]() {
    if (fit_events.empty() && fit_counts.empty())
      throw ParseError("fit needs --events or --counts");
    const auto window = parse_window(fit_window);
    const auto patterns = load_patterns(fit_events, fit_counts, window, fit_seed);
    fit_cfg.window_start = patterns.front().window_start;
    fit_cfg.window_end = patterns.front().window_end;
    const Eigen::VectorXd y = match_responses(patterns, load_responses(fit_responses));
    if (fit_p > 0) {
      fit_cfg.p = fit_p;
      fit_cfg.select_bic = false;
    } else {
      fit_cfg.select_bic = true;  // default when no fixed p was given
    }
    const PlsModel model = fit_p3ls(patterns, y, fit_cfg);
    emit_warnings(model);
    save_model(fit_out_model, model);
  });

  // ---- predict -----------------------------------------------------------
  auto* pred_cmd = app.add_subcommand("predict", "Predict responses with a fitted model");
  std::string pred_model;
  std::string pred_events;
  std::string pred_counts;
  std::string pred_out;
  pred_cmd->add_option("--model", pred_model, "Model JSON")->required();
  auto* pred_ev_opt = pred_cmd->add_option("--events", pred_events, "Events CSV");
  auto* pred_ct_opt = pred_cmd->add_option("--counts", pred_counts, "Counts CSV");
  pred_ev_opt->excludes(pred_ct_opt);
  pred_cmd->add_option("--out", pred_out, "Predictions CSV to write")->required();
  pred_cmd->callback([&]() {
    if (pred_events.empty() && pred_counts.empty())
      throw ParseError("predict needs --events or --counts");
    const PlsModel model = load_model(pred_model);
    std::vector<std::string> ids;
    std::vector<double> yhat;
    if (!pred_events.empty()) {
      const auto patterns = load_events(
          pred_events, std::make_pair(model.config.window_start, model.config.window_end));
      for (const auto& p : patterns) {
        ids.push_back(p.subject_id);
        yhat.push_back(predict(model, p));
      }
    } else {
      for (const auto& cv : load_counts(pred_counts)) {
        ids.push_back(cv.subject_id);
        yhat.push_back(predict(model, cv));
      }
    }
    save_predictions(pred_out, ids, Eigen::Map<Eigen::VectorXd>(yhat.data(),
                                                                static_cast<long>(yhat.size())));
  });

  // ---- cov ---------------------------------------------------------------
  auto* cov_cmd = app.add_subcommand("cov", "Estimate the log-intensity covariance");
  std::string cov_events;
  std::string cov_window;
  double cov_h = 2.0;
  int cov_grid = 100;
  std::string cov_out;
  std::string cov_out_spectrum;
  cov_cmd->add_option("--events", cov_events, "Events CSV")->required();
  cov_cmd->add_option("--h", cov_h, "Kernel bandwidth");
  cov_cmd->add_option("--grid-size", cov_grid, "Evaluation grid size");
  cov_cmd->add_option("--window", cov_window, "Observation window 'start,end'");
  cov_cmd->add_option("--out-cov", cov_out, "Covariance CSV to write")->required();
  cov_cmd->add_option("--out-spectrum", cov_out_spectrum, "Spectrum CSV to write")->required();
  cov_cmd->callback([&]() {
    const auto patterns = load_events(cov_events, parse_window(cov_window));
    const Grid grid = make_uniform_grid(patterns.front().window_start,
                                        patterns.front().window_end, cov_grid);
    const CovarianceEstimate cov = estimate_covariance(patterns, grid, cov_h);
    if (cov.floored_cells > 0)
      std::cerr << "warning: " << cov.floored_cells
                << " covariance cells floored to zero (nonpositive estimate)\n";
    save_covariance(cov_out, cov);
    save_spectrum(cov_out_spectrum, cov.eigenvalues);
  });

  // ---- bench -------------------------------------------------------------
  auto* bench_cmd = app.add_subcommand("bench", "Run the simulation study");
  StudyConfig bench_cfg;
  bench_cfg.seed = env_seed();
  std::string bench_out;
  std::string bench_out_quantiles;
  bench_cmd->add_option("--case", bench_cfg.case_id, "Coefficient case 1..4")
      ->check(CLI::Range(1, 4));
  bench_cmd->add_option("--replicates", bench_cfg.replicates, "Number of replicates");
  bench_cmd->add_option("--p-max", bench_cfg.p_max, "Largest p to fit");
  bench_cmd->add_option("--n-train", bench_cfg.n_train, "Training subjects per replicate");
  bench_cmd->add_option("--n-test", bench_cfg.n_test, "Test subjects per replicate");
  bench_cmd->add_option("--h", bench_cfg.h, "Kernel bandwidth");
  bench_cmd->add_option("--bins", bench_cfg.bins, "Count bins");
  bench_cmd->add_option("--seed", bench_cfg.seed, "RNG seed (overrides P3LS_SEED)");
  bench_cmd->add_option("--threads", bench_cfg.threads, "Worker threads (0: all cores)");
  bench_cmd->add_option("--out", bench_out, "Results CSV to write")->required();
  bench_cmd->add_option("--out-quantiles", bench_out_quantiles,
                        "Per-p quantile CSV for boxplots");
  bench_cmd->callback([&]() {
    bench_cfg.n_total = bench_cfg.n_train + bench_cfg.n_test;
    const StudyResult result = run_study(bench_cfg);
    save_study_result(bench_out, result);
    if (!bench_out_quantiles.empty()) save_study_quantiles(bench_out_quantiles, result);
  });

  // ---- cv-h --------------------------------------------------------------
  auto* cv_cmd = app.add_subcommand("cv-h", "Cross-validate the bandwidth");
  std::string cv_events;
  std::string cv_responses;
  std::string cv_window;
  std::string cv_h_grid = "1,2,3,4";
  int cv_folds = 4;
  int cv_threads = 0;
  std::string cv_out;
  std::string cv_out_summary;
  FitConfig cv_base;
  cv_base.p = 2;
  cv_cmd->add_option("--events", cv_events, "Events CSV")->required();
  cv_cmd->add_option("--responses", cv_responses, "Responses CSV")->required();
  cv_cmd->add_option("--h-grid", cv_h_grid, "Comma-separated bandwidths");
  cv_cmd->add_option("--folds", cv_folds, "Number of contiguous folds");
  cv_cmd->add_option("--p", cv_base.p, "Fixed p used in every fold fit");
  cv_cmd->add_option("--bins", cv_base.bins, "Count bins");
  cv_cmd->add_option("--grid-size", cv_base.grid_size, "Evaluation grid size");
  cv_cmd->add_option("--var-threshold", cv_base.var_threshold, "Variance share for q");
  cv_cmd->add_option("--window", cv_window, "Observation window 'start,end'");
  cv_cmd->add_option("--threads", cv_threads, "Worker threads (0: all cores)");
  cv_cmd->add_option("--out", cv_out, "Per-fold CSV to write")->required();
  cv_cmd->add_option("--out-summary", cv_out_summary,
                     "Average-per-h CSV (default: <out>.summary)");
  cv_cmd->callback([&]() {
    const auto patterns = load_events(cv_events, parse_window(cv_window));
    const Eigen::VectorXd y = match_responses(patterns, load_responses(cv_responses));
    std::vector<double> h_grid;
    std::stringstream ss(cv_h_grid);
    std::string token;
    while (std::getline(ss, token, ','))
      if (!token.empty()) h_grid.push_back(std::stod(token));
    cv_base.window_start = patterns.front().window_start;
    cv_base.window_end = patterns.front().window_end;
    const CvTable table = cross_validate_h(patterns, y, cv_base, h_grid, cv_folds, cv_threads);
    save_cv_table(cv_out, table);
    save_cv_summary(cv_out_summary.empty() ? cv_out + ".summary" : cv_out_summary, table);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly, usage errors as 2
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
