#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "p3ls/bspline.hpp"
#include "p3ls/point_pattern.hpp"
#include "p3ls/simulate.hpp"

using namespace p3ls;

namespace {

// Upper chi-square quantile via the Wilson-Hilferty cube approximation.
double chi2_quantile(double df, double z) {
  const double c = 2.0 / (9.0 * df);
  const double x = 1.0 - c + z * std::sqrt(c);
  return df * x * x * x;
}

constexpr double kZ99 = 2.3263478740408408;

}  // namespace

TEST_SUITE("pointprocess") {

TEST_CASE("sim log intensity with all omegas zero") {
  SimConfig cfg;
  const BSplineBasis basis(cfg.n_bspline, cfg.window_start, cfg.window_end);
  const Grid grid = make_uniform_grid(cfg.window_start, cfg.window_end, cfg.grid_size);
  const auto draw =
      sim_log_intensity_from_omegas(cfg, basis, grid, Eigen::VectorXd::Zero(20));
  // All coefficients collapse to the mean shift, so the curve is 2.8 * sum(phi).
  for (int j = 0; j < 20; ++j) CHECK(draw.coefficients(j) == doctest::Approx(2.8));
  for (int k = 0; k < grid.size; ++k) {
    const double expected = 2.8 * basis.values_at(grid.point(k)).sum();
    CHECK(draw.log_intensity.values(k) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("sim coefficients follow omega/eta + shift") {
  SimConfig cfg;  // eta = 10, shift = 2.8
  const BSplineBasis basis(cfg.n_bspline, cfg.window_start, cfg.window_end);
  const Grid grid = make_uniform_grid(cfg.window_start, cfg.window_end, cfg.grid_size);
  Eigen::VectorXd omegas = Eigen::VectorXd::Zero(20);
  omegas(1) = 12.0;  // the paper's omega_2
  const auto draw = sim_log_intensity_from_omegas(cfg, basis, grid, omegas);
  CHECK(draw.coefficients(1) == doctest::Approx(4.0));
  CHECK(draw.coefficients(0) == doctest::Approx(2.8));
}

TEST_CASE("sim coefficient Monte Carlo means") {
  SimConfig cfg;
  const BSplineBasis basis(cfg.n_bspline, cfg.window_start, cfg.window_end);
  const Grid grid = make_uniform_grid(cfg.window_start, cfg.window_end, 10);
  Rng rng(314);
  const int n = 10000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(20);
  for (int i = 0; i < n; ++i) mean += sample_sim_log_intensity(cfg, basis, grid, rng).coefficients;
  mean /= n;
  // Oracle: E[omega_j]/eta + 2.8 with 3-standard-error tolerances.
  CHECK(mean(0) == doctest::Approx(2.8));  // omega_1 fixed at zero
  const double se_mid = 1.0 / std::sqrt(static_cast<double>(n));   // sd 10/eta = 1
  const double se_edge = 0.4 / std::sqrt(static_cast<double>(n));  // sd 4/eta = 0.4
  CHECK(std::abs(mean(1) - 4.0) < 3 * se_edge);
  CHECK(std::abs(mean(19) - 4.0) < 3 * se_edge);
  for (int j = 2; j < 19; ++j) CHECK(std::abs(mean(j) - 4.8) < 3 * se_mid);
}

TEST_CASE("homogeneous cox sampling hits the Poisson mean") {
  const Grid grid = make_uniform_grid(0.0, 24.0, 100);
  const Curve x = Curve::constant(grid, std::log(5.0));  // E[#events] = 120
  Rng rng(99);
  const int reps = 1000;
  double total = 0.0;
  for (int r = 0; r < reps; ++r)
    total += static_cast<double>(simulate_inhomogeneous_poisson(x, rng).events.size());
  const double mean = total / reps;
  CHECK(std::abs(mean - 120.0) < 3.0 * std::sqrt(120.0 / reps));
}

TEST_CASE("homogeneous halves pass a chi-square goodness of fit") {
  const Grid grid = make_uniform_grid(0.0, 24.0, 100);
  const Curve x = Curve::constant(grid, std::log(5.0));
  Rng rng(1234);
  const int reps = 2000;
  const double mu = 60.0;  // Poisson mean per half window
  std::vector<int> left(reps), right(reps);
  for (int r = 0; r < reps; ++r) {
    const PointPattern p = simulate_inhomogeneous_poisson(x, rng);
    int nl = 0;
    for (double e : p.events) nl += (e < 12.0) ? 1 : 0;
    left[static_cast<size_t>(r)] = nl;
    right[static_cast<size_t>(r)] = static_cast<int>(p.events.size()) - nl;
  }

  auto gof = [&](const std::vector<int>& counts) {
    // Bin the Poisson support so every expected cell count is at least 5.
    std::vector<double> pmf;
    double p0 = std::exp(-mu);
    double cum = p0;
    pmf.push_back(p0);
    for (int k = 1; k < 200; ++k) {
      p0 *= mu / k;
      pmf.push_back(p0);
      cum += p0;
      if (cum > 1.0 - 1e-12) break;
    }
    int lo = 0;
    double acc = 0.0;
    while (acc + pmf[static_cast<size_t>(lo)] < 5.0 / reps) acc += pmf[static_cast<size_t>(lo++)];
    int hi = static_cast<int>(pmf.size()) - 1;
    double acc_hi = 0.0;
    while (acc_hi + pmf[static_cast<size_t>(hi)] < 5.0 / reps)
      acc_hi += pmf[static_cast<size_t>(hi--)];
    const int cells = hi - lo + 3;  // interior values plus the two tails
    std::vector<double> expected(static_cast<size_t>(cells), 0.0);
    std::vector<double> observed(static_cast<size_t>(cells), 0.0);
    expected[0] = (acc + pmf[static_cast<size_t>(lo)]) * reps;
    for (int k = lo + 1; k < hi; ++k)
      expected[static_cast<size_t>(k - lo)] = pmf[static_cast<size_t>(k)] * reps;
    expected[static_cast<size_t>(cells - 1)] = (acc_hi + pmf[static_cast<size_t>(hi)]) * reps;
    for (int c : counts) {
      int cell = std::clamp(c - lo, 0, cells - 1);
      observed[static_cast<size_t>(cell)] += 1.0;
    }
    double stat = 0.0;
    for (int c = 0; c < cells; ++c) {
      const double e = expected[static_cast<size_t>(c)];
      if (e > 0) {
        const double d = observed[static_cast<size_t>(c)] - e;
        stat += d * d / e;
      }
    }
    return std::make_pair(stat, static_cast<double>(cells - 1));
  };

  const auto [stat_l, df_l] = gof(left);
  CHECK(stat_l < chi2_quantile(df_l, kZ99));
  const auto [stat_r, df_r] = gof(right);
  CHECK(stat_r < chi2_quantile(df_r, kZ99));

  // Disjoint windows of a Poisson process are independent: the sample
  // correlation of the halves stays within sampling noise.
  double ml = 0.0, mr = 0.0;
  for (int r = 0; r < reps; ++r) {
    ml += left[static_cast<size_t>(r)];
    mr += right[static_cast<size_t>(r)];
  }
  ml /= reps;
  mr /= reps;
  double sll = 0.0, srr = 0.0, slr = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double dl = left[static_cast<size_t>(r)] - ml;
    const double dr = right[static_cast<size_t>(r)] - mr;
    sll += dl * dl;
    srr += dr * dr;
    slr += dl * dr;
  }
  const double corr = slr / std::sqrt(sll * srr);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("single cell reduction") {
  const Grid grid = make_uniform_grid(0.0, 1.0, 2);
  const Curve x = Curve::constant(grid, std::log(3.0));
  Rng rng(5);
  double total = 0.0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    const PointPattern p = simulate_inhomogeneous_poisson(x, rng);
    for (double e : p.events) {
      CHECK(e >= 0.0);
      CHECK(e <= 1.0);
    }
    CHECK(std::is_sorted(p.events.begin(), p.events.end()));
    total += static_cast<double>(p.events.size());
  }
  CHECK(std::abs(total / reps - 3.0) < 3.0 * std::sqrt(3.0 / reps));
}

TEST_CASE("intensity overflow guard") {
  const Grid grid = make_uniform_grid(0.0, 1.0, 2);
  const Curve x = Curve::constant(grid, 25.0);  // exp(25)/2 > 1e9
  Rng rng(1);
  CHECK_THROWS_AS(simulate_inhomogeneous_poisson(x, rng), IntensityOverflow);
}

TEST_CASE("intensity scaling multiplies the expected count") {
  const Grid grid = make_uniform_grid(0.0, 24.0, 50);
  const double base_rate = 4.0;
  for (double c : {0.5, 2.0}) {
    Rng rng(77);
    const Curve x = Curve::constant(grid, std::log(base_rate * c));
    const int reps = 800;
    double total = 0.0;
    for (int r = 0; r < reps; ++r)
      total += static_cast<double>(simulate_inhomogeneous_poisson(x, rng).events.size());
    const double expected = base_rate * c * 24.0;
    CHECK(std::abs(total / reps - expected) < 3.0 * std::sqrt(expected / reps));
  }
}

TEST_CASE("simulation is reproducible per seed") {
  const Grid grid = make_uniform_grid(0.0, 24.0, 100);
  const Curve x = Curve::constant(grid, std::log(7.0));
  Rng r1(2024), r2(2024);
  const PointPattern a = simulate_inhomogeneous_poisson(x, r1);
  const PointPattern b = simulate_inhomogeneous_poisson(x, r2);
  CHECK(a.events == b.events);
}

TEST_CASE("bin counts direct examples") {
  const PointPattern p = make_point_pattern("a", {1.0, 2.0, 3.0}, 0.0, 4.0);
  const BinPartition part = uniform_partition(0.0, 4.0, 2);
  const CountVector cv = bin_counts(p, part);
  CHECK(cv.counts(0) == 1);
  CHECK(cv.counts(1) == 2);

  const PointPattern empty = make_point_pattern("b", {}, 0.0, 4.0);
  CHECK(bin_counts(empty, part).counts.sum() == 0);

  // Right edge lands in the closed last bin.
  const PointPattern edge = make_point_pattern("c", {4.0}, 0.0, 4.0);
  CHECK(bin_counts(edge, part).counts(1) == 1);

  const BinPartition other = uniform_partition(0.0, 5.0, 2);
  CHECK_THROWS_AS(bin_counts(p, other), WindowMismatch);
}

TEST_CASE("bin counts match a naive recount") {
  Rng rng(404);
  std::vector<double> events;
  for (int i = 0; i < 1000; ++i) events.push_back(rng.uniform(0.0, 24.0));
  const PointPattern p = make_point_pattern("u", events, 0.0, 24.0);
  const BinPartition part = uniform_partition(0.0, 24.0, 100);
  const CountVector cv = bin_counts(p, part);
  CHECK(cv.counts.sum() == 1000);
  for (int l = 0; l < part.size(); ++l) {
    // Oracle: direct scan of the half-open bin.
    int direct = 0;
    for (double e : p.events) {
      const bool in = (l + 1 == part.size())
                          ? (e >= part.edges[static_cast<size_t>(l)] && e <= part.window_end)
                          : (e >= part.edges[static_cast<size_t>(l)] &&
                             e < part.edges[static_cast<size_t>(l) + 1]);
      direct += in ? 1 : 0;
    }
    CHECK(cv.counts(l) == direct);
    // Binomial(1000, 1/100) stays within its 99.9% band at this seed.
    CHECK(cv.counts(l) <= 21);
  }
}

TEST_CASE("jitter histogram round trip") {
  const BinPartition part = uniform_partition(0.0, 2.0, 1);
  CountVector cv;
  cv.subject_id = "j";
  cv.partition = part;
  cv.counts = Eigen::VectorXi::Constant(1, 3);
  Rng rng(8);
  const PointPattern p = jitter_histogram(cv, rng);
  CHECK(p.events.size() == 3);
  for (double e : p.events) {
    CHECK(e >= 0.0);
    CHECK(e < 2.0);
  }
  CHECK(bin_counts(p, part).counts(0) == 3);

  CountVector zero;
  zero.subject_id = "z";
  zero.partition = part;
  zero.counts = Eigen::VectorXi::Zero(1);
  CHECK(jitter_histogram(zero, rng).events.empty());
}

TEST_CASE("jitter then re-bin is the identity for any seed") {
  const BinPartition part = uniform_partition(0.0, 24.0, 37);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    CountVector cv;
    cv.subject_id = "p";
    cv.partition = part;
    cv.counts.resize(37);
    for (int l = 0; l < 37; ++l) cv.counts(l) = static_cast<int>(rng.poisson(3.0));
    const PointPattern p = jitter_histogram(cv, rng);
    const CountVector back = bin_counts(p, part);
    CHECK(back.counts == cv.counts);
  }
}

TEST_CASE("jittered events are uniform within the bin") {
  const BinPartition part = uniform_partition(2.0, 7.0, 1);
  CountVector cv;
  cv.subject_id = "k";
  cv.partition = part;
  const int n = 10000;
  cv.counts = Eigen::VectorXi::Constant(1, n);
  Rng rng(31);
  const PointPattern p = jitter_histogram(cv, rng);
  // Kolmogorov-Smirnov statistic against the uniform cdf on [2, 7].
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = (p.events[static_cast<size_t>(i)] - 2.0) / 5.0;
    d = std::max(d, std::abs(u - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(u - static_cast<double>(i) / n));
  }
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST_CASE("point pattern construction validates and sorts") {
  const PointPattern p = make_point_pattern("s", {3.0, 1.0, 2.0}, 0.0, 4.0);
  CHECK(std::is_sorted(p.events.begin(), p.events.end()));
  CHECK_THROWS_AS(make_point_pattern("s", {5.0}, 0.0, 4.0), OutOfWindow);
  CHECK_THROWS_AS(make_point_pattern("s", {}, 4.0, 4.0), InvalidWindow);
}

}  // TEST_SUITE
