#include <doctest.h>

#include <cmath>

#include "p3ls/bspline.hpp"

using namespace p3ls;

TEST_SUITE("bspline") {

TEST_CASE("basis functions are local, nonnegative, and peak at one") {
  const BSplineBasis basis(20, 0.0, 24.0);
  CHECK(basis.size() == 20);
  const int n_probe = 8192;  // endpoint-inclusive so boundary peaks are seen
  for (int j = 0; j < basis.size(); ++j) {
    double peak = 0.0;
    for (int i = 0; i <= n_probe; ++i) {
      const double t = 24.0 * static_cast<double>(i) / n_probe;
      const double v = basis.value(j, t);
      CHECK(v >= 0.0);
      peak = std::max(peak, v);
    }
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-4));
  }
  // Clamped ends: the first and last functions carry the boundary.
  CHECK(basis.value(0, 0.0) == doctest::Approx(1.0));
  CHECK(basis.value(19, 24.0) == doctest::Approx(1.0));
  CHECK(basis.value(0, 24.0) == 0.0);
  CHECK(basis.value(10, 0.0) == 0.0);
}

TEST_CASE("compact support spans degree+1 knot intervals") {
  const BSplineBasis basis(20, 0.0, 24.0);
  // Interior basis function 10 (0-based) is supported on knots 10..14 of the
  // clamped vector, i.e. on [24*(10-3)/17, 24*(11)/17].
  const double span = 24.0 / 17.0;
  const double lo = (10 - 3) * span;
  const double hi = 11 * span;
  CHECK(basis.value(10, lo - 1e-6) == 0.0);
  CHECK(basis.value(10, hi + 1e-6) == 0.0);
  CHECK(basis.value(10, 0.5 * (lo + hi)) > 0.5);
}

TEST_CASE("combine forms the linear combination") {
  const BSplineBasis basis(6, 0.0, 1.0);
  const Grid g = make_uniform_grid(0.0, 1.0, 64);
  Eigen::VectorXd coefs = Eigen::VectorXd::Zero(6);
  coefs(2) = 2.5;
  const Curve c = basis.combine(coefs, g);
  for (int k = 0; k < g.size; ++k)
    CHECK(c.values(k) == doctest::Approx(2.5 * basis.value(2, g.point(k))));
  CHECK_THROWS_AS(basis.combine(Eigen::VectorXd::Zero(5), g), DimensionMismatch);
}

TEST_CASE("normalized basis sums stay in the expected band") {
  // A clamped cubic basis is a partition of unity; peaks range from 2/3 on
  // uniform interior knots down to ~0.57 next to the clamped ends, so the
  // peak-normalized pointwise sum sits between 1 and about 1.75.
  const BSplineBasis basis(12, 0.0, 10.0);
  const Grid g = make_uniform_grid(0.0, 10.0, 101);
  for (int k = 0; k < g.size; ++k) {
    const double s = basis.values_at(g.point(k)).sum();
    CHECK(s >= 1.0 - 1e-9);
    CHECK(s < 1.75);
  }
}

}  // TEST_SUITE
