#include <doctest.h>

#include <cmath>
#include <vector>

#include "p3ls/rng.hpp"

using namespace p3ls;

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible and seeds disjoint") {
  Rng a(42), b(42), c(43);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const double va = a.uniform();
    all_equal = all_equal && (va == b.uniform());
    any_diff = any_diff || (va != c.uniform());
  }
  CHECK(all_equal);
  CHECK(any_diff);
  CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(1, 1));
  CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(2, 0));
  CHECK(Rng::derive_seed(5, 7) == Rng::derive_seed(5, 7));
}

TEST_CASE("uniform stays in range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  Rng rng(9);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson moments across both sampling regimes") {
  for (double mean : {0.5, 3.0, 9.5, 40.0, 300.0, 2000.0}) {
    Rng rng(static_cast<std::uint64_t>(mean * 1000) + 17);
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(mean));
      sum += k;
      sum2 += k * k;
    }
    const double m = sum / n;
    const double v = sum2 / n - m * m;
    const double se = std::sqrt(mean / n);
    CHECK(std::abs(m - mean) < 4.0 * se);       // mean within 4 standard errors
    CHECK(v == doctest::Approx(mean).epsilon(0.1));  // variance equals the mean
  }
  Rng rng(5);
  CHECK(rng.poisson(0.0) == 0);
  CHECK(rng.poisson(-1.0) == 0);
}

}  // TEST_SUITE
