#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "p3ls/grid.hpp"
#include "p3ls/numerics.hpp"
#include "p3ls/rng.hpp"

using namespace p3ls;

TEST_SUITE("numerics") {

TEST_CASE("uniform grid midpoints") {
  const Grid g = make_uniform_grid(0.0, 24.0, 100);
  CHECK(g.step == doctest::Approx(0.24).epsilon(1e-14));
  CHECK(g.point(0) == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(g.point(99) == doctest::Approx(23.88).epsilon(1e-14));
  CHECK(g.size == 100);

  const Grid two = make_uniform_grid(0.0, 1.0, 2);
  CHECK(two.point(0) == doctest::Approx(0.25));
  CHECK(two.point(1) == doctest::Approx(0.75));
  CHECK(two.step == doctest::Approx(0.5));
}

TEST_CASE("uniform grid rejects degenerate windows") {
  CHECK_THROWS_AS(make_uniform_grid(5.0, 3.0, 10), InvalidWindow);
  CHECK_THROWS_AS(make_uniform_grid(0.0, 1.0, 1), InvalidWindow);
  CHECK_THROWS_AS(make_uniform_grid(2.0, 2.0, 10), InvalidWindow);
}

TEST_CASE("quadrature of constants and linears is exact") {
  const Grid g = make_uniform_grid(0.0, 24.0, 100);
  CHECK(quadrature(Curve::constant(g, 1.0)) == doctest::Approx(24.0).epsilon(1e-14));

  const Grid g2 = make_uniform_grid(0.0, 1.0, 2);
  Curve f(g2, g2.points());
  CHECK(quadrature(f) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("quadrature of t^2 matches the antiderivative") {
  const Grid g = make_uniform_grid(0.0, 1.0, 1000);
  Curve f(g, g.points().array().square().matrix());
  // Oracle: closed-form integral of t^2 over [0,1].
  CHECK(std::abs(quadrature(f) - 1.0 / 3.0) < 1e-6);
}

TEST_CASE("quadrature is linear") {
  const Grid g = make_uniform_grid(0.0, 7.0, 53);
  Rng rng(11);
  Eigen::VectorXd fv(g.size), gv(g.size);
  for (int k = 0; k < g.size; ++k) {
    fv(k) = rng.normal();
    gv(k) = rng.normal();
  }
  const Curve f(g, fv), h(g, gv);
  const double a = 2.25, b = -0.75;
  const Curve combo(g, a * fv + b * gv);
  CHECK(std::abs(quadrature(combo) - (a * quadrature(f) + b * quadrature(h))) < 1e-12);
}

TEST_CASE("kernel weight values and symmetry") {
  CHECK(kernel_weight(0.0, 2.0) == doctest::Approx(0.375));
  CHECK(kernel_weight(2.0, 2.0) == 0.0);
  CHECK(kernel_weight(2.1, 2.0) == 0.0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double u = rng.uniform(-3.0, 3.0);
    const double h = rng.uniform(0.1, 4.0);
    CHECK(kernel_weight(u, h) == kernel_weight(-u, h));
    CHECK(kernel_weight(u, h) >= 0.0);
  }
  CHECK_THROWS_AS(kernel_weight(0.0, 0.0), InvalidBandwidth);
  CHECK_THROWS_AS(kernel_weight(0.0, -1.0), InvalidBandwidth);
}

TEST_CASE("kernel integrates to one") {
  // Oracle: fine midpoint quadrature of the closed form.
  const double h = 1.7;
  const Grid g = make_uniform_grid(-h, h, 20000);
  Eigen::VectorXd v(g.size);
  for (int k = 0; k < g.size; ++k) v(k) = kernel_weight(g.point(k), h);
  CHECK(quadrature(Curve(g, v)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("edge correction closed form") {
  // Interior point with full kernel support inside the window.
  CHECK(edge_correction(12.0, 2.0, 0.0, 24.0) == doctest::Approx(1.0).epsilon(1e-14));
  // Window boundary: exactly half the kernel mass.
  CHECK(edge_correction(0.0, 2.0, 0.0, 24.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(edge_correction(24.0, 2.0, 0.0, 24.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(edge_correction(-0.1, 2.0, 0.0, 24.0), OutOfWindow);
  CHECK_THROWS_AS(edge_correction(25.0, 2.0, 0.0, 24.0), OutOfWindow);
}

TEST_CASE("edge correction matches quadrature oracle") {
  const double h = 2.0;
  const double s = 0.0 + h / 2.0;
  const double a = edge_correction(s, h, 0.0, 24.0);
  CHECK(a > 0.5);
  CHECK(a < 1.0);
  // Oracle: fine-grid numerical integration of kernel_weight over the window.
  const Grid g = make_uniform_grid(0.0, 24.0, 200000);
  double acc = 0.0;
  for (int k = 0; k < g.size; ++k) acc += kernel_weight(s - g.point(k), h);
  CHECK(a == doctest::Approx(acc * g.step).epsilon(1e-8));
}

TEST_CASE("edge correction is continuous along the grid") {
  const double h = 2.0;
  const Grid g = make_uniform_grid(0.0, 24.0, 400);
  double prev = edge_correction(g.point(0), h, 0.0, 24.0);
  for (int k = 1; k < g.size; ++k) {
    const double cur = edge_correction(g.point(k), h, 0.0, 24.0);
    // Slope of the kernel mass is bounded by the kernel peak 0.75/h.
    CHECK(std::abs(cur - prev) <= 0.76 * g.step / h);
    prev = cur;
  }
}

TEST_CASE("sym_eigen on identity and rank-1") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  const SymEigen e = sym_eigen(id);
  for (int i = 0; i < 3; ++i) CHECK(e.eigenvalues(i) == doctest::Approx(1.0));

  Eigen::VectorXd w(4);
  w << 0.5, -0.5, 0.5, 0.5;
  const SymEigen r = sym_eigen(w * w.transpose());
  CHECK(r.eigenvalues(0) == doctest::Approx(1.0));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(r.eigenvalues(i)) < 1e-12);
  const double align = std::abs(r.eigenvectors.col(0).dot(w));
  CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("sym_eigen reconstruction and orthonormality") {
  Rng rng(7);
  Eigen::MatrixXd m(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) m(i, j) = rng.normal();
  m = 0.5 * (m + m.transpose()).eval();
  const SymEigen e = sym_eigen(m);
  // Oracle: direct reconstruction from the spectrum.
  Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i)
    rec += e.eigenvalues(i) * e.eigenvectors.col(i) * e.eigenvectors.col(i).transpose();
  CHECK((rec - m).cwiseAbs().maxCoeff() < 1e-8 * m.norm());
  const Eigen::MatrixXd vtv = e.eigenvectors.transpose() * e.eigenvectors;
  CHECK((vtv - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 1; i < 5; ++i) CHECK(e.eigenvalues(i) <= e.eigenvalues(i - 1));
}

TEST_CASE("sym_eigen rejects non-finite input") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 1) = std::nan("");
  CHECK_THROWS_AS(sym_eigen(m), NonFiniteEntry);
}

TEST_CASE("least squares identities") {
  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 4.0;
  const Eigen::VectorXd w = solve_least_squares(Eigen::MatrixXd::Identity(3, 3), y);
  CHECK((w - y).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd ones(3, 1);
  ones.setOnes();
  Eigen::VectorXd resp(3);
  resp << 1.0, 2.0, 3.0;
  CHECK(solve_least_squares(ones, resp)(0) == doctest::Approx(2.0));
}

TEST_CASE("least squares matches the normal equations") {
  Rng rng(21);
  Eigen::MatrixXd design(20, 3);
  Eigen::VectorXd resp(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) design(i, j) = rng.normal();
    resp(i) = rng.normal();
  }
  const Eigen::VectorXd w = solve_least_squares(design, resp);
  // Oracle: explicit normal-equations solve.
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd oracle = gram.ldlt().solve(design.transpose() * resp);
  CHECK((w - oracle).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("least squares rejects mismatched sizes") {
  CHECK_THROWS_AS(solve_least_squares(Eigen::MatrixXd::Identity(3, 2), Eigen::VectorXd::Zero(4)),
                  DimensionMismatch);
}

TEST_CASE("curve interpolation is exact at midpoints and clamped") {
  const Grid g = make_uniform_grid(0.0, 10.0, 5);
  Eigen::VectorXd v(5);
  v << 1.0, 3.0, -2.0, 0.0, 5.0;
  const Curve c(g, v);
  for (int k = 0; k < 5; ++k) CHECK(c.interpolate(g.point(k)) == doctest::Approx(v(k)));
  CHECK(c.interpolate(-1.0) == doctest::Approx(1.0));
  CHECK(c.interpolate(11.0) == doctest::Approx(5.0));
  CHECK(c.interpolate(2.0) == doctest::Approx(2.0));  // halfway between 1.0 and 3.0
}

}  // TEST_SUITE
