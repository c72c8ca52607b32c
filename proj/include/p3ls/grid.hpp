#pragma once

#include <Eigen/Core>

#include "p3ls/errors.hpp"

namespace p3ls {

/// Uniform grid of cell midpoints over an observation window [start, end].
///
/// The k-th point (0-based) is start + (k + 1/2) * step, so the points are
/// the midpoints of the T equal subintervals of the window.
struct Grid {
  double start = 0.0;
  double end = 0.0;
  int size = 0;      // number of midpoints T
  double step = 0.0; // cell width

  double point(int k) const { return start + (static_cast<double>(k) + 0.5) * step; }

  Eigen::VectorXd points() const {
    Eigen::VectorXd p(size);
    for (int k = 0; k < size; ++k) p(k) = point(k);
    return p;
  }

  /// Index of the cell containing t (clamped to [0, size-1]).
  int cell_index(double t) const {
    int k = static_cast<int>((t - start) / step);
    if (k < 0) k = 0;
    if (k >= size) k = size - 1;
    return k;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.start == b.start && a.end == b.end && a.size == b.size;
  }
};

Grid make_uniform_grid(double start, double end, int size);

/// A function sampled on a grid: values[k] = f(grid.point(k)).
struct Curve {
  Grid grid;
  Eigen::VectorXd values;

  Curve() = default;
  Curve(const Grid& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size) throw DimensionMismatch("curve length != grid size");
  }

  static Curve zero(const Grid& g) { return Curve(g, Eigen::VectorXd::Zero(g.size)); }
  static Curve constant(const Grid& g, double c) {
    return Curve(g, Eigen::VectorXd::Constant(g.size, c));
  }

  /// Piecewise-linear interpolation between grid midpoints, clamped at the ends.
  double interpolate(double t) const;
};

/// A bivariate function sampled on grid x grid: entries(j,k) = f(t_j, t_k).
struct GridMatrix {
  Grid grid;
  Eigen::MatrixXd entries;

  GridMatrix() = default;
  GridMatrix(const Grid& g, Eigen::MatrixXd m) : grid(g), entries(std::move(m)) {
    if (entries.rows() != grid.size || entries.cols() != grid.size)
      throw DimensionMismatch("grid matrix shape != grid size");
  }
};

/// Midpoint-rule integral over the window: step * sum of values.
double quadrature(const Curve& f);

/// Midpoint-rule integral of the pointwise product f*g (plain L2 inner product).
double l2_inner(const Curve& f, const Curve& g);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace p3ls
