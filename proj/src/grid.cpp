#include "p3ls/grid.hpp"

#include <cmath>
#include <string>

namespace p3ls {

Grid make_uniform_grid(double start, double end, int size) {
  if (!(end > start))
    throw InvalidWindow("grid window degenerate: end (" + std::to_string(end) +
                        ") must exceed start (" + std::to_string(start) + ")");
  if (size < 2) throw InvalidWindow("grid needs at least 2 points, got " + std::to_string(size));
  Grid g;
  g.start = start;
  g.end = end;
  g.size = size;
  g.step = (end - start) / static_cast<double>(size);
  return g;
}

double Curve::interpolate(double t) const {
  const int T = grid.size;
  const double first = grid.point(0);
  const double last = grid.point(T - 1);
  if (t <= first) return values(0);
  if (t >= last) return values(T - 1);
  const double pos = (t - first) / grid.step;
  int k = static_cast<int>(pos);
  if (k >= T - 1) k = T - 2;
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * values(k) + w * values(k + 1);
}

double quadrature(const Curve& f) { return f.grid.step * f.values.sum(); }

double l2_inner(const Curve& f, const Curve& g) {
  require_same_grid(f.grid, g.grid, "l2_inner");
  return f.grid.step * f.values.dot(g.values);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": curves live on different grids");
}

}  // namespace p3ls
