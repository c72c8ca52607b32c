#include "p3ls/point_pattern.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace p3ls {

PointPattern make_point_pattern(std::string subject_id, std::vector<double> events,
                                double window_start, double window_end) {
  if (!(window_end > window_start)) throw InvalidWindow("point pattern window degenerate");
  std::sort(events.begin(), events.end());
  if (!events.empty() && (events.front() < window_start || events.back() > window_end))
    throw OutOfWindow("event time outside window for subject " + subject_id);
  PointPattern p;
  p.subject_id = std::move(subject_id);
  p.events = std::move(events);
  p.window_start = window_start;
  p.window_end = window_end;
  return p;
}

BinPartition make_partition(std::vector<double> edges) {
  if (edges.size() < 2) throw InvalidWindow("partition needs at least one bin");
  for (size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw InvalidWindow("partition edges must be increasing");
  BinPartition part;
  part.window_start = edges.front();
  part.window_end = edges.back();
  const int m = static_cast<int>(edges.size()) - 1;
  part.widths.resize(m);
  part.midpoints.resize(m);
  for (int l = 0; l < m; ++l) {
    part.widths(l) = edges[static_cast<size_t>(l) + 1] - edges[static_cast<size_t>(l)];
    part.midpoints(l) = 0.5 * (edges[static_cast<size_t>(l)] + edges[static_cast<size_t>(l) + 1]);
  }
  part.edges = std::move(edges);
  return part;
}

BinPartition uniform_partition(double window_start, double window_end, int bins) {
  if (!(window_end > window_start)) throw InvalidWindow("partition window degenerate");
  if (bins < 1) throw InvalidWindow("partition needs at least one bin");
  std::vector<double> edges(static_cast<size_t>(bins) + 1);
  const double width = (window_end - window_start) / static_cast<double>(bins);
  for (int l = 0; l <= bins; ++l) edges[static_cast<size_t>(l)] = window_start + width * l;
  edges.back() = window_end;
  return make_partition(std::move(edges));
}

bool congruent_partitions(const BinPartition& a, const BinPartition& b, double rel_tol) {
  if (a.size() != b.size()) return false;
  const double scale = std::max(std::abs(a.window_end - a.window_start),
                                std::abs(b.window_end - b.window_start));
  const double tol = rel_tol * scale;
  for (size_t i = 0; i < a.edges.size(); ++i)
    if (std::abs(a.edges[i] - b.edges[i]) > tol) return false;
  return true;
}

CountVector bin_counts(const PointPattern& pattern, const BinPartition& partition) {
  if (pattern.window_start != partition.window_start ||
      pattern.window_end != partition.window_end)
    throw WindowMismatch("partition does not span the pattern window");
  CountVector out;
  out.subject_id = pattern.subject_id;
  out.partition = partition;
  out.counts = Eigen::VectorXi::Zero(partition.size());
  const auto& edges = partition.edges;
  for (double e : pattern.events) {
    // First edge strictly greater than e; the last bin absorbs e == end.
    auto it = std::upper_bound(edges.begin(), edges.end(), e);
    long idx = std::distance(edges.begin(), it) - 1;
    if (idx >= partition.size()) idx = partition.size() - 1;
    if (idx < 0) idx = 0;
    out.counts(static_cast<int>(idx)) += 1;
  }
  return out;
}

PointPattern jitter_histogram(const CountVector& counts, Rng& rng) {
  PointPattern out;
  out.subject_id = counts.subject_id;
  out.window_start = counts.partition.window_start;
  out.window_end = counts.partition.window_end;
  out.events.reserve(static_cast<size_t>(counts.counts.sum()));
  for (int l = 0; l < counts.partition.size(); ++l) {
    const double lo = counts.partition.edges[static_cast<size_t>(l)];
    const double hi = counts.partition.edges[static_cast<size_t>(l) + 1];
    const size_t begin = out.events.size();
    for (int c = 0; c < counts.counts(l); ++c) {
      double v = rng.uniform(lo, hi);
      // lo + (hi-lo)*u can round up to hi; keep the draw inside [lo, hi).
      if (v >= hi) v = std::nextafter(hi, lo);
      out.events.push_back(v);
    }
    std::sort(out.events.begin() + static_cast<long>(begin), out.events.end());
  }
  return out;
}

}  // namespace p3ls
