#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "p3ls/grid.hpp"
#include "p3ls/rng.hpp"

namespace p3ls {

/// One subject's event times within an observation window. Events are kept
/// sorted; duplicates are allowed (file input may round).
struct PointPattern {
  std::string subject_id;
  std::vector<double> events;
  double window_start = 0.0;
  double window_end = 0.0;
};

/// Sorts events and validates that they lie inside the window.
PointPattern make_point_pattern(std::string subject_id, std::vector<double> events,
                                double window_start, double window_end);

/// Partition of a window into contiguous bins.
struct BinPartition {
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<double> edges;   // M+1 cut points spanning the window
  Eigen::VectorXd widths;      // per-bin width
  Eigen::VectorXd midpoints;   // per-bin center

  int size() const { return static_cast<int>(widths.size()); }

  friend bool operator==(const BinPartition& a, const BinPartition& b) {
    return a.window_start == b.window_start && a.window_end == b.window_end && a.edges == b.edges;
  }
};

BinPartition make_partition(std::vector<double> edges);
BinPartition uniform_partition(double window_start, double window_end, int bins);

/// Same bin layout up to a relative tolerance; lets counts that round-tripped
/// through a decimal file still match a computed partition.
bool congruent_partitions(const BinPartition& a, const BinPartition& b, double rel_tol = 1e-9);

/// Per-subject bin counts over a partition.
struct CountVector {
  std::string subject_id;
  BinPartition partition;
  Eigen::VectorXi counts;
};

/// Counts events per bin. Bins are half-open [edge_l, edge_{l+1}) with the
/// last bin closed on the right, so the counts always sum to the event total.
CountVector bin_counts(const PointPattern& pattern, const BinPartition& partition);

/// Histogram-data conversion: places counts[l] events i.i.d. uniform within
/// bin l. Re-binning the output reproduces the counts exactly.
PointPattern jitter_histogram(const CountVector& counts, Rng& rng);

}  // namespace p3ls
