#pragma once

namespace tmc::counting {

/// Temporal thresholds for turning zone triggers into vehicle counts.
struct CountingParams {
  double min_headway_right = 2.0;  ///< s, zones bound only to right turns
  double min_headway_other = 1.2;  ///< s, every other zone
  double cluster_gap = 0.6;        ///< s, gaps below this join the current vehicle
  double dedup_window = 0.6;       ///< s, cross-sensor merge window
  /// Gaps in [cluster_gap, min_headway) extend the current vehicle instead of
  /// starting a new one. Turning this off (with cluster_gap = 0) gives the
  /// raw one-event-per-trigger behaviour.
  bool absorb = true;

  /// Throws Error(InvariantViolation) unless headways are positive, gaps are
  /// nonnegative and cluster_gap < min_headway_other <= min_headway_right.
  void validate() const;

  bool operator==(const CountingParams&) const = default;
};

}  // namespace tmc::counting
