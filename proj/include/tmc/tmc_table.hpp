#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmc/intersection.hpp"

namespace tmc::report {

/// Counts indexed by (time bin × approach × movement × vehicle class).
/// Bins are half-open [session_start + k·bin, session_start + (k+1)·bin);
/// the last bin may extend past session_end.
class TmcTable {
 public:
  TmcTable() : TmcTable(300.0, 0.0, 300.0) {}
  TmcTable(double bin_seconds, double session_start, double session_end, int num_classes = 6);

  double bin_seconds() const noexcept { return bin_seconds_; }
  double session_start() const noexcept { return session_start_; }
  double session_end() const noexcept { return session_end_; }
  int num_bins() const noexcept { return num_bins_; }
  int num_classes() const noexcept { return num_classes_; }

  /// Bin holding time t; throws Error(InvalidArgument) outside the session.
  int bin_of(double t) const;

  std::int64_t at(int bin, intersection::Approach a, intersection::Movement m, int cls) const;
  void set(int bin, intersection::Approach a, intersection::Movement m, int cls, std::int64_t v);
  void add(int bin, intersection::Approach a, intersection::Movement m, int cls,
           std::int64_t v = 1);

  std::int64_t grand_total() const;
  /// Same bin width, bin count and class count.
  bool same_shape(const TmcTable& other) const;

  TmcTable& operator+=(const TmcTable& other);
  bool operator==(const TmcTable&) const = default;

 private:
  std::size_t index(int bin, intersection::Approach a, intersection::Movement m, int cls) const;

  double bin_seconds_;
  double session_start_;
  double session_end_;
  int num_bins_;
  int num_classes_;
  std::vector<std::int64_t> counts_;
};

TmcTable operator+(TmcTable a, const TmcTable& b);

/// CSV with header `bin_start,approach,class,left,thru,right,uturn`, one row
/// per (bin, approach, class). bin_start is seconds from the session start.
/// A leading `# bin_seconds=..,session_start=..,session_end=..` comment
/// carries the binning.
std::string table_to_csv(const TmcTable& table);

/// Reads the CSV written by table_to_csv or a hand-authored ground-truth
/// table. Rows may be sparse (missing rows are zero). Without the metadata
/// comment the bin width is the smallest bin_start spacing (300 s for a
/// single bin) and the session starts at 0.
TmcTable table_from_csv(const std::string& text, int num_classes = 6);
TmcTable load_ground_truth(const std::string& path, int num_classes = 6);

}  // namespace tmc::report
