#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tmc/tmc_table.hpp"

namespace tmc::report {

enum class Dim { Time, Approach, Movement, Class };

std::string_view to_string(Dim d);
/// Parses a comma-separated list such as "approach,movement".
std::set<Dim> parse_dims(std::string_view list);

/// Sums over the dimensions not kept. Keys hold the kept dimensions' values
/// in Time, Approach, Movement, Class order (bin index, enum index, class id).
struct MarginalTable {
  std::vector<Dim> dims;
  std::map<std::vector<int>, std::int64_t> cells;

  std::int64_t total() const;
  bool operator==(const MarginalTable&) const = default;
};

/// Throws Error(InvalidArgument) when `keep` is empty.
MarginalTable aggregate(const TmcTable& t, const std::set<Dim>& keep);

struct ErrorRow {
  std::string group;
  std::int64_t estimated = 0;
  std::int64_t ground_truth = 0;
  std::int64_t abs_error = 0;
  std::optional<double> pct_error;  ///< empty when ground truth is 0
};

struct ClassShare {
  int vehicle_class = 0;
  std::optional<double> estimated_pct;
  std::optional<double> ground_truth_pct;
};

struct ErrorReport {
  std::vector<Dim> group_by;
  std::vector<ErrorRow> rows;
  std::vector<ClassShare> shares;
};

/// Per-group errors between an estimate and ground truth, plus each class's
/// share of total volume. Throws Error(IncompatibleBinning) if the tables
/// differ in bin width, bin count or class count.
ErrorReport compare(const TmcTable& est, const TmcTable& gt, const std::set<Dim>& group_by);

enum class Format { Csv, Text };

/// Csv: `group,estimated,ground_truth,abs_error,pct_error`. Text: aligned
/// table followed by class volume shares.
std::string render_report(const ErrorReport& report, Format format);
/// Csv: `class,estimated_share,ground_truth_share`.
std::string render_shares_csv(const ErrorReport& report);

}  // namespace tmc::report
