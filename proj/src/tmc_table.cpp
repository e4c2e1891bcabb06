#include "tmc/tmc_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "tmc/error.hpp"
#include "tmc/text_util.hpp"

namespace tmc::report {

using intersection::Approach;
using intersection::Movement;

namespace {

constexpr const char* kHeader = "bin_start,approach,class,left,thru,right,uturn";

}  // namespace

TmcTable::TmcTable(double bin_seconds, double session_start, double session_end,
                   int num_classes)
    : bin_seconds_(bin_seconds),
      session_start_(session_start),
      session_end_(session_end),
      num_classes_(num_classes) {
  if (!(bin_seconds > 0.0) || !std::isfinite(bin_seconds)) {
    throw Error(ErrorKind::InvalidArgument, "bin duration must be positive");
  }
  if (!std::isfinite(session_start) || !std::isfinite(session_end) ||
      !(session_end > session_start)) {
    throw Error(ErrorKind::InvalidArgument, "session must have start < end");
  }
  if (num_classes < 1) {
    throw Error(ErrorKind::InvalidArgument, "need at least one vehicle class");
  }
  const double bins = (session_end - session_start) / bin_seconds;
  num_bins_ = std::max(1, static_cast<int>(std::ceil(bins - 1e-9)));
  counts_.assign(static_cast<std::size_t>(num_bins_) * 16 * static_cast<std::size_t>(num_classes_),
                 0);
}

int TmcTable::bin_of(double t) const {
  if (!(t >= session_start_ && t < session_end_)) {
    throw Error(ErrorKind::InvalidArgument,
                "t=" + text::format_double(t) + " is outside the session");
  }
  const int b = static_cast<int>(std::floor((t - session_start_) / bin_seconds_));
  return std::clamp(b, 0, num_bins_ - 1);
}

std::size_t TmcTable::index(int bin, Approach a, Movement m, int cls) const {
  if (bin < 0 || bin >= num_bins_ || cls < 1 || cls > num_classes_) {
    throw Error(ErrorKind::InvalidArgument, "table index out of range");
  }
  return ((static_cast<std::size_t>(bin) * 4 + static_cast<std::size_t>(a)) * 4 +
          static_cast<std::size_t>(m)) *
             static_cast<std::size_t>(num_classes_) +
         static_cast<std::size_t>(cls - 1);
}

std::int64_t TmcTable::at(int bin, Approach a, Movement m, int cls) const {
  return counts_[index(bin, a, m, cls)];
}

void TmcTable::set(int bin, Approach a, Movement m, int cls, std::int64_t v) {
  if (v < 0) {
    throw Error(ErrorKind::NegativeCount, "counts must be nonnegative");
  }
  counts_[index(bin, a, m, cls)] = v;
}

void TmcTable::add(int bin, Approach a, Movement m, int cls, std::int64_t v) {
  auto& c = counts_[index(bin, a, m, cls)];
  if (c + v < 0) {
    throw Error(ErrorKind::NegativeCount, "counts must be nonnegative");
  }
  c += v;
}

std::int64_t TmcTable::grand_total() const {
  std::int64_t s = 0;
  for (auto c : counts_) {
    s += c;
  }
  return s;
}

bool TmcTable::same_shape(const TmcTable& other) const {
  return std::abs(bin_seconds_ - other.bin_seconds_) <= 1e-9 && num_bins_ == other.num_bins_ &&
         num_classes_ == other.num_classes_;
}

TmcTable& TmcTable::operator+=(const TmcTable& other) {
  if (!same_shape(other)) {
    throw Error(ErrorKind::IncompatibleBinning, "cannot add tables of different shape");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
  return *this;
}

TmcTable operator+(TmcTable a, const TmcTable& b) {
  a += b;
  return a;
}

std::string table_to_csv(const TmcTable& table) {
  std::string out = "# bin_seconds=" + text::format_double(table.bin_seconds()) +
                    ",session_start=" + text::format_double(table.session_start()) +
                    ",session_end=" + text::format_double(table.session_end()) + "\n";
  out += kHeader;
  out += '\n';
  for (int b = 0; b < table.num_bins(); ++b) {
    const std::string start = text::format_double(b * table.bin_seconds());
    for (auto a : intersection::kApproaches) {
      for (int c = 1; c <= table.num_classes(); ++c) {
        out += start;
        out += ',';
        out += intersection::to_string(a);
        out += ',' + std::to_string(c);
        for (auto m : intersection::kMovements) {
          out += ',' + std::to_string(table.at(b, a, m, c));
        }
        out += '\n';
      }
    }
  }
  return out;
}

TmcTable table_from_csv(const std::string& csv, int num_classes) {
  struct Row {
    std::size_t line;
    double bin_start;
    Approach approach;
    int cls;
    std::array<std::int64_t, 4> counts;
  };
  std::optional<double> meta_bin;
  std::optional<double> meta_start;
  std::optional<double> meta_end;
  std::vector<Row> rows;
  bool header_seen = false;

  const auto lines = text::split(csv, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto line = text::trim(lines[i]);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      for (const auto& kv : text::split(line.substr(1), ',')) {
        const auto parts = text::split(text::trim(kv), '=');
        double v = 0.0;
        if (parts.size() != 2 || !text::parse_double(parts[1], v)) {
          throw ParseError(ErrorKind::Schema, lineno, "bad metadata entry '" + kv + "'");
        }
        const auto key = text::trim(parts[0]);
        if (key == "bin_seconds") {
          meta_bin = v;
        } else if (key == "session_start") {
          meta_start = v;
        } else if (key == "session_end") {
          meta_end = v;
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) {
        throw ParseError(ErrorKind::Schema, lineno, std::string("expected header ") + kHeader);
      }
      header_seen = true;
      continue;
    }
    const auto cols = text::split(line, ',');
    if (cols.size() != 7) {
      throw ParseError(ErrorKind::Schema, lineno, "expected 7 columns");
    }
    Row r{};
    r.line = lineno;
    if (!text::parse_double(cols[0], r.bin_start) || !std::isfinite(r.bin_start) ||
        r.bin_start < 0.0) {
      throw ParseError(ErrorKind::Schema, lineno, "bin_start must be a nonnegative number");
    }
    try {
      r.approach = intersection::parse_approach(text::trim(cols[1]));
    } catch (const Error& e) {
      throw ParseError(ErrorKind::Schema, lineno, e.what());
    }
    std::int64_t cls = 0;
    if (!text::parse_int(cols[2], cls) || cls < 1 || cls > num_classes) {
      throw ParseError(ErrorKind::Schema, lineno,
                       "class must be an integer in 1.." + std::to_string(num_classes));
    }
    r.cls = static_cast<int>(cls);
    for (std::size_t k = 0; k < 4; ++k) {
      if (!text::parse_int(cols[3 + k], r.counts[k])) {
        throw ParseError(ErrorKind::Schema, lineno, "counts must be integers");
      }
      if (r.counts[k] < 0) {
        throw ParseError(ErrorKind::NegativeCount, lineno, "negative count");
      }
    }
    rows.push_back(r);
  }

  double bin = 300.0;
  if (meta_bin) {
    bin = *meta_bin;
  } else {
    std::set<double> starts;
    for (const auto& r : rows) {
      starts.insert(r.bin_start);
    }
    double spacing = 0.0;
    for (auto it = starts.begin(); it != starts.end() && std::next(it) != starts.end(); ++it) {
      const double d = *std::next(it) - *it;
      spacing = spacing == 0.0 ? d : std::min(spacing, d);
    }
    if (spacing > 0.0) {
      bin = spacing;
    }
  }
  if (!(bin > 0.0)) {
    throw Error(ErrorKind::Schema, "bin_seconds must be positive");
  }

  int max_bin = 0;
  std::vector<int> bin_index(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double q = rows[i].bin_start / bin;
    const double k = std::round(q);
    if (std::abs(q - k) > 1e-6) {
      throw ParseError(ErrorKind::Schema, rows[i].line,
                       "bin_start is not a multiple of the bin width");
    }
    bin_index[i] = static_cast<int>(k);
    max_bin = std::max(max_bin, bin_index[i]);
  }

  const double start = meta_start.value_or(0.0);
  const double end = meta_end.value_or(start + (max_bin + 1) * bin);
  TmcTable table(bin, start, end, num_classes);
  if (max_bin >= table.num_bins()) {
    throw Error(ErrorKind::Schema, "row bin_start lies past the session end");
  }
  std::set<std::tuple<int, int, int>> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!seen.insert({bin_index[i], static_cast<int>(r.approach), r.cls}).second) {
      throw ParseError(ErrorKind::Schema, r.line, "duplicate (bin, approach, class) row");
    }
    for (std::size_t k = 0; k < 4; ++k) {
      table.set(bin_index[i], r.approach, intersection::kMovements[k], r.cls, r.counts[k]);
    }
  }
  return table;
}

TmcTable load_ground_truth(const std::string& path, int num_classes) {
  return table_from_csv(text::read_file(path), num_classes);
}

}  // namespace tmc::report
