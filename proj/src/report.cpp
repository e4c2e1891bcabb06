#include "tmc/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "tmc/error.hpp"
#include "tmc/text_util.hpp"

namespace tmc::report {

using intersection::kApproaches;
using intersection::kMovements;

std::string_view to_string(Dim d) {
  switch (d) {
    case Dim::Time: return "time";
    case Dim::Approach: return "approach";
    case Dim::Movement: return "movement";
    case Dim::Class: return "class";
  }
  return "?";
}

std::set<Dim> parse_dims(std::string_view list) {
  std::set<Dim> out;
  for (const auto& raw : text::split(list, ',')) {
    const auto name = text::trim(raw);
    if (name.empty()) {
      continue;
    }
    bool found = false;
    for (auto d : {Dim::Time, Dim::Approach, Dim::Movement, Dim::Class}) {
      if (to_string(d) == name) {
        out.insert(d);
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorKind::InvalidArgument, "unknown dimension '" + std::string(name) + "'");
    }
  }
  return out;
}

std::int64_t MarginalTable::total() const {
  std::int64_t s = 0;
  for (const auto& [k, v] : cells) {
    s += v;
  }
  return s;
}

MarginalTable aggregate(const TmcTable& t, const std::set<Dim>& keep) {
  if (keep.empty()) {
    throw Error(ErrorKind::InvalidArgument, "aggregate needs at least one dimension to keep");
  }
  MarginalTable m;
  m.dims.assign(keep.begin(), keep.end());
  for (int b = 0; b < t.num_bins(); ++b) {
    for (auto a : kApproaches) {
      for (auto mv : kMovements) {
        for (int c = 1; c <= t.num_classes(); ++c) {
          std::vector<int> key;
          for (auto d : m.dims) {
            switch (d) {
              case Dim::Time: key.push_back(b); break;
              case Dim::Approach: key.push_back(static_cast<int>(a)); break;
              case Dim::Movement: key.push_back(static_cast<int>(mv)); break;
              case Dim::Class: key.push_back(c); break;
            }
          }
          m.cells[key] += t.at(b, a, mv, c);
        }
      }
    }
  }
  return m;
}

namespace {

std::string group_label(const std::vector<Dim>& dims, const std::vector<int>& key) {
  if (dims.empty()) {
    return "all";
  }
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) {
      out += '/';
    }
    switch (dims[i]) {
      case Dim::Time: out += "bin" + std::to_string(key[i]); break;
      case Dim::Approach:
        out += intersection::to_string(kApproaches[static_cast<std::size_t>(key[i])]);
        break;
      case Dim::Movement:
        out += intersection::to_string(kMovements[static_cast<std::size_t>(key[i])]);
        break;
      case Dim::Class: out += "class" + std::to_string(key[i]); break;
    }
  }
  return out;
}

std::optional<double> share(std::int64_t part, std::int64_t total) {
  if (total <= 0) {
    return std::nullopt;
  }
  return static_cast<double>(part) / static_cast<double>(total) * 100.0;
}

std::string pct_text(const std::optional<double>& v) {
  return v ? text::format_fixed(*v, 6) : std::string("n/a");
}

}  // namespace

ErrorReport compare(const TmcTable& est, const TmcTable& gt, const std::set<Dim>& group_by) {
  if (!est.same_shape(gt)) {
    throw Error(ErrorKind::IncompatibleBinning,
                "tables differ in binning: " + text::format_double(est.bin_seconds()) + " s x " +
                    std::to_string(est.num_bins()) + " vs " + text::format_double(gt.bin_seconds()) +
                    " s x " + std::to_string(gt.num_bins()));
  }
  ErrorReport r;
  r.group_by.assign(group_by.begin(), group_by.end());
  if (group_by.empty()) {
    const auto e = est.grand_total();
    const auto g = gt.grand_total();
    r.rows.push_back({"all", e, g, std::llabs(e - g),
                      g > 0 ? std::optional<double>(std::llabs(e - g) * 100.0 / g) : std::nullopt});
  } else {
    const auto me = aggregate(est, group_by);
    const auto mg = aggregate(gt, group_by);
    for (const auto& [key, e] : me.cells) {
      const auto g = mg.cells.at(key);
      const auto abs = std::llabs(e - g);
      r.rows.push_back({group_label(r.group_by, key), e, g, abs,
                        g > 0 ? std::optional<double>(static_cast<double>(abs) /
                                                      static_cast<double>(g) * 100.0)
                              : std::nullopt});
    }
  }
  const auto ce = aggregate(est, {Dim::Class});
  const auto cg = aggregate(gt, {Dim::Class});
  for (int c = 1; c <= est.num_classes(); ++c) {
    r.shares.push_back({c, share(ce.cells.at({c}), est.grand_total()),
                        share(cg.cells.at({c}), gt.grand_total())});
  }
  return r;
}

std::string render_report(const ErrorReport& report, Format format) {
  if (format == Format::Csv) {
    std::string out = "group,estimated,ground_truth,abs_error,pct_error\n";
    for (const auto& row : report.rows) {
      out += row.group + ',' + std::to_string(row.estimated) + ',' +
             std::to_string(row.ground_truth) + ',' + std::to_string(row.abs_error) + ',' +
             pct_text(row.pct_error) + '\n';
    }
    return out;
  }

  std::size_t width = 5;
  for (const auto& row : report.rows) {
    width = std::max(width, row.group.size());
  }
  auto pad = [](std::string s, std::size_t w, bool right) {
    if (s.size() < w) {
      s = right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
    }
    return s;
  };
  std::string out = pad("group", width, false) + "  " + pad("est", 8, true) + "  " +
                    pad("gt", 8, true) + "  " + pad("abs", 8, true) + "  " +
                    pad("pct", 10, true) + "\n";
  for (const auto& row : report.rows) {
    out += pad(row.group, width, false) + "  " + pad(std::to_string(row.estimated), 8, true) +
           "  " + pad(std::to_string(row.ground_truth), 8, true) + "  " +
           pad(std::to_string(row.abs_error), 8, true) + "  " +
           pad(row.pct_error ? text::format_fixed(*row.pct_error, 2) + "%" : "n/a", 10, true) +
           "\n";
  }
  out += "\nclass volume share (est / gt)\n";
  for (const auto& s : report.shares) {
    out += "  class " + std::to_string(s.vehicle_class) + ": " +
           pad(s.estimated_pct ? text::format_fixed(*s.estimated_pct, 2) + "%" : "n/a", 8, true) +
           " / " +
           pad(s.ground_truth_pct ? text::format_fixed(*s.ground_truth_pct, 2) + "%" : "n/a", 8,
               true) +
           "\n";
  }
  return out;
}

std::string render_shares_csv(const ErrorReport& report) {
  std::string out = "class,estimated_share,ground_truth_share\n";
  for (const auto& s : report.shares) {
    out += std::to_string(s.vehicle_class) + ',' + pct_text(s.estimated_pct) + ',' +
           pct_text(s.ground_truth_pct) + '\n';
  }
  return out;
}

}  // namespace tmc::report
