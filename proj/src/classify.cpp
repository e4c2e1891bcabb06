#include "tmc/classify.hpp"

#include <algorithm>
#include <cmath>

#include "tmc/error.hpp"
#include "tmc/text_util.hpp"

namespace tmc::classify {

ClassTable::ClassTable(std::vector<VehicleClass> classes) : classes_(std::move(classes)) {
  if (classes_.empty()) {
    throw Error(ErrorKind::InvariantViolation, "class table is empty");
  }
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& c = classes_[i];
    if (c.id != static_cast<int>(i) + 1) {
      throw Error(ErrorKind::InvariantViolation, "class ids must run 1..n in order");
    }
    if (!(c.lower < c.upper) || !std::isfinite(c.lower)) {
      throw Error(ErrorKind::InvariantViolation,
                  "class " + std::to_string(c.id) + " has an empty interval");
    }
    if (i == 0 && c.lower != 0.0) {
      throw Error(ErrorKind::InvariantViolation, "first class must start at 0 m");
    }
    if (i > 0 && classes_[i - 1].upper != c.lower) {
      throw Error(ErrorKind::InvariantViolation,
                  "gap or overlap between classes " + std::to_string(c.id - 1) + " and " +
                      std::to_string(c.id));
    }
  }
  if (!std::isinf(classes_.back().upper)) {
    throw Error(ErrorKind::InvariantViolation, "last class must be unbounded above");
  }
}

const ClassTable& ClassTable::standard() {
  static const ClassTable table({
      {1, "Pedestrians", 0.0, 1.0, {}},
      {2, "Bicycle, Scooterist, Motorbikes", 1.0, 2.2, {"FHWA Class 1"}},
      {3, "Hatchbacks, Sedans, Small-Medium SUVs", 2.2, 5.0, {"FHWA Class 2 (No Trailer)"}},
      {4, "Large SUVs, Vans, Pickup Trucks", 5.0, 7.0,
       {"FHWA Class 2 (Trailer)", "FHWA Class 3"}},
      {5, "Trucks, Buses", 7.0, 12.0,
       {"FHWA Class 4", "FHWA Class 5", "FHWA Class 6", "FHWA Class 7"}},
      {6, "Trailers, Combination Trucks", 12.0, std::numeric_limits<double>::infinity(),
       {"FHWA Class 8", "FHWA Class 9", "FHWA Class 10"}},
  });
  return table;
}

const VehicleClass& ClassTable::classify(double length) const {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorKind::NonpositiveLength,
                "vehicle length must be positive and finite, got " + text::format_double(length));
  }
  // First class whose upper bound exceeds the length.
  auto it = std::upper_bound(classes_.begin(), classes_.end(), length,
                             [](double len, const VehicleClass& c) { return len < c.upper; });
  return *it;
}

const VehicleClass& ClassTable::by_id(int id) const {
  if (id < 1 || id > size()) {
    throw Error(ErrorKind::InvalidArgument, "no vehicle class " + std::to_string(id));
  }
  return classes_[static_cast<std::size_t>(id - 1)];
}

}  // namespace tmc::classify
