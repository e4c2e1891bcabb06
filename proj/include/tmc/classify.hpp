#pragma once

#include <limits>
#include <string>
#include <vector>

namespace tmc::classify {

/// A length-based vehicle class covering the half-open interval [lower, upper).
struct VehicleClass {
  int id = 0;
  std::string label;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::vector<std::string> fhwa;

  bool operator==(const VehicleClass&) const = default;
};

/// An ordered set of classes whose intervals partition (0, ∞).
class ClassTable {
 public:
  /// Throws Error(InvariantViolation) unless ids run 1..n, the first interval
  /// starts at 0, consecutive intervals touch and the last one is unbounded.
  explicit ClassTable(std::vector<VehicleClass> classes);

  /// The six length classes with their FHWA groups:
  /// [0,1) pedestrians, [1,2.2) two-wheelers, [2.2,5) passenger cars,
  /// [5,7) large SUVs/vans/pickups, [7,12) trucks/buses, [12,∞) combinations.
  static const ClassTable& standard();

  /// Throws Error(NonpositiveLength) for length <= 0 or non-finite input.
  const VehicleClass& classify(double length) const;

  const VehicleClass& by_id(int id) const;
  const std::vector<VehicleClass>& classes() const noexcept { return classes_; }
  int size() const noexcept { return static_cast<int>(classes_.size()); }

  bool operator==(const ClassTable&) const = default;

 private:
  std::vector<VehicleClass> classes_;
};

inline const VehicleClass& classify_by_length(double length) {
  return ClassTable::standard().classify(length);
}

inline const std::vector<std::string>& fhwa_classes(const VehicleClass& c) { return c.fhwa; }

}  // namespace tmc::classify
