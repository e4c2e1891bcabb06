#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmc/classify.hpp"
#include "tmc/counting_params.hpp"
#include "tmc/geo.hpp"

namespace tmc::intersection {

enum class Approach { NB = 0, SB = 1, EB = 2, WB = 3 };
enum class Movement { Left = 0, Thru = 1, Right = 2, UTurn = 3 };

inline constexpr std::array<Approach, 4> kApproaches{Approach::NB, Approach::SB, Approach::EB,
                                                      Approach::WB};
inline constexpr std::array<Movement, 4> kMovements{Movement::Left, Movement::Thru,
                                                     Movement::Right, Movement::UTurn};

std::string_view to_string(Approach a);
std::string_view to_string(Movement m);
/// Throws Error(Schema) on unknown names.
Approach parse_approach(std::string_view s);
Movement parse_movement(std::string_view s);

/// Direction of travel in NED, as a yaw about down from north toward east.
double approach_heading(Approach a);

struct Binding {
  Approach approach;
  Movement movement;

  auto operator<=>(const Binding&) const = default;
};

enum class ZoneKind { Ingress, Egress };

/// Oriented rectangle in the NED horizontal plane. The local u axis points
/// along `yaw` (from north toward east), v is perpendicular to it.
struct Zone {
  std::string id;
  ZoneKind kind = ZoneKind::Ingress;
  geo::NedPoint center;
  double half_length = 4.0;
  double half_width = 1.75;
  double yaw = 0.0;
  /// Declared order matters: the first binding permissible at a vehicle's
  /// first trigger labels the count.
  std::vector<Binding> bindings;
  /// Egress zone whose triggers count right turns of its single binding.
  bool right_surrogate = false;

  bool binds(const Binding& b) const;
  /// Every binding is a right turn.
  bool right_bound() const;

  bool operator==(const Zone&) const = default;
};

/// Boundary-inclusive containment of the horizontal position; down is ignored.
bool point_in_zone(const geo::NedPoint& p, const Zone& z);

struct PhaseInterval {
  double start = 0.0;
  double end = 0.0;
  std::vector<Binding> permitted;

  bool operator==(const PhaseInterval&) const = default;
};

/// Static signal timing. Intervals are half-open [start, end), sorted and
/// non-overlapping; the session spans the first start to the last end.
/// Right turns are permitted at all times regardless of content.
class PhaseSchedule {
 public:
  PhaseSchedule() = default;
  /// Throws Error(InvariantViolation) naming the offending interval.
  explicit PhaseSchedule(std::vector<PhaseInterval> intervals);

  const std::vector<PhaseInterval>& intervals() const noexcept { return intervals_; }
  bool empty() const noexcept { return intervals_.empty(); }
  double session_start() const;
  double session_end() const;
  bool in_session(double t) const;

  bool operator==(const PhaseSchedule&) const = default;

 private:
  std::vector<PhaseInterval> intervals_;
};

/// True when `m` is a right turn, or (a, m) is in the permitted set of the
/// interval containing t. Gaps between intervals permit nothing. Throws
/// Error(TimeOutsideSchedule) for non-right movements outside the session.
bool permissible(Approach a, Movement m, double t, const PhaseSchedule& s);

struct IntersectionConfig {
  geo::GeodeticPoint ned_origin{0.0, 0.0, 0.0};
  std::vector<Zone> zones;
  PhaseSchedule schedule;
  counting::CountingParams params;
  classify::ClassTable classes = classify::ClassTable::standard();

  /// Throws Error(InvariantViolation) naming the offending zone.
  void validate() const;
  const Zone& zone(std::string_view id) const;

  /// Zones that bind both Left and UTurn of one approach, where ingress
  /// triggers alone cannot separate the two movements.
  std::vector<std::string> shared_left_uturn_zones() const;

  bool operator==(const IntersectionConfig&) const = default;
};

/// Parses and validates the JSON config document.
IntersectionConfig config_from_json(const std::string& text);
std::string config_to_json(const IntersectionConfig& cfg);
IntersectionConfig load_intersection_config(const std::string& path);

/// Four-leg reference layout with 12 ingress and 4 egress zones. Each
/// approach has a shared left/U-turn lane; NB/SB add two thru lanes, EB/WB a
/// thru and a right-turn lane. NB/SB right turns are counted on egress
/// surrogates past the corners. Split phasing NB, SB, EB, WB at 25 s each
/// over a 19 minute session.
IntersectionConfig reference_intersection();

}  // namespace tmc::intersection
