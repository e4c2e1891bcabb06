#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tmc/geo.hpp"
#include "tmc/ingest.hpp"
#include "tmc/intersection.hpp"
#include "tmc/tmc_table.hpp"

namespace tmc::simgen {

inline constexpr double kMaxSpeed = 20.0;  // m/s, free-flow design speed

/// One vehicle of a synthetic session. `entry_time` is the UNIX time at which
/// the vehicle's centroid enters its counting zone. `lane` selects among
/// several zones bound to the same movement, in config order.
struct ScriptedVehicle {
  int vehicle_class = 3;
  std::optional<double> length;  ///< drawn from the class interval when absent
  intersection::Approach approach = intersection::Approach::NB;
  intersection::Movement movement = intersection::Movement::Thru;
  double entry_time = 0.0;
  double speed = 10.0;
  int lane = 0;

  bool operator==(const ScriptedVehicle&) const = default;
};

/// A roadside sensor in the NED frame. The sensor frame has x along `yaw`
/// (from north toward east), z up, and its origin `mount_height` above ground.
struct SensorSpec {
  std::string frame_id;
  double north = 0.0;
  double east = 0.0;
  double mount_height = 4.67;
  double yaw = 0.0;
  double visibility = 40.0;

  bool operator==(const SensorSpec&) const = default;
};

struct SimConfig {
  double frame_rate = 4.0;    ///< Hz, [3, 5]
  double dropout = 0.0;       ///< per-detection miss probability, [0, 1)
  double noise_sigma = 0.0;   ///< m, isotropic position noise
  double length_sigma = 0.0;  ///< m, box length noise
  std::vector<SensorSpec> sensors = default_sensors();
  std::uint64_t seed = 0;

  /// Sensors on the NW and SE corners, 40 m visibility.
  static std::vector<SensorSpec> default_sensors();
  /// Throws Error(ScriptValidation).
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

/// Piecewise-linear horizontal path of one vehicle.
struct VehiclePath {
  std::string zone_id;
  std::vector<Eigen::Vector2d> waypoints;  ///< (north, east)
  double start_time = 0.0;  ///< time at the first waypoint
  double speed = 0.0;
  double zone_entry = 0.0;  ///< time the centroid enters the counting zone
  double zone_exit = 0.0;

  double length() const;
  double end_time() const { return start_time + length() / speed; }
  /// Position and heading at time t; nullopt outside [start_time, end_time].
  std::optional<std::pair<Eigen::Vector2d, double>> at(double t) const;
};

/// The zone that counts `v`'s movement: an ingress zone binding it (chosen by
/// lane) or, failing that, a right-turn surrogate egress zone.
const intersection::Zone& counting_zone(const ScriptedVehicle& v,
                                        const intersection::IntersectionConfig& cfg);
VehiclePath plan_path(const ScriptedVehicle& v, const intersection::IntersectionConfig& cfg);

struct SyntheticSession {
  std::vector<std::pair<std::string, std::vector<ingest::Frame>>> logs;  ///< per sensor
  report::TmcTable ground_truth;
  std::vector<ScriptedVehicle> script;  ///< with lengths filled in
  geo::FrameRegistry registry;
};

/// Deterministic for a fixed (script, cfg, sim). Throws Error(ScriptValidation)
/// for vehicles without a counting zone, speeds outside (0, 20], entries
/// outside the session, vehicles overlapping in a zone, or paths crossing
/// another counting zone.
SyntheticSession simulate(const std::vector<ScriptedVehicle>& script,
                          const intersection::IntersectionConfig& cfg, const SimConfig& sim,
                          double bin_seconds = 300.0);

/// Sensor frame → NED for a sensor spec.
geo::RigidTransform sensor_pose(const SensorSpec& s);

/// Options for the seeded script generator.
struct ScriptSpec {
  int vehicles = 30;
  double min_speed = 3.0;
  double max_speed = kMaxSpeed;
  std::vector<int> classes{2, 3, 4, 5, 6};
  /// Movements to draw from; empty means every Left/Thru/Right with a
  /// counting zone.
  std::vector<intersection::Binding> movements;
  double clearance_right = 2.0;  ///< s between one vehicle leaving a zone and the next entering
  double clearance_other = 2.0;
  double clearance_jitter = 3.0;
  double spread = 40.0;     ///< extra random spacing per zone, s
  double bin_seconds = 300.0;
  double bin_guard = 0.5;   ///< no zone entries this close before a bin boundary
};

/// Vehicles whose whole zone residence falls inside a phase permitting their
/// movement, with per-zone clearances of at least the configured minimum.
std::vector<ScriptedVehicle> generate_script(const intersection::IntersectionConfig& cfg,
                                             const ScriptSpec& spec, std::uint64_t seed);

/// Independent tally of a script into a table (no kinematics involved).
report::TmcTable tally_script(const std::vector<ScriptedVehicle>& script,
                              const intersection::IntersectionConfig& cfg,
                              double bin_seconds = 300.0);

struct Scenario {
  std::string name;
  std::string description;
  intersection::IntersectionConfig config;
  std::vector<ScriptedVehicle> script;
  SimConfig sim;
};

/// ideal, eb_wb_long_range, eb_wb_in_range, slow_heavy, burst, dual_overlap.
std::vector<Scenario> scenario_suite();
const Scenario& scenario(const std::string& name);

// Script documents: {"vehicles": [...], "sim": {...}}; the sim block is optional.
std::string script_to_json(const std::vector<ScriptedVehicle>& script,
                           const std::optional<SimConfig>& sim = std::nullopt);
std::pair<std::vector<ScriptedVehicle>, std::optional<SimConfig>> script_from_json(
    const std::string& text);

}  // namespace tmc::simgen
