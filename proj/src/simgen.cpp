#include "tmc/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include <json.hpp>

#include "tmc/error.hpp"
#include "tmc/text_util.hpp"

namespace tmc::simgen {

using intersection::Approach;
using intersection::Binding;
using intersection::IntersectionConfig;
using intersection::Movement;
using intersection::Zone;
using intersection::ZoneKind;

namespace {

constexpr double kLeadIn = 15.0;      // m of path before the counting zone
constexpr double kLeadOut = 10.0;     // m of path after it
constexpr double kTurnRunout = 6.0;   // m between a turn and a surrogate egress zone
constexpr double kPathCheckStep = 0.1;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::ScriptValidation, what);
}

Eigen::Vector2d unit(double yaw) { return {std::cos(yaw), std::sin(yaw)}; }

double turn_offset(Movement m) {
  switch (m) {
    case Movement::Right: return std::numbers::pi / 2;
    case Movement::Left: return -std::numbers::pi / 2;
    case Movement::UTurn: return std::numbers::pi;
    case Movement::Thru: return 0.0;
  }
  return 0.0;
}

// Half the chord through the zone center along direction d.
double half_chord(const Zone& z, const Eigen::Vector2d& d) {
  const double du = std::abs(d.dot(unit(z.yaw)));
  const double dv = std::abs(d.dot(unit(z.yaw + std::numbers::pi / 2)));
  double h = std::numeric_limits<double>::infinity();
  if (du > 1e-12) {
    h = std::min(h, z.half_length / du);
  }
  if (dv > 1e-12) {
    h = std::min(h, z.half_width / dv);
  }
  return h;
}

struct BoxSize {
  double width;
  double height;
};

BoxSize box_size(int vehicle_class) {
  static const BoxSize sizes[] = {{0.6, 1.7}, {0.8, 1.5}, {1.8, 1.5},
                                  {2.0, 1.9}, {2.5, 3.2}, {2.6, 4.0}};
  if (vehicle_class >= 1 && vehicle_class <= 6) {
    return sizes[vehicle_class - 1];
  }
  return {2.0, 1.8};
}

std::pair<double, double> length_range(const classify::VehicleClass& c) {
  if (std::isinf(c.upper)) {
    return {c.lower + 0.5, c.lower + 6.0};
  }
  const double margin = 0.1 * (c.upper - c.lower);
  return {c.lower + margin, c.upper - margin};
}

double draw_length(const classify::VehicleClass& c, std::mt19937_64& rng) {
  auto [lo, hi] = length_range(c);
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool counts(const Zone& z) {
  return z.kind == ZoneKind::Ingress || z.right_surrogate;
}

}  // namespace

std::vector<SensorSpec> SimConfig::default_sensors() {
  return {{"L1", 20.0, -20.0, 4.67, -std::numbers::pi / 4, 40.0},
          {"L2", -20.0, 20.0, 4.67, 3 * std::numbers::pi / 4, 40.0}};
}

void SimConfig::validate() const {
  if (!(frame_rate >= 3.0 && frame_rate <= 5.0)) {
    invalid("frame rate must lie in [3, 5] Hz");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    invalid("dropout probability must lie in [0, 1)");
  }
  if (!(noise_sigma >= 0.0) || !(length_sigma >= 0.0)) {
    invalid("noise levels must be nonnegative");
  }
  if (sensors.empty()) {
    invalid("at least one sensor is required");
  }
  std::set<std::string> ids;
  for (const auto& s : sensors) {
    if (s.frame_id.empty() || !ids.insert(s.frame_id).second) {
      invalid("sensor ids must be unique and non-empty");
    }
    if (!(s.visibility > 0.0)) {
      invalid("sensor '" + s.frame_id + "' needs a positive visibility radius");
    }
  }
}

double VehiclePath::length() const {
  double l = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    l += (waypoints[i] - waypoints[i - 1]).norm();
  }
  return l;
}

std::optional<std::pair<Eigen::Vector2d, double>> VehiclePath::at(double t) const {
  double s = (t - start_time) * speed;
  if (s < 0.0) {
    return std::nullopt;
  }
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Eigen::Vector2d seg = waypoints[i] - waypoints[i - 1];
    const double len = seg.norm();
    if (s <= len) {
      const Eigen::Vector2d dir = seg / len;
      return std::make_pair(Eigen::Vector2d(waypoints[i - 1] + dir * s),
                            std::atan2(dir.y(), dir.x()));
    }
    s -= len;
  }
  return std::nullopt;
}

const Zone& counting_zone(const ScriptedVehicle& v, const IntersectionConfig& cfg) {
  const Binding b{v.approach, v.movement};
  std::vector<const Zone*> ingress;
  std::vector<const Zone*> surrogate;
  for (const auto& z : cfg.zones) {
    if (!z.binds(b)) {
      continue;
    }
    if (z.kind == ZoneKind::Ingress) {
      ingress.push_back(&z);
    } else if (z.right_surrogate) {
      surrogate.push_back(&z);
    }
  }
  const auto& pool = ingress.empty() ? surrogate : ingress;
  const std::string name =
      std::string(to_string(v.approach)) + "-" + std::string(to_string(v.movement));
  if (pool.empty()) {
    invalid("no zone counts " + name);
  }
  if (v.lane < 0 || v.lane >= static_cast<int>(pool.size())) {
    invalid(name + " has no lane " + std::to_string(v.lane));
  }
  return *pool[static_cast<std::size_t>(v.lane)];
}

VehiclePath plan_path(const ScriptedVehicle& v, const IntersectionConfig& cfg) {
  if (!(v.speed > 0.0 && v.speed <= kMaxSpeed)) {
    invalid("speed must lie in (0, 20] m/s");
  }
  const Zone& z = counting_zone(v, cfg);
  const Eigen::Vector2d c(z.center.north, z.center.east);
  const double heading = intersection::approach_heading(v.approach);
  VehiclePath p;
  p.zone_id = z.id;
  p.speed = v.speed;
  double entry_distance = 0.0;
  double chord = 0.0;
  if (z.kind == ZoneKind::Ingress) {
    const Eigen::Vector2d d = unit(heading);
    const double h = half_chord(z, d);
    p.waypoints = {c - d * (h + kLeadIn), c + d * (h + kLeadOut)};
    entry_distance = kLeadIn;
    chord = 2.0 * h;
  } else {
    const Eigen::Vector2d in = unit(heading);
    const Eigen::Vector2d out = unit(heading + turn_offset(v.movement));
    const double h = half_chord(z, out);
    const Eigen::Vector2d turn = c - out * (h + kTurnRunout);
    p.waypoints = {turn - in * kLeadIn, turn, c + out * (h + kLeadOut)};
    entry_distance = kLeadIn + kTurnRunout;
    chord = 2.0 * h;
  }
  p.zone_entry = v.entry_time;
  p.zone_exit = v.entry_time + chord / v.speed;
  p.start_time = v.entry_time - entry_distance / v.speed;
  return p;
}

geo::RigidTransform sensor_pose(const SensorSpec& s) {
  const double c = std::cos(s.yaw);
  const double sn = std::sin(s.yaw);
  Eigen::Matrix3d r;
  r << c, sn, 0.0,
       sn, -c, 0.0,
       0.0, 0.0, -1.0;
  return {r, Eigen::Vector3d(s.north, s.east, -s.mount_height)};
}

SyntheticSession simulate(const std::vector<ScriptedVehicle>& script,
                          const IntersectionConfig& cfg, const SimConfig& sim,
                          double bin_seconds) {
  sim.validate();
  const double session_start = cfg.schedule.session_start();
  const double session_end = cfg.schedule.session_end();
  std::mt19937_64 rng(sim.seed);

  SyntheticSession out;
  out.script = script;
  out.ground_truth =
      report::TmcTable(bin_seconds, session_start, session_end, cfg.classes.size());

  std::vector<VehiclePath> paths;
  paths.reserve(script.size());
  std::map<std::string, std::vector<std::pair<double, double>>> occupancy;
  for (std::size_t i = 0; i < out.script.size(); ++i) {
    auto& v = out.script[i];
    const std::string who = "vehicle " + std::to_string(i);
    if (v.vehicle_class < 1 || v.vehicle_class > cfg.classes.size()) {
      invalid(who + ": unknown class " + std::to_string(v.vehicle_class));
    }
    const auto& cls = cfg.classes.by_id(v.vehicle_class);
    if (v.length) {
      if (!(*v.length > 0.0) || cfg.classes.classify(*v.length).id != v.vehicle_class) {
        invalid(who + ": length does not fall in class " + std::to_string(v.vehicle_class));
      }
    } else {
      v.length = draw_length(cls, rng);
    }
    if (!(v.entry_time >= session_start && v.entry_time < session_end)) {
      invalid(who + ": entry time outside the session");
    }
    VehiclePath p = plan_path(v, cfg);
    occupancy[p.zone_id].push_back({p.zone_entry, p.zone_exit});

    // The path may only enter its own counting zone.
    const double total = p.length();
    for (double s = 0.0; s <= total; s += kPathCheckStep) {
      const auto pos = p.at(p.start_time + s / p.speed);
      if (!pos) {
        break;
      }
      const geo::NedPoint q{pos->first.x(), pos->first.y(), 0.0};
      for (const auto& z : cfg.zones) {
        if (z.id != p.zone_id && counts(z) && intersection::point_in_zone(q, z)) {
          invalid(who + ": path crosses zone '" + z.id + "'");
        }
      }
    }

    const int cls_id = cfg.classes.classify(*v.length).id;
    out.ground_truth.add(out.ground_truth.bin_of(p.zone_entry), v.approach, v.movement, cls_id);
    paths.push_back(std::move(p));
  }
  for (auto& [zone, spans] : occupancy) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t k = 1; k < spans.size(); ++k) {
      if (!(spans[k].first > spans[k - 1].second)) {
        invalid("vehicles overlap inside zone '" + zone + "'");
      }
    }
  }

  out.registry.set_ned_origin(cfg.ned_origin);
  const geo::RigidTransform ned_to_ecef = geo::compose(
      geo::RigidTransform(Eigen::Matrix3d::Identity(), geo::lla_to_ecef(cfg.ned_origin).xyz),
      geo::invert(geo::ned_rotation(cfg.ned_origin)));

  const double period = 1.0 / sim.frame_rate;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto n_sensors = static_cast<double>(sim.sensors.size());
  for (std::size_t si = 0; si < sim.sensors.size(); ++si) {
    const SensorSpec& sensor = sim.sensors[si];
    const geo::RigidTransform pose = sensor_pose(sensor);
    const geo::RigidTransform ned_to_sensor = geo::invert(pose);
    out.registry.register_frame(sensor.frame_id, geo::compose(ned_to_ecef, pose));

    std::vector<ingest::Frame> frames;
    const double offset = static_cast<double>(si) * period / n_sensors;
    for (long k = 0;; ++k) {
      const double t = session_start + (offset + static_cast<double>(k) * period);
      if (t >= session_end) {
        break;
      }
      ingest::Frame frame{sensor.frame_id, t, {}};
      for (std::size_t vi = 0; vi < paths.size(); ++vi) {
        const VehiclePath& path = paths[vi];
        if (t < path.start_time || t > path.end_time()) {
          continue;
        }
        const auto state = path.at(t);
        if (!state) {
          continue;
        }
        const Eigen::Vector2d& pos = state->first;
        if (std::hypot(pos.x() - sensor.north, pos.y() - sensor.east) > sensor.visibility) {
          continue;
        }
        if (sim.dropout > 0.0 && coin(rng) < sim.dropout) {
          continue;
        }
        const ScriptedVehicle& v = out.script[vi];
        const BoxSize box = box_size(v.vehicle_class);
        Eigen::Vector3d ned(pos.x(), pos.y(), -box.height / 2.0);
        if (sim.noise_sigma > 0.0) {
          ned += sim.noise_sigma * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        }
        double length = *v.length;
        if (sim.length_sigma > 0.0) {
          length = std::clamp(length + sim.length_sigma * gauss(rng), 0.1, 49.0);
        }
        const Eigen::Vector3d dir = ned_to_sensor.rotation() *
                                    Eigen::Vector3d(std::cos(state->second),
                                                    std::sin(state->second), 0.0);
        ingest::DetectionRecord rec;
        rec.frame_id = sensor.frame_id;
        rec.t = t;
        rec.center = ned_to_sensor.apply(ned);
        rec.length = length;
        rec.width = box.width;
        rec.height = box.height;
        rec.heading = ingest::wrap_angle(std::atan2(dir.y(), dir.x()));
        frame.detections.push_back(std::move(rec));
      }
      frames.push_back(std::move(frame));
    }
    out.logs.emplace_back(sensor.frame_id, std::move(frames));
  }
  return out;
}

report::TmcTable tally_script(const std::vector<ScriptedVehicle>& script,
                              const IntersectionConfig& cfg, double bin_seconds) {
  report::TmcTable t(bin_seconds, cfg.schedule.session_start(), cfg.schedule.session_end(),
                     cfg.classes.size());
  for (const auto& v : script) {
    t.add(t.bin_of(v.entry_time), v.approach, v.movement, v.vehicle_class);
  }
  return t;
}

std::vector<ScriptedVehicle> generate_script(const IntersectionConfig& cfg,
                                             const ScriptSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  const double start = cfg.schedule.session_start();
  const double end = cfg.schedule.session_end();

  struct Option {
    Binding binding;
    int lanes;
  };
  std::vector<Option> options;
  std::vector<Binding> wanted = spec.movements;
  if (wanted.empty()) {
    for (auto a : intersection::kApproaches) {
      for (auto m : {Movement::Left, Movement::Thru, Movement::Right}) {
        wanted.push_back({a, m});
      }
    }
  }
  for (const auto& b : wanted) {
    int ingress = 0;
    int surrogate = 0;
    for (const auto& z : cfg.zones) {
      if (z.binds(b)) {
        (z.kind == ZoneKind::Ingress ? ingress : surrogate) += z.right_surrogate || z.kind == ZoneKind::Ingress;
      }
    }
    const int lanes = ingress > 0 ? ingress : surrogate;
    if (lanes > 0) {
      options.push_back({b, lanes});
    }
  }
  if (options.empty() || spec.classes.empty()) {
    invalid("script generator has nothing to draw from");
  }

  // A candidate entry time is pushed forward until the residence fits a
  // permitting phase and keeps clear of bin boundaries.
  auto settle = [&](const Binding& b, double entry, double residence) -> std::optional<double> {
    for (int guard = 0; guard < 1000; ++guard) {
      if (entry + residence >= end - 1.0) {
        return std::nullopt;
      }
      const double offset = std::fmod(entry - start, spec.bin_seconds);
      if (offset > spec.bin_seconds - spec.bin_guard) {
        entry += spec.bin_seconds - offset + 0.01;
        continue;
      }
      if (b.movement == Movement::Right) {
        return entry;
      }
      const auto& ivs = cfg.schedule.intervals();
      auto it = std::find_if(ivs.begin(), ivs.end(),
                             [&](const auto& iv) { return entry < iv.end; });
      if (it == ivs.end()) {
        return std::nullopt;
      }
      const bool permits =
          std::find(it->permitted.begin(), it->permitted.end(), b) != it->permitted.end();
      if (entry >= it->start && permits && entry + residence < it->end) {
        return entry;
      }
      // Jump to the next interval that permits the movement.
      auto next = std::find_if(it + (entry >= it->start ? 1 : 0), ivs.end(), [&](const auto& iv) {
        return std::find(iv.permitted.begin(), iv.permitted.end(), b) != iv.permitted.end();
      });
      if (next == ivs.end()) {
        return std::nullopt;
      }
      entry = next->start + 0.1 + unit01(rng) * 3.0;
    }
    return std::nullopt;
  };

  std::map<std::string, double> last_exit;
  std::vector<ScriptedVehicle> script;
  int attempts = 0;
  while (static_cast<int>(script.size()) < spec.vehicles && attempts < spec.vehicles * 20) {
    ++attempts;
    const Option& opt = options[static_cast<std::size_t>(unit01(rng) * options.size()) % options.size()];
    ScriptedVehicle v;
    v.approach = opt.binding.approach;
    v.movement = opt.binding.movement;
    v.lane = static_cast<int>(unit01(rng) * opt.lanes) % opt.lanes;
    v.vehicle_class =
        spec.classes[static_cast<std::size_t>(unit01(rng) * spec.classes.size()) % spec.classes.size()];
    v.length = draw_length(cfg.classes.by_id(v.vehicle_class), rng);
    v.speed = spec.min_speed + (spec.max_speed - spec.min_speed) * unit01(rng);
    v.entry_time = start;  // placeholder for planning
    const VehiclePath probe = plan_path(v, cfg);
    const Zone& z = cfg.zone(probe.zone_id);
    const double residence = probe.zone_exit - probe.zone_entry;
    const double clearance = (z.right_bound() ? spec.clearance_right : spec.clearance_other) +
                             spec.clearance_jitter * unit01(rng);
    double earliest = start + 1.0;
    if (auto it = last_exit.find(z.id); it != last_exit.end()) {
      earliest = it->second + clearance;
    }
    const auto entry = settle(opt.binding, earliest + spec.spread * unit01(rng), residence);
    if (!entry) {
      continue;
    }
    v.entry_time = *entry;
    last_exit[z.id] = *entry + residence;
    script.push_back(v);
  }
  std::stable_sort(script.begin(), script.end(),
                   [](const auto& a, const auto& b) { return a.entry_time < b.entry_time; });
  return script;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

double num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::Schema, where + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : fallback;
}

}  // namespace

std::string script_to_json(const std::vector<ScriptedVehicle>& script,
                           const std::optional<SimConfig>& sim) {
  ojson doc;
  auto vehicles = ojson::array();
  for (const auto& v : script) {
    ojson j;
    j["class"] = v.vehicle_class;
    if (v.length) {
      j["length"] = *v.length;
    }
    j["approach"] = std::string(to_string(v.approach));
    j["movement"] = std::string(to_string(v.movement));
    j["entry_time"] = v.entry_time;
    j["speed"] = v.speed;
    j["lane"] = v.lane;
    vehicles.push_back(std::move(j));
  }
  doc["vehicles"] = std::move(vehicles);
  if (sim) {
    ojson s;
    s["frame_rate"] = sim->frame_rate;
    s["dropout"] = sim->dropout;
    s["noise_sigma"] = sim->noise_sigma;
    s["length_sigma"] = sim->length_sigma;
    auto sensors = ojson::array();
    for (const auto& sn : sim->sensors) {
      sensors.push_back({{"frame_id", sn.frame_id},
                         {"north", sn.north},
                         {"east", sn.east},
                         {"mount_height", sn.mount_height},
                         {"yaw", sn.yaw},
                         {"visibility", sn.visibility}});
    }
    s["sensors"] = std::move(sensors);
    doc["sim"] = std::move(s);
  }
  return doc.dump(2) + "\n";
}

std::pair<std::vector<ScriptedVehicle>, std::optional<SimConfig>> script_from_json(
    const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, std::string("script is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vehicles") || !doc.at("vehicles").is_array()) {
    throw Error(ErrorKind::Schema, "script must be an object with a 'vehicles' array");
  }
  std::vector<ScriptedVehicle> script;
  for (std::size_t i = 0; i < doc.at("vehicles").size(); ++i) {
    const auto& j = doc.at("vehicles")[i];
    const std::string where = "vehicles[" + std::to_string(i) + "]";
    if (!j.is_object()) {
      throw Error(ErrorKind::Schema, where + " must be an object");
    }
    ScriptedVehicle v;
    if (!j.contains("class") || !j.at("class").is_number_integer()) {
      throw Error(ErrorKind::Schema, where + ": 'class' must be an integer");
    }
    v.vehicle_class = j.at("class").get<int>();
    if (j.contains("length")) {
      v.length = num(j, "length", where);
    }
    if (!j.contains("approach") || !j.at("approach").is_string() || !j.contains("movement") ||
        !j.at("movement").is_string()) {
      throw Error(ErrorKind::Schema, where + ": 'approach' and 'movement' are required");
    }
    v.approach = intersection::parse_approach(j.at("approach").get<std::string>());
    v.movement = intersection::parse_movement(j.at("movement").get<std::string>());
    v.entry_time = num(j, "entry_time", where);
    v.speed = num(j, "speed", where);
    if (j.contains("lane")) {
      if (!j.at("lane").is_number_integer()) {
        throw Error(ErrorKind::Schema, where + ": 'lane' must be an integer");
      }
      v.lane = j.at("lane").get<int>();
    }
    script.push_back(v);
  }
  std::optional<SimConfig> sim;
  if (doc.contains("sim")) {
    const auto& s = doc.at("sim");
    SimConfig cfg;
    cfg.frame_rate = num_or(s, "frame_rate", cfg.frame_rate, "sim");
    cfg.dropout = num_or(s, "dropout", cfg.dropout, "sim");
    cfg.noise_sigma = num_or(s, "noise_sigma", cfg.noise_sigma, "sim");
    cfg.length_sigma = num_or(s, "length_sigma", cfg.length_sigma, "sim");
    if (s.contains("sensors")) {
      cfg.sensors.clear();
      for (const auto& sj : s.at("sensors")) {
        SensorSpec spec;
        if (!sj.contains("frame_id") || !sj.at("frame_id").is_string()) {
          throw Error(ErrorKind::Schema, "sim.sensors: 'frame_id' is required");
        }
        spec.frame_id = sj.at("frame_id").get<std::string>();
        spec.north = num(sj, "north", "sim.sensors");
        spec.east = num(sj, "east", "sim.sensors");
        spec.mount_height = num_or(sj, "mount_height", spec.mount_height, "sim.sensors");
        spec.yaw = num_or(sj, "yaw", spec.yaw, "sim.sensors");
        spec.visibility = num_or(sj, "visibility", spec.visibility, "sim.sensors");
        cfg.sensors.push_back(std::move(spec));
      }
    }
    sim = std::move(cfg);
  }
  return {std::move(script), std::move(sim)};
}

}  // namespace tmc::simgen
