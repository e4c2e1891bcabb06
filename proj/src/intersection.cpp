#include "tmc/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <json.hpp>

#include "tmc/error.hpp"
#include "tmc/text_util.hpp"

namespace tmc::counting {

void CountingParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvariantViolation, "counting params: " + what);
  };
  if (!(min_headway_right > 0.0) || !(min_headway_other > 0.0) || !std::isfinite(min_headway_right)) {
    fail("headways must be positive");
  }
  if (!(cluster_gap >= 0.0) || !(dedup_window >= 0.0) || !std::isfinite(dedup_window)) {
    fail("cluster_gap and dedup_window must be nonnegative");
  }
  if (!(cluster_gap < min_headway_other)) {
    fail("cluster_gap must be below min_headway_other");
  }
  if (!(min_headway_other <= min_headway_right)) {
    fail("min_headway_other must not exceed min_headway_right");
  }
}

}  // namespace tmc::counting

namespace tmc::intersection {

namespace {

constexpr double kContainmentTolerance = 1e-9;

}  // namespace

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::NB: return "NB";
    case Approach::SB: return "SB";
    case Approach::EB: return "EB";
    case Approach::WB: return "WB";
  }
  return "?";
}

std::string_view to_string(Movement m) {
  switch (m) {
    case Movement::Left: return "Left";
    case Movement::Thru: return "Thru";
    case Movement::Right: return "Right";
    case Movement::UTurn: return "UTurn";
  }
  return "?";
}

Approach parse_approach(std::string_view s) {
  for (auto a : kApproaches) {
    if (to_string(a) == s) {
      return a;
    }
  }
  throw Error(ErrorKind::Schema, "unknown approach '" + std::string(s) + "'");
}

Movement parse_movement(std::string_view s) {
  for (auto m : kMovements) {
    if (to_string(m) == s) {
      return m;
    }
  }
  throw Error(ErrorKind::Schema, "unknown movement '" + std::string(s) + "'");
}

double approach_heading(Approach a) {
  switch (a) {
    case Approach::NB: return 0.0;
    case Approach::EB: return std::numbers::pi / 2;
    case Approach::SB: return std::numbers::pi;
    case Approach::WB: return -std::numbers::pi / 2;
  }
  return 0.0;
}

bool Zone::binds(const Binding& b) const {
  return std::find(bindings.begin(), bindings.end(), b) != bindings.end();
}

bool Zone::right_bound() const {
  return !bindings.empty() && std::all_of(bindings.begin(), bindings.end(), [](const Binding& b) {
    return b.movement == Movement::Right;
  });
}

bool point_in_zone(const geo::NedPoint& p, const Zone& z) {
  const double dn = p.north - z.center.north;
  const double de = p.east - z.center.east;
  const double c = std::cos(z.yaw);
  const double s = std::sin(z.yaw);
  const double u = dn * c + de * s;
  const double v = -dn * s + de * c;
  return std::abs(u) <= z.half_length + kContainmentTolerance &&
         std::abs(v) <= z.half_width + kContainmentTolerance;
}

PhaseSchedule::PhaseSchedule(std::vector<PhaseInterval> intervals)
    : intervals_(std::move(intervals)) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    const std::string name = "schedule interval " + std::to_string(i);
    if (!std::isfinite(iv.start) || !std::isfinite(iv.end) || !(iv.start < iv.end)) {
      throw Error(ErrorKind::InvariantViolation, name + " must have start < end");
    }
    if (i > 0 && iv.start < intervals_[i - 1].end) {
      throw Error(ErrorKind::InvariantViolation,
                  name + " overlaps or precedes interval " + std::to_string(i - 1));
    }
    std::set<Binding> seen;
    for (const auto& b : iv.permitted) {
      if (!seen.insert(b).second) {
        throw Error(ErrorKind::InvariantViolation, name + " lists a movement twice");
      }
    }
  }
}

double PhaseSchedule::session_start() const {
  if (intervals_.empty()) {
    throw Error(ErrorKind::TimeOutsideSchedule, "schedule is empty");
  }
  return intervals_.front().start;
}

double PhaseSchedule::session_end() const {
  if (intervals_.empty()) {
    throw Error(ErrorKind::TimeOutsideSchedule, "schedule is empty");
  }
  return intervals_.back().end;
}

bool PhaseSchedule::in_session(double t) const {
  return !intervals_.empty() && t >= intervals_.front().start && t < intervals_.back().end;
}

bool permissible(Approach a, Movement m, double t, const PhaseSchedule& s) {
  if (m == Movement::Right) {
    return true;
  }
  if (!s.in_session(t)) {
    throw Error(ErrorKind::TimeOutsideSchedule,
                "t=" + text::format_double(t) + " is outside the signal schedule");
  }
  const auto& ivs = s.intervals();
  auto it = std::upper_bound(ivs.begin(), ivs.end(), t,
                             [](double v, const PhaseInterval& iv) { return v < iv.start; });
  if (it == ivs.begin()) {
    return false;
  }
  --it;
  if (t >= it->end) {
    return false;
  }
  return std::find(it->permitted.begin(), it->permitted.end(), Binding{a, m}) !=
         it->permitted.end();
}

void IntersectionConfig::validate() const {
  std::set<std::string> ids;
  for (const auto& z : zones) {
    const std::string name = "zone '" + z.id + "'";
    if (z.id.empty()) {
      throw Error(ErrorKind::InvariantViolation, "zone with empty id");
    }
    if (!ids.insert(z.id).second) {
      throw Error(ErrorKind::InvariantViolation, name + " is declared twice");
    }
    if (!(z.half_length > 0.0) || !(z.half_width > 0.0) || !std::isfinite(z.half_length) ||
        !std::isfinite(z.half_width)) {
      throw Error(ErrorKind::InvariantViolation, name + " must have positive half sizes");
    }
    if (!std::isfinite(z.yaw) || !z.center.vec().allFinite()) {
      throw Error(ErrorKind::InvariantViolation, name + " has non-finite geometry");
    }
    if (z.bindings.empty()) {
      throw Error(ErrorKind::InvariantViolation, name + " has no bindings");
    }
    std::set<Binding> seen(z.bindings.begin(), z.bindings.end());
    if (seen.size() != z.bindings.size()) {
      throw Error(ErrorKind::InvariantViolation, name + " lists a binding twice");
    }
    if (z.right_surrogate) {
      if (z.kind != ZoneKind::Egress) {
        throw Error(ErrorKind::MisconfiguredSurrogate, name + ": only egress zones can count rights");
      }
      if (z.bindings.size() != 1 || z.bindings.front().movement != Movement::Right) {
        throw Error(ErrorKind::MisconfiguredSurrogate,
                    name + ": a right-turn surrogate must bind exactly one right turn");
      }
    }
  }
  for (const auto& z : zones) {
    for (const auto& b : z.bindings) {
      const bool counted = std::any_of(zones.begin(), zones.end(), [&](const Zone& other) {
        return other.binds(b) && (other.kind == ZoneKind::Ingress || other.right_surrogate);
      });
      if (!counted) {
        throw Error(ErrorKind::InvariantViolation,
                    "zone '" + z.id + "': " + std::string(to_string(b.approach)) + "-" +
                        std::string(to_string(b.movement)) +
                        " has no ingress zone or right-turn surrogate");
      }
    }
  }
  params.validate();
}

const Zone& IntersectionConfig::zone(std::string_view id) const {
  for (const auto& z : zones) {
    if (z.id == id) {
      return z;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "no zone '" + std::string(id) + "'");
}

std::vector<std::string> IntersectionConfig::shared_left_uturn_zones() const {
  std::vector<std::string> out;
  for (const auto& z : zones) {
    if (z.kind != ZoneKind::Ingress) {
      continue;
    }
    for (auto a : kApproaches) {
      if (z.binds({a, Movement::Left}) && z.binds({a, Movement::UTurn})) {
        out.push_back(z.id);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorKind::Schema, where + ": missing field '" + key + "'");
  }
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number()) {
    throw Error(ErrorKind::Schema, where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) {
    throw Error(ErrorKind::Schema, where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<Binding> bindings_from(const json& arr, const std::string& where) {
  if (!arr.is_array()) {
    throw Error(ErrorKind::Schema, where + ": bindings must be an array");
  }
  std::vector<Binding> out;
  for (const auto& b : arr) {
    if (!b.is_array() || b.size() != 2 || !b[0].is_string() || !b[1].is_string()) {
      throw Error(ErrorKind::Schema, where + ": binding must be [approach, movement]");
    }
    out.push_back({parse_approach(b[0].get<std::string>()), parse_movement(b[1].get<std::string>())});
  }
  return out;
}

ojson bindings_to(const std::vector<Binding>& bs) {
  auto arr = ojson::array();
  for (const auto& b : bs) {
    arr.push_back({std::string(to_string(b.approach)), std::string(to_string(b.movement))});
  }
  return arr;
}

}  // namespace

IntersectionConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorKind::Schema, "config must be a JSON object");
  }
  IntersectionConfig cfg;
  {
    const auto& o = field(doc, "ned_origin", "config");
    try {
      cfg.ned_origin = {number(o, "lat", "ned_origin"), number(o, "lon", "ned_origin"),
                        number(o, "alt", "ned_origin")};
    } catch (const Error& e) {
      throw Error(ErrorKind::Schema, e.what());
    }
  }

  const auto& zones = field(doc, "zones", "config");
  if (!zones.is_array()) {
    throw Error(ErrorKind::Schema, "config: 'zones' must be an array");
  }
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const auto& zj = zones[i];
    std::string where = "zones[" + std::to_string(i) + "]";
    if (!zj.is_object()) {
      throw Error(ErrorKind::Schema, where + " must be an object");
    }
    Zone z;
    z.id = string_field(zj, "id", where);
    where = "zone '" + z.id + "'";
    const auto kind = string_field(zj, "kind", where);
    if (kind == "ingress") {
      z.kind = ZoneKind::Ingress;
    } else if (kind == "egress") {
      z.kind = ZoneKind::Egress;
    } else {
      throw Error(ErrorKind::Schema, where + ": kind must be 'ingress' or 'egress'");
    }
    const auto& c = field(zj, "center", where);
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      throw Error(ErrorKind::Schema, where + ": center must be [north, east]");
    }
    z.center = {c[0].get<double>(), c[1].get<double>(), 0.0};
    z.half_length = number_or(zj, "half_length", z.half_length, where);
    z.half_width = number_or(zj, "half_width", z.half_width, where);
    z.yaw = number_or(zj, "yaw", 0.0, where);
    z.bindings = bindings_from(field(zj, "bindings", where), where);
    if (zj.contains("right_surrogate")) {
      if (!zj.at("right_surrogate").is_boolean()) {
        throw Error(ErrorKind::Schema, where + ": right_surrogate must be a boolean");
      }
      z.right_surrogate = zj.at("right_surrogate").get<bool>();
    }
    cfg.zones.push_back(std::move(z));
  }

  std::vector<PhaseInterval> intervals;
  if (doc.contains("schedule")) {
    const auto& sched = doc.at("schedule");
    if (!sched.is_array()) {
      throw Error(ErrorKind::Schema, "config: 'schedule' must be an array");
    }
    for (std::size_t i = 0; i < sched.size(); ++i) {
      const std::string where = "schedule[" + std::to_string(i) + "]";
      const auto& ij = sched[i];
      if (!ij.is_object()) {
        throw Error(ErrorKind::Schema, where + " must be an object");
      }
      intervals.push_back({number(ij, "start", where), number(ij, "end", where),
                           bindings_from(field(ij, "permitted", where), where)});
    }
  }
  cfg.schedule = PhaseSchedule(std::move(intervals));

  if (doc.contains("params")) {
    const auto& p = doc.at("params");
    if (!p.is_object()) {
      throw Error(ErrorKind::Schema, "config: 'params' must be an object");
    }
    auto& cp = cfg.params;
    cp.min_headway_right = number_or(p, "min_headway_right", cp.min_headway_right, "params");
    cp.min_headway_other = number_or(p, "min_headway_other", cp.min_headway_other, "params");
    cp.cluster_gap = number_or(p, "cluster_gap", cp.cluster_gap, "params");
    cp.dedup_window = number_or(p, "dedup_window", cp.cluster_gap, "params");
    if (p.contains("absorb")) {
      if (!p.at("absorb").is_boolean()) {
        throw Error(ErrorKind::Schema, "params: absorb must be a boolean");
      }
      cp.absorb = p.at("absorb").get<bool>();
    }
  }

  if (doc.contains("classes")) {
    const auto& cl = doc.at("classes");
    if (!cl.is_array()) {
      throw Error(ErrorKind::Schema, "config: 'classes' must be an array");
    }
    std::vector<classify::VehicleClass> classes;
    for (std::size_t i = 0; i < cl.size(); ++i) {
      const std::string where = "classes[" + std::to_string(i) + "]";
      const auto& cj = cl[i];
      classify::VehicleClass vc;
      const auto& id = field(cj, "id", where);
      if (!id.is_number_integer()) {
        throw Error(ErrorKind::Schema, where + ": id must be an integer");
      }
      vc.id = id.get<int>();
      vc.label = cj.contains("label") ? string_field(cj, "label", where) : std::string();
      vc.lower = number(cj, "lower", where);
      const auto& up = field(cj, "upper", where);
      if (up.is_null()) {
        vc.upper = std::numeric_limits<double>::infinity();
      } else if (up.is_number()) {
        vc.upper = up.get<double>();
      } else {
        throw Error(ErrorKind::Schema, where + ": upper must be a number or null");
      }
      if (cj.contains("fhwa")) {
        for (const auto& f : cj.at("fhwa")) {
          if (!f.is_string()) {
            throw Error(ErrorKind::Schema, where + ": fhwa entries must be strings");
          }
          vc.fhwa.push_back(f.get<std::string>());
        }
      }
      classes.push_back(std::move(vc));
    }
    cfg.classes = classify::ClassTable(std::move(classes));
  }

  cfg.validate();
  return cfg;
}

std::string config_to_json(const IntersectionConfig& cfg) {
  ojson doc;
  doc["ned_origin"] = {{"lat", cfg.ned_origin.lat()},
                       {"lon", cfg.ned_origin.lon()},
                       {"alt", cfg.ned_origin.alt()}};
  auto zones = ojson::array();
  for (const auto& z : cfg.zones) {
    ojson zj;
    zj["id"] = z.id;
    zj["kind"] = z.kind == ZoneKind::Ingress ? "ingress" : "egress";
    zj["center"] = {z.center.north, z.center.east};
    zj["half_length"] = z.half_length;
    zj["half_width"] = z.half_width;
    zj["yaw"] = z.yaw;
    zj["bindings"] = bindings_to(z.bindings);
    zj["right_surrogate"] = z.right_surrogate;
    zones.push_back(std::move(zj));
  }
  doc["zones"] = std::move(zones);
  auto sched = ojson::array();
  for (const auto& iv : cfg.schedule.intervals()) {
    sched.push_back({{"start", iv.start}, {"end", iv.end}, {"permitted", bindings_to(iv.permitted)}});
  }
  doc["schedule"] = std::move(sched);
  const auto& p = cfg.params;
  doc["params"] = {{"min_headway_right", p.min_headway_right},
                   {"min_headway_other", p.min_headway_other},
                   {"cluster_gap", p.cluster_gap},
                   {"dedup_window", p.dedup_window},
                   {"absorb", p.absorb}};
  auto classes = ojson::array();
  for (const auto& c : cfg.classes.classes()) {
    ojson cj;
    cj["id"] = c.id;
    cj["label"] = c.label;
    cj["lower"] = c.lower;
    if (std::isinf(c.upper)) {
      cj["upper"] = nullptr;
    } else {
      cj["upper"] = c.upper;
    }
    cj["fhwa"] = c.fhwa;
    classes.push_back(std::move(cj));
  }
  doc["classes"] = std::move(classes);
  return doc.dump(2) + "\n";
}

IntersectionConfig load_intersection_config(const std::string& path) {
  return config_from_json(text::read_file(path));
}

IntersectionConfig reference_intersection() {
  using A = Approach;
  using M = Movement;
  constexpr double kPi = std::numbers::pi;
  IntersectionConfig cfg;
  cfg.ned_origin = {34.1216, -117.3907, 380.0};

  auto ingress = [](std::string id, double n, double e, double yaw, std::vector<Binding> b) {
    return Zone{std::move(id), ZoneKind::Ingress, {n, e, 0.0}, 4.0, 1.75, yaw, std::move(b), false};
  };
  auto egress = [](std::string id, double n, double e, double yaw, std::vector<Binding> b,
                   bool surrogate) {
    return Zone{std::move(id), ZoneKind::Egress, {n, e, 0.0}, 4.0, 1.75, yaw, std::move(b),
                surrogate};
  };
  cfg.zones = {
      ingress("NB_LU", -19.0, 1.75, 0.0, {{A::NB, M::Left}, {A::NB, M::UTurn}}),
      ingress("NB_T1", -19.0, 5.25, 0.0, {{A::NB, M::Thru}}),
      ingress("NB_T2", -19.0, 8.75, 0.0, {{A::NB, M::Thru}}),
      ingress("SB_LU", 19.0, -1.75, kPi, {{A::SB, M::Left}, {A::SB, M::UTurn}}),
      ingress("SB_T1", 19.0, -5.25, kPi, {{A::SB, M::Thru}}),
      ingress("SB_T2", 19.0, -8.75, kPi, {{A::SB, M::Thru}}),
      ingress("EB_LU", -1.75, -19.0, kPi / 2, {{A::EB, M::Left}, {A::EB, M::UTurn}}),
      ingress("EB_T", -5.25, -19.0, kPi / 2, {{A::EB, M::Thru}}),
      ingress("EB_R", -8.75, -19.0, kPi / 2, {{A::EB, M::Right}}),
      ingress("WB_LU", 1.75, 19.0, -kPi / 2, {{A::WB, M::Left}, {A::WB, M::UTurn}}),
      ingress("WB_T", 5.25, 19.0, -kPi / 2, {{A::WB, M::Thru}}),
      ingress("WB_R", 8.75, 19.0, -kPi / 2, {{A::WB, M::Right}}),
      egress("N_OUT", 19.0, 5.25, 0.0, {{A::NB, M::Thru}}, false),
      egress("S_OUT", -19.0, -5.25, kPi, {{A::SB, M::Thru}}, false),
      egress("E_OUT_NBR", -8.75, 22.0, kPi / 2, {{A::NB, M::Right}}, true),
      egress("W_OUT_SBR", 8.75, -22.0, -kPi / 2, {{A::SB, M::Right}}, true),
  };

  // 2024-03-20 13:51 to 14:10 local (UTC-7).
  const double start = 1710967860.0;
  const double end = start + 19.0 * 60.0;
  const double phase = 25.0;
  std::vector<PhaseInterval> intervals;
  for (int k = 0; start + k * phase < end; ++k) {
    const A a = kApproaches[static_cast<std::size_t>(k % 4)];
    intervals.push_back({start + k * phase, std::min(end, start + (k + 1) * phase),
                         {{a, M::Left}, {a, M::Thru}, {a, M::Right}, {a, M::UTurn}}});
  }
  cfg.schedule = PhaseSchedule(std::move(intervals));
  cfg.validate();
  return cfg;
}

}  // namespace tmc::intersection
