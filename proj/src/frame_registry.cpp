#include <array>
#include <cmath>

#include <json.hpp>

#include "tmc/error.hpp"
#include "tmc/geo.hpp"
#include "tmc/text_util.hpp"

namespace tmc::geo {

void FrameRegistry::register_frame(const std::string& frame_id,
                                   const RigidTransform& sensor_to_ecef) {
  if (frame_id.empty()) {
    throw Error(ErrorKind::InvalidArgument, "frame id must not be empty");
  }
  frames_.insert_or_assign(frame_id, sensor_to_ecef);
}

bool FrameRegistry::has_frame(const std::string& frame_id) const {
  return frames_.count(frame_id) != 0;
}

const RigidTransform& FrameRegistry::transform(const std::string& frame_id) const {
  auto it = frames_.find(frame_id);
  if (it == frames_.end()) {
    throw Error(ErrorKind::UnregisteredFrame, "frame '" + frame_id + "' is not registered");
  }
  return it->second;
}

void FrameRegistry::set_ned_origin(const GeodeticPoint& origin) {
  if (ned_origin_) {
    throw Error(ErrorKind::OriginAlreadySet, "NED origin is already set");
  }
  ned_origin_ = origin;
}

RigidTransform FrameRegistry::sensor_to_ned(const std::string& frame_id) const {
  const RigidTransform& to_ecef = transform(frame_id);
  if (!ned_origin_) {
    throw Error(ErrorKind::OriginUnset, "NED origin has not been set");
  }
  const RigidTransform r_ne = ned_rotation(*ned_origin_);
  const Eigen::Vector3d ref = lla_to_ecef(*ned_origin_).xyz;
  return {r_ne.rotation() * to_ecef.rotation(),
          r_ne.rotation() * (to_ecef.translation() - ref)};
}

EcefPoint FrameRegistry::to_ecef(const SensorPoint& p) const {
  return sensor_to_ecef(p, transform(p.frame_id));
}

namespace {

using nlohmann::json;

double number_at(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::Schema, std::string("missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> number_array(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != N) {
    throw Error(ErrorKind::Schema,
                std::string("field '") + key + "' must be an array of " + std::to_string(N));
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    const auto& e = j.at(key).at(static_cast<std::size_t>(i));
    if (!e.is_number()) {
      throw Error(ErrorKind::Schema, std::string("field '") + key + "' must be numeric");
    }
    v(i) = e.get<double>();
  }
  return v;
}

}  // namespace

FrameRegistry registry_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, std::string("registry is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorKind::Schema, "registry must be a JSON object");
  }
  FrameRegistry reg;
  if (doc.contains("ned_origin") && !doc.at("ned_origin").is_null()) {
    const auto& o = doc.at("ned_origin");
    reg.set_ned_origin({number_at(o, "lat"), number_at(o, "lon"), number_at(o, "alt")});
  }
  if (doc.contains("frames")) {
    if (!doc.at("frames").is_object()) {
      throw Error(ErrorKind::Schema, "'frames' must be an object");
    }
    for (const auto& [id, f] : doc.at("frames").items()) {
      const auto rot = number_array<9>(f, "rotation");
      const auto trans = number_array<3>(f, "translation");
      Eigen::Matrix3d r;
      r << rot(0), rot(1), rot(2), rot(3), rot(4), rot(5), rot(6), rot(7), rot(8);
      try {
        reg.register_frame(id, RigidTransform(r, trans));
      } catch (const Error& e) {
        throw Error(ErrorKind::InvariantViolation, "frame '" + id + "': " + e.what());
      }
    }
  }
  return reg;
}

std::string registry_to_json(const FrameRegistry& registry) {
  nlohmann::ordered_json doc;
  if (registry.ned_origin()) {
    const auto& o = *registry.ned_origin();
    doc["ned_origin"] = {{"lat", o.lat()}, {"lon", o.lon()}, {"alt", o.alt()}};
  } else {
    doc["ned_origin"] = nullptr;
  }
  doc["frames"] = nlohmann::ordered_json::object();
  for (const auto& [id, t] : registry.frames()) {
    auto rot = nlohmann::ordered_json::array();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        rot.push_back(t.rotation()(r, c));
      }
    }
    const auto& tr = t.translation();
    doc["frames"][id] = {{"rotation", rot}, {"translation", {tr.x(), tr.y(), tr.z()}}};
  }
  return doc.dump(2) + "\n";
}

std::vector<GcpPair> parse_gcp_csv(const std::string& text) {
  std::vector<GcpPair> out;
  const auto lines = text::split(text, '\n');
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    const std::size_t lineno = i + 1;
    if (line.empty()) {
      continue;
    }
    if (!header_seen) {
      if (line != "frame_id,sx,sy,sz,lat,lon,alt") {
        throw ParseError(ErrorKind::Schema, lineno,
                         "expected header frame_id,sx,sy,sz,lat,lon,alt");
      }
      header_seen = true;
      continue;
    }
    const auto cols = text::split(line, ',');
    if (cols.size() != 7) {
      throw ParseError(ErrorKind::MalformedLine, lineno, "expected 7 columns");
    }
    std::array<double, 6> v{};
    for (std::size_t c = 0; c < 6; ++c) {
      if (!text::parse_double(cols[c + 1], v[c]) || !std::isfinite(v[c])) {
        throw ParseError(ErrorKind::InvalidField, lineno, "column " + std::to_string(c + 2) +
                                                              " is not a finite number");
      }
    }
    const auto id = std::string(text::trim(cols[0]));
    if (id.empty()) {
      throw ParseError(ErrorKind::InvalidField, lineno, "empty frame_id");
    }
    try {
      out.push_back({SensorPoint{id, {v[0], v[1], v[2]}}, lla_to_ecef(v[3], v[4], v[5])});
    } catch (const Error& e) {
      throw ParseError(ErrorKind::InvalidField, lineno, e.what());
    }
  }
  return out;
}

}  // namespace tmc::geo
