#include "tmc/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

#include <json.hpp>

#include "tmc/error.hpp"
#include "tmc/text_util.hpp"

namespace tmc::ingest {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LineError {
  ErrorKind kind;
  std::string reason;
};

double require_number(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw LineError{ErrorKind::MalformedLine, std::string("missing numeric field '") + key + "'"};
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw LineError{ErrorKind::InvalidField, std::string("field '") + key + "' is not finite"};
  }
  return v;
}

double require_dimension(const json& obj, const char* key) {
  const double v = require_number(obj, key);
  if (v <= 0.0 || v >= kMaxDimension) {
    throw LineError{ErrorKind::InvalidField,
                    std::string("dimension '") + key + "' = " + text::format_double(v) +
                        " outside (0, 50) m"};
  }
  return v;
}

Frame parse_line(std::string_view line, const std::optional<std::string>& expected_id) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error&) {
    throw LineError{ErrorKind::MalformedLine, "not valid JSON"};
  }
  if (!obj.is_object()) {
    throw LineError{ErrorKind::MalformedLine, "line is not a JSON object"};
  }
  Frame frame;
  frame.t = require_number(obj, "t");
  auto id = obj.find("frame_id");
  if (id == obj.end() || !id->is_string()) {
    throw LineError{ErrorKind::MalformedLine, "missing string field 'frame_id'"};
  }
  frame.frame_id = id->get<std::string>();
  if (frame.frame_id.empty()) {
    throw LineError{ErrorKind::InvalidField, "empty frame_id"};
  }
  if (expected_id && frame.frame_id != *expected_id) {
    throw LineError{ErrorKind::InvalidField,
                    "frame_id '" + frame.frame_id + "' differs from '" + *expected_id + "'"};
  }
  auto dets = obj.find("detections");
  if (dets == obj.end() || !dets->is_array()) {
    throw LineError{ErrorKind::MalformedLine, "missing array field 'detections'"};
  }
  frame.detections.reserve(dets->size());
  for (const auto& d : *dets) {
    if (!d.is_object()) {
      throw LineError{ErrorKind::MalformedLine, "detection is not an object"};
    }
    DetectionRecord rec;
    rec.frame_id = frame.frame_id;
    rec.t = frame.t;
    rec.center = {require_number(d, "x"), require_number(d, "y"), require_number(d, "z")};
    rec.length = require_dimension(d, "l");
    rec.width = require_dimension(d, "w");
    rec.height = require_dimension(d, "h");
    rec.heading = wrap_angle(require_number(d, "yaw"));
    auto score = d.find("score");
    if (score != d.end() && !score->is_null()) {
      if (!score->is_number()) {
        throw LineError{ErrorKind::MalformedLine, "'score' is not numeric"};
      }
      const double s = score->get<double>();
      if (!(s >= 0.0 && s <= 1.0)) {
        throw LineError{ErrorKind::InvalidField, "score outside [0, 1]"};
      }
      rec.score = s;
    }
    frame.detections.push_back(std::move(rec));
  }
  return frame;
}

}  // namespace

double wrap_angle(double rad) {
  if (rad > -std::numbers::pi && rad <= std::numbers::pi) {
    return rad;
  }
  double r = std::remainder(rad, kTwoPi);
  if (r <= -std::numbers::pi) {
    r += kTwoPi;
  }
  return r;
}

ParseResult parse_detection_log(std::string_view source,
                                const std::optional<std::string>& frame_id,
                                MalformedPolicy policy) {
  ParseResult result;
  std::optional<std::string> expected = frame_id;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < source.size()) {
    auto end = source.find('\n', start);
    if (end == std::string_view::npos) {
      end = source.size();
    }
    const auto line = text::trim(source.substr(start, end - start));
    start = end + 1;
    ++lineno;
    if (line.empty()) {
      continue;
    }
    try {
      Frame f = parse_line(line, expected);
      if (!expected) {
        expected = f.frame_id;
      }
      if (!result.frames.empty() && result.frames.back().t == f.t) {
        auto& dst = result.frames.back().detections;
        dst.insert(dst.end(), std::make_move_iterator(f.detections.begin()),
                   std::make_move_iterator(f.detections.end()));
      } else {
        result.frames.push_back(std::move(f));
      }
    } catch (const LineError& e) {
      if (policy == MalformedPolicy::Abort) {
        throw ParseError(e.kind, lineno, e.reason);
      }
      result.skipped.push_back({lineno, e.reason});
    }
  }
  return result;
}

std::string serialize_frame(const Frame& frame) {
  nlohmann::ordered_json obj;
  obj["t"] = frame.t;
  obj["frame_id"] = frame.frame_id;
  auto dets = nlohmann::ordered_json::array();
  for (const auto& d : frame.detections) {
    nlohmann::ordered_json j;
    j["x"] = d.center.x();
    j["y"] = d.center.y();
    j["z"] = d.center.z();
    j["l"] = d.length;
    j["w"] = d.width;
    j["h"] = d.height;
    j["yaw"] = d.heading;
    if (d.score) {
      j["score"] = *d.score;
    }
    dets.push_back(std::move(j));
  }
  obj["detections"] = std::move(dets);
  return obj.dump();
}

std::string serialize_log(const std::vector<Frame>& frames) {
  std::string out;
  for (const auto& f : frames) {
    out += serialize_frame(f);
    out += '\n';
  }
  return out;
}

MergedStream merge_streams(const std::vector<std::vector<Frame>>& streams,
                           double reorder_window) {
  if (!(reorder_window >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "reorder window must be nonnegative");
  }
  struct Key {
    double t;
    const std::string* frame_id;
    std::size_t stream;
    std::size_t index;
  };
  std::vector<Key> keys;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    double high = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < streams[s].size(); ++i) {
      const Frame& f = streams[s][i];
      if (f.t < high - reorder_window) {
        throw Error(ErrorKind::OutOfOrder,
                    "sensor '" + f.frame_id + "' frame at t=" + text::format_double(f.t) +
                        " is more than " + text::format_double(reorder_window) +
                        " s behind t=" + text::format_double(high));
      }
      high = std::max(high, f.t);
      keys.push_back({f.t, &f.frame_id, s, i});
    }
  }
  std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return std::tie(a.t, *a.frame_id) < std::tie(b.t, *b.frame_id);
  });
  MergedStream out;
  out.frames.reserve(keys.size());
  for (const auto& k : keys) {
    out.frames.push_back(streams[k.stream][k.index]);
  }
  return out;
}

NedStream frames_to_ned(const MergedStream& stream, const geo::FrameRegistry& registry) {
  std::map<std::string, geo::RigidTransform> cache;
  NedStream out;
  out.frames.reserve(stream.frames.size());
  for (const auto& f : stream.frames) {
    auto it = cache.find(f.frame_id);
    if (it == cache.end()) {
      it = cache.emplace(f.frame_id, registry.sensor_to_ned(f.frame_id)).first;
    }
    const geo::RigidTransform& to_ned = it->second;
    NedFrame nf{f.frame_id, f.t, {}};
    nf.detections.reserve(f.detections.size());
    for (const auto& d : f.detections) {
      const Eigen::Vector3d dir =
          to_ned.rotation() * Eigen::Vector3d(std::cos(d.heading), std::sin(d.heading), 0.0);
      nf.detections.push_back({d.frame_id, d.t, geo::NedPoint::from(to_ned.apply(d.center)),
                               d.length, d.width, d.height,
                               wrap_angle(std::atan2(dir.y(), dir.x())), d.score});
    }
    out.frames.push_back(std::move(nf));
  }
  return out;
}

}  // namespace tmc::ingest
