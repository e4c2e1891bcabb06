#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tmc/geo.hpp"

namespace tmc::ingest {

/// Detection dimensions must lie in (0, kMaxDimension) meters.
inline constexpr double kMaxDimension = 50.0;

/// One 3D bounding box in a sensor frame.
struct DetectionRecord {
  std::string frame_id;
  double t = 0.0;  ///< UNIX seconds
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double heading = 0.0;  ///< radians, (−π, π]
  std::optional<double> score;

  bool operator==(const DetectionRecord&) const = default;
};

struct Frame {
  std::string frame_id;
  double t = 0.0;
  std::vector<DetectionRecord> detections;

  bool operator==(const Frame&) const = default;
};

/// Frames from one or more sensors, nondecreasing in t, ties by frame_id.
struct MergedStream {
  std::vector<Frame> frames;
};

/// A detection after georeferencing into the intersection's NED frame.
struct NedDetection {
  std::string frame_id;
  double t = 0.0;
  geo::NedPoint center;
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double heading = 0.0;  ///< yaw about down, from north toward east
  std::optional<double> score;
};

struct NedFrame {
  std::string frame_id;
  double t = 0.0;
  std::vector<NedDetection> detections;
};

struct NedStream {
  std::vector<NedFrame> frames;
};

enum class MalformedPolicy { SkipAndLog, Abort };

struct ParseIssue {
  std::size_t line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<Frame> frames;
  std::vector<ParseIssue> skipped;
};

/// Wraps an angle into (−π, π].
double wrap_angle(double rad);

/// Parses a JSON-lines detection log. Consecutive lines with the same
/// timestamp are merged into one Frame. When `frame_id` is given, every line
/// must carry that id; otherwise the first line fixes it. Bad lines are
/// recorded in `skipped` or thrown as ParseError depending on `policy`.
ParseResult parse_detection_log(std::string_view source,
                                const std::optional<std::string>& frame_id = std::nullopt,
                                MalformedPolicy policy = MalformedPolicy::SkipAndLog);

/// One JSON line (without trailing newline) in the detection-log schema.
std::string serialize_frame(const Frame& frame);
std::string serialize_log(const std::vector<Frame>& frames);

/// Merges per-sensor sequences into one time-ordered stream. A frame earlier
/// than its own stream's running maximum by more than `reorder_window`
/// seconds throws Error(OutOfOrder).
MergedStream merge_streams(const std::vector<std::vector<Frame>>& streams,
                           double reorder_window = 1.0);

/// Maps every detection center sensor → ECEF → NED and rotates the heading
/// into a yaw about NED down. Grouping and dimensions are unchanged.
NedStream frames_to_ned(const MergedStream& stream, const geo::FrameRegistry& registry);

}  // namespace tmc::ingest
