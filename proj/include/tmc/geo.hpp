#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tmc::geo {

// WGS84 ellipsoid.
inline constexpr double kSemiMajor = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kSemiMinor = kSemiMajor * (1.0 - kFlattening);
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);

/// Tolerance on RᵀR = I and det(R) = 1 for every accepted rotation.
inline constexpr double kRotationTolerance = 1e-9;

/// Latitude/longitude in degrees, altitude in meters above the ellipsoid.
/// Construction validates the ranges, so a GeodeticPoint is always valid.
class GeodeticPoint {
 public:
  GeodeticPoint(double lat_deg, double lon_deg, double alt_m);

  double lat() const noexcept { return lat_; }
  double lon() const noexcept { return lon_; }
  double alt() const noexcept { return alt_; }

  bool operator==(const GeodeticPoint&) const = default;

 private:
  double lat_;
  double lon_;
  double alt_;
};

struct EcefPoint {
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();

  EcefPoint() = default;
  explicit EcefPoint(const Eigen::Vector3d& v);
  EcefPoint(double x, double y, double z) : EcefPoint(Eigen::Vector3d(x, y, z)) {}
};

struct NedPoint {
  double north = 0.0;
  double east = 0.0;
  double down = 0.0;

  Eigen::Vector3d vec() const { return {north, east, down}; }
  static NedPoint from(const Eigen::Vector3d& v);

  bool operator==(const NedPoint&) const = default;
};

struct SensorPoint {
  std::string frame_id;
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
};

/// Proper rigid motion p ↦ R·p + t. The rotation is checked on construction.
class RigidTransform {
 public:
  RigidTransform();
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform rotation_only(const Eigen::Matrix3d& rotation) {
    return {rotation, Eigen::Vector3d::Zero()};
  }

  const Eigen::Matrix3d& rotation() const noexcept { return rotation_; }
  const Eigen::Vector3d& translation() const noexcept { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation_ * p + translation_; }

  /// 4×4 homogeneous form [R t; 0 1].
  Eigen::Matrix4d homogeneous() const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

/// Returns the transform that applies `second` after `first`: p ↦ second(first(p)).
RigidTransform compose(const RigidTransform& second, const RigidTransform& first);
RigidTransform invert(const RigidTransform& t);

/// True when `r` is orthonormal with determinant +1 within `tol`.
bool is_rotation(const Eigen::Matrix3d& r, double tol = kRotationTolerance);

EcefPoint lla_to_ecef(const GeodeticPoint& p);
EcefPoint lla_to_ecef(double lat_deg, double lon_deg, double alt_m);

/// Inverse of lla_to_ecef. At the poles the longitude is reported as 0.
/// Throws Error(DegenerateOrigin) for points within 1 mm of the Earth's center.
GeodeticPoint ecef_to_lla(const EcefPoint& p);

/// Rotation taking ECEF vectors into the local North-East-Down frame at `origin`.
RigidTransform ned_rotation(const GeodeticPoint& origin);

EcefPoint sensor_to_ecef(const SensorPoint& p, const RigidTransform& sensor_to_ecef);

/// Sensor frames registered against ECEF plus the local NED origin.
class FrameRegistry {
 public:
  FrameRegistry() = default;

  void register_frame(const std::string& frame_id, const RigidTransform& sensor_to_ecef);
  bool has_frame(const std::string& frame_id) const;
  const RigidTransform& transform(const std::string& frame_id) const;
  const std::map<std::string, RigidTransform>& frames() const noexcept { return frames_; }

  /// The origin may be set once; a second call throws Error(OriginAlreadySet).
  void set_ned_origin(const GeodeticPoint& origin);
  const std::optional<GeodeticPoint>& ned_origin() const noexcept { return ned_origin_; }

  /// Sensor frame → NED, composed so large ECEF magnitudes cancel once per
  /// sensor instead of per point.
  RigidTransform sensor_to_ned(const std::string& frame_id) const;

  EcefPoint to_ecef(const SensorPoint& p) const;

 private:
  std::map<std::string, RigidTransform> frames_;
  std::optional<GeodeticPoint> ned_origin_;
};

/// P_N = R_NE (P_E − P_E,ref). Throws Error(OriginUnset) without an origin.
NedPoint ecef_to_ned(const EcefPoint& p, const FrameRegistry& registry);
NedPoint ecef_to_ned(const EcefPoint& p, const GeodeticPoint& origin);
EcefPoint ned_to_ecef(const NedPoint& p, const GeodeticPoint& origin);

struct GcpPair {
  SensorPoint sensor;
  EcefPoint ecef;
};

struct GcpFit {
  RigidTransform transform;
  double rmse = 0.0;
};

/// Least-squares rigid registration of sensor points onto their surveyed ECEF
/// positions (centroid alignment + SVD of the cross-covariance with reflection
/// correction). Needs at least three pairs whose sensor points are not collinear.
GcpFit estimate_transform_from_gcps(const std::vector<GcpPair>& pairs);

/// Rotation angle in radians between two rotations, accurate near zero.
double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

// Persistence.
FrameRegistry registry_from_json(const std::string& text);
std::string registry_to_json(const FrameRegistry& registry);

/// GCP correspondence CSV: header `frame_id,sx,sy,sz,lat,lon,alt`.
std::vector<GcpPair> parse_gcp_csv(const std::string& text);

}  // namespace tmc::geo
