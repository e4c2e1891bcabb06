#include "tmc/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tmc/error.hpp"

namespace tmc::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

bool finite3(const Eigen::Vector3d& v) { return v.allFinite(); }

// sin/cos of a latitude in degrees, exact at the poles and the equator.
void lat_sincos(double lat_deg, double& s, double& c) {
  if (lat_deg == 90.0 || lat_deg == -90.0) {
    s = lat_deg > 0 ? 1.0 : -1.0;
    c = 0.0;
    return;
  }
  s = std::sin(lat_deg * kDegToRad);
  c = std::cos(lat_deg * kDegToRad);
}

}  // namespace

GeodeticPoint::GeodeticPoint(double lat_deg, double lon_deg, double alt_m)
    : lat_(lat_deg), lon_(lon_deg), alt_(alt_m) {
  if (!std::isfinite(lat_deg) || lat_deg < -90.0 || lat_deg > 90.0) {
    throw Error(ErrorKind::InvalidArgument, "latitude out of [-90, 90]");
  }
  if (!std::isfinite(lon_deg) || lon_deg <= -180.0 || lon_deg > 180.0) {
    throw Error(ErrorKind::InvalidArgument, "longitude out of (-180, 180]");
  }
  if (!std::isfinite(alt_m)) {
    throw Error(ErrorKind::InvalidArgument, "altitude is not finite");
  }
}

EcefPoint::EcefPoint(const Eigen::Vector3d& v) : xyz(v) {
  if (!finite3(v)) {
    throw Error(ErrorKind::InvalidArgument, "ECEF point has non-finite component");
  }
}

NedPoint NedPoint::from(const Eigen::Vector3d& v) {
  if (!finite3(v)) {
    throw Error(ErrorKind::InvalidArgument, "NED point has non-finite component");
  }
  return {v.x(), v.y(), v.z()};
}

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
  if (!r.allFinite()) {
    return false;
  }
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

RigidTransform::RigidTransform()
    : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation)) {
    throw Error(ErrorKind::InvalidArgument,
                "rotation is not orthonormal with determinant +1");
  }
  if (!finite3(translation)) {
    throw Error(ErrorKind::InvalidArgument, "translation has non-finite component");
  }
}

Eigen::Matrix4d RigidTransform::homogeneous() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform compose(const RigidTransform& second, const RigidTransform& first) {
  return {second.rotation() * first.rotation(),
          second.rotation() * first.translation() + second.translation()};
}

RigidTransform invert(const RigidTransform& t) {
  Eigen::Matrix3d rt = t.rotation().transpose();
  return {rt, -(rt * t.translation())};
}

EcefPoint lla_to_ecef(const GeodeticPoint& p) {
  double s = 0.0;
  double c = 0.0;
  lat_sincos(p.lat(), s, c);
  const double lon = p.lon() * kDegToRad;
  const double n = kSemiMajor / std::sqrt(1.0 - kEccentricitySq * s * s);
  return EcefPoint((n + p.alt()) * c * std::cos(lon), (n + p.alt()) * c * std::sin(lon),
                   (n * (1.0 - kEccentricitySq) + p.alt()) * s);
}

EcefPoint lla_to_ecef(double lat_deg, double lon_deg, double alt_m) {
  return lla_to_ecef(GeodeticPoint(lat_deg, lon_deg, alt_m));
}

GeodeticPoint ecef_to_lla(const EcefPoint& e) {
  const double x = e.xyz.x();
  const double y = e.xyz.y();
  const double z = e.xyz.z();
  if (e.xyz.norm() < 1e-3) {
    throw Error(ErrorKind::DegenerateOrigin, "ECEF point too close to the Earth's center");
  }
  const double p = std::hypot(x, y);
  double lon = 0.0;
  if (p > 1e-9) {
    lon = std::atan2(y, x) * kRadToDeg;
    if (lon <= -180.0) {
      lon += 360.0;
    }
  }

  // Fixed-point iteration on latitude; converges to machine precision in a few
  // steps for any point outside the Earth's core.
  double lat = std::atan2(z, p * (1.0 - kEccentricitySq));
  double n = kSemiMajor;
  for (int i = 0; i < 30; ++i) {
    const double s = std::sin(lat);
    n = kSemiMajor / std::sqrt(1.0 - kEccentricitySq * s * s);
    const double next = std::atan2(z + kEccentricitySq * n * s, p);
    const bool done = std::abs(next - lat) < 1e-15;
    lat = next;
    if (done) {
      break;
    }
  }
  const double s = std::sin(lat);
  n = kSemiMajor / std::sqrt(1.0 - kEccentricitySq * s * s);
  const double alt = p * std::cos(lat) + z * s - kSemiMajor * kSemiMajor / n;
  const double lat_deg = std::clamp(lat * kRadToDeg, -90.0, 90.0);
  return {lat_deg, lon, alt};
}

RigidTransform ned_rotation(const GeodeticPoint& origin) {
  double sl = 0.0;
  double cl = 0.0;
  lat_sincos(origin.lat(), sl, cl);
  const double lon = origin.lon() * kDegToRad;
  const double so = std::sin(lon);
  const double co = std::cos(lon);
  Eigen::Matrix3d r;
  r << -sl * co, -sl * so, cl,
       -so,       co,      0.0,
       -cl * co, -cl * so, -sl;
  return RigidTransform::rotation_only(r);
}

EcefPoint sensor_to_ecef(const SensorPoint& p, const RigidTransform& t) {
  return EcefPoint(t.apply(p.xyz));
}

NedPoint ecef_to_ned(const EcefPoint& p, const GeodeticPoint& origin) {
  const Eigen::Vector3d ref = lla_to_ecef(origin).xyz;
  return NedPoint::from(ned_rotation(origin).rotation() * (p.xyz - ref));
}

NedPoint ecef_to_ned(const EcefPoint& p, const FrameRegistry& registry) {
  if (!registry.ned_origin()) {
    throw Error(ErrorKind::OriginUnset, "NED origin has not been set");
  }
  return ecef_to_ned(p, *registry.ned_origin());
}

EcefPoint ned_to_ecef(const NedPoint& p, const GeodeticPoint& origin) {
  const Eigen::Vector3d ref = lla_to_ecef(origin).xyz;
  return EcefPoint(ned_rotation(origin).rotation().transpose() * p.vec() + ref);
}

double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const double chord = (a - b).norm() / (2.0 * std::numbers::sqrt2);
  return 2.0 * std::asin(std::min(1.0, chord));
}

GcpFit estimate_transform_from_gcps(const std::vector<GcpPair>& pairs) {
  const std::size_t n = pairs.size();
  if (n < 3) {
    throw Error(ErrorKind::InsufficientPoints,
                "need at least 3 ground control points, got " + std::to_string(n));
  }

  // Work relative to the first pair so ECEF magnitudes (~6.4e6 m) never enter
  // the covariance or residual arithmetic.
  const Eigen::Vector3d sensor0 = pairs.front().sensor.xyz;
  const Eigen::Vector3d ecef0 = pairs.front().ecef.xyz;
  Eigen::Matrix3Xd src(3, n);
  Eigen::Matrix3Xd dst(3, n);
  for (std::size_t i = 0; i < n; ++i) {
    src.col(static_cast<Eigen::Index>(i)) = pairs[i].sensor.xyz - sensor0;
    dst.col(static_cast<Eigen::Index>(i)) = pairs[i].ecef.xyz - ecef0;
  }
  const Eigen::Vector3d src_mean = src.rowwise().mean();
  const Eigen::Vector3d dst_mean = dst.rowwise().mean();
  src.colwise() -= src_mean;
  dst.colwise() -= dst_mean;

  Eigen::JacobiSVD<Eigen::Matrix3Xd> spread(src);
  const auto& sv = spread.singularValues();
  if (sv(0) <= 0.0 || sv(1) < 1e-6 * sv(0)) {
    throw Error(ErrorKind::CollinearConfiguration,
                "ground control points are collinear in the sensor frame");
  }

  const Eigen::Matrix3d cov = src * dst.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Vector3d d(1.0, 1.0, (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  const Eigen::Matrix3d r = v * d.asDiagonal() * u.transpose();

  // t = c_E − R c_L, assembled so the large ECEF offset is added last.
  const Eigen::Vector3d src_centroid = sensor0 + src_mean;
  const Eigen::Vector3d t = ecef0 + (dst_mean - r * src_centroid);

  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    sq += (r * src.col(c) - dst.col(c)).squaredNorm();
  }
  return {RigidTransform(r, t), std::sqrt(sq / static_cast<double>(n))};
}

}  // namespace tmc::geo
