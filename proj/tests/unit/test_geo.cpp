#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "tmc/error.hpp"
#include "tmc/geo.hpp"

using namespace tmc;
using namespace tmc::geo;

namespace {

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
}

RigidTransform random_transform(std::mt19937_64& rng, double spread = 100.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  return {random_rotation(rng), Eigen::Vector3d(u(rng), u(rng), u(rng))};
}

Eigen::Vector3d random_point(std::mt19937_64& rng, double spread = 50.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  return {u(rng), u(rng), u(rng)};
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no tmc::Error thrown";
  return ErrorKind::InvariantViolation;
}

}  // namespace

TEST(GeodeticPoint, RejectsOutOfRange) {
  EXPECT_THROW(GeodeticPoint(90.5, 0, 0), Error);
  EXPECT_THROW(GeodeticPoint(0, 181, 0), Error);
  EXPECT_THROW(GeodeticPoint(std::nan(""), 0, 0), Error);
  EXPECT_THROW(GeodeticPoint(0, -180, 0), Error);
  EXPECT_NO_THROW(GeodeticPoint(-90, 180, -100));
}

TEST(LlaToEcef, EquatorPrimeMeridian) {
  const auto p = lla_to_ecef(0, 0, 0);
  EXPECT_DOUBLE_EQ(p.xyz.x(), 6378137.0);
  EXPECT_NEAR(p.xyz.y(), 0.0, 1e-9);
  EXPECT_NEAR(p.xyz.z(), 0.0, 1e-9);
}

TEST(LlaToEcef, NorthPoleIsSemiMinorAxis) {
  const auto p = lla_to_ecef(90, 0, 0);
  EXPECT_NEAR(p.xyz.x(), 0.0, 1e-9);
  EXPECT_NEAR(p.xyz.y(), 0.0, 1e-9);
  EXPECT_NEAR(p.xyz.z(), kSemiMinor, 1e-9);
  EXPECT_NEAR(kSemiMinor, 6356752.314245, 1e-6);
}

TEST(EcefToLla, InvertsTrivialCases) {
  const auto eq = ecef_to_lla(EcefPoint(6378137.0, 0, 0));
  EXPECT_NEAR(eq.lat(), 0.0, 1e-12);
  EXPECT_NEAR(eq.lon(), 0.0, 1e-12);
  EXPECT_NEAR(eq.alt(), 0.0, 1e-6);

  const auto pole = ecef_to_lla(EcefPoint(0, 0, kSemiMinor));
  EXPECT_NEAR(pole.lat(), 90.0, 1e-12);
  EXPECT_EQ(pole.lon(), 0.0);
  EXPECT_NEAR(pole.alt(), 0.0, 1e-6);

  const auto south = ecef_to_lla(EcefPoint(0, 0, -kSemiMinor - 10.0));
  EXPECT_NEAR(south.lat(), -90.0, 1e-12);
  EXPECT_NEAR(south.alt(), 10.0, 1e-6);
}

TEST(EcefToLla, DegenerateOrigin) {
  EXPECT_EQ(kind_of([] { ecef_to_lla(EcefPoint(0, 0, 0)); }), ErrorKind::DegenerateOrigin);
}

TEST(EcefToLla, RoundTripThousandSamples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-89.9, 89.9);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  std::uniform_real_distribution<double> alt(-500.0, 10000.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GeodeticPoint p(lat(rng), lon(rng), alt(rng));
    const auto e = lla_to_ecef(p);
    const auto q = ecef_to_lla(e);
    worst = std::max(worst, (lla_to_ecef(q).xyz - e.xyz).norm());
    EXPECT_NEAR(q.alt(), p.alt(), 1e-6);
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(RigidTransform, RejectsNonRotations) {
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(2, 2) = -1.0;
  EXPECT_EQ(kind_of([&] { RigidTransform(reflect, Eigen::Vector3d::Zero()); }),
            ErrorKind::InvalidArgument);
  EXPECT_THROW(RigidTransform(2.0 * Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()), Error);
}

TEST(SensorToEcef, IdentityAndQuarterTurn) {
  const SensorPoint p{"L1", {3.0, -4.0, 5.0}};
  EXPECT_EQ(sensor_to_ecef(p, RigidTransform::identity()).xyz, p.xyz);

  const Eigen::Matrix3d rz = Eigen::AngleAxisd(std::numbers::pi / 2, Eigen::Vector3d::UnitZ())
                                 .toRotationMatrix();
  const auto q = sensor_to_ecef({"L1", {1, 0, 0}}, RigidTransform::rotation_only(rz));
  EXPECT_NEAR((q.xyz - Eigen::Vector3d(0, 1, 0)).norm(), 0.0, 1e-15);
}

TEST(SensorToEcef, MatchesHomogeneousRowVectorForm) {
  std::mt19937_64 rng(11);
  const auto t = random_transform(rng, 6.4e6);
  const Eigen::Matrix4d h = t.homogeneous();
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d p = random_point(rng);
    const Eigen::RowVector4d row(p.x(), p.y(), p.z(), 1.0);
    const Eigen::RowVector4d out = row * h.transpose();
    EXPECT_DOUBLE_EQ(out(3), 1.0);
    EXPECT_LT((sensor_to_ecef({"L1", p}, t).xyz - out.head<3>().transpose()).norm(), 1e-6);
  }
}

TEST(NedRotation, EquatorAxes) {
  const auto r = ned_rotation(GeodeticPoint(0, 0, 0)).rotation();
  EXPECT_LT((r * Eigen::Vector3d::UnitZ() - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((r * Eigen::Vector3d::UnitY() - Eigen::Vector3d(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((r * Eigen::Vector3d::UnitX() - Eigen::Vector3d(0, 0, -1)).norm(), 1e-15);
}

TEST(NedRotation, OrthonormalForRandomOrigins) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-90, 90);
  std::uniform_real_distribution<double> lon(-180, 180);
  for (int i = 0; i < 100; ++i) {
    const auto r = ned_rotation(GeodeticPoint(lat(rng), lon(rng), 0)).rotation();
    EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(EcefToNed, ReferenceAndAltitude) {
  FrameRegistry reg;
  const GeodeticPoint origin(34.1216, -117.3907, 380.0);
  reg.set_ned_origin(origin);
  const auto zero = ecef_to_ned(lla_to_ecef(origin), reg);
  EXPECT_LT(zero.vec().norm(), 1e-9);
  const auto up = ecef_to_ned(lla_to_ecef(34.1216, -117.3907, 390.0), reg);
  EXPECT_NEAR(up.north, 0.0, 1e-6);
  EXPECT_NEAR(up.east, 0.0, 1e-6);
  EXPECT_NEAR(up.down, -10.0, 1e-6);
}

TEST(EcefToNed, IsometryAndRoundTrip) {
  const GeodeticPoint origin(-33.9, 151.2, 40.0);
  const auto ref = lla_to_ecef(origin).xyz;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const EcefPoint a(ref + random_point(rng, 200.0));
    const EcefPoint b(ref + random_point(rng, 200.0));
    const auto na = ecef_to_ned(a, origin);
    const auto nb = ecef_to_ned(b, origin);
    EXPECT_NEAR((na.vec() - nb.vec()).norm(), (a.xyz - b.xyz).norm(), 1e-9);
    EXPECT_LT((ned_to_ecef(na, origin).xyz - a.xyz).norm(), 1e-8);
  }
}

TEST(FrameRegistry, OriginRules) {
  FrameRegistry reg;
  EXPECT_EQ(kind_of([&] { ecef_to_ned(EcefPoint(1e6, 0, 0), reg); }), ErrorKind::OriginUnset);
  reg.set_ned_origin(GeodeticPoint(1, 2, 3));
  EXPECT_EQ(kind_of([&] { reg.set_ned_origin(GeodeticPoint(1, 2, 3)); }),
            ErrorKind::OriginAlreadySet);
}

TEST(FrameRegistry, UnknownFrame) {
  FrameRegistry reg;
  EXPECT_FALSE(reg.has_frame("L9"));
  EXPECT_EQ(kind_of([&] { reg.to_ecef({"L9", {0, 0, 0}}); }), ErrorKind::UnregisteredFrame);
}

TEST(FrameRegistry, SensorToNedAgreesWithTwoStepPath) {
  std::mt19937_64 rng(17);
  const GeodeticPoint origin(34.1216, -117.3907, 380.0);
  const auto r_ne = ned_rotation(origin);
  const auto t = compose(RigidTransform(Eigen::Matrix3d::Identity(), lla_to_ecef(origin).xyz),
                         compose(invert(r_ne), random_transform(rng, 30.0)));
  FrameRegistry reg;
  reg.set_ned_origin(origin);
  reg.register_frame("L1", t);
  const auto direct = reg.sensor_to_ned("L1");
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d p = random_point(rng);
    const auto two_step = ecef_to_ned(reg.to_ecef({"L1", p}), reg);
    EXPECT_LT((direct.apply(p) - two_step.vec()).norm(), 1e-8);
  }
}

TEST(FrameRegistry, JsonRoundTrip) {
  std::mt19937_64 rng(23);
  FrameRegistry reg;
  reg.set_ned_origin(GeodeticPoint(34.1216, -117.3907, 380.0));
  reg.register_frame("L1", random_transform(rng, 6.4e6));
  reg.register_frame("L2", random_transform(rng, 6.4e6));
  const auto back = registry_from_json(registry_to_json(reg));
  ASSERT_TRUE(back.ned_origin().has_value());
  EXPECT_EQ(*back.ned_origin(), *reg.ned_origin());
  for (const auto& id : {"L1", "L2"}) {
    EXPECT_EQ(back.transform(id).rotation(), reg.transform(id).rotation());
    EXPECT_EQ(back.transform(id).translation(), reg.transform(id).translation());
  }
  EXPECT_EQ(registry_to_json(back), registry_to_json(reg));
}

TEST(FrameRegistry, JsonRejectsReflection) {
  const std::string doc =
      R"({"ned_origin": null, "frames": {"L1": {"rotation": [1,0,0,0,1,0,0,0,-1], "translation": [0,0,0]}}})";
  EXPECT_THROW(registry_from_json(doc), Error);
}

TEST(Compose, GroupLaws) {
  std::mt19937_64 rng(29);
  const auto id = invert(RigidTransform::identity());
  EXPECT_EQ(id.rotation(), Eigen::Matrix3d::Identity());
  EXPECT_EQ(id.translation(), Eigen::Vector3d::Zero());
  for (int i = 0; i < 50; ++i) {
    const auto a = random_transform(rng);
    const auto b = random_transform(rng);
    const auto c = random_transform(rng);
    const auto ident = compose(a, invert(a));
    EXPECT_LT((ident.rotation() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    EXPECT_LT(ident.translation().norm(), 1e-12);
    const Eigen::Vector3d p = random_point(rng);
    EXPECT_LT((compose(invert(a), a).apply(p) - p).norm(), 1e-9);
    const auto left = compose(compose(a, b), c);
    const auto right = compose(a, compose(b, c));
    EXPECT_LT((left.rotation() - right.rotation()).norm(), 1e-9);
    EXPECT_LT((left.translation() - right.translation()).norm(), 1e-9);
  }
}

TEST(Gcp, NoiselessRecovery) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::Vector3d t = lla_to_ecef(34.1216, -117.3907, 380.0).xyz + random_point(rng);
    std::vector<GcpPair> pairs;
    for (int i = 0; i < 10; ++i) {
      const Eigen::Vector3d s = random_point(rng, 40.0);
      pairs.push_back({{"L1", s}, EcefPoint(r * s + t)});
    }
    const auto fit = estimate_transform_from_gcps(pairs);
    EXPECT_LT(rotation_angle_between(fit.transform.rotation(), r), 1e-9);
    EXPECT_LT((fit.transform.translation() - t).norm(), 1e-9);
    EXPECT_LT(fit.rmse, 1e-9);
    EXPECT_NEAR(fit.transform.rotation().determinant(), 1.0, 1e-12);
  }
}

TEST(Gcp, IdentityCorrespondences) {
  std::vector<GcpPair> pairs{{{"L1", {1, 0, 0}}, EcefPoint(1, 0, 0)},
                             {{"L1", {0, 2, 0}}, EcefPoint(0, 2, 0)},
                             {{"L1", {0, 0, 3}}, EcefPoint(0, 0, 3)}};
  const auto fit = estimate_transform_from_gcps(pairs);
  EXPECT_LT((fit.transform.rotation() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
  EXPECT_LT(fit.transform.translation().norm(), 1e-12);
  EXPECT_LT(fit.rmse, 1e-12);
}

TEST(Gcp, CoplanarSetIsAccepted) {
  std::vector<GcpPair> pairs;
  for (const auto& s : {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(5, 0, 0),
                        Eigen::Vector3d(0, 5, 0), Eigen::Vector3d(5, 5, 0)}) {
    pairs.push_back({{"L1", s}, EcefPoint(s + Eigen::Vector3d(1e6, 2e6, 3e6))});
  }
  EXPECT_NO_THROW(estimate_transform_from_gcps(pairs));
}

TEST(Gcp, InsufficientAndCollinear) {
  std::vector<GcpPair> two{{{"L1", {0, 0, 0}}, EcefPoint(0, 0, 0)},
                           {{"L1", {1, 0, 0}}, EcefPoint(1, 0, 0)}};
  EXPECT_EQ(kind_of([&] { estimate_transform_from_gcps(two); }), ErrorKind::InsufficientPoints);
  std::vector<GcpPair> line;
  for (int i = 0; i < 5; ++i) {
    line.push_back({{"L1", {double(i), 2.0 * i, 0.5 * i}}, EcefPoint(i, 2.0 * i, 0.5 * i)});
  }
  EXPECT_EQ(kind_of([&] { estimate_transform_from_gcps(line); }),
            ErrorKind::CollinearConfiguration);
}

TEST(Gcp, NoiseBoundedByTwoSigmaPooled) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> noise(0.0, 0.05);
  double pooled = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::Vector3d t = lla_to_ecef(34.1216, -117.3907, 380.0).xyz;
    std::vector<GcpPair> pairs;
    for (int i = 0; i < 10; ++i) {
      const Eigen::Vector3d s = random_point(rng, 40.0);
      pairs.push_back(
          {{"L1", s}, EcefPoint(r * s + t + Eigen::Vector3d(noise(rng), noise(rng), noise(rng)))});
    }
    const auto fit = estimate_transform_from_gcps(pairs);
    pooled += fit.rmse * fit.rmse / 100.0;
    EXPECT_LT(rotation_angle_between(fit.transform.rotation(), r), 0.01);
  }
  EXPECT_LE(std::sqrt(pooled), 0.10);
}

TEST(Gcp, CsvParsing) {
  const auto pairs = parse_gcp_csv(
      "frame_id,sx,sy,sz,lat,lon,alt\n"
      "L1,1.0,2.0,3.0,34.1216,-117.3907,380\n"
      "L1,4,5,6,34.1217,-117.3906,381.5\n");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[1].sensor.xyz, Eigen::Vector3d(4, 5, 6));
  EXPECT_LT((pairs[0].ecef.xyz - lla_to_ecef(34.1216, -117.3907, 380).xyz).norm(), 1e-9);
  EXPECT_THROW(parse_gcp_csv("frame,sx\n"), ParseError);
  EXPECT_THROW(parse_gcp_csv("frame_id,sx,sy,sz,lat,lon,alt\nL1,1,2,x,0,0,0\n"), ParseError);
  EXPECT_THROW(parse_gcp_csv("frame_id,sx,sy,sz,lat,lon,alt\nL1,1,2,3,95,0,0\n"), ParseError);
}

TEST(RotationAngle, SmallAnglesResolved) {
  const Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d b = Eigen::AngleAxisd(1e-10, Eigen::Vector3d::UnitX()).toRotationMatrix();
  EXPECT_NEAR(rotation_angle_between(a, b), 1e-10, 1e-15);
  const Eigen::Matrix3d c = Eigen::AngleAxisd(2.5, Eigen::Vector3d::UnitY()).toRotationMatrix();
  EXPECT_NEAR(rotation_angle_between(a, c), 2.5, 1e-12);
}
