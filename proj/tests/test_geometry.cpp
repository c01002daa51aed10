#include "lockon/geometry.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lockon;
using testing_support::random_quat;
using testing_support::random_vec;
using testing_support::rodrigues;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_same_rotation(const UnitQuaternion& a, const UnitQuaternion& b, double tol = 1e-12) {
  EXPECT_NEAR(rotation_angle_between(a, b), 0.0, tol);
}

}  // namespace

TEST(Quaternion, IdentityIsNeutral) {
  const UnitQuaternion q = random_quat();
  expect_same_rotation(UnitQuaternion::identity() * q, q);
  expect_same_rotation(q * UnitQuaternion::identity(), q);
}

TEST(Quaternion, InverseCancels) {
  const UnitQuaternion q = random_quat();
  const UnitQuaternion r = (q * q.inverse()).canonical();
  EXPECT_NEAR(r.w(), 1.0, 1e-15);
  EXPECT_NEAR(r.vec().norm(), 0.0, 1e-15);
}

TEST(Quaternion, QuarterTurnsComposeToHalfTurn) {
  const UnitQuaternion qz = quat_from_rotvec(Vec3(0, 0, kPi / 2));
  const Mat3 expected = rodrigues(Vec3::UnitZ(), kPi / 2) * rodrigues(Vec3::UnitZ(), kPi / 2);
  EXPECT_TRUE(quat_to_rotmat(qz * qz).isApprox(expected, 1e-12));
  const UnitQuaternion half = (qz * qz).canonical();
  EXPECT_NEAR(half.w(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(half.z()), 1.0, 1e-15);
}

TEST(Quaternion, ProductMatchesMatrixProduct) {
  for (int i = 0; i < 50; ++i) {
    const UnitQuaternion a = random_quat();
    const UnitQuaternion b = random_quat();
    EXPECT_TRUE(quat_to_rotmat(a * b).isApprox(quat_to_rotmat(a) * quat_to_rotmat(b), 1e-12));
  }
}

TEST(Quaternion, ProductIsAssociative) {
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion a = random_quat();
    const UnitQuaternion b = random_quat();
    const UnitQuaternion c = random_quat();
    const UnitQuaternion l = ((a * b) * c).canonical();
    const UnitQuaternion r = (a * (b * c)).canonical();
    EXPECT_NEAR(l.w(), r.w(), 1e-9);
    EXPECT_NEAR((l.vec() - r.vec()).norm(), 0.0, 1e-9);
  }
}

TEST(Quaternion, NormStaysUnit) {
  UnitQuaternion q;
  for (int i = 0; i < 10000; ++i) q = q * quat_from_rotvec(random_vec(0.3));
  const double n = std::sqrt(q.w() * q.w() + q.vec().squaredNorm());
  EXPECT_NEAR(n, 1.0, 1e-9);
}

TEST(Quaternion, ConstructorNormalizes) {
  const UnitQuaternion q(2.0, 0.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(q.w(), 1.0);
}

TEST(Quaternion, CanonicalHasNonNegativeScalar) {
  const UnitQuaternion q(-0.5, 0.5, 0.5, 0.5);
  EXPECT_GE(q.canonical().w(), 0.0);
  expect_same_rotation(q, q.canonical());
}

TEST(RotVec, ZeroGivesIdentity) {
  const UnitQuaternion q = quat_from_rotvec(Vec3::Zero());
  EXPECT_EQ(q.w(), 1.0);
  EXPECT_EQ(q.vec().norm(), 0.0);
}

TEST(RotVec, HalfTurnAboutZ) {
  const UnitQuaternion q = quat_from_rotvec(Vec3(0, 0, kPi)).canonical();
  EXPECT_NEAR(q.w(), 0.0, 1e-15);
  EXPECT_NEAR(q.x(), 0.0, 1e-15);
  EXPECT_NEAR(q.y(), 0.0, 1e-15);
  EXPECT_NEAR(q.z(), 1.0, 1e-15);
}

TEST(RotVec, QuarterTurnAboutX) {
  const UnitQuaternion q = quat_from_rotvec(Vec3(kPi / 2, 0, 0));
  EXPECT_NEAR(q.w(), std::cos(kPi / 4), 1e-15);
  EXPECT_NEAR(q.x(), std::sin(kPi / 4), 1e-15);
  EXPECT_NEAR(q.y(), 0.0, 1e-15);
  EXPECT_NEAR(q.z(), 0.0, 1e-15);
}

TEST(RotVec, MatchesRodrigues) {
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = random_vec(3.0);
    EXPECT_TRUE(rotmat_from_rotvec(v).isApprox(rodrigues(v, v.norm()), 1e-12));
  }
}

TEST(RotVec, SmallAngleSeriesIsContinuous) {
  const Vec3 axis = Vec3(1, 2, -1).normalized();
  const UnitQuaternion below = quat_from_rotvec(axis * 0.999e-8);
  const UnitQuaternion above = quat_from_rotvec(axis * 1.001e-8);
  EXPECT_NEAR((below.vec() - above.vec()).norm(), 0.5 * 0.002e-8, 1e-20);
  EXPECT_NEAR(below.w(), 1.0, 1e-16);
}

TEST(RotVec, RoundTrip) {
  for (int i = 0; i < 1000; ++i) {
    Vec3 axis = random_vec().normalized();
    const double angle = testing_support::uniform(1e-6, kPi - 1e-6);
    const Vec3 v = axis * angle;
    EXPECT_NEAR((rotvec_from_quat(quat_from_rotvec(v)) - v).norm(), 0.0, 1e-9);
  }
}

TEST(RotVec, InverseAngleWithinPi) {
  for (int i = 0; i < 200; ++i) EXPECT_LE(rotvec_from_quat(random_quat()).norm(), kPi + 1e-12);
}

TEST(RotationMatrix, IdentityQuaternion) { EXPECT_TRUE(quat_to_rotmat(UnitQuaternion()).isIdentity(0.0)); }

TEST(RotationMatrix, HalfTurnAboutZ) {
  const Mat3 r = quat_to_rotmat(quat_from_rotvec(Vec3(0, 0, kPi)));
  EXPECT_TRUE(r.isApprox(Vec3(-1, -1, 1).asDiagonal().toDenseMatrix(), 1e-12));
  // basis vectors map as a half turn should
  EXPECT_NEAR((r * Vec3::UnitX() + Vec3::UnitX()).norm(), 0.0, 1e-12);
  EXPECT_NEAR((r * Vec3::UnitY() + Vec3::UnitY()).norm(), 0.0, 1e-12);
}

TEST(RotationMatrix, OrthonormalRightHanded) {
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = quat_to_rotmat(random_quat());
    EXPECT_TRUE((r.transpose() * r).isIdentity(1e-9));
    EXPECT_NEAR(r.determinant(), 1.0, 1e-9);
    const Vec3 v = random_vec(10.0);
    EXPECT_NEAR((r * v).norm(), v.norm(), 1e-9);
  }
}

TEST(RotationMatrix, RoundTrip) {
  for (int i = 0; i < 200; ++i) {
    const UnitQuaternion q = random_quat();
    const UnitQuaternion back = quat_from_rotmat(quat_to_rotmat(q));
    EXPECT_NEAR(back.w(), q.canonical().w(), 1e-12);
    EXPECT_NEAR((back.vec() - q.canonical().vec()).norm(), 0.0, 1e-12);
  }
}

TEST(Skew, ZeroVector) { EXPECT_TRUE(skew(Vec3::Zero()).isZero(0.0)); }

TEST(Skew, AnnihilatesItsVector) {
  const Vec3 a = random_vec(5.0);
  EXPECT_NEAR((skew(a) * a).norm(), 0.0, 1e-12);
}

TEST(Skew, UnitXTimesUnitY) { EXPECT_EQ(skew(Vec3::UnitX()) * Vec3::UnitY(), Vec3::UnitZ()); }

TEST(Skew, CrossProductAndAntisymmetry) {
  for (int i = 0; i < 50; ++i) {
    const Vec3 a = random_vec(5.0);
    const Vec3 b = random_vec(5.0);
    EXPECT_NEAR((skew(a) * b - a.cross(b)).norm(), 0.0, 1e-12);
    EXPECT_EQ(skew(a).transpose(), -skew(a));
  }
}

TEST(RotationAngle, SameIsZero) {
  const UnitQuaternion q = random_quat();
  EXPECT_NEAR(rotation_angle_between(q, q), 0.0, 1e-12);
}

TEST(RotationAngle, QuarterTurnIsNinety) {
  EXPECT_NEAR(rotation_angle_between(UnitQuaternion(), quat_from_rotvec(Vec3(0, 0, kPi / 2))), 90.0, 1e-12);
}

TEST(RotationAngle, SymmetricAndMatchesTrace) {
  for (int i = 0; i < 200; ++i) {
    const UnitQuaternion a = random_quat();
    const UnitQuaternion b = random_quat();
    const double ab = rotation_angle_between(a, b);
    EXPECT_NEAR(ab, rotation_angle_between(b, a), 1e-10);
    const Mat3 rel = quat_to_rotmat(a).transpose() * quat_to_rotmat(b);
    const double trace_angle = std::acos(std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0)) * 180.0 / kPi;
    EXPECT_NEAR(ab, trace_angle, 1e-5);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 180.0);
  }
}

TEST(RotationAngle, SignOfQuaternionIrrelevant) {
  const UnitQuaternion q = random_quat();
  const UnitQuaternion neg(-q.w(), -q.x(), -q.y(), -q.z());
  EXPECT_NEAR(rotation_angle_between(q, neg), 0.0, 1e-12);
}

TEST(Yaw, RoundTrip) {
  for (double yaw : {-3.0, -1.0, 0.0, 0.5, 2.9}) EXPECT_NEAR(yaw_of(quat_from_yaw(yaw)), yaw, 1e-12);
}
