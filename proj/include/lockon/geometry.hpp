#pragma once

// Quaternion and rotation helpers shared by the filter, the simulator and the
// evaluator. Hamilton convention, w-first, body-to-map orientation.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lockon {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Angle-axis rotation vector; its norm is the rotation angle in radians.
using RotVec = Eigen::Vector3d;

inline constexpr double kSmallAngle = 1e-8;

/// Unit quaternion (w, x, y, z). Every constructor and operation returns a
/// renormalized value, so callers never see drift in the norm.
class UnitQuaternion {
 public:
  UnitQuaternion() : q_(1.0, 0.0, 0.0, 0.0) {}
  UnitQuaternion(double w, double x, double y, double z) : q_(w, x, y, z) { normalize(); }
  explicit UnitQuaternion(const Eigen::Quaterniond& q) : q_(q) { normalize(); }

  static UnitQuaternion identity() { return {}; }

  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }
  Eigen::Vector3d vec() const { return q_.vec(); }
  const Eigen::Quaterniond& eigen() const { return q_; }

  UnitQuaternion inverse() const { return UnitQuaternion(q_.conjugate()); }

  /// Sign-canonical copy (w >= 0). Only used where quaternions are compared.
  UnitQuaternion canonical() const {
    if (q_.w() < 0.0) return UnitQuaternion(-q_.w(), -q_.x(), -q_.y(), -q_.z());
    return *this;
  }

 private:
  void normalize() {
    const double n = q_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      q_ = Eigen::Quaterniond(1.0, 0.0, 0.0, 0.0);
      return;
    }
    q_.coeffs() /= n;
  }

  Eigen::Quaterniond q_;
};

/// Hamilton product a ⊗ b.
inline UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion(a.eigen() * b.eigen());
}

inline UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return quat_multiply(a, b);
}

inline UnitQuaternion quat_from_rotvec(const RotVec& v) {
  const double theta = v.norm();
  if (theta < kSmallAngle) {
    // second-order series of (cos(θ/2), sin(θ/2)/θ · v)
    const double t2 = theta * theta;
    return UnitQuaternion(1.0 - t2 / 8.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z());
  }
  const double half = 0.5 * theta;
  const double s = std::sin(half) / theta;
  return UnitQuaternion(std::cos(half), s * v.x(), s * v.y(), s * v.z());
}

/// Inverse of quat_from_rotvec; the result has angle in [0, π].
inline RotVec rotvec_from_quat(const UnitQuaternion& q_in) {
  const UnitQuaternion q = q_in.canonical();
  const Eigen::Vector3d u = q.vec();
  const double s = u.norm();
  if (s < kSmallAngle) {
    return 2.0 * u;
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return (angle / s) * u;
}

inline Mat3 quat_to_rotmat(const UnitQuaternion& q) { return q.eigen().toRotationMatrix(); }

inline UnitQuaternion quat_from_rotmat(const Mat3& r) {
  return UnitQuaternion(Eigen::Quaterniond(r)).canonical();
}

/// Rotation matrix of an angle-axis vector.
inline Mat3 rotmat_from_rotvec(const RotVec& v) { return quat_to_rotmat(quat_from_rotvec(v)); }

/// Cross-product matrix: skew(a) * b == a.cross(b).
inline Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

/// Angle of the relative rotation between a and b, in degrees, within [0, 180].
inline double rotation_angle_between(const UnitQuaternion& a, const UnitQuaternion& b) {
  // atan2 form stays accurate near zero, where acos(|w|) does not
  const Eigen::Quaterniond rel = a.eigen().conjugate() * b.eigen();
  const double angle = 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
  return std::clamp(angle * 180.0 / std::numbers::pi, 0.0, 180.0);
}

/// Yaw-only attitude, used by the planar simulator.
inline UnitQuaternion quat_from_yaw(double yaw) {
  return UnitQuaternion(std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw));
}

inline double yaw_of(const UnitQuaternion& q) {
  return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                    1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

}  // namespace lockon
