#pragma once

#include "lockon/geometry.hpp"
#include "lockon/simulator.hpp"

#include <Eigen/Core>

#include <cmath>
#include <random>

namespace testing_support {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline lockon::Vec3 random_vec(double scale = 1.0) {
  return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
}

// uniform on SO(3) (Shoemake)
inline lockon::UnitQuaternion random_quat() {
  const double u1 = uniform(0.0, 1.0);
  const double u2 = uniform(0.0, 2.0 * M_PI);
  const double u3 = uniform(0.0, 2.0 * M_PI);
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return {a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)};
}

// rotation matrix about a unit axis, built from Rodrigues' formula directly
inline lockon::Mat3 rodrigues(const lockon::Vec3& axis, double angle) {
  const lockon::Vec3 k = axis.normalized();
  lockon::Mat3 kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return lockon::Mat3::Identity() + std::sin(angle) * kx + (1.0 - std::cos(angle)) * kx * kx;
}

inline lockon::SensorNoise no_noise() {
  lockon::SensorNoise n;
  n.sigma_pnp_t = n.sigma_pnp_r_deg = n.outlier_rate = 0.0;
  n.sigma_imu_a = n.sigma_imu_w = n.sigma_desc = 0.0;
  return n;
}

}  // namespace testing_support
