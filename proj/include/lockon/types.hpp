#pragma once

#include "lockon/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lockon {

/// Caller supplied something that violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Not enough data to start the filter.
class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDescriptorDim = 128;

/// One IMU sample already integrated up to the camera timestamp. `accel` is the
/// gravity-compensated specific force in the body frame.
struct ImuSample {
  Vec3 accel = Vec3::Zero();  // m/s^2
  Vec3 gyro = Vec3::Zero();   // rad/s
};

struct Pose6DoF {
  Vec3 p = Vec3::Zero();  // map frame, meters
  UnitQuaternion q;       // body-to-map
};

struct BoundingBox {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;

  double area() const { return (u_max - u_min) * (v_max - v_min); }
};

struct VehicleDetection {
  int id = 0;
  BoundingBox bbox;
  double mask_area = 0.0;                // pixels
  std::vector<Eigen::Vector2d> keypoints;  // (u, v) pixels
  Eigen::MatrixXf descriptors;           // one unit-norm row per keypoint
  Eigen::VectorXf pooled;                // mean of the descriptor rows
};

struct FrameRecord {
  std::int64_t frame_id = 0;
  double t = 0.0;
  ImuSample imu;
  std::optional<Pose6DoF> meas;
  std::vector<VehicleDetection> detections;
  std::optional<Pose6DoF> gt;
  std::optional<Vec3> gt_v;
  std::optional<bool> truth_constrained;
};

/// Pinhole camera rigidly mounted on the vehicle body.
struct CameraModel {
  double fu = 800.0;
  double fv = 800.0;
  double cu = 512.0;
  double cv = 384.0;
  int width = 1024;
  int height = 768;
  double mount_height = 1.5;  // meters above the road
};

}  // namespace lockon
