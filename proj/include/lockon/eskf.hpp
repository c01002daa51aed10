#pragma once

// Error-state Kalman filter over (position, velocity, attitude) driven by an
// integrated IMU sample per camera frame and corrected by 6-DoF pose
// measurements.
//
// Error state ordering is (δp, δv, δθ). The attitude error is expressed in the
// body frame: q_true = q ⊗ q{δθ}. With that convention the velocity and
// attitude blocks of the process Jacobian take the familiar form
// -R[a]×δ and R{ωδ}ᵀ, and the reset Jacobian is I - ½[δθ]×.

#include "lockon/geometry.hpp"
#include "lockon/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lockon {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat96 = Eigen::Matrix<double, 9, 6>;
using Mat69 = Eigen::Matrix<double, 6, 9>;

/// How the warmup speed is formed from per-pair speeds ‖Δp‖/Δt.
enum class WarmupSpeed { Mean, Median };

struct FilterParams {
  double v_m = 0.005;  // base measurement variance
  double v_p = 0.5;    // process variance
  bool joseph_form = true;
  WarmupSpeed warmup_speed = WarmupSpeed::Median;
  // δp [m²], δv [m²/s²], δθ [rad²]
  Vec9 prior_variance = (Vec9() << 0.25, 0.25, 0.25, 1.0, 1.0, 1.0, 0.01, 0.01, 0.01).finished();

  void validate() const {
    if (!(v_m > 0.0) || !(v_p > 0.0)) throw InputError("filter variances must be positive");
    if ((prior_variance.array() < 0.0).any()) throw InputError("prior variance must be non-negative");
  }
};

struct FilterState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  UnitQuaternion q;
  Mat9 cov = Mat9::Identity();
  double t_last = 0.0;

  Pose6DoF pose() const { return {p, q}; }
};

struct TimedPose {
  Pose6DoF pose;
  double t = 0.0;
};

namespace detail {

inline Mat9 symmetrized(const Mat9& c) { return 0.5 * (c + c.transpose()); }

inline void require_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive and finite");
}

}  // namespace detail

/// Measurement Jacobian: the pose measurement observes δp and δθ.
inline Mat69 measurement_jacobian() {
  Mat69 h = Mat69::Zero();
  h.block<3, 3>(0, 0).setIdentity();
  h.block<3, 3>(3, 6).setIdentity();
  return h;
}

/// Noise Jacobian: process noise enters the velocity and attitude rows.
inline Mat96 noise_jacobian() {
  Mat96 fw = Mat96::Zero();
  fw.block<3, 3>(3, 0).setIdentity();
  fw.block<3, 3>(6, 3).setIdentity();
  return fw;
}

/// Starts the filter at the first measured pose. The speed summarizes the
/// consecutive warmup displacements over their time gaps (median by default,
/// so a single outlier pose cannot dominate it); the direction is the forward
/// (body x) axis of the first attitude.
inline FilterState initialize(const TimedPose& first, std::span<const TimedPose> warmup,
                              const FilterParams& params) {
  params.validate();
  if (warmup.size() < 2) throw InitializationError("need at least two warmup poses");
  std::vector<double> speeds;
  speeds.reserve(warmup.size() - 1);
  for (std::size_t i = 1; i < warmup.size(); ++i) {
    const double dt = warmup[i].t - warmup[i - 1].t;
    if (!(dt > 0.0)) throw InputError("warmup timestamps must be strictly increasing");
    speeds.push_back((warmup[i].pose.p - warmup[i - 1].pose.p).norm() / dt);
  }
  double speed = 0.0;
  if (params.warmup_speed == WarmupSpeed::Mean) {
    speed = std::accumulate(speeds.begin(), speeds.end(), 0.0) / static_cast<double>(speeds.size());
  } else {
    std::sort(speeds.begin(), speeds.end());
    const std::size_t n = speeds.size();
    speed = n % 2 == 1 ? speeds[n / 2] : 0.5 * (speeds[n / 2 - 1] + speeds[n / 2]);
  }

  FilterState s;
  s.p = first.pose.p;
  s.q = first.pose.q;
  s.v = speed * (quat_to_rotmat(first.pose.q) * Vec3::UnitX());
  s.cov = params.prior_variance.asDiagonal();
  s.t_last = first.t;
  return s;
}

/// Nominal-state propagation. The covariance is left alone; see
/// propagate_covariance.
inline FilterState predict(const FilterState& s, const ImuSample& imu, double dt) {
  detail::require_step(dt);
  const Mat3 r = quat_to_rotmat(s.q);
  const Vec3 acc_map = r * imu.accel;
  FilterState out = s;
  out.p = s.p + dt * s.v + 0.5 * dt * dt * acc_map;
  out.v = s.v + dt * acc_map;
  // body-frame rate composes on the right
  out.q = s.q * quat_from_rotvec(dt * imu.gyro);
  out.t_last = s.t_last + dt;
  return out;
}

/// Jacobian of predict with respect to the error state, evaluated at `s`
/// (the state before prediction).
inline Mat9 process_jacobian(const FilterState& s, const ImuSample& imu, double dt) {
  detail::require_step(dt);
  const Mat3 r = quat_to_rotmat(s.q);
  const Mat3 a = skew(imu.accel);
  Mat9 f = Mat9::Identity();
  f.block<3, 3>(0, 3) = Mat3::Identity() * dt;
  f.block<3, 3>(0, 6) = -0.5 * dt * dt * r * a;
  f.block<3, 3>(3, 6) = -r * a * dt;
  f.block<3, 3>(6, 6) = rotmat_from_rotvec(imu.gyro * dt).transpose();
  return f;
}

/// C ← F C Fᵀ + F_w Q F_wᵀ with Q = v_p δ² I₆.
inline FilterState propagate_covariance(const FilterState& s, const Mat9& fx, double dt,
                                        const FilterParams& params) {
  if (!(dt >= 0.0)) throw InputError("time step must be non-negative");
  const Mat96 fw = noise_jacobian();
  const Mat6 q = Mat6::Identity() * (params.v_p * dt * dt);
  FilterState out = s;
  out.cov = detail::symmetrized(fx * s.cov * fx.transpose() + fw * q * fw.transpose());
  return out;
}

inline Mat9 reset_jacobian(const RotVec& dtheta) {
  Mat9 j = Mat9::Identity();
  j.block<3, 3>(6, 6) = Mat3::Identity() - 0.5 * skew(dtheta);
  return j;
}

/// Covariance reset after the attitude error has been folded into the nominal
/// quaternion.
inline FilterState eskf_reset(const FilterState& s, const RotVec& dtheta) {
  const Mat9 j = reset_jacobian(dtheta);
  FilterState out = s;
  out.cov = detail::symmetrized(j * s.cov * j.transpose());
  return out;
}

/// Innovation of a pose measurement against the nominal state: position
/// difference and the body-frame rotation from the state to the measurement.
inline Vec6 pose_innovation(const FilterState& s, const Pose6DoF& y) {
  Vec6 r;
  r.head<3>() = y.p - s.p;
  r.tail<3>() = rotvec_from_quat(s.q.inverse() * y.q);
  return r;
}

struct UpdateResult {
  FilterState state;
  Vec9 correction = Vec9::Zero();
  bool accepted = true;
  std::string warning;
};

inline UpdateResult update(const FilterState& s, const Pose6DoF& y, double v_eff,
                           const FilterParams& params) {
  if (!(v_eff > 0.0)) throw InputError("measurement variance must be positive");
  UpdateResult result{s, Vec9::Zero(), true, {}};

  const Mat69 h = measurement_jacobian();
  const Mat6 noise = Mat6::Identity() * v_eff;
  const Mat6 innov_cov = h * s.cov * h.transpose() + noise;
  Eigen::LLT<Mat6> llt(innov_cov);
  if (!innov_cov.allFinite() || llt.info() != Eigen::Success) {
    result.accepted = false;
    result.warning = "innovation covariance is not positive definite; measurement rejected";
    return result;
  }
  // G = C Hᵀ S⁻¹, computed as (S⁻¹ H C)ᵀ since S and C are symmetric
  const Mat96 gain = llt.solve(h * s.cov).transpose();
  if (!gain.allFinite()) {
    result.accepted = false;
    result.warning = "Kalman gain is not finite; measurement rejected";
    return result;
  }

  const Vec9 dx = gain * pose_innovation(s, y);
  FilterState out = s;
  out.p += dx.segment<3>(0);
  out.v += dx.segment<3>(3);
  const RotVec dtheta = dx.segment<3>(6);
  out.q = s.q * quat_from_rotvec(dtheta);

  const Mat9 ikh = Mat9::Identity() - gain * h;
  if (params.joseph_form) {
    out.cov = ikh * s.cov * ikh.transpose() + gain * noise * gain.transpose();
  } else {
    out.cov = ikh * s.cov;
  }
  out.cov = detail::symmetrized(out.cov);

  result.state = eskf_reset(out, dtheta);
  result.correction = dx;
  return result;
}

/// Output of a measurement-variance provider for one frame.
struct GateOutput {
  double v_eff = 0.0;
  std::optional<Pose6DoF> predicted_measurement;
  bool constrained = false;
  bool capped = false;
};

/// Measurement variance that never changes; the plain filter.
struct ConstantVariance {
  double v_m = 0.005;

  GateOutput operator()(const FilterState&, const FrameRecord&) const { return {v_m, {}, false, false}; }
};

struct StepTrace {
  Pose6DoF prior;
  std::optional<Pose6DoF> predicted_measurement;
  double v_eff = std::numeric_limits<double>::quiet_NaN();
  Pose6DoF posterior;
  bool updated = false;
  bool constrained = false;
  bool capped = false;
  std::string warning;
};

/// One camera frame: predict to the frame time, then fold in the measurement
/// (if any) with the variance chosen by `gate`. `gate` is called with the
/// posterior of the previous frame and the current frame.
template <class Gate>
std::pair<FilterState, StepTrace> step(const FilterState& s, const FrameRecord& frame,
                                       const FilterParams& params, Gate&& gate) {
  const double dt = frame.t - s.t_last;
  if (!(dt > 0.0)) throw InputError("frame timestamp must be after the filter's last update");

  const Mat9 fx = process_jacobian(s, frame.imu, dt);
  FilterState predicted = propagate_covariance(predict(s, frame.imu, dt), fx, dt, params);
  predicted.t_last = frame.t;

  StepTrace trace;
  trace.prior = predicted.pose();
  if (!frame.meas) {
    trace.posterior = trace.prior;
    return {predicted, trace};
  }

  const GateOutput g = gate(s, frame);
  trace.predicted_measurement = g.predicted_measurement;
  trace.v_eff = g.v_eff;
  trace.constrained = g.constrained;
  trace.capped = g.capped;

  UpdateResult u = update(predicted, *frame.meas, g.v_eff, params);
  trace.updated = u.accepted;
  trace.warning = std::move(u.warning);
  trace.posterior = u.state.pose();
  return {u.state, trace};
}

}  // namespace lockon
