#pragma once

// Constraint-conditioned measurement variance. The next measurement is
// expected at the previous one advanced by the filter velocity; each
// translation axis of the disagreement goes through an RBF kernel, and the
// inverse kernel values inflate the base variance. While the vehicle is locked
// on to a lead vehicle the horizontal bandwidths shrink by α.

#include "lockon/eskf.hpp"
#include "lockon/geometry.hpp"
#include "lockon/types.hpp"

#include <cmath>
#include <optional>

namespace lockon {

struct GateParams {
  double sigma_x = 2.6;  // m
  double sigma_y = 2.6;  // m
  double sigma_z = 2.1;  // m
  double alpha = 2.0;
  double v_m = 0.005;

  static constexpr double kVarianceCap = 1e12;

  void validate() const {
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0) || !(sigma_z > 0.0)) throw InputError("RBF bandwidths must be positive");
    if (!(alpha >= 1.0)) throw InputError("alpha must be >= 1");
    if (!(v_m > 0.0)) throw InputError("base measurement variance must be positive");
  }
};

struct MeasurementPrediction {
  Pose6DoF predicted;
  Pose6DoF previous;
  Vec3 velocity = Vec3::Zero();
  double dt = 0.0;
};

inline MeasurementPrediction predict_measurement(const Pose6DoF& previous, const Vec3& velocity, double dt) {
  if (!(dt > 0.0)) throw InputError("prediction horizon must be positive");
  MeasurementPrediction m{previous, previous, velocity, dt};
  m.predicted.p = previous.p + dt * velocity;
  return m;
}

inline double rbf_kernel(double d, double sigma) {
  if (!(sigma > 0.0)) throw InputError("RBF bandwidth must be positive");
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

struct DynamicVariance {
  double value = 0.0;
  bool capped = false;
};

inline DynamicVariance dynamic_variance(const Pose6DoF& actual, const Pose6DoF& predicted, const GateParams& params,
                                        bool constrained) {
  params.validate();
  const Vec3 d = actual.p - predicted.p;
  const double shrink = constrained ? params.alpha : 1.0;
  const double kx = rbf_kernel(d.x(), params.sigma_x / shrink);
  const double ky = rbf_kernel(d.y(), params.sigma_y / shrink);
  // the vertical bandwidth is never shrunk: height stays tied to the road
  const double kz = rbf_kernel(d.z(), params.sigma_z);

  if (kx == 0.0 || ky == 0.0 || kz == 0.0) return {GateParams::kVarianceCap, true};
  const double v = params.v_m + (1.0 / kx - 1.0) + (1.0 / ky - 1.0) + (1.0 / kz - 1.0);
  if (!std::isfinite(v) || v > GateParams::kVarianceCap) return {GateParams::kVarianceCap, true};
  return {v, false};
}

/// Stateful variance provider for the filter's step(). It remembers the last
/// raw measurement and is told, frame by frame, whether the vehicle is
/// currently constrained.
class AdaptiveGate {
 public:
  explicit AdaptiveGate(GateParams params, bool rbf_when_unconstrained = true)
      : params_(params), rbf_when_unconstrained_(rbf_when_unconstrained) {
    params_.validate();
  }

  void reset(const TimedPose& first) { last_ = first; }
  void set_constrained(bool constrained) { constrained_ = constrained; }
  bool constrained() const { return constrained_; }
  const GateParams& params() const { return params_; }

  GateOutput operator()(const FilterState& previous, const FrameRecord& frame) {
    GateOutput out{params_.v_m, {}, constrained_, false};
    if (!frame.meas) return out;
    const TimedPose current{*frame.meas, frame.t};
    if (last_ && frame.t > last_->t && (constrained_ || rbf_when_unconstrained_)) {
      const MeasurementPrediction m = predict_measurement(last_->pose, previous.v, frame.t - last_->t);
      const DynamicVariance dv = dynamic_variance(current.pose, m.predicted, params_, constrained_);
      out.v_eff = dv.value;
      out.capped = dv.capped;
      out.predicted_measurement = m.predicted;
    }
    last_ = current;
    return out;
  }

 private:
  GateParams params_;
  bool rbf_when_unconstrained_ = true;
  bool constrained_ = false;
  std::optional<TimedPose> last_;
};

}  // namespace lockon
