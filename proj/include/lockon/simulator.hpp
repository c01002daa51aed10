#pragma once

// Desk-scale stand-in for a drive log: planar bicycle-model ground truth,
// integrated IMU, noisy/outlier pose measurements, and pinhole projections of
// lead vehicles carrying persistent keypoint descriptors.

#include "lockon/constraint.hpp"
#include "lockon/geometry.hpp"
#include "lockon/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace lockon {

struct Knot {
  double at = 0.0;
  double value = 0.0;
};

/// Piecewise-linear profile, held constant outside its knot range.
class PiecewiseLinear {
 public:
  PiecewiseLinear() : knots_{{0.0, 0.0}} {}
  PiecewiseLinear(double constant) : knots_{{0.0, constant}} {}  // NOLINT(google-explicit-constructor)
  explicit PiecewiseLinear(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.empty()) throw InputError("profile needs at least one knot");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i].at > knots_[i - 1].at)) throw InputError("profile knots must be strictly increasing");
    }
  }

  const std::vector<Knot>& knots() const { return knots_; }

  double operator()(double x) const {
    if (x <= knots_.front().at) return knots_.front().value;
    if (x >= knots_.back().at) return knots_.back().value;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                     [](double v, const Knot& k) { return v < k.at; });
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    const double u = (x - lo.at) / (hi.at - lo.at);
    return lo.value + u * (hi.value - lo.value);
  }

  /// Exact integral over [a, b].
  double integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    double total = 0.0;
    double x0 = a;
    double y0 = (*this)(a);
    for (const Knot& k : knots_) {
      if (k.at <= a) continue;
      if (k.at >= b) break;
      total += 0.5 * (y0 + k.value) * (k.at - x0);
      x0 = k.at;
      y0 = k.value;
    }
    total += 0.5 * (y0 + (*this)(b)) * (b - x0);
    return total;
  }

  double min_value() const {
    return std::min_element(knots_.begin(), knots_.end(), [](auto& l, auto& r) { return l.value < r.value; })->value;
  }

 private:
  std::vector<Knot> knots_;
};

enum class ScenarioKind { Straight, Curve, LaneChange, StopAndGo, Mixed };

inline std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Straight: return "straight";
    case ScenarioKind::Curve: return "curve";
    case ScenarioKind::LaneChange: return "lane-change";
    case ScenarioKind::StopAndGo: return "stop-and-go";
    case ScenarioKind::Mixed: return "mixed";
  }
  return "straight";
}

inline ScenarioKind scenario_kind_from_string(std::string_view s) {
  if (s == "straight") return ScenarioKind::Straight;
  if (s == "curve") return ScenarioKind::Curve;
  if (s == "lane-change") return ScenarioKind::LaneChange;
  if (s == "stop-and-go") return ScenarioKind::StopAndGo;
  if (s == "mixed") return ScenarioKind::Mixed;
  throw InputError("unknown scenario kind: " + std::string(s));
}

/// A vehicle driving ahead on the ego path. Its rear face is a planar
/// rectangle carrying a grid of feature points.
struct LeadVehicle {
  double initial_gap = 20.0;          // m of arc length ahead of the ego vehicle
  PiecewiseLinear relative_speed{0.0};  // m/s over time; positive opens the gap
  double lateral_offset = 0.0;        // m, positive to the left
  double width = 1.8;
  double height = 1.5;
  double ground_clearance = 0.3;
  int grid_cols = 6;
  int grid_rows = 4;
};

struct SensorNoise {
  double sigma_pnp_t = 0.2;      // m per axis
  double sigma_pnp_r_deg = 1.0;  // deg about a random axis
  double outlier_rate = 0.1;
  double outlier_min = 5.0;      // m
  double outlier_max = 20.0;     // m
  double sigma_imu_a = 0.02;     // m/s^2
  double sigma_imu_w = 0.001;    // rad/s
  double sigma_desc = 0.05;      // per descriptor component
  double meas_dropout = 0.0;
};

struct Scenario {
  std::string name = "custom";
  ScenarioKind kind = ScenarioKind::Straight;
  double duration = 10.0;            // s
  PiecewiseLinear speed{15.0};       // m/s over time
  PiecewiseLinear curvature{0.0};    // 1/m over arc length
  std::vector<LeadVehicle> leads;
  CameraModel camera;
  SensorNoise noise;
  std::uint64_t seed = 1;
  double frame_spacing = 1.5;        // m of travel between frames
  double max_frame_interval = 1.0;   // s, keeps at least 1 Hz when slow
  double truth_tolerance = 0.05;     // m of relative motion still counted as locked

  void validate() const {
    if (!(duration > 0.0)) throw InputError("scenario duration must be positive");
    if (speed.min_value() < 0.0) throw InputError("speed profile must be non-negative");
    const SensorNoise& n = noise;
    for (double s : {n.sigma_pnp_t, n.sigma_pnp_r_deg, n.sigma_imu_a, n.sigma_imu_w, n.sigma_desc}) {
      if (!(s >= 0.0)) throw InputError("noise sigmas must be non-negative");
    }
    if (!(n.outlier_rate >= 0.0 && n.outlier_rate <= 1.0)) throw InputError("outlier rate must be in [0, 1]");
    if (!(n.meas_dropout >= 0.0 && n.meas_dropout <= 1.0)) throw InputError("dropout rate must be in [0, 1]");
    if (!(n.outlier_min >= 0.0 && n.outlier_max >= n.outlier_min)) throw InputError("bad outlier magnitude range");
    if (!(frame_spacing > 0.0) || !(max_frame_interval > 0.0)) throw InputError("bad frame sampling");
    if (camera.width <= 0 || camera.height <= 0 || !(camera.fu > 0.0) || !(camera.fv > 0.0))
      throw InputError("bad camera intrinsics");
    for (const LeadVehicle& l : leads) {
      if (!(l.width > 0.0) || !(l.height > 0.0) || l.grid_cols < 2 || l.grid_rows < 2)
        throw InputError("bad lead vehicle geometry");
    }
  }
};

struct TrajectorySample {
  double t = 0.0;
  double s = 0.0;  // arc length, m
  double yaw = 0.0;  // unwrapped
  double speed = 0.0;
  Pose6DoF pose;
  Vec3 velocity = Vec3::Zero();
};

/// Road centreline sampled on a uniform arc-length grid, used to place lead
/// vehicles ahead of the ego vehicle.
class PathTable {
 public:
  struct Point {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
  };

  PathTable() = default;
  PathTable(std::vector<Point> pts, double ds) : pts_(std::move(pts)), ds_(ds) {}

  Point at(double s) const {
    if (pts_.empty()) return {s, 0.0, 0.0};
    if (s <= 0.0) return extrapolate(pts_.front(), s);
    const double idx = s / ds_;
    const auto i = static_cast<std::size_t>(idx);
    if (i + 1 >= pts_.size()) return extrapolate(pts_.back(), s - ds_ * static_cast<double>(pts_.size() - 1));
    const double u = (idx - static_cast<double>(i)) * ds_;
    const Point& a = pts_[i];
    const Point& b = pts_[i + 1];
    const double frac = u / ds_;
    const double yaw = a.yaw + frac * (b.yaw - a.yaw);
    // chord at the mean heading: exact to second order for a clothoid piece
    const double mid = 0.5 * (a.yaw + yaw);
    return {a.x + u * std::cos(mid), a.y + u * std::sin(mid), yaw};
  }

 private:
  static Point extrapolate(const Point& p, double ds) {
    return {p.x + ds * std::cos(p.yaw), p.y + ds * std::sin(p.yaw), p.yaw};
  }

  std::vector<Point> pts_;
  double ds_ = 0.01;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  PathTable path;
};

namespace detail {

inline constexpr double kIntegrationStep = 1e-3;  // s
inline constexpr double kPathStep = 0.01;          // m
inline constexpr double kPathLookahead = 400.0;    // m beyond the final ego position

// Independent, reproducible random streams per synthesis stage.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

inline double normal(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
inline double uniform(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline Pose6DoF planar_pose(double x, double y, double yaw) {
  return {Vec3(x, y, 0.0), quat_from_yaw(yaw)};
}

inline PathTable build_path(const Scenario& sc, double s_max) {
  const double ds = kPathStep;
  const auto n = static_cast<std::size_t>(std::ceil(s_max / ds)) + 2;
  std::vector<PathTable::Point> pts;
  pts.reserve(n);
  double x = 0.0;
  double y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = ds * static_cast<double>(i);
    const double yaw = sc.curvature.integral(0.0, s);
    pts.push_back({x, y, yaw});
    // Simpson on (cos ψ, sin ψ) over one grid cell
    const double ym = sc.curvature.integral(0.0, s + 0.5 * ds);
    const double y1 = sc.curvature.integral(0.0, s + ds);
    x += ds / 6.0 * (std::cos(yaw) + 4.0 * std::cos(ym) + std::cos(y1));
    y += ds / 6.0 * (std::sin(yaw) + 4.0 * std::sin(ym) + std::sin(y1));
  }
  return PathTable(std::move(pts), ds);
}

}  // namespace detail

/// Integrates the kinematic bicycle model (curvature input) with RK4 at a
/// 1 ms step and samples it at camera instants: every `frame_spacing` metres
/// of travel, or after `max_frame_interval` seconds, whichever comes first.
inline Trajectory generate_trajectory(const Scenario& sc) {
  sc.validate();
  const auto arc = [&sc](double t) { return sc.speed.integral(0.0, t); };

  struct State {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
  };
  const auto deriv = [&](double t, const State& st) {
    const double v = sc.speed(t);
    return State{v * std::cos(st.yaw), v * std::sin(st.yaw), v * sc.curvature(arc(t))};
  };
  const auto rk4 = [&](double t, const State& st, double h) {
    const State k1 = deriv(t, st);
    const State k2 = deriv(t + 0.5 * h, {st.x + 0.5 * h * k1.x, st.y + 0.5 * h * k1.y, st.yaw + 0.5 * h * k1.yaw});
    const State k3 = deriv(t + 0.5 * h, {st.x + 0.5 * h * k2.x, st.y + 0.5 * h * k2.y, st.yaw + 0.5 * h * k2.yaw});
    const State k4 = deriv(t + h, {st.x + h * k3.x, st.y + h * k3.y, st.yaw + h * k3.yaw});
    return State{st.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                 st.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
                 st.yaw + h / 6.0 * (k1.yaw + 2.0 * k2.yaw + 2.0 * k3.yaw + k4.yaw)};
  };

  Trajectory traj;
  const auto emit = [&](double t, const State& st) {
    TrajectorySample smp;
    smp.t = t;
    smp.s = arc(t);
    smp.yaw = st.yaw;
    smp.speed = sc.speed(t);
    smp.pose = detail::planar_pose(st.x, st.y, st.yaw);
    smp.velocity = Vec3(smp.speed * std::cos(st.yaw), smp.speed * std::sin(st.yaw), 0.0);
    traj.samples.push_back(smp);
  };

  constexpr double kEps = 1e-9;
  State st;
  double t = 0.0;
  emit(t, st);
  double t_frame = 0.0;
  double s_target = sc.frame_spacing;

  while (t < sc.duration - 1e-12) {
    const double deadline = t_frame + sc.max_frame_interval;
    double h = std::min({detail::kIntegrationStep, deadline - t, sc.duration - t});
    bool at_frame = false;
    if (arc(t + h) >= s_target - kEps) {
      // bisect for the instant the travelled distance reaches the target
      double lo = t;
      double hi = t + h;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (arc(mid) >= s_target - kEps ? hi : lo) = mid;
      }
      h = hi - t;
      at_frame = true;
    }
    if (h > 0.0) st = rk4(t, st, h);
    t += h;
    if (std::abs(t - deadline) < 1e-12) at_frame = true;
    if (at_frame) {
      emit(t, st);
      t_frame = t;
      s_target = arc(t) + sc.frame_spacing;
    }
  }
  // the scenario ends on a frame even when the last spacing is partial
  if (traj.samples.back().t < sc.duration - 1e-6) emit(t, st);

  double max_gap = 0.0;
  for (const LeadVehicle& l : sc.leads) {
    max_gap = std::max(max_gap, std::abs(l.initial_gap) + std::abs(l.relative_speed.integral(0.0, sc.duration)));
  }
  traj.path = detail::build_path(sc, traj.samples.back().s + max_gap + detail::kPathLookahead);
  return traj;
}

/// Body-frame gravity-compensated acceleration and angular rate per frame,
/// averaged over the interval ending at that frame. The acceleration is the
/// mean velocity change expressed in the body frame at the start of the
/// interval, which is what the filter's prediction consumes.
inline std::vector<ImuSample> synth_imu(const Trajectory& traj, const Scenario& sc) {
  auto rng = detail::make_rng(sc.seed, 1);
  std::vector<ImuSample> out(traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    std::array<double, 6> noise{};
    for (double& n : noise) n = detail::normal(rng);
    if (k == 0) continue;
    const TrajectorySample& a = traj.samples[k - 1];
    const TrajectorySample& b = traj.samples[k];
    const double dt = b.t - a.t;
    const Mat3 r_prev = quat_to_rotmat(a.pose.q);
    ImuSample imu;
    imu.accel = r_prev.transpose() * (b.velocity - a.velocity) / dt;
    imu.gyro = Vec3(0.0, 0.0, (b.yaw - a.yaw) / dt);
    imu.accel += sc.noise.sigma_imu_a * Vec3(noise[0], noise[1], noise[2]);
    imu.gyro += sc.noise.sigma_imu_w * Vec3(noise[3], noise[4], noise[5]);
    out[k] = imu;
  }
  return out;
}

/// Ground truth corrupted by Gaussian translation noise, a rotation about a
/// random axis, and occasional planar outliers.
inline std::vector<std::optional<Pose6DoF>> synth_measurements(const Trajectory& traj, const Scenario& sc) {
  auto rng = detail::make_rng(sc.seed, 2);
  const SensorNoise& n = sc.noise;
  std::vector<std::optional<Pose6DoF>> out;
  out.reserve(traj.samples.size());
  for (const TrajectorySample& smp : traj.samples) {
    // fixed number of draws per frame keeps streams aligned across settings
    const Vec3 dp(detail::normal(rng), detail::normal(rng), detail::normal(rng));
    Vec3 axis(detail::normal(rng), detail::normal(rng), detail::normal(rng));
    const double angle = detail::normal(rng) * n.sigma_pnp_r_deg * std::numbers::pi / 180.0;
    const double u_outlier = detail::uniform(rng);
    const double u_mag = detail::uniform(rng);
    const double u_dir = detail::uniform(rng);
    const double u_drop = detail::uniform(rng);

    if (u_drop < n.meas_dropout) {
      out.emplace_back(std::nullopt);
      continue;
    }
    Pose6DoF m = smp.pose;
    m.p += n.sigma_pnp_t * dp;
    if (axis.norm() > 0.0) axis.normalize();
    m.q = smp.pose.q * quat_from_rotvec(angle * axis);
    if (u_outlier < n.outlier_rate) {
      const double mag = n.outlier_min + u_mag * (n.outlier_max - n.outlier_min);
      const double dir = 2.0 * std::numbers::pi * u_dir;
      m.p += mag * Vec3(std::cos(dir), std::sin(dir), 0.0);
    }
    out.emplace_back(m);
  }
  return out;
}

struct LeadSnapshot {
  Vec3 relative = Vec3::Zero();  // lead reference point in the ego body frame
  bool visible = false;
};

struct SceneOutput {
  std::vector<std::vector<VehicleDetection>> detections;
  std::vector<bool> truly_constrained;
  std::vector<std::vector<LeadSnapshot>> leads;  // per frame, per lead vehicle
};

namespace detail {

inline Vec3 lead_world_point(const PathTable::Point& base, const LeadVehicle& lead, double lateral, double height) {
  const Vec3 left(-std::sin(base.yaw), std::cos(base.yaw), 0.0);
  return Vec3(base.x, base.y, 0.0) + (lead.lateral_offset + lateral) * left + Vec3(0.0, 0.0, height);
}

}  // namespace detail

/// Projects every lead vehicle into the camera for each frame. Bounding box is
/// the extent of the visible projected points; mask area is 60% of it.
inline SceneOutput synth_scene(const Trajectory& traj, const Scenario& sc) {
  auto rng = detail::make_rng(sc.seed, 3);
  const CameraModel& cam = sc.camera;
  const double min_mask = 0.0004 * cam.width * cam.height;

  // persistent appearance per feature point
  std::vector<Eigen::MatrixXd> base(sc.leads.size());
  for (std::size_t li = 0; li < sc.leads.size(); ++li) {
    const int n = sc.leads[li].grid_cols * sc.leads[li].grid_rows;
    base[li].resize(n, kDescriptorDim);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < kDescriptorDim; ++d) base[li](i, d) = detail::normal(rng);
      base[li].row(i).normalize();
    }
  }

  SceneOutput out;
  out.detections.resize(traj.samples.size());
  out.truly_constrained.assign(traj.samples.size(), false);
  out.leads.resize(traj.samples.size());

  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const TrajectorySample& ego = traj.samples[k];
    const Mat3 r_ego_t = quat_to_rotmat(ego.pose.q).transpose();
    std::vector<VehicleDetection> dets;
    out.leads[k].resize(sc.leads.size());

    for (std::size_t li = 0; li < sc.leads.size(); ++li) {
      const LeadVehicle& lead = sc.leads[li];
      const int n = lead.grid_cols * lead.grid_rows;
      Eigen::MatrixXd noisy = base[li];
      for (int i = 0; i < n; ++i) {
        for (int d = 0; d < kDescriptorDim; ++d) noisy(i, d) += sc.noise.sigma_desc * detail::normal(rng);
        noisy.row(i).normalize();
      }

      const double gap = lead.initial_gap + lead.relative_speed.integral(0.0, ego.t);
      const PathTable::Point anchor = traj.path.at(ego.s + gap);
      out.leads[k][li].relative = r_ego_t * (detail::lead_world_point(anchor, lead, 0.0, 0.0) - ego.pose.p);

      std::vector<Eigen::Vector2d> kps;
      std::vector<int> rows;
      for (int r = 0; r < lead.grid_rows; ++r) {
        for (int c = 0; c < lead.grid_cols; ++c) {
          const double lateral = lead.width * (static_cast<double>(c) / (lead.grid_cols - 1) - 0.5);
          const double height = lead.ground_clearance + lead.height * static_cast<double>(r) / (lead.grid_rows - 1);
          const Vec3 body = r_ego_t * (detail::lead_world_point(anchor, lead, lateral, height) - ego.pose.p);
          // camera looks along body x; image u grows to the right, v downward
          const double zc = body.x();
          if (zc < 0.5) continue;
          const double u = cam.fu * (-body.y()) / zc + cam.cu;
          const double v = cam.fv * (-(body.z() - cam.mount_height)) / zc + cam.cv;
          if (u < 0.0 || v < 0.0 || u >= cam.width || v >= cam.height) continue;
          kps.emplace_back(u, v);
          rows.push_back(r * lead.grid_cols + c);
        }
      }
      if (kps.size() < 2) continue;

      BoundingBox box{kps[0].x(), kps[0].y(), kps[0].x(), kps[0].y()};
      for (const auto& p : kps) {
        box.u_min = std::min(box.u_min, p.x());
        box.v_min = std::min(box.v_min, p.y());
        box.u_max = std::max(box.u_max, p.x());
        box.v_max = std::max(box.v_max, p.y());
      }
      if (!(box.area() > 0.0)) continue;

      std::vector<std::size_t> order(kps.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<Eigen::Vector2d> shuffled;
      Eigen::MatrixXf desc(static_cast<Eigen::Index>(kps.size()), kDescriptorDim);
      for (std::size_t i = 0; i < order.size(); ++i) {
        shuffled.push_back(kps[order[i]]);
        desc.row(static_cast<Eigen::Index>(i)) = noisy.row(rows[order[i]]).cast<float>();
      }
      const double mask_area = 0.6 * box.area();
      out.leads[k][li].visible = mask_area >= min_mask;
      dets.push_back(make_detection(0, box, mask_area, std::move(shuffled), std::move(desc)));
    }

    std::shuffle(dets.begin(), dets.end(), rng);
    for (std::size_t i = 0; i < dets.size(); ++i) dets[i].id = static_cast<int>(i);
    out.detections[k] = std::move(dets);

    if (k > 0) {
      for (std::size_t li = 0; li < sc.leads.size(); ++li) {
        const LeadSnapshot& a = out.leads[k - 1][li];
        const LeadSnapshot& b = out.leads[k][li];
        if (a.visible && b.visible && (b.relative - a.relative).norm() <= sc.truth_tolerance) {
          out.truly_constrained[k] = true;
        }
      }
    }
  }
  return out;
}

struct SimulatedLog {
  Scenario scenario;
  std::vector<FrameRecord> frames;
};

inline SimulatedLog simulate(const Scenario& sc) {
  const Trajectory traj = generate_trajectory(sc);
  const auto imu = synth_imu(traj, sc);
  const auto meas = synth_measurements(traj, sc);
  SceneOutput scene = synth_scene(traj, sc);

  SimulatedLog log{sc, {}};
  log.frames.reserve(traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    FrameRecord f;
    f.frame_id = static_cast<std::int64_t>(k);
    f.t = traj.samples[k].t;
    f.imu = imu[k];
    f.meas = meas[k];
    f.detections = std::move(scene.detections[k]);
    f.gt = traj.samples[k].pose;
    f.gt_v = traj.samples[k].velocity;
    f.truth_constrained = scene.truly_constrained[k];
    log.frames.push_back(std::move(f));
  }
  return log;
}

/// Fraction of frames (after the first) the simulator labels as truly locked on.
inline double truth_constraint_fraction(const std::vector<FrameRecord>& frames) {
  if (frames.size() < 2) return 0.0;
  std::size_t n = 0;
  for (std::size_t k = 1; k < frames.size(); ++k) n += frames[k].truth_constrained.value_or(false) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(frames.size() - 1);
}

// ---------------------------------------------------------------------------
// Presets

namespace detail {

/// Triangle wave in arc length between -amp and +amp with the given period,
/// starting after `start` metres of straight road.
inline PiecewiseLinear triangle_curvature(double amp, double period, double start, double length) {
  std::vector<Knot> knots{{0.0, 0.0}};
  if (start > 0.0) knots.push_back({start, 0.0});
  double s = start;
  int i = 0;
  while (s < length) {
    s += 0.25 * period * (i == 0 ? 1.0 : 2.0);
    knots.push_back({s, (i % 2 == 0) ? amp : -amp});
    ++i;
  }
  return PiecewiseLinear(std::move(knots));
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  return {"highway", "highway-empty", "curve", "campus-curves", "mixed", "lane-change", "stop-and-go"};
}

inline Scenario preset(std::string_view name, std::uint64_t seed = 1) {
  Scenario sc;
  sc.name = std::string(name);
  sc.seed = seed;
  if (name == "highway" || name == "highway-empty") {
    sc.kind = ScenarioKind::Straight;
    sc.duration = 70.0;
    sc.speed = 15.0;
    sc.curvature = 0.0;
    if (name == "highway") sc.leads.push_back(LeadVehicle{});
  } else if (name == "curve") {
    // curvature never settles, so the lead vehicle's bearing keeps changing
    sc.kind = ScenarioKind::Curve;
    sc.duration = 60.0;
    sc.speed = 10.0;
    sc.curvature = detail::triangle_curvature(0.03, 100.0, 0.0, 700.0);
    sc.leads.push_back(LeadVehicle{});
  } else if (name == "campus-curves") {
    sc.kind = ScenarioKind::Curve;
    sc.duration = 90.0;
    sc.speed = 8.0;
    sc.curvature = detail::triangle_curvature(0.04, 80.0, 0.0, 800.0);
    LeadVehicle lead;
    lead.initial_gap = 15.0;
    lead.relative_speed = PiecewiseLinear({{0.0, 0.0}, {20.0, 1.0}, {40.0, -1.0}, {60.0, 1.0}, {80.0, 0.0}});
    sc.leads.push_back(lead);
  } else if (name == "mixed") {
    // alternating 150 m straights and 150 m of winding road
    sc.kind = ScenarioKind::Mixed;
    sc.duration = 100.0;
    sc.speed = 12.0;
    std::vector<Knot> knots{{0.0, 0.0}};
    for (int block = 0; block < 4; ++block) {
      const double s0 = 300.0 * block + 150.0;
      knots.push_back({s0, 0.0});
      knots.push_back({s0 + 25.0, 0.03});
      knots.push_back({s0 + 75.0, -0.03});
      knots.push_back({s0 + 125.0, 0.03});
      knots.push_back({s0 + 150.0, 0.0});
    }
    sc.curvature = PiecewiseLinear(std::move(knots));
    sc.leads.push_back(LeadVehicle{});
  } else if (name == "lane-change") {
    sc.kind = ScenarioKind::LaneChange;
    sc.duration = 40.0;
    sc.speed = 20.0;
    sc.curvature = PiecewiseLinear({{0.0, 0.0}, {300.0, 0.0}, {320.0, 0.0035}, {340.0, 0.0}, {360.0, -0.0035},
                                    {380.0, 0.0}});
    sc.leads.push_back(LeadVehicle{});
  } else if (name == "stop-and-go") {
    sc.kind = ScenarioKind::StopAndGo;
    sc.duration = 80.0;
    std::vector<Knot> knots;
    for (int cycle = 0; cycle < 4; ++cycle) {
      const double t0 = 20.0 * cycle;
      knots.push_back({t0, 0.0});
      knots.push_back({t0 + 3.0, 0.0});
      knots.push_back({t0 + 8.0, 12.0});
      knots.push_back({t0 + 14.0, 12.0});
      knots.push_back({t0 + 19.0, 0.0});
    }
    sc.speed = PiecewiseLinear(std::move(knots));
    sc.curvature = 0.0;
    LeadVehicle lead;
    lead.initial_gap = 12.0;
    sc.leads.push_back(lead);
  } else {
    throw InputError("unknown preset: " + std::string(name));
  }
  return sc;
}

}  // namespace lockon
