#pragma once

// Runs a localization method over a frame log, one independently initialized
// filter per evaluation segment:
//   pnp  - raw pose measurements
//   ekf  - filter with the constant base measurement variance
//   ours - filter with the RBF-gated variance, tightened on lock-on frames

#include "lockon/adaptive_gate.hpp"
#include "lockon/constraint.hpp"
#include "lockon/eskf.hpp"
#include "lockon/evaluation.hpp"
#include "lockon/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lockon {

enum class Method { Pnp, Ekf, Ours };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Pnp: return "pnp";
    case Method::Ekf: return "ekf";
    case Method::Ours: return "ours";
  }
  return "pnp";
}

inline Method method_from_string(std::string_view s) {
  if (s == "pnp") return Method::Pnp;
  if (s == "ekf") return Method::Ekf;
  if (s == "ours") return Method::Ours;
  throw InputError("unknown method: " + std::string(s));
}

struct RunConfig {
  Method method = Method::Ours;
  FilterParams filter;
  GateParams gate;  // gate.v_m follows filter.v_m during a run
  ConstraintParams constraint;
  double segment_length = 150.0;
  std::size_t warmup = 10;
  bool constraint_detection = true;
  bool rbf_when_unconstrained = true;

  void validate() const {
    filter.validate();
    GateParams g = gate;
    g.v_m = filter.v_m;
    g.validate();
    constraint.validate();
    if (!(segment_length > 0.0)) throw InputError("segment length must be positive");
    if (warmup < 2) throw InputError("warmup needs at least two poses");
  }
};

inline std::vector<std::string> tunable_parameters() {
  return {"v_m",         "v_p",     "sigma_xy",    "sigma_z", "alpha",         "tau_divisor",
          "d_assoc",     "min_matches", "mask_fraction", "warmup", "segment_length"};
}

/// Sets one named tunable. Integer tunables reject fractional values.
inline void set_parameter(RunConfig& cfg, std::string_view name, double value) {
  auto as_count = [&](double v) {
    if (!(v >= 0.0) || v != std::floor(v)) throw InputError(std::string(name) + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  };
  if (name == "v_m") cfg.filter.v_m = value;
  else if (name == "v_p") cfg.filter.v_p = value;
  else if (name == "sigma_xy") cfg.gate.sigma_x = cfg.gate.sigma_y = value;
  else if (name == "sigma_z") cfg.gate.sigma_z = value;
  else if (name == "alpha") cfg.gate.alpha = value;
  else if (name == "tau_divisor") cfg.constraint.tau_divisor = value;
  else if (name == "d_assoc") cfg.constraint.d_assoc = value;
  else if (name == "min_matches") cfg.constraint.min_matches = as_count(value);
  else if (name == "mask_fraction") cfg.constraint.mask_fraction = value;
  else if (name == "warmup") cfg.warmup = as_count(value);
  else if (name == "segment_length") cfg.segment_length = value;
  else throw InputError("unknown parameter: " + std::string(name));
}

struct FrameEstimate {
  std::int64_t frame_id = 0;
  double t = 0.0;
  int segment = 0;
  std::optional<Pose6DoF> pose;
  bool constrained = false;
  double v_eff = std::numeric_limits<double>::quiet_NaN();
  bool updated = false;
};

struct RunResult {
  Method method = Method::Ours;
  std::vector<FrameEstimate> estimates;
  std::vector<SegmentReport> reports;
  std::vector<std::string> warnings;
};

/// Lock-on decision for every frame against its predecessor; the first frame
/// has no predecessor and is never constrained.
inline std::vector<ConstraintDecision> detect_constraints(const std::vector<FrameRecord>& frames,
                                                          const CameraModel& camera,
                                                          const ConstraintParams& params = {}) {
  std::vector<ConstraintDecision> out(frames.size());
  for (std::size_t k = 1; k < frames.size(); ++k) {
    out[k] = detect_constraint(frames[k - 1].detections, frames[k].detections, camera.width, camera.height, params);
  }
  return out;
}

inline std::vector<Vec3> gt_positions(const std::vector<FrameRecord>& frames) {
  std::vector<Vec3> out;
  out.reserve(frames.size());
  for (const FrameRecord& f : frames) {
    if (!f.gt) throw InputError("frame " + std::to_string(f.frame_id) + " has no ground truth");
    out.push_back(f.gt->p);
  }
  return out;
}

/// Per-segment reports from estimates keyed by frame id. Frame travel is the
/// ground-truth distance to the following log frame.
inline std::vector<SegmentReport> build_reports(const std::string& method, const std::vector<FrameEstimate>& estimates,
                                                const std::vector<FrameRecord>& frames) {
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < frames.size(); ++i) index.emplace(frames[i].frame_id, i);

  std::map<int, std::vector<const FrameEstimate*>> by_segment;
  for (const FrameEstimate& e : estimates) by_segment[e.segment].push_back(&e);

  std::vector<SegmentReport> reports;
  for (const auto& [seg, rows] : by_segment) {
    std::vector<PoseError> errors;
    std::vector<bool> active;
    std::vector<double> dist;
    for (const FrameEstimate* e : rows) {
      const auto it = index.find(e->frame_id);
      if (it == index.end()) throw InputError("estimate for unknown frame " + std::to_string(e->frame_id));
      const FrameRecord& f = frames[it->second];
      if (!f.gt) throw InputError("frame " + std::to_string(f.frame_id) + " has no ground truth");
      if (e->pose) {
        errors.push_back(pose_error(*e->pose, *f.gt));
      } else {
        errors.push_back({std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()});
      }
      active.push_back(e->constrained);
      const std::size_t next = it->second + 1;
      dist.push_back(next < frames.size() && frames[next].gt ? (frames[next].gt->p - f.gt->p).norm() : 0.0);
    }
    reports.push_back(make_segment_report(seg, method, std::move(errors), std::move(active), std::move(dist)));
  }
  return reports;
}

inline RunResult run_method(const std::vector<FrameRecord>& frames, const CameraModel& camera, const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  result.method = cfg.method;

  const auto decisions = detect_constraints(frames, camera, cfg.constraint);
  const auto segments = split_segments(gt_positions(frames), cfg.segment_length);
  if (segments.empty()) result.warnings.push_back("trajectory shorter than one segment; nothing evaluated");

  GateParams gate_params = cfg.gate;
  gate_params.v_m = cfg.filter.v_m;

  for (std::size_t seg = 0; seg < segments.size(); ++seg) {
    const FrameRange range = segments[seg];
    const int seg_id = static_cast<int>(seg);

    std::vector<FrameEstimate> rows(range.size());
    for (std::size_t k = range.begin; k < range.end; ++k) {
      FrameEstimate& e = rows[k - range.begin];
      e.frame_id = frames[k].frame_id;
      e.t = frames[k].t;
      e.segment = seg_id;
      e.constrained = decisions[k].constrained;
    }

    if (cfg.method == Method::Pnp) {
      for (std::size_t k = range.begin; k < range.end; ++k) rows[k - range.begin].pose = frames[k].meas;
      result.estimates.insert(result.estimates.end(), rows.begin(), rows.end());
      continue;
    }

    std::vector<TimedPose> warmup;
    std::optional<std::size_t> first_idx;
    for (std::size_t k = range.begin; k < range.end && warmup.size() < cfg.warmup; ++k) {
      if (!frames[k].meas) continue;
      if (!first_idx) first_idx = k;
      warmup.push_back({*frames[k].meas, frames[k].t});
    }
    if (warmup.size() < 2) {
      result.warnings.push_back("segment " + std::to_string(seg_id) + ": not enough measurements for warmup; skipped");
      continue;
    }

    FilterState state = initialize(warmup.front(), warmup, cfg.filter);
    rows[*first_idx - range.begin].pose = state.pose();

    AdaptiveGate adaptive(gate_params, cfg.rbf_when_unconstrained);
    adaptive.reset(warmup.front());
    const ConstantVariance constant{cfg.filter.v_m};

    for (std::size_t k = *first_idx + 1; k < range.end; ++k) {
      FrameEstimate& e = rows[k - range.begin];
      std::pair<FilterState, StepTrace> out;
      if (cfg.method == Method::Ours) {
        adaptive.set_constrained(cfg.constraint_detection && decisions[k].constrained);
        out = step(state, frames[k], cfg.filter, adaptive);
      } else {
        out = step(state, frames[k], cfg.filter, constant);
      }
      state = out.first;
      e.pose = out.second.posterior;
      e.v_eff = out.second.v_eff;
      e.updated = out.second.updated;
      if (!out.second.warning.empty()) {
        result.warnings.push_back("frame " + std::to_string(e.frame_id) + ": " + out.second.warning);
      }
    }
    result.estimates.insert(result.estimates.end(), rows.begin(), rows.end());
  }

  result.reports = build_reports(to_string(cfg.method), result.estimates, frames);
  return result;
}

}  // namespace lockon
