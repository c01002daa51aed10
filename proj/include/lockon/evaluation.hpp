#pragma once

// Localization metrics over fixed-length trajectory segments: per-frame
// translation/rotation error, end and worst-case error per segment, and
// recall at (metres, degrees) precision bins.

#include "lockon/geometry.hpp"
#include "lockon/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lockon {

struct PoseError {
  double trans = 0.0;  // m
  double rot = 0.0;    // deg
};

struct RecallBin {
  double trans = 0.0;  // m
  double rot = 0.0;    // deg
};

inline std::vector<RecallBin> default_bins() { return {{0.25, 2.0}, {0.5, 5.0}, {5.0, 10.0}}; }

/// Raised for metrics that are undefined on the given input (e.g. empty sets).
class UndefinedResult : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline PoseError pose_error(const Pose6DoF& est, const Pose6DoF& gt) {
  return {(est.p - gt.p).norm(), rotation_angle_between(est.q, gt.q)};
}

/// Half-open frame index range [begin, end).
struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Splits a trajectory into consecutive segments of at least `length_m` of
/// ground-truth travel. A segment [b, e) owns the travel from frame b up to
/// frame e, so every segment needs the frame that follows it; a trailing
/// remainder shorter than `length_m` is dropped.
inline std::vector<FrameRange> split_segments(const std::vector<Vec3>& gt_positions, double length_m = 150.0) {
  if (!(length_m > 0.0)) throw InputError("segment length must be positive");
  std::vector<FrameRange> segments;
  constexpr double kSlack = 1e-6;
  std::size_t begin = 0;
  double travelled = 0.0;
  for (std::size_t i = 1; i < gt_positions.size(); ++i) {
    travelled += (gt_positions[i] - gt_positions[i - 1]).norm();
    if (travelled >= length_m - kSlack) {
      segments.push_back({begin, i});
      begin = i;
      travelled = 0.0;
    }
  }
  return segments;
}

inline std::vector<double> recall_at(const std::vector<PoseError>& errors,
                                     const std::vector<RecallBin>& bins = default_bins()) {
  if (errors.empty()) throw UndefinedResult("recall of an empty error set is undefined");
  std::vector<double> out;
  out.reserve(bins.size());
  for (const RecallBin& b : bins) {
    const auto hits = std::count_if(errors.begin(), errors.end(),
                                    [&b](const PoseError& e) { return e.trans <= b.trans && e.rot <= b.rot; });
    out.push_back(static_cast<double>(hits) / static_cast<double>(errors.size()));
  }
  return out;
}

struct SegmentReport {
  int segment_id = 0;
  std::string method;
  std::vector<PoseError> errors;  // one per frame; missing estimates are +inf
  std::vector<bool> constraint_active;
  std::vector<double> distance;  // travel attributed to each frame, m
  double end_err = 0.0;
  double max_err = 0.0;
};

/// Builds a report and fills end/max error from the per-frame errors. Frames
/// without an estimate carry an infinite error: they never count towards
/// recall and are skipped for end/max error.
inline SegmentReport make_segment_report(int segment_id, std::string method, std::vector<PoseError> errors,
                                         std::vector<bool> constraint_active, std::vector<double> distance) {
  if (errors.size() != constraint_active.size() || errors.size() != distance.size())
    throw InputError("segment report columns differ in length");
  SegmentReport r;
  r.segment_id = segment_id;
  r.method = std::move(method);
  r.errors = std::move(errors);
  r.constraint_active = std::move(constraint_active);
  r.distance = std::move(distance);
  r.end_err = std::numeric_limits<double>::quiet_NaN();
  r.max_err = std::numeric_limits<double>::quiet_NaN();
  for (const PoseError& e : r.errors) {
    if (!std::isfinite(e.trans)) continue;
    r.end_err = e.trans;
    r.max_err = std::isnan(r.max_err) ? e.trans : std::max(r.max_err, e.trans);
  }
  return r;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Median; even-length lists average the central pair.
inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

enum class Subset { All, Active, Inactive };

inline std::string to_string(Subset s) {
  switch (s) {
    case Subset::All: return "all";
    case Subset::Active: return "active";
    case Subset::Inactive: return "inactive";
  }
  return "all";
}

struct SubsetSummary {
  Subset subset = Subset::All;
  std::size_t frames = 0;
  std::vector<double> recall;  // per bin; empty when frames == 0
};

struct Summary {
  std::string method;
  std::size_t segments = 0;
  double mean_end = 0.0;
  double median_end = 0.0;
  double mean_max = 0.0;
  double median_max = 0.0;
  double constraint_fraction = 0.0;  // by distance travelled
  std::vector<RecallBin> bins;
  std::array<SubsetSummary, 3> subsets;

  const SubsetSummary& subset(Subset s) const { return subsets[static_cast<std::size_t>(s)]; }
};

/// Pools per-frame errors of all segments of one method for recall, and
/// summarizes the per-segment end/max errors.
inline Summary aggregate(const std::vector<SegmentReport>& reports,
                         const std::vector<RecallBin>& bins = default_bins()) {
  if (reports.empty()) throw UndefinedResult("nothing to aggregate");
  Summary s;
  s.method = reports.front().method;
  s.segments = reports.size();
  s.bins = bins;

  std::vector<double> ends;
  std::vector<double> maxes;
  std::array<std::vector<PoseError>, 3> pooled;
  double dist_total = 0.0;
  double dist_active = 0.0;
  for (const SegmentReport& r : reports) {
    if (!std::isnan(r.end_err)) ends.push_back(r.end_err);
    if (!std::isnan(r.max_err)) maxes.push_back(r.max_err);
    for (std::size_t i = 0; i < r.errors.size(); ++i) {
      pooled[0].push_back(r.errors[i]);
      pooled[r.constraint_active[i] ? 1 : 2].push_back(r.errors[i]);
      dist_total += r.distance[i];
      if (r.constraint_active[i]) dist_active += r.distance[i];
    }
  }
  s.mean_end = mean_of(ends);
  s.median_end = median_of(ends);
  s.mean_max = mean_of(maxes);
  s.median_max = median_of(maxes);
  s.constraint_fraction = dist_total > 0.0 ? dist_active / dist_total : 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    s.subsets[k].subset = static_cast<Subset>(k);
    s.subsets[k].frames = pooled[k].size();
    if (!pooled[k].empty()) s.subsets[k].recall = recall_at(pooled[k], bins);
  }
  return s;
}

}  // namespace lockon
