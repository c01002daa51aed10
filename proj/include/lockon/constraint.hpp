#pragma once

// Lock-on detection: a detected vehicle whose keypoints barely move in the
// image between two consecutive frames is travelling with the ego vehicle, so
// the ego motion is treated as constrained for the current frame.

#include "lockon/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace lockon {

struct ConstraintParams {
  double mask_fraction = 0.0004;  // minimum mask area as a fraction of the image
  double tau_divisor = 70.0;
  double d_assoc = 0.8;    // max distance between normalized pooled descriptors
  std::size_t min_matches = 5;

  void validate() const {
    if (!(mask_fraction >= 0.0)) throw InputError("mask fraction must be non-negative");
    if (!(tau_divisor > 0.0)) throw InputError("tau divisor must be positive");
    if (!(d_assoc > 0.0)) throw InputError("association threshold must be positive");
  }
};

using IndexPair = std::pair<int, int>;

struct LockedPair {
  int prev_id = 0;
  int curr_id = 0;
  double mu_p = 0.0;  // pixels
  double tau = 0.0;   // pixels
  std::size_t matches = 0;
};

struct ConstraintDecision {
  bool constrained = false;
  std::vector<LockedPair> locked_pairs;
};

inline std::vector<VehicleDetection> filter_detections(const std::vector<VehicleDetection>& dets, int image_w,
                                                       int image_h, double mask_fraction = 0.0004) {
  if (image_w <= 0 || image_h <= 0) throw InputError("image dimensions must be positive");
  const double min_area = mask_fraction * static_cast<double>(image_w) * static_cast<double>(image_h);
  std::vector<VehicleDetection> kept;
  kept.reserve(dets.size());
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(kept),
               [min_area](const VehicleDetection& d) { return d.mask_area >= min_area; });
  return kept;
}

inline Eigen::VectorXf pool_descriptor(const Eigen::MatrixXf& descriptors) {
  if (descriptors.rows() == 0) throw InputError("cannot pool an empty descriptor set");
  return descriptors.colwise().mean().transpose();
}

/// Builds a detection, unit-normalizing each descriptor row and pooling them.
inline VehicleDetection make_detection(int id, const BoundingBox& bbox, double mask_area,
                                       std::vector<Eigen::Vector2d> keypoints, Eigen::MatrixXf descriptors) {
  if (keypoints.empty()) throw InputError("a detection needs at least one keypoint");
  if (static_cast<Eigen::Index>(keypoints.size()) != descriptors.rows())
    throw InputError("keypoint and descriptor counts differ");
  if (!(bbox.area() > 0.0)) throw InputError("bounding box area must be positive");
  for (Eigen::Index i = 0; i < descriptors.rows(); ++i) {
    const float n = descriptors.row(i).norm();
    if (n > 0.0f) descriptors.row(i) /= n;
  }
  VehicleDetection d;
  d.id = id;
  d.bbox = bbox;
  d.mask_area = mask_area;
  d.keypoints = std::move(keypoints);
  d.pooled = pool_descriptor(descriptors);
  d.descriptors = std::move(descriptors);
  return d;
}

namespace detail {

/// Squared Euclidean distances, rows of `a` against rows of `b`.
inline Eigen::MatrixXd pairwise_sq_dist(const Eigen::MatrixXf& a, const Eigen::MatrixXf& b) {
  const Eigen::MatrixXd ad = a.cast<double>();
  const Eigen::MatrixXd bd = b.cast<double>();
  Eigen::MatrixXd d(ad.rows(), bd.rows());
  for (Eigen::Index i = 0; i < ad.rows(); ++i) {
    d.row(i) = (bd.rowwise() - ad.row(i)).rowwise().squaredNorm().transpose();
  }
  return d;
}

inline Eigen::VectorXf normalized(const Eigen::VectorXf& v) {
  const float n = v.norm();
  return n > 0.0f ? Eigen::VectorXf(v / n) : v;
}

}  // namespace detail

/// Pairs (i, j) where j is the nearest row of L2 to L1[i] and i is the nearest
/// row of L1 to L2[j]. Ties go to the lowest index.
inline std::vector<IndexPair> mutual_nn_matches(const Eigen::MatrixXf& l1, const Eigen::MatrixXf& l2) {
  std::vector<IndexPair> matches;
  if (l1.rows() == 0 || l2.rows() == 0) return matches;
  if (l1.cols() != l2.cols()) throw InputError("descriptor dimensions differ");
  const Eigen::MatrixXd d = detail::pairwise_sq_dist(l1, l2);

  // strict comparison keeps the first (lowest) index on ties
  std::vector<Eigen::Index> best_in_2(d.rows(), 0);
  std::vector<Eigen::Index> best_in_1(d.cols(), 0);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 1; j < d.cols(); ++j) {
      if (d(i, j) < d(i, best_in_2[i])) best_in_2[i] = j;
    }
  }
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    for (Eigen::Index i = 1; i < d.rows(); ++i) {
      if (d(i, j) < d(best_in_1[j], j)) best_in_1[j] = i;
    }
  }

  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const Eigen::Index j = best_in_2[i];
    if (best_in_1[j] == i) matches.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return matches;
}

/// Mean Euclidean pixel distance between matched keypoints; empty when there
/// is nothing to measure.
inline std::optional<double> mean_pixel_shift(const std::vector<IndexPair>& matches,
                                              const std::vector<Eigen::Vector2d>& kps1,
                                              const std::vector<Eigen::Vector2d>& kps2) {
  if (matches.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [i, j] : matches) sum += (kps2.at(j) - kps1.at(i)).norm();
  return sum / static_cast<double>(matches.size());
}

inline double tau(double bbox_area, double divisor = 70.0) {
  if (!(bbox_area > 0.0)) throw InputError("bounding box area must be positive");
  return std::sqrt(bbox_area) / divisor;
}

/// Greedy association of vehicles across frames on their pooled descriptors:
/// repeatedly take the closest remaining pair until the closest exceeds
/// `d_assoc`. Returns (prev id, curr id).
inline std::vector<IndexPair> associate_vehicles(const std::vector<VehicleDetection>& prev,
                                                 const std::vector<VehicleDetection>& curr, double d_assoc = 0.8) {
  std::vector<IndexPair> pairs;
  if (prev.empty() || curr.empty()) return pairs;

  Eigen::MatrixXd dist(prev.size(), curr.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const Eigen::VectorXd a = detail::normalized(prev[i].pooled).cast<double>();
    for (std::size_t j = 0; j < curr.size(); ++j) {
      const Eigen::VectorXd b = detail::normalized(curr[j].pooled).cast<double>();
      dist(i, j) = a.size() == b.size() ? (a - b).norm() : std::numeric_limits<double>::infinity();
    }
  }

  std::vector<bool> used_prev(prev.size(), false);
  std::vector<bool> used_curr(curr.size(), false);
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      if (used_prev[i]) continue;
      for (std::size_t j = 0; j < curr.size(); ++j) {
        if (!used_curr[j] && dist(i, j) < best) {
          best = dist(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (!(best <= d_assoc)) break;
    used_prev[bi] = true;
    used_curr[bj] = true;
    pairs.emplace_back(prev[bi].id, curr[bj].id);
  }
  return pairs;
}

inline ConstraintDecision detect_constraint(const std::vector<VehicleDetection>& prev_frame,
                                            const std::vector<VehicleDetection>& curr_frame, int image_w,
                                            int image_h, const ConstraintParams& params = {}) {
  params.validate();
  const auto prev = filter_detections(prev_frame, image_w, image_h, params.mask_fraction);
  const auto curr = filter_detections(curr_frame, image_w, image_h, params.mask_fraction);

  auto by_id = [](const std::vector<VehicleDetection>& v, int id) -> const VehicleDetection& {
    const auto it = std::find_if(v.begin(), v.end(), [id](const VehicleDetection& d) { return d.id == id; });
    return *it;
  };

  ConstraintDecision decision;
  for (const auto& [pid, cid] : associate_vehicles(prev, curr, params.d_assoc)) {
    const VehicleDetection& a = by_id(prev, pid);
    const VehicleDetection& b = by_id(curr, cid);
    const auto matches = mutual_nn_matches(a.descriptors, b.descriptors);
    if (matches.size() < params.min_matches) continue;
    const auto mu = mean_pixel_shift(matches, a.keypoints, b.keypoints);
    if (!mu) continue;
    const double threshold = tau(b.bbox.area(), params.tau_divisor);
    if (*mu < threshold) decision.locked_pairs.push_back({pid, cid, *mu, threshold, matches.size()});
  }
  decision.constrained = !decision.locked_pairs.empty();
  return decision;
}

}  // namespace lockon
