#pragma once

// Line-delimited JSON frame logs. The first line is a header carrying the
// schema tag, camera intrinsics, seed and (for simulated logs) the scenario
// that produced the log; every following line is one FrameRecord.
//
// Keypoint descriptors are stored as base64 of little-endian float32 rows so
// a log stays compact and round-trips bit-exactly.

#include "lockon/constraint.hpp"
#include "lockon/simulator.hpp"
#include "lockon/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lockon {

inline constexpr std::string_view kFrameLogSchema = "lockon.framelog/1";

using nlohmann::json;

namespace codec {

inline std::string base64_encode(const std::uint8_t* data, std::size_t n) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < n; i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < n) {
    std::uint32_t v = data[i] << 16;
    if (i + 1 < n) v |= data[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < n ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view s) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (s.size() % 4 != 0) throw InputError("base64 length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(s.size() / 4 * 3);
  for (std::size_t i = 0; i < s.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = s[i + k];
      if (c == '=' && i + 4 == s.size() && k >= 2) {
        v[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) throw InputError("malformed base64 padding");
      v[k] = value(c);
      if (v[k] < 0) throw InputError("invalid base64 character");
    }
    const std::uint32_t w = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(w >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(w >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(w));
  }
  return out;
}

inline std::string encode_floats(const Eigen::MatrixXf& m) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 4);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(m(r, c));
      for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
  }
  return base64_encode(bytes.data(), bytes.size());
}

inline Eigen::MatrixXf decode_floats(std::string_view s, Eigen::Index rows, Eigen::Index cols) {
  const auto bytes = base64_decode(s);
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * 4) throw InputError("descriptor payload size mismatch");
  Eigen::MatrixXf m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, k += 4) {
      const std::uint32_t bits = bytes[k] | (bytes[k + 1] << 8) | (bytes[k + 2] << 16) |
                                 (static_cast<std::uint32_t>(bytes[k + 3]) << 24);
      m(r, c) = std::bit_cast<float>(bits);
    }
  }
  return m;
}

}  // namespace codec

namespace detail {

inline json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json pose_json(const Pose6DoF& p) {
  return {{"p", vec_json(p.p)}, {"q", json::array({p.q.w(), p.q.x(), p.q.y(), p.q.z()})}};
}

inline Pose6DoF pose_from(const json& j) {
  const json& q = j.at("q");
  if (!q.is_array() || q.size() != 4) throw InputError("quaternion must be [w, x, y, z]");
  const double w = q[0].get<double>();
  const double x = q[1].get<double>();
  const double y = q[2].get<double>();
  const double z = q[3].get<double>();
  if (!(std::abs(std::sqrt(w * w + x * x + y * y + z * z) - 1.0) < 1e-6)) throw InputError("quaternion is not unit norm");
  return {vec_from(j.at("p")), UnitQuaternion(w, x, y, z)};
}

/// Rejects keys outside `allowed`; catches misspelt scenario fields.
inline void require_known_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InputError("unknown " + std::string(what) + " field: " + key);
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline json profile_json(const PiecewiseLinear& p) {
  if (p.knots().size() == 1) return p.knots().front().value;
  json arr = json::array();
  for (const Knot& k : p.knots()) arr.push_back(json::array({k.at, k.value}));
  return arr;
}

inline PiecewiseLinear profile_from(const json& j) {
  if (j.is_number()) return PiecewiseLinear(j.get<double>());
  if (!j.is_array() || j.empty()) throw InputError("profile must be a number or a list of [at, value] knots");
  std::vector<Knot> knots;
  for (const json& k : j) {
    if (!k.is_array() || k.size() != 2) throw InputError("profile knot must be [at, value]");
    knots.push_back({k[0].get<double>(), k[1].get<double>()});
  }
  return PiecewiseLinear(std::move(knots));
}

}  // namespace detail

inline json camera_to_json(const CameraModel& c) {
  return {{"fu", c.fu}, {"fv", c.fv}, {"cu", c.cu}, {"cv", c.cv},
          {"width", c.width}, {"height", c.height}, {"mount_height", c.mount_height}};
}

inline CameraModel camera_from_json(const json& j) {
  detail::require_known_keys(j, {"fu", "fv", "cu", "cv", "width", "height", "mount_height"}, "camera");
  CameraModel c;
  detail::read_opt(j, "fu", c.fu);
  detail::read_opt(j, "fv", c.fv);
  detail::read_opt(j, "cu", c.cu);
  detail::read_opt(j, "cv", c.cv);
  detail::read_opt(j, "width", c.width);
  detail::read_opt(j, "height", c.height);
  detail::read_opt(j, "mount_height", c.mount_height);
  return c;
}

inline json scenario_to_json(const Scenario& sc) {
  json leads = json::array();
  for (const LeadVehicle& l : sc.leads) {
    leads.push_back({{"initial_gap", l.initial_gap},
                     {"relative_speed", detail::profile_json(l.relative_speed)},
                     {"lateral_offset", l.lateral_offset},
                     {"width", l.width},
                     {"height", l.height},
                     {"ground_clearance", l.ground_clearance},
                     {"grid_cols", l.grid_cols},
                     {"grid_rows", l.grid_rows}});
  }
  const SensorNoise& n = sc.noise;
  return {{"name", sc.name},
          {"kind", std::string(to_string(sc.kind))},
          {"duration", sc.duration},
          {"speed", detail::profile_json(sc.speed)},
          {"curvature", detail::profile_json(sc.curvature)},
          {"leads", leads},
          {"camera", camera_to_json(sc.camera)},
          {"noise",
           {{"sigma_pnp_t", n.sigma_pnp_t},
            {"sigma_pnp_r_deg", n.sigma_pnp_r_deg},
            {"outlier_rate", n.outlier_rate},
            {"outlier_min", n.outlier_min},
            {"outlier_max", n.outlier_max},
            {"sigma_imu_a", n.sigma_imu_a},
            {"sigma_imu_w", n.sigma_imu_w},
            {"sigma_desc", n.sigma_desc},
            {"meas_dropout", n.meas_dropout}}},
          {"seed", sc.seed},
          {"frame_spacing", sc.frame_spacing},
          {"max_frame_interval", sc.max_frame_interval},
          {"truth_tolerance", sc.truth_tolerance}};
}

/// Scenario from JSON. Missing fields keep their defaults; a "preset" key
/// starts from that preset instead. Unknown keys are rejected.
inline Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw InputError("scenario must be a JSON object");
  detail::require_known_keys(j,
                             {"preset", "name", "kind", "duration", "speed", "curvature", "leads", "camera", "noise",
                              "seed", "frame_spacing", "max_frame_interval", "truth_tolerance"},
                             "scenario");
  Scenario sc;
  if (j.contains("preset")) sc = preset(j.at("preset").get<std::string>(), j.value("seed", std::uint64_t{1}));
  detail::read_opt(j, "name", sc.name);
  if (j.contains("kind")) sc.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
  detail::read_opt(j, "duration", sc.duration);
  if (j.contains("speed")) sc.speed = detail::profile_from(j.at("speed"));
  if (j.contains("curvature")) sc.curvature = detail::profile_from(j.at("curvature"));
  if (j.contains("leads")) {
    sc.leads.clear();
    for (const json& lj : j.at("leads")) {
      detail::require_known_keys(lj,
                                 {"initial_gap", "relative_speed", "lateral_offset", "width", "height",
                                  "ground_clearance", "grid_cols", "grid_rows"},
                                 "lead vehicle");
      LeadVehicle l;
      detail::read_opt(lj, "initial_gap", l.initial_gap);
      if (lj.contains("relative_speed")) l.relative_speed = detail::profile_from(lj.at("relative_speed"));
      detail::read_opt(lj, "lateral_offset", l.lateral_offset);
      detail::read_opt(lj, "width", l.width);
      detail::read_opt(lj, "height", l.height);
      detail::read_opt(lj, "ground_clearance", l.ground_clearance);
      detail::read_opt(lj, "grid_cols", l.grid_cols);
      detail::read_opt(lj, "grid_rows", l.grid_rows);
      sc.leads.push_back(l);
    }
  }
  if (j.contains("camera")) sc.camera = camera_from_json(j.at("camera"));
  if (j.contains("noise")) {
    const json& nj = j.at("noise");
    detail::require_known_keys(nj,
                               {"sigma_pnp_t", "sigma_pnp_r_deg", "outlier_rate", "outlier_min", "outlier_max",
                                "sigma_imu_a", "sigma_imu_w", "sigma_desc", "meas_dropout"},
                               "noise");
    SensorNoise& n = sc.noise;
    detail::read_opt(nj, "sigma_pnp_t", n.sigma_pnp_t);
    detail::read_opt(nj, "sigma_pnp_r_deg", n.sigma_pnp_r_deg);
    detail::read_opt(nj, "outlier_rate", n.outlier_rate);
    detail::read_opt(nj, "outlier_min", n.outlier_min);
    detail::read_opt(nj, "outlier_max", n.outlier_max);
    detail::read_opt(nj, "sigma_imu_a", n.sigma_imu_a);
    detail::read_opt(nj, "sigma_imu_w", n.sigma_imu_w);
    detail::read_opt(nj, "sigma_desc", n.sigma_desc);
    detail::read_opt(nj, "meas_dropout", n.meas_dropout);
  }
  detail::read_opt(j, "seed", sc.seed);
  detail::read_opt(j, "frame_spacing", sc.frame_spacing);
  detail::read_opt(j, "max_frame_interval", sc.max_frame_interval);
  detail::read_opt(j, "truth_tolerance", sc.truth_tolerance);
  sc.validate();
  return sc;
}

inline json detection_to_json(const VehicleDetection& d) {
  json kp = json::array();
  for (const Eigen::Vector2d& k : d.keypoints) {
    kp.push_back(k.x());
    kp.push_back(k.y());
  }
  return {{"id", d.id},
          {"bbox", json::array({d.bbox.u_min, d.bbox.v_min, d.bbox.u_max, d.bbox.v_max})},
          {"mask_area", d.mask_area},
          {"kp", kp},
          {"n", d.descriptors.rows()},
          {"dim", d.descriptors.cols()},
          {"desc", codec::encode_floats(d.descriptors)}};
}

inline VehicleDetection detection_from_json(const json& j) {
  const json& b = j.at("bbox");
  if (!b.is_array() || b.size() != 4) throw InputError("bbox must be [u_min, v_min, u_max, v_max]");
  const BoundingBox bbox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  const json& kp = j.at("kp");
  const auto n = j.at("n").get<Eigen::Index>();
  const auto dim = j.at("dim").get<Eigen::Index>();
  if (n <= 0 || dim <= 0 || kp.size() != static_cast<std::size_t>(2 * n)) throw InputError("keypoint count mismatch");
  std::vector<Eigen::Vector2d> kps(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) kps[i] = {kp[2 * i].get<double>(), kp[2 * i + 1].get<double>()};
  if (!(bbox.area() > 0.0)) throw InputError("bounding box area must be positive");
  // stored rows are taken as-is: renormalizing float32 rows would drift by an ulp on every read
  Eigen::MatrixXf desc = codec::decode_floats(j.at("desc").get<std::string>(), n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(desc.row(i).norm() - 1.0f) > 1e-4f) throw InputError("descriptor rows must have unit norm");
  }
  VehicleDetection d;
  d.id = j.at("id").get<int>();
  d.bbox = bbox;
  d.mask_area = j.at("mask_area").get<double>();
  d.keypoints = std::move(kps);
  d.pooled = pool_descriptor(desc);
  d.descriptors = std::move(desc);
  return d;
}

inline json frame_to_json(const FrameRecord& f) {
  json dets = json::array();
  for (const VehicleDetection& d : f.detections) dets.push_back(detection_to_json(d));
  return {{"type", "frame"},
          {"id", f.frame_id},
          {"t", f.t},
          {"imu", {{"a", detail::vec_json(f.imu.accel)}, {"w", detail::vec_json(f.imu.gyro)}}},
          {"meas", f.meas ? detail::pose_json(*f.meas) : json(nullptr)},
          {"dets", dets},
          {"gt", f.gt ? detail::pose_json(*f.gt) : json(nullptr)},
          {"gt_v", f.gt_v ? detail::vec_json(*f.gt_v) : json(nullptr)},
          {"truth", f.truth_constrained ? json(*f.truth_constrained) : json(nullptr)}};
}

inline FrameRecord frame_from_json(const json& j) {
  if (j.value("type", "") != "frame") throw InputError("expected a frame record");
  FrameRecord f;
  f.frame_id = j.at("id").get<std::int64_t>();
  f.t = j.at("t").get<double>();
  f.imu.accel = detail::vec_from(j.at("imu").at("a"));
  f.imu.gyro = detail::vec_from(j.at("imu").at("w"));
  if (j.contains("meas") && !j.at("meas").is_null()) f.meas = detail::pose_from(j.at("meas"));
  if (j.contains("dets")) {
    for (const json& d : j.at("dets")) f.detections.push_back(detection_from_json(d));
  }
  if (j.contains("gt") && !j.at("gt").is_null()) f.gt = detail::pose_from(j.at("gt"));
  if (j.contains("gt_v") && !j.at("gt_v").is_null()) f.gt_v = detail::vec_from(j.at("gt_v"));
  if (j.contains("truth") && !j.at("truth").is_null()) f.truth_constrained = j.at("truth").get<bool>();
  return f;
}

struct FrameLog {
  std::uint64_t seed = 0;
  CameraModel camera;
  std::optional<Scenario> scenario;
  std::vector<FrameRecord> frames;
};

inline void write_frame_log(std::ostream& os, const FrameLog& log) {
  json header = {{"type", "header"},
                 {"schema", kFrameLogSchema},
                 {"seed", log.seed},
                 {"camera", camera_to_json(log.camera)},
                 {"scenario", log.scenario ? scenario_to_json(*log.scenario) : json(nullptr)},
                 {"frames", log.frames.size()}};
  os << header.dump() << '\n';
  for (const FrameRecord& f : log.frames) os << frame_to_json(f).dump() << '\n';
  if (!os) throw std::runtime_error("failed writing frame log");
}

inline FrameLog to_frame_log(const SimulatedLog& sim) {
  return {sim.scenario.seed, sim.scenario.camera, sim.scenario, sim.frames};
}

/// Parses a frame log. Malformed content raises InputError naming the line.
inline FrameLog read_frame_log(std::istream& is) {
  FrameLog log;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> expected;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("type", "") != "header") throw InputError("first record must be the header");
        if (j.value("schema", "") != kFrameLogSchema) throw InputError("unsupported schema");
        log.seed = j.value("seed", std::uint64_t{0});
        log.camera = camera_from_json(j.at("camera"));
        if (j.contains("scenario") && !j.at("scenario").is_null()) log.scenario = scenario_from_json(j.at("scenario"));
        if (j.contains("frames")) expected = j.at("frames").get<std::size_t>();
        have_header = true;
        continue;
      }
      FrameRecord f = frame_from_json(j);
      if (!log.frames.empty() && !(f.t > log.frames.back().t)) throw InputError("timestamps must strictly increase");
      log.frames.push_back(std::move(f));
    } catch (const json::exception& e) {
      throw InputError("frame log line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("frame log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw InputError("frame log is empty");
  if (expected && *expected != log.frames.size())
    throw InputError("frame log truncated: header promises " + std::to_string(*expected) + " frames, found " +
                     std::to_string(log.frames.size()));
  std::set<std::int64_t> ids;
  for (const FrameRecord& f : log.frames) {
    if (!ids.insert(f.frame_id).second) throw InputError("duplicate frame id " + std::to_string(f.frame_id));
  }
  return log;
}

}  // namespace lockon
