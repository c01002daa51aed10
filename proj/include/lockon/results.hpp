#pragma once

// Delimited-text outputs: per-frame estimates, the machine-readable results
// table and a fixed-width rendering of the same numbers for terminals.

#include "lockon/evaluation.hpp"
#include "lockon/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lockon {

inline constexpr std::string_view kEstimatesHeader =
    "method,frame_id,t,segment,valid,px,py,pz,qw,qx,qy,qz,constrained,v_eff,updated";
inline constexpr std::string_view kResultsHeader =
    "method,subset,bin,frames,recall,mean_end,med_end,mean_max,med_max,constraint_frac";

/// Shortest text that reads back to the same double.
inline std::string fmt_exact(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_fixed(double v, int digits) {
  if (std::isnan(v)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string bin_label(const RecallBin& b) { return fmt_exact(b.trans) + "m/" + fmt_exact(b.rot) + "deg"; }

inline void write_estimates(std::ostream& os, Method method, const std::vector<FrameEstimate>& estimates) {
  os << kEstimatesHeader << '\n';
  const std::string m = to_string(method);
  for (const FrameEstimate& e : estimates) {
    os << m << ',' << e.frame_id << ',' << fmt_exact(e.t) << ',' << e.segment << ',' << (e.pose ? 1 : 0);
    if (e.pose) {
      const Pose6DoF& p = *e.pose;
      for (double v : {p.p.x(), p.p.y(), p.p.z(), p.q.w(), p.q.x(), p.q.y(), p.q.z()}) os << ',' << fmt_exact(v);
    } else {
      os << ",,,,,,,";
    }
    os << ',' << (e.constrained ? 1 : 0) << ',' << fmt_exact(e.v_eff) << ',' << (e.updated ? 1 : 0) << '\n';
  }
}

struct EstimateFile {
  Method method = Method::Pnp;
  std::vector<FrameEstimate> estimates;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw InputError("not a number: '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw InputError("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw InputError("not an integer: '" + s + "'");
  return v;
}

}  // namespace detail

inline EstimateFile read_estimates(std::istream& is) {
  EstimateFile out;
  std::string line;
  if (!std::getline(is, line) || line != kEstimatesHeader) throw InputError("estimates file has an unexpected header");
  std::size_t line_no = 1;
  bool first = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto c = detail::split_csv(line);
      if (c.size() != 15) throw InputError("expected 15 columns, found " + std::to_string(c.size()));
      const Method m = method_from_string(c[0]);
      if (first) out.method = m;
      else if (m != out.method) throw InputError("mixed methods in one estimates file");
      first = false;
      FrameEstimate e;
      e.frame_id = detail::parse_int(c[1]);
      e.t = detail::parse_double(c[2]);
      e.segment = static_cast<int>(detail::parse_int(c[3]));
      if (detail::parse_int(c[4]) != 0) {
        double v[7];
        for (int k = 0; k < 7; ++k) v[k] = detail::parse_double(c[5 + k]);
        e.pose = Pose6DoF{Vec3(v[0], v[1], v[2]), UnitQuaternion(v[3], v[4], v[5], v[6])};
      }
      e.constrained = detail::parse_int(c[12]) != 0;
      e.v_eff = detail::parse_double(c[13]);
      e.updated = detail::parse_int(c[14]) != 0;
      out.estimates.push_back(e);
    } catch (const InputError& err) {
      throw InputError("estimates line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return out;
}

/// One row per (subset, bin); the segment statistics repeat on every row so
/// each line stands alone.
inline void write_results(std::ostream& os, const std::vector<Summary>& summaries, bool header = true) {
  if (header) os << kResultsHeader << '\n';
  for (const Summary& s : summaries) {
    for (const SubsetSummary& sub : s.subsets) {
      for (std::size_t b = 0; b < s.bins.size(); ++b) {
        const double recall = sub.recall.empty() ? std::numeric_limits<double>::quiet_NaN() : sub.recall[b];
        os << s.method << ',' << to_string(sub.subset) << ',' << bin_label(s.bins[b]) << ',' << sub.frames << ','
           << fmt_exact(recall) << ',' << fmt_exact(s.mean_end) << ',' << fmt_exact(s.median_end) << ','
           << fmt_exact(s.mean_max) << ',' << fmt_exact(s.median_max) << ',' << fmt_exact(s.constraint_fraction)
           << '\n';
      }
    }
  }
}

inline void print_summary_table(std::ostream& os, const std::vector<Summary>& summaries) {
  if (summaries.empty()) return;
  const auto& bins = summaries.front().bins;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-6s %-9s %7s", "method", "subset", "frames");
  os << buf;
  for (const RecallBin& b : bins) {
    std::snprintf(buf, sizeof buf, " %14s", ("R@" + fmt_exact(b.trans) + "m," + fmt_exact(b.rot) + "d").c_str());
    os << buf;
  }
  os << '\n';
  for (const Summary& s : summaries) {
    for (const SubsetSummary& sub : s.subsets) {
      std::snprintf(buf, sizeof buf, "%-6s %-9s %7zu", s.method.c_str(), to_string(sub.subset).c_str(), sub.frames);
      os << buf;
      for (std::size_t b = 0; b < bins.size(); ++b) {
        std::snprintf(buf, sizeof buf, " %14s", sub.recall.empty() ? "-" : fmt_fixed(sub.recall[b], 4).c_str());
        os << buf;
      }
      os << '\n';
    }
  }
  os << '\n';
  std::snprintf(buf, sizeof buf, "%-6s %5s %10s %10s %10s %10s %12s\n", "method", "segs", "mean_end", "med_end",
                "mean_max", "med_max", "constr_frac");
  os << buf;
  for (const Summary& s : summaries) {
    std::snprintf(buf, sizeof buf, "%-6s %5zu %10s %10s %10s %10s %12s\n", s.method.c_str(), s.segments,
                  fmt_fixed(s.mean_end, 3).c_str(), fmt_fixed(s.median_end, 3).c_str(), fmt_fixed(s.mean_max, 3).c_str(),
                  fmt_fixed(s.median_max, 3).c_str(), fmt_fixed(s.constraint_fraction, 3).c_str());
    os << buf;
  }
}

/// Checks that every estimate refers to a frame of `frames` with the same
/// timestamp, then scores them.
inline Summary evaluate_estimates(const EstimateFile& file, const std::vector<FrameRecord>& frames,
                                  const std::vector<RecallBin>& bins = default_bins()) {
  if (file.estimates.empty()) throw InputError("estimates file has no rows");
  std::map<std::int64_t, double> stamp;
  for (const FrameRecord& f : frames) stamp.emplace(f.frame_id, f.t);
  for (const FrameEstimate& e : file.estimates) {
    const auto it = stamp.find(e.frame_id);
    if (it == stamp.end()) throw InputError("estimate for frame " + std::to_string(e.frame_id) + " not in the log");
    if (std::abs(it->second - e.t) > 1e-9)
      throw InputError("estimate for frame " + std::to_string(e.frame_id) + " has a different timestamp than the log");
  }
  return aggregate(build_reports(to_string(file.method), file.estimates, frames), bins);
}

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  Summary summary;
};

inline void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "parameter,value," << kResultsHeader << '\n';
  for (const SweepRow& r : rows) {
    std::ostringstream body;
    write_results(body, {r.summary}, false);
    std::istringstream lines(body.str());
    std::string line;
    while (std::getline(lines, line)) os << r.parameter << ',' << fmt_exact(r.value) << ',' << line << '\n';
  }
}

inline void print_sweep_table(std::ostream& os, const std::vector<SweepRow>& rows) {
  if (rows.empty()) return;
  const auto& bins = rows.front().summary.bins;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %12s", rows.front().parameter.c_str(), "method");
  os << buf;
  for (const RecallBin& b : bins) {
    std::snprintf(buf, sizeof buf, " %14s", ("R@" + fmt_exact(b.trans) + "m," + fmt_exact(b.rot) + "d").c_str());
    os << buf;
  }
  os << "   med_max\n";
  for (const SweepRow& r : rows) {
    const SubsetSummary& all = r.summary.subset(Subset::All);
    std::snprintf(buf, sizeof buf, "%-14s %12s", fmt_exact(r.value).c_str(), r.summary.method.c_str());
    os << buf;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      std::snprintf(buf, sizeof buf, " %14s", all.recall.empty() ? "-" : fmt_fixed(all.recall[b], 4).c_str());
      os << buf;
    }
    os << ' ' << std::string(3, ' ') << fmt_fixed(r.summary.median_max, 3) << '\n';
  }
}

}  // namespace lockon
