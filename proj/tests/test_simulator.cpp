#include "lockon/pipeline.hpp"
#include "lockon/simulator.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace lockon;

namespace {

Scenario plain(double speed, double curvature, double duration) {
  Scenario sc;
  sc.speed = speed;
  sc.curvature = curvature;
  sc.duration = duration;
  sc.noise = testing_support::no_noise();
  return sc;
}

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST(PiecewiseLinear, InterpolatesAndHolds) {
  const PiecewiseLinear f({{0.0, 0.0}, {2.0, 4.0}, {4.0, 0.0}});
  EXPECT_DOUBLE_EQ(f(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(f(1.0), 2.0);
  EXPECT_DOUBLE_EQ(f(3.0), 2.0);
  EXPECT_DOUBLE_EQ(f(9.0), 0.0);
  EXPECT_DOUBLE_EQ(f.integral(0.0, 4.0), 8.0);
  EXPECT_DOUBLE_EQ(f.integral(1.0, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(f.integral(4.0, 0.0), -8.0);
  EXPECT_DOUBLE_EQ(PiecewiseLinear(3.0).integral(0.0, 2.5), 7.5);
  EXPECT_THROW(PiecewiseLinear({{1.0, 0.0}, {1.0, 2.0}}), InputError);
}

TEST(Trajectory, StraightLine) {
  const SimulatedLog log = simulate(plain(15.0, 0.0, 10.0));
  const FrameRecord& last = log.frames.back();
  EXPECT_NEAR(last.t, 10.0, 1e-6);
  EXPECT_NEAR((last.gt->p - Vec3(150, 0, 0)).norm(), 0.0, 1e-6);
  EXPECT_NEAR(rotation_angle_between(last.gt->q, UnitQuaternion()), 0.0, 1e-9);
}

TEST(Trajectory, HalfTurn) {
  const SimulatedLog log = simulate(plain(10.0, 1.0 / 50.0, 5.0 * std::numbers::pi));
  const FrameRecord& last = log.frames.back();
  EXPECT_NEAR(rotation_angle_between(last.gt->q, quat_from_yaw(std::numbers::pi)), 0.0, 1e-6);
  EXPECT_NEAR((last.gt->p - Vec3(0, 100, 0)).norm(), 0.0, 1e-6);
  for (const FrameRecord& f : log.frames) EXPECT_NEAR((f.gt->p - Vec3(0, 50, 0)).norm(), 50.0, 1e-6);
}

TEST(Trajectory, FramesEveryFrameSpacing) {
  const SimulatedLog log = simulate(plain(15.0, 0.0, 10.0));
  EXPECT_EQ(log.frames.size(), 101u);
  for (std::size_t k = 1; k < log.frames.size(); ++k) {
    EXPECT_NEAR((log.frames[k].gt->p - log.frames[k - 1].gt->p).norm(), 1.5, 1e-6);
    EXPECT_NEAR(log.frames[k].t - log.frames[k - 1].t, 0.1, 1e-9);
  }
}

TEST(Trajectory, StandstillHoldsPoseAtOneHertz) {
  const SimulatedLog log = simulate(plain(0.0, 0.01, 5.0));
  ASSERT_EQ(log.frames.size(), 6u);
  for (const FrameRecord& f : log.frames) {
    EXPECT_EQ(f.gt->p, Vec3::Zero());
    EXPECT_EQ(f.gt_v->norm(), 0.0);
    EXPECT_EQ(f.imu.accel.norm(), 0.0);
    EXPECT_EQ(f.imu.gyro.norm(), 0.0);
  }
}

TEST(Trajectory, TimestampsIncreaseWithinMaxInterval) {
  for (const std::string& name : preset_names()) {
    const SimulatedLog log = simulate(preset(name, 2));
    std::set<std::int64_t> ids;
    for (std::size_t k = 0; k < log.frames.size(); ++k) {
      EXPECT_TRUE(ids.insert(log.frames[k].frame_id).second);
      if (k == 0) continue;
      const double dt = log.frames[k].t - log.frames[k - 1].t;
      EXPECT_GT(dt, 0.0) << name;
      EXPECT_LE(dt, 1.0 + 1e-9) << name;
    }
  }
}

TEST(Trajectory, VelocityMatchesFiniteDifference) {
  for (const char* name : {"curve", "stop-and-go", "mixed"}) {
    const SimulatedLog log = simulate(preset(name, 1));
    const Scenario& sc = log.scenario;
    for (std::size_t k = 0; k < log.frames.size(); ++k) {
      const FrameRecord& b = log.frames[k];
      const double yaw = yaw_of(b.gt->q);
      const Vec3 expected = sc.speed(b.t) * Vec3(std::cos(yaw), std::sin(yaw), 0.0);
      EXPECT_NEAR((*b.gt_v - expected).norm(), 0.0, 1e-6) << name << " frame " << k;
      if (k == 0) continue;
      // chord over the interval against the travelled arc length
      const FrameRecord& a = log.frames[k - 1];
      const double fd = (b.gt->p - a.gt->p).norm() / (b.t - a.t);
      const double mean_speed = sc.speed.integral(a.t, b.t) / (b.t - a.t);
      EXPECT_NEAR(fd, mean_speed, 0.01 * std::max(1.0, mean_speed)) << name << " frame " << k;
    }
  }
}

TEST(Imu, StraightConstantSpeedIsZero) {
  const SimulatedLog log = simulate(plain(15.0, 0.0, 10.0));
  for (const FrameRecord& f : log.frames) {
    EXPECT_NEAR(f.imu.accel.norm(), 0.0, 1e-9);
    EXPECT_NEAR(f.imu.gyro.norm(), 0.0, 1e-12);
  }
}

TEST(Imu, ConstantTurnGivesCentripetalAndYawRate) {
  const double v = 10.0;
  const double kappa = 0.02;
  const SimulatedLog log = simulate(plain(v, kappa, 10.0));
  for (std::size_t k = 1; k < log.frames.size(); ++k) {
    const ImuSample& imu = log.frames[k].imu;
    EXPECT_NEAR(imu.gyro.z(), v * kappa, 1e-6);
    EXPECT_NEAR(imu.accel.y(), v * v * kappa, 1e-3 * v * v * kappa);
    EXPECT_NEAR(imu.accel.z(), 0.0, 1e-12);
  }
}

TEST(Imu, NoiseHasConfiguredSpread) {
  Scenario sc = plain(15.0, 0.0, 700.0);
  sc.noise.sigma_imu_a = 0.02;
  sc.noise.sigma_imu_w = 0.001;
  const SimulatedLog log = simulate(sc);
  std::vector<double> a;
  std::vector<double> w;
  for (std::size_t k = 1; k < log.frames.size(); ++k) {
    for (int i = 0; i < 3; ++i) {
      a.push_back(log.frames[k].imu.accel[i]);
      w.push_back(log.frames[k].imu.gyro[i]);
    }
  }
  ASSERT_GE(a.size(), 10000u);
  EXPECT_NEAR(rms(a), 0.02, 0.05 * 0.02);
  EXPECT_NEAR(rms(w), 0.001, 0.05 * 0.001);
}

TEST(Measurements, ZeroNoiseEqualsTruth) {
  const SimulatedLog log = simulate(plain(12.0, 0.01, 20.0));
  for (const FrameRecord& f : log.frames) {
    ASSERT_TRUE(f.meas);
    EXPECT_EQ(f.meas->p, f.gt->p);
    EXPECT_NEAR(rotation_angle_between(f.meas->q, f.gt->q), 0.0, 1e-12);
  }
}

TEST(Measurements, NoiseHasConfiguredSpread) {
  Scenario sc = plain(15.0, 0.0, 700.0);
  sc.noise.sigma_pnp_t = 0.2;
  sc.noise.sigma_pnp_r_deg = 1.0;
  const SimulatedLog log = simulate(sc);
  std::vector<double> t;
  std::vector<double> r;
  for (const FrameRecord& f : log.frames) {
    for (int i = 0; i < 3; ++i) t.push_back(f.meas->p[i] - f.gt->p[i]);
    r.push_back(rotation_angle_between(f.meas->q, f.gt->q));
  }
  ASSERT_GE(t.size(), 10000u);
  EXPECT_NEAR(rms(t), 0.2, 0.05 * 0.2);
  EXPECT_NEAR(rms(r), 1.0, 0.05);
}

TEST(Measurements, OutliersArePlanarWithConfiguredMagnitude) {
  Scenario sc = plain(15.0, 0.0, 20.0);
  sc.noise.outlier_rate = 1.0;
  sc.noise.outlier_min = sc.noise.outlier_max = 5.0;
  const SimulatedLog log = simulate(sc);
  for (const FrameRecord& f : log.frames) {
    const Vec3 d = f.meas->p - f.gt->p;
    EXPECT_NEAR(d.norm(), 5.0, 1e-9);
    EXPECT_EQ(d.z(), 0.0);
  }
}

TEST(Measurements, OutlierRate) {
  Scenario sc = plain(15.0, 0.0, 700.0);
  sc.noise.outlier_rate = 0.1;
  const SimulatedLog log = simulate(sc);
  std::size_t n = 0;
  for (const FrameRecord& f : log.frames) {
    const double d = (f.meas->p - f.gt->p).norm();
    if (d > 0.0) {
      EXPECT_GE(d, 5.0 - 1e-9);
      EXPECT_LE(d, 20.0 + 1e-9);
      ++n;
    }
  }
  EXPECT_NEAR(static_cast<double>(n) / static_cast<double>(log.frames.size()), 0.1, 0.015);
}

TEST(Measurements, DropoutLeavesGaps) {
  Scenario sc = plain(15.0, 0.0, 100.0);
  sc.noise.meas_dropout = 0.3;
  const SimulatedLog log = simulate(sc);
  std::size_t missing = 0;
  for (const FrameRecord& f : log.frames) missing += f.meas ? 0 : 1;
  EXPECT_NEAR(static_cast<double>(missing) / static_cast<double>(log.frames.size()), 0.3, 0.05);
}

TEST(Simulate, DeterministicPerSeed) {
  const SimulatedLog a = simulate(preset("mixed", 9));
  const SimulatedLog b = simulate(preset("mixed", 9));
  const SimulatedLog c = simulate(preset("mixed", 10));
  ASSERT_EQ(a.frames.size(), b.frames.size());
  bool differs = false;
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    EXPECT_EQ(a.frames[k].t, b.frames[k].t);
    EXPECT_EQ(a.frames[k].meas->p, b.frames[k].meas->p);
    EXPECT_EQ(a.frames[k].imu.accel, b.frames[k].imu.accel);
    ASSERT_EQ(a.frames[k].detections.size(), b.frames[k].detections.size());
    for (std::size_t d = 0; d < a.frames[k].detections.size(); ++d) {
      EXPECT_EQ(a.frames[k].detections[d].descriptors, b.frames[k].detections[d].descriptors);
      EXPECT_EQ(a.frames[k].detections[d].keypoints, b.frames[k].detections[d].keypoints);
    }
    if (k < c.frames.size() && c.frames[k].meas->p != a.frames[k].meas->p) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(Scenario, Validation) {
  Scenario sc;
  sc.duration = 0.0;
  EXPECT_THROW(simulate(sc), InputError);
  sc = Scenario{};
  sc.speed = -1.0;
  EXPECT_THROW(simulate(sc), InputError);
  sc = Scenario{};
  sc.noise.outlier_rate = 1.5;
  EXPECT_THROW(simulate(sc), InputError);
  sc = Scenario{};
  sc.noise.outlier_min = 10.0;
  sc.noise.outlier_max = 5.0;
  EXPECT_THROW(simulate(sc), InputError);
  EXPECT_THROW(preset("nowhere"), InputError);
}

TEST(Scene, NoLeadsNoDetections) {
  const SimulatedLog log = simulate(preset("highway-empty", 1));
  for (const FrameRecord& f : log.frames) EXPECT_TRUE(f.detections.empty());
  EXPECT_EQ(truth_constraint_fraction(log.frames), 0.0);
}

TEST(Scene, ConstantGapHoldsStillInImage) {
  Scenario sc = plain(15.0, 0.0, 10.0);
  sc.leads.push_back(LeadVehicle{});
  const SimulatedLog log = simulate(sc);
  for (std::size_t k = 1; k < log.frames.size(); ++k) {
    ASSERT_EQ(log.frames[k].detections.size(), 1u);
    const BoundingBox& a = log.frames[k - 1].detections[0].bbox;
    const BoundingBox& b = log.frames[k].detections[0].bbox;
    EXPECT_LT(std::abs(a.u_min - b.u_min) + std::abs(a.v_max - b.v_max), 0.1);
    EXPECT_TRUE(*log.frames[k].truth_constrained);
  }
}

TEST(Scene, ClosingLeadGrows) {
  Scenario sc = plain(15.0, 0.0, 6.0);
  LeadVehicle lead;
  lead.initial_gap = 30.0;
  lead.relative_speed = -2.0;
  sc.leads.push_back(lead);
  const SimulatedLog log = simulate(sc);
  for (std::size_t k = 1; k < log.frames.size(); ++k) {
    ASSERT_EQ(log.frames[k].detections.size(), 1u);
    EXPECT_GT(log.frames[k].detections[0].bbox.area(), log.frames[k - 1].detections[0].bbox.area());
    EXPECT_FALSE(*log.frames[k].truth_constrained);
  }
}

TEST(Scene, KeypointsInsideImageAndBox) {
  const SimulatedLog log = simulate(preset("campus-curves", 4));
  for (const FrameRecord& f : log.frames) {
    for (const VehicleDetection& d : f.detections) {
      EXPECT_EQ(static_cast<std::size_t>(d.descriptors.rows()), d.keypoints.size());
      EXPECT_EQ(d.descriptors.cols(), kDescriptorDim);
      for (const auto& p : d.keypoints) {
        EXPECT_GE(p.x(), d.bbox.u_min);
        EXPECT_LE(p.x(), d.bbox.u_max);
        EXPECT_GE(p.y(), d.bbox.v_min);
        EXPECT_LE(p.y(), d.bbox.v_max);
        EXPECT_LT(p.x(), 1024.0);
        EXPECT_LT(p.y(), 768.0);
      }
    }
  }
}

TEST(Scene, TruthLabelsFollowScenario) {
  EXPECT_GT(truth_constraint_fraction(simulate(preset("highway", 1)).frames), 0.9);
  EXPECT_LT(truth_constraint_fraction(simulate(preset("campus-curves", 1)).frames), 0.2);
}

TEST(Scene, DetectorAgreesWithTruth) {
  for (const char* name : {"highway", "curve", "campus-curves", "mixed", "stop-and-go"}) {
    const SimulatedLog log = simulate(preset(name, 1));
    const auto decisions = detect_constraints(log.frames, log.scenario.camera);
    std::size_t agree = 0;
    for (std::size_t k = 1; k < log.frames.size(); ++k) {
      agree += decisions[k].constrained == *log.frames[k].truth_constrained ? 1 : 0;
    }
    EXPECT_GE(static_cast<double>(agree) / static_cast<double>(log.frames.size() - 1), 0.9) << name;
  }
}
