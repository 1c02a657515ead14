#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "gripscribe/metrics.hpp"

using namespace gripscribe;

namespace {

using cd = std::complex<double>;

// Small-signal gain from the model linearized about the operating posture:
// (-w^2 M + i w (J^T d J + B) + J^T k J) q = J^T (k + i w d) x_target.
double linear_gain_oracle(const DynamicParams& p, const HandImpedance& imp, double l, double f) {
  // Elbow-positive posture for a pen at (0, 0.28) with equal links.
  const double r = 0.28;
  const double half = std::acos(r / (2.0 * l));
  const double th1 = kPi / 2.0 - half;
  const double psi2 = kPi / 2.0 + half;
  Eigen::Matrix2d j;
  j << -l * std::sin(th1), -l * std::sin(psi2), l * std::cos(th1), l * std::cos(psi2);
  Eigen::Matrix2d m;
  const double c = p.m2 * l * p.lc2 * std::cos(th1 - psi2);
  m << p.i1 + p.m1 * p.lc1 * p.lc1 + p.m2 * l * l, c, c, p.i2 + p.m2 * p.lc2 * p.lc2;
  const Eigen::Matrix2d b = Eigen::Vector2d(p.b1, p.b2).asDiagonal();
  const double w = 2.0 * kPi * f;
  const Eigen::Matrix2cd a = (-w * w * m).cast<cd>() + cd(0.0, w) * (imp.d * j.transpose() * j + b).cast<cd>() +
                             (imp.k * j.transpose() * j).cast<cd>();
  const Eigen::Vector2cd rhs = (j.transpose() * Eigen::Vector2d(1.0, 0.0)).cast<cd>() * cd(imp.k, w * imp.d);
  const Eigen::Vector2cd q = a.partialPivLu().solve(rhs);
  return std::abs((j.cast<cd>() * q)(0));
}

SimTrace trace_with_pen(const IntentPath& path, const Vec2& offset, int n) {
  SimTrace tr;
  for (int i = 0; i < n; ++i) {
    TraceRow row;
    row.t = i * 1e-3;
    row.pen = intent_path(path, row.t).position + offset;
    row.target = row.pen;
    tr.rows.push_back(row);
  }
  return tr;
}

}  // namespace

TEST(Demodulate, RecoversKnownSinusoid) {
  const double f = 3.0, amp = 0.0042, phase = 0.7, dt = 1e-3, t0 = 1.25;
  std::vector<double> s;
  for (int i = 0; i < 2000; ++i) s.push_back(0.3 + amp * std::sin(2 * kPi * f * (t0 + i * dt) + phase));
  const Demodulated d = demodulate(s, t0, dt, f);
  EXPECT_NEAR(d.amplitude, amp, 1e-3 * amp);
  EXPECT_NEAR(d.phase, phase, 0.01);
}

TEST(Transmissibility, QuasiStaticLimit) {
  const TransmissibilityPoint p = transmissibility(DynamicParams{}, MechanismConfig{}, HandImpedance{}, 0.05);
  EXPECT_GE(p.gain, 0.95);
  EXPECT_LE(p.gain, 1.0);
}

TEST(Transmissibility, RigidFollowingWithoutDamping) {
  DynamicParams p;
  p.b1 = p.b2 = 0.0;
  HandImpedance imp;
  imp.d = 0.0;
  EXPECT_NEAR(transmissibility(p, MechanismConfig{}, imp, 0.05).gain, 1.0, 5e-3);
}

TEST(Transmissibility, MatchesLinearizedResponse) {
  for (double b : {0.01, 0.05, 0.2}) {
    DynamicParams p;
    p.b1 = p.b2 = b;
    for (double f : {0.5, 2.0, 8.0, 12.0}) {
      const double g = transmissibility(p, MechanismConfig{}, HandImpedance{}, f).gain;
      EXPECT_NEAR(g, linear_gain_oracle(p, HandImpedance{}, 0.25, f), 2e-3) << "b=" << b << " f=" << f;
    }
  }
}

TEST(Transmissibility, TremorAttenuatedMoreThanIntent) {
  const MechanismConfig cfg;
  const double g8 = transmissibility(DynamicParams{}, cfg, HandImpedance{}, 8.0).gain;
  const double g05 = transmissibility(DynamicParams{}, cfg, HandImpedance{}, 0.5).gain;
  EXPECT_LT(g8, g05);
  EXPECT_GE(g05, 0.8);
}

TEST(Transmissibility, IndependentOfBasePosition) {
  MechanismConfig moved;
  moved.base = {0.3, -0.1};
  EXPECT_NEAR(transmissibility(DynamicParams{}, moved, HandImpedance{}, 4.0).gain,
              transmissibility(DynamicParams{}, MechanismConfig{}, HandImpedance{}, 4.0).gain, 1e-12);
}

TEST(Transmissibility, MoreDampingLowersTremorGain) {
  double previous = 2.0;
  for (double b : {0.01, 0.05, 0.1, 0.2}) {
    DynamicParams p;
    p.b1 = p.b2 = b;
    const double g = transmissibility(p, MechanismConfig{}, HandImpedance{}, 8.0).gain;
    EXPECT_LT(g, previous);
    previous = g;
  }
}

TEST(FrequencySweep, MonotoneAtDefaults) {
  const std::vector<double> fs{0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0};
  const auto pts = frequency_sweep(DynamicParams{}, MechanismConfig{}, HandImpedance{}, fs);
  ASSERT_EQ(pts.size(), fs.size());
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LE(pts[i].gain, pts[i - 1].gain);
}

TEST(FrequencySweep, SingletonMatchesPoint) {
  const std::vector<double> fs{2.0};
  const auto pts = frequency_sweep(DynamicParams{}, MechanismConfig{}, HandImpedance{}, fs);
  ASSERT_EQ(pts.size(), 1u);
  const auto single = transmissibility(DynamicParams{}, MechanismConfig{}, HandImpedance{}, 2.0);
  EXPECT_EQ(pts[0].gain, single.gain);
  EXPECT_EQ(pts[0].phase, single.phase);
}

TEST(FrequencySweep, CsvAndSvg) {
  const std::vector<TransmissibilityPoint> pts{{1.0, 0.9, -0.1}, {8.0, 0.5, -0.8}};
  std::ostringstream out;
  write_sweep_csv(out, pts);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "f_hz,gain,phase_rad");
  EXPECT_NE(sweep_svg(pts).find("</svg>"), std::string::npos);
}

TEST(PathRmse, Definitions) {
  const IntentPath path;
  EXPECT_EQ(path_rmse(trace_with_pen(path, Vec2::Zero(), 2000), path), 0.0);
  const Vec2 e(0.003, -0.004);
  EXPECT_NEAR(path_rmse(trace_with_pen(path, e, 2000), path), 0.005, 1e-15);
  EXPECT_NEAR(target_rmse(trace_with_pen(path, e, 2000), path), 0.005, 1e-15);
}

TEST(PathRmse, DampingReducesTremorError) {
  const MechanismConfig cfg;
  const IntentPath path;
  const TargetFn target = make_target_fn(path, TremorSpec{});
  const JointState s0 = ik(cfg, intent_path(path, 0.0).position).solutions.front();
  DynamicParams undamped;
  undamped.b1 = undamped.b2 = 0.0;
  const SimTrace damped = simulate(DynamicParams{}, cfg, HandImpedance{}, s0, target, 5.0);
  const SimTrace free = simulate(undamped, cfg, HandImpedance{}, s0, target, 5.0);
  EXPECT_LT(path_rmse(damped, path), path_rmse(free, path));
  EXPECT_LT(path_rmse(damped, path), target_rmse(damped, path));
}
