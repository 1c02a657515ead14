#include <gtest/gtest.h>

#include <Eigen/LU>
#include <cmath>
#include <random>

#include "gripscribe/errors.hpp"
#include "gripscribe/kinematics.hpp"

using namespace gripscribe;

namespace {

// Pen position from absolute link angles, written out by hand.
Vec2 pen_oracle(double l1, double l2, double th1, double psi2) {
  return {l1 * std::cos(th1) + l2 * std::cos(psi2), l1 * std::sin(th1) + l2 * std::sin(psi2)};
}

JointState random_admissible(const MechanismConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(-kPi, kPi);
  std::uniform_real_distribution<double> gam(cfg.joint_clearance_delta, kPi - cfg.joint_clearance_delta);
  std::bernoulli_distribution sign(0.5);
  JointState s;
  s.theta1 = th(rng);
  s.psi2 = wrap_angle(s.theta1 + (sign(rng) ? 1.0 : -1.0) * gam(rng));
  return s;
}

}  // namespace

TEST(Angles, WrapIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2.0 * kPi, 1e-15);
}

TEST(Fk, FullExtensionAlongAxes) {
  MechanismConfig cfg;
  Pose2 p = fk(cfg, {0.0, 0.0});
  EXPECT_NEAR(p.x, 0.5, 1e-15);
  EXPECT_NEAR(p.y, 0.0, 1e-15);
  EXPECT_EQ(p.phi, 0.0);

  p = fk(cfg, {kPi / 2.0, kPi / 2.0});
  EXPECT_NEAR(p.x, 0.0, 1e-15);
  EXPECT_NEAR(p.y, 0.5, 1e-15);
  EXPECT_EQ(p.phi, 0.0);
}

TEST(Fk, VariantAHandleFollowsDistalLink) {
  MechanismConfig cfg;
  cfg.variant = Variant::A;
  const double th1 = deg2rad(60.0);
  const double psi2 = deg2rad(30.0);
  const Pose2 p = fk(cfg, {th1, psi2});
  const Vec2 want = pen_oracle(0.25, 0.25, th1, psi2);
  EXPECT_NEAR(p.x, want.x(), 1e-12);
  EXPECT_NEAR(p.y, want.y(), 1e-12);
  EXPECT_NEAR(p.x, 0.34151, 1e-5);
  EXPECT_NEAR(p.phi, psi2, 1e-15);
}

TEST(Fk, BaseOffsetTranslatesPen) {
  MechanismConfig cfg;
  cfg.base = {0.1, -0.2};
  const JointState s{0.3, 1.4};
  const Vec2 want = cfg.base + pen_oracle(cfg.l1, cfg.l2, s.theta1, s.psi2);
  EXPECT_NEAR((pen_position(cfg, s) - want).norm(), 0.0, 1e-15);
}

TEST(Fk, OrientationConstantForParallelogramVariants) {
  std::mt19937_64 rng(7);
  for (Variant v : {Variant::B, Variant::C}) {
    MechanismConfig cfg;
    cfg.variant = v;
    for (int i = 0; i < 2000; ++i) {
      EXPECT_EQ(fk(cfg, random_admissible(cfg, rng)).phi, 0.0);
    }
  }
}

TEST(Ik, FullExtensionIsSingleState) {
  const IkResult r = ik(MechanismConfig{}, {0.5, 0.0});
  ASSERT_EQ(r.solutions.size(), 1u);
  EXPECT_NEAR(r.solutions[0].theta1, 0.0, 1e-7);
  EXPECT_NEAR(r.solutions[0].psi2, 0.0, 1e-7);
}

TEST(Ik, TwoBranchesAtElbowTarget) {
  const IkResult r = ik(MechanismConfig{}, {0.25, 0.25});
  ASSERT_EQ(r.solutions.size(), 2u);
  EXPECT_NEAR(r.solutions[0].theta1, 0.0, 1e-12);
  EXPECT_NEAR(r.solutions[0].psi2, kPi / 2.0, 1e-12);
  EXPECT_NEAR(r.solutions[1].theta1, kPi / 2.0, 1e-12);
  EXPECT_NEAR(r.solutions[1].psi2, 0.0, 1e-12);
  for (const JointState& s : r.solutions) {
    const Vec2 p = pen_oracle(0.25, 0.25, s.theta1, s.psi2);
    EXPECT_NEAR((p - Vec2(0.25, 0.25)).norm(), 0.0, 1e-12);
  }
}

TEST(Ik, OutsideAnnulusThrows) {
  EXPECT_THROW(ik(MechanismConfig{}, {0.6, 0.0}), OutOfReach);
  MechanismConfig uneven;
  uneven.l2 = 0.15;
  EXPECT_THROW(ik(uneven, {0.05, 0.0}), OutOfReach);
}

TEST(Ik, JointLimitFiltersBranches) {
  MechanismConfig cfg;
  cfg.theta1_range = {-0.1, 0.1};
  const IkResult r = ik(cfg, {0.25, 0.25});
  ASSERT_EQ(r.solutions.size(), 1u);
  EXPECT_EQ(r.filtered, 1);
  EXPECT_NEAR(r.solutions[0].theta1, 0.0, 1e-12);
}

TEST(Ik, RoundtripOverRandomAdmissibleStates) {
  std::mt19937_64 rng(11);
  for (Variant v : {Variant::A, Variant::B, Variant::C}) {
    MechanismConfig cfg;
    cfg.variant = v;
    cfg.base = {0.03, -0.02};
    for (int i = 0; i < 1000; ++i) {
      const JointState s = random_admissible(cfg, rng);
      const Vec2 p = fk(cfg, s).position();
      const IkResult r = ik(cfg, p);
      double best = INFINITY;
      for (const JointState& q : r.solutions) best = std::min(best, (fk(cfg, q).position() - p).norm());
      EXPECT_LT(best, 1e-9);
    }
  }
}

TEST(Jacobian, AxisAlignedLinks) {
  const Eigen::Matrix2d j = jacobian(MechanismConfig{}, {0.0, kPi / 2.0});
  EXPECT_NEAR(j(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(j(0, 1), -0.25, 1e-15);
  EXPECT_NEAR(j(1, 0), 0.25, 1e-15);
  EXPECT_NEAR(j(1, 1), 0.0, 1e-15);
}

TEST(Jacobian, DeterminantClosedForm) {
  MechanismConfig cfg;
  EXPECT_NEAR(jacobian(cfg, {0.7, 0.7}).determinant(), 0.0, 1e-15);
  const double th1 = deg2rad(30.0);
  const double psi2 = deg2rad(120.0);
  EXPECT_NEAR(jacobian(cfg, {th1, psi2}).determinant(), 0.0625, 1e-15);
}

TEST(Jacobian, MatchesCentralDifferences) {
  MechanismConfig cfg;
  std::mt19937_64 rng(3);
  const double h = 1e-7;
  for (int i = 0; i < 500; ++i) {
    const JointState s = random_admissible(cfg, rng);
    const Eigen::Matrix2d j = jacobian(cfg, s);
    Eigen::Matrix2d fd;
    fd.col(0) = (pen_oracle(cfg.l1, cfg.l2, s.theta1 + h, s.psi2) -
                 pen_oracle(cfg.l1, cfg.l2, s.theta1 - h, s.psi2)) / (2.0 * h);
    fd.col(1) = (pen_oracle(cfg.l1, cfg.l2, s.theta1, s.psi2 + h) -
                 pen_oracle(cfg.l1, cfg.l2, s.theta1, s.psi2 - h)) / (2.0 * h);
    EXPECT_LT((j - fd).norm() / j.norm(), 1e-6);
  }
}

TEST(Admissibility, ClearanceBandAroundAlignment) {
  MechanismConfig cfg;
  EXPECT_FALSE(is_admissible(cfg, {0.0, 0.0}));
  EXPECT_FALSE(is_admissible(cfg, {0.0, kPi}));
  EXPECT_FALSE(is_admissible(cfg, {0.0, deg2rad(9.0)}));
  EXPECT_TRUE(is_admissible(cfg, {0.0, deg2rad(11.0)}));
  EXPECT_TRUE(is_admissible(cfg, {0.0, -deg2rad(169.0)}));
  EXPECT_FALSE(is_admissible(cfg, {0.0, -deg2rad(171.0)}));
}

TEST(MechanismConfig, ValidationRejectsBadLengths) {
  MechanismConfig cfg;
  cfg.l1 = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = MechanismConfig{};
  cfg.joint_clearance_delta = kPi;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}
