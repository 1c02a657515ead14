#include "gripscribe/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gripscribe/errors.hpp"

namespace gripscribe {
namespace {

// Relative angles this close to 0 or pi are treated as a single (coincident)
// elbow branch. Snapping moves the pen by at most ~L * tol^2.
constexpr double kBranchTol = 1e-7;
constexpr double kReachTol = 1e-12;
constexpr double kAdmissibleTol = 1e-12;

}  // namespace

void MechanismConfig::validate() const {
  if (!(l1 > 0.0) || !std::isfinite(l1)) throw InvalidArgument("l1 must be > 0");
  if (!(l2 > 0.0) || !std::isfinite(l2)) throw InvalidArgument("l2 must be > 0");
  if (!(joint_clearance_delta > 0.0 && joint_clearance_delta < kPi / 2.0)) {
    throw InvalidArgument("joint_clearance_delta must lie in (0, pi/2)");
  }
  if (!(theta1_range.lo <= theta1_range.hi)) {
    throw InvalidArgument("theta1_range must satisfy lo <= hi");
  }
  if (!base.allFinite()) throw InvalidArgument("base must be finite");
}

double relative_angle(const JointState& state) {
  return wrap_angle(state.psi2 - state.theta1);
}

bool is_admissible(const MechanismConfig& config, const JointState& state) {
  const double gamma = std::abs(relative_angle(state));
  const double delta = config.joint_clearance_delta;
  return gamma >= delta - kAdmissibleTol && gamma <= kPi - delta + kAdmissibleTol &&
         config.theta1_range.contains(wrap_angle(state.theta1));
}

Vec2 pen_position(const MechanismConfig& config, const JointState& s) {
  return config.base + config.l1 * Vec2(std::cos(s.theta1), std::sin(s.theta1)) +
         config.l2 * Vec2(std::cos(s.psi2), std::sin(s.psi2));
}

Pose2 fk(const MechanismConfig& config, const JointState& state) {
  const Vec2 p = pen_position(config, state);
  // The parallelograms of B and C pin the end effector to the base frame.
  const double phi = config.variant == Variant::A ? wrap_angle(state.psi2) : 0.0;
  return {p.x(), p.y(), phi};
}

IkResult ik(const MechanismConfig& config, const Vec2& target) {
  const double l1 = config.l1;
  const double l2 = config.l2;
  const Vec2 d = target - config.base;
  const double r = d.norm();
  const double r_max = l1 + l2;
  const double r_min = std::abs(l1 - l2);
  if (r > r_max * (1.0 + kReachTol) || r < r_min * (1.0 - kReachTol)) {
    throw OutOfReach("target at radius " + std::to_string(r) +
                     " m is outside [" + std::to_string(r_min) + ", " +
                     std::to_string(r_max) + "]");
  }

  double cos_gamma = (d.squaredNorm() - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  cos_gamma = std::clamp(cos_gamma, -1.0, 1.0);
  double gamma = std::acos(cos_gamma);  // [0, pi]
  if (gamma < kBranchTol) gamma = 0.0;
  if (kPi - gamma < kBranchTol) gamma = kPi;

  // At the base with equal links theta1 is arbitrary; pick the x-axis.
  const double bearing = r > 0.0 ? std::atan2(d.y(), d.x()) : 0.0;

  std::vector<double> gammas{gamma};
  if (gamma != 0.0 && gamma != kPi) gammas.push_back(-gamma);

  IkResult result;
  for (double g : gammas) {
    const double theta1 =
        wrap_angle(bearing - std::atan2(l2 * std::sin(g), l1 + l2 * std::cos(g)));
    JointState s{theta1, wrap_angle(theta1 + g), 0.0, 0.0};
    if (config.theta1_range.contains(theta1)) {
      result.solutions.push_back(s);
    } else {
      ++result.filtered;
    }
  }
  return result;
}

Eigen::Matrix2d jacobian(const MechanismConfig& config, const JointState& s) {
  Eigen::Matrix2d j;
  j << -config.l1 * std::sin(s.theta1), -config.l2 * std::sin(s.psi2),
       config.l1 * std::cos(s.theta1), config.l2 * std::cos(s.psi2);
  return j;
}

}  // namespace gripscribe
