#pragma once

#include <Eigen/Core>
#include <vector>

#include "gripscribe/angles.hpp"

namespace gripscribe {

/// Mechanism variants in increasing order of complexity.
///  - A: plain two-bar chain, handle rigidly attached to the distal link.
///  - B: parallelograms on both bars keep the end effector at a constant
///       orientation; dampers sit at the joints.
///  - C: as B, with a third parallelogram so the second rotation is driven
///       (and damped) from the base.
enum class Variant { A, B, C };

struct MechanismConfig {
  Variant variant = Variant::C;
  double l1 = 0.25;  ///< J1 -> J2 [m]
  double l2 = 0.25;  ///< J2 -> pen [m]
  Vec2 base = Vec2::Zero();  ///< position of J1 on the table [m]
  /// Minimum separation of the link directions from alignment [rad].
  double joint_clearance_delta = deg2rad(10.0);
  AngleInterval theta1_range{};

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
};

/// Generalized coordinates are absolute link angles measured from the base
/// x-axis, so a base-mounted damper on either link acts on a single rate.
struct JointState {
  double theta1 = 0.0;
  double psi2 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;  ///< wrapped to (-pi, pi]

  Vec2 position() const { return {x, y}; }
};

/// psi2 - theta1 wrapped to (-pi, pi].
double relative_angle(const JointState& state);

/// True when the link directions stay at least joint_clearance_delta away from
/// both folded and extended alignment, and theta1 is inside its range.
bool is_admissible(const MechanismConfig& config, const JointState& state);

Vec2 pen_position(const MechanismConfig& config, const JointState& state);

Pose2 fk(const MechanismConfig& config, const JointState& state);

struct IkResult {
  /// Branch with positive relative angle first. Velocities are zero.
  std::vector<JointState> solutions;
  /// Number of branches discarded by the theta1 joint limit.
  int filtered = 0;
};

/// Closed-form inverse kinematics. Throws OutOfReach when the target lies
/// outside the annulus [|l1 - l2|, l1 + l2] around the base.
IkResult ik(const MechanismConfig& config, const Vec2& target);

/// d(pen position)/d(theta1, psi2).
Eigen::Matrix2d jacobian(const MechanismConfig& config, const JointState& state);

}  // namespace gripscribe
