#pragma once

#include <vector>

#include "gripscribe/kinematics.hpp"

namespace gripscribe {

/// Three screw-locked revolute adjustments (K1, K2, K3) placing the handle
/// relative to the pen holder. A static pose chooser; the mount is lumped
/// rigidly with the end effector in the dynamics.
struct MountConfig {
  double k1 = 0.040;  ///< [m]
  double k2 = 0.030;
  double k3 = 0.020;

  void validate() const;
};

struct MountAngles {
  double a1 = 0.0;  ///< [rad], each relative to the previous bar
  double a2 = 0.0;
  double a3 = 0.0;
};

Pose2 mount_fk(const MountConfig& mount, const MountAngles& angles);

/// Both elbow branches when distinct (positive a2 first). Throws Unreachable
/// when the wrist point lies outside [|k1 - k2|, k1 + k2].
std::vector<MountAngles> mount_ik(const MountConfig& mount, const Pose2& target);

}  // namespace gripscribe
