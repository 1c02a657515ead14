#pragma once

#include <string>
#include <vector>

#include "gripscribe/angles.hpp"

namespace gripscribe {

/// Screw-driven two-finger pen gripper, modeled as a symmetric slider-crank.
/// All lengths in millimeters. Right finger: pivot P = (w, 0), coupler
/// attachment A = (w - a sin(alpha), -a cos(alpha)), fingertip
/// T = (w - f sin(alpha), -f cos(alpha)); the nut slides on the axis at
/// n(s) = (0, -(h0 + s)) and |A - n| = c.
///
/// The fingers touch the pen at opposed points, so the aperture equals the
/// gripped diameter. The actual finger arcs wrap the pen; that contact
/// geometry does not change the travel-to-diameter relation.
struct GripperGeometry {
  double w = 18.0;
  double a = 18.0;
  double c = 16.0;
  double f = 35.0;
  double h0 = 10.0;
  double s_max = 25.0;
  double pitch = 1.0;  ///< [mm/turn]
  double d_min = 8.0;
  double d_max = 20.0;
};

struct SpringSpec {
  double kappa = 5.0;         ///< torsional stiffness [N mm/rad]
  double preload = 0.2;       ///< [rad]
  double tau_friction = 1.0;  ///< torque needed to open [N mm]
};

struct ScrewSetting {
  double travel = 0.0;    ///< [mm]
  double turns = 0.0;
  double residual = 0.0;  ///< |aperture(travel) - d| [mm]
};

struct SpringCheck {
  bool opens = false;
  double margin = 0.0;  ///< kappa (alpha + preload) - tau_friction [N mm]
};

struct LinkagePose {
  double alpha = 0.0;
  Vec2 pivot;
  Vec2 attachment;
  Vec2 nut;
  Vec2 tip;
};

class PenHolder {
public:
  /// Throws InvalidArgument unless the aperture over the usable travel covers
  /// [d_min, d_max].
  explicit PenHolder(const GripperGeometry& geometry);

  const GripperGeometry& geometry() const { return geom_; }

  /// Nut travel on the operating branch for a finger angle.
  double travel_at(double alpha) const;
  double aperture_at(double alpha) const;

  /// Finger angle for a travel; bisection to the linkage residual below
  /// 1e-9 mm. Throws LinkageLocked off the operating branch.
  double finger_angle(double s) const;

  /// Requires 0 <= s <= s_max.
  double aperture(double s) const;

  /// Throws DiameterOutOfRange outside [d_min, d_max].
  ScrewSetting solve_screw(double d) const;

  SpringCheck check_spring_open(const SpringSpec& spring, double d) const;

  /// Linkage residual |A - n| - c.
  double residual(double alpha, double s) const;

  LinkagePose pose(double alpha, double s) const;

  /// Operating branch in finger angle and the matching travel interval,
  /// already intersected with [0, s_max].
  double alpha_min() const { return alpha_lo_; }
  double alpha_max() const { return alpha_hi_; }
  double travel_min() const { return s_lo_; }
  double travel_max() const { return s_hi_; }

private:
  GripperGeometry geom_;
  double alpha_lo_ = 0.0;
  double alpha_hi_ = 0.0;
  double s_lo_ = 0.0;
  double s_hi_ = 0.0;
};

double aperture(const GripperGeometry& geom, double s);
ScrewSetting solve_screw(const GripperGeometry& geom, double d);
SpringCheck check_spring_open(const GripperGeometry& geom, const SpringSpec& spring, double d);

/// Drawing of the linkage (both fingers) at the given travels.
std::string penholder_svg(const PenHolder& holder, const std::vector<double>& travels);

}  // namespace gripscribe
