#pragma once

#include <Eigen/Core>
#include <numbers>

namespace gripscribe {

using Vec2 = Eigen::Vector2d;

constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi]. This convention is used project-wide.
double wrap_angle(double angle);

/// Closed interval of angles in radians.
struct AngleInterval {
  double lo = -kPi;
  double hi = kPi;

  bool contains(double angle) const { return angle >= lo && angle <= hi; }
  bool is_full_circle() const { return lo <= -kPi && hi >= kPi; }
};

}  // namespace gripscribe
