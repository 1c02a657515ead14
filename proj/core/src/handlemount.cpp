#include "gripscribe/handlemount.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gripscribe/errors.hpp"

namespace gripscribe {
namespace {

constexpr double kBranchTol = 1e-7;
constexpr double kReachTol = 1e-12;

}  // namespace

void MountConfig::validate() const {
  if (!(k1 > 0.0 && k2 > 0.0 && k3 > 0.0)) throw InvalidArgument("mount bar lengths must be > 0");
}

Pose2 mount_fk(const MountConfig& m, const MountAngles& q) {
  const double c1 = q.a1;
  const double c2 = c1 + q.a2;
  const double c3 = c2 + q.a3;
  return {m.k1 * std::cos(c1) + m.k2 * std::cos(c2) + m.k3 * std::cos(c3),
          m.k1 * std::sin(c1) + m.k2 * std::sin(c2) + m.k3 * std::sin(c3), wrap_angle(c3)};
}

std::vector<MountAngles> mount_ik(const MountConfig& m, const Pose2& target) {
  const Vec2 wrist = target.position() - m.k3 * Vec2(std::cos(target.phi), std::sin(target.phi));
  const double r = wrist.norm();
  const double r_max = m.k1 + m.k2;
  const double r_min = std::abs(m.k1 - m.k2);
  if (r > r_max * (1.0 + kReachTol) || r < r_min * (1.0 - kReachTol)) {
    throw Unreachable(fmt::format("wrist distance {:.6g} m outside [{:.6g}, {:.6g}]", r, r_min, r_max));
  }
  double a2 = std::acos(
      std::clamp((wrist.squaredNorm() - m.k1 * m.k1 - m.k2 * m.k2) / (2.0 * m.k1 * m.k2), -1.0, 1.0));
  if (a2 < kBranchTol) a2 = 0.0;
  if (kPi - a2 < kBranchTol) a2 = kPi;

  const double bearing = r > 0.0 ? std::atan2(wrist.y(), wrist.x()) : 0.0;
  std::vector<double> elbows{a2};
  if (a2 != 0.0 && a2 != kPi) elbows.push_back(-a2);

  std::vector<MountAngles> out;
  for (double e : elbows) {
    const double a1 = wrap_angle(bearing - std::atan2(m.k2 * std::sin(e), m.k1 + m.k2 * std::cos(e)));
    out.push_back({a1, wrap_angle(e), wrap_angle(target.phi - a1 - e)});
  }
  return out;
}

}  // namespace gripscribe
