#include "gripscribe/penholder.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gripscribe/errors.hpp"
#include "gripscribe/svg.hpp"

namespace gripscribe {
namespace {

constexpr double kResidualTol = 1e-9;
constexpr double kDiameterTol = 1e-6;

double bisect(double lo, double hi, auto&& increasing_fn, double target) {
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (increasing_fn(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PenHolder::PenHolder(const GripperGeometry& g) : geom_(g) {
  for (double v : {g.w, g.a, g.c, g.f, g.h0, g.s_max, g.pitch}) {
    if (!(v > 0.0)) throw InvalidArgument("gripper lengths, travel and pitch must be > 0");
  }
  if (!(g.d_min > 0.0 && g.d_min < g.d_max)) throw InvalidArgument("need 0 < d_min < d_max");

  // The coupler can only reach the axis once |A_x| <= c.
  const double sin_lo = (g.w - g.c) / g.a;
  if (sin_lo > 1.0) throw InvalidArgument("coupler too short to reach the nut axis");
  alpha_lo_ = sin_lo <= 0.0 ? 0.0 : std::asin(sin_lo);

  // Travel grows with alpha up to a peak; past it a second root appears.
  // Bracket the peak on a dense grid, then refine by golden section.
  const double top = kPi / 2.0;
  const int n = 2000;
  double best_alpha = alpha_lo_;
  double best_s = travel_at(alpha_lo_);
  for (int i = 1; i <= n; ++i) {
    const double al = alpha_lo_ + (top - alpha_lo_) * i / n;
    const double s = travel_at(al);
    if (s > best_s) {
      best_s = s;
      best_alpha = al;
    }
  }
  const double step = (top - alpha_lo_) / n;
  double lo = std::max(alpha_lo_, best_alpha - step);
  double hi = std::min(top, best_alpha + step);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double x1 = hi - phi * (hi - lo);
    const double x2 = lo + phi * (hi - lo);
    if (travel_at(x1) < travel_at(x2)) {
      lo = x1;
    } else {
      hi = x2;
    }
  }
  alpha_hi_ = 0.5 * (lo + hi);
  // Fingers cross the axis once aperture < 0.
  if (g.w / g.f < 1.0) alpha_hi_ = std::min(alpha_hi_, std::asin(g.w / g.f));
  if (!(alpha_hi_ > alpha_lo_)) throw InvalidArgument("linkage has no operating branch");

  s_lo_ = std::max(0.0, travel_at(alpha_lo_));
  s_hi_ = std::min(g.s_max, travel_at(alpha_hi_));
  if (!(s_lo_ < s_hi_)) throw InvalidArgument("no usable screw travel in [0, s_max]");

  const double ap_open = aperture_at(finger_angle(s_lo_));
  const double ap_closed = aperture_at(finger_angle(s_hi_));
  if (ap_open < g.d_max || ap_closed > g.d_min) {
    throw InvalidArgument(fmt::format(
        "aperture range [{:.3f}, {:.3f}] mm does not cover [{}, {}] mm", ap_closed, ap_open,
        g.d_min, g.d_max));
  }
}

double PenHolder::travel_at(double alpha) const {
  const auto& g = geom_;
  const double dx = g.w - g.a * std::sin(alpha);
  const double under = g.c * g.c - dx * dx;
  // Root with the nut below the attachment point.
  return g.a * std::cos(alpha) - g.h0 + std::sqrt(std::max(0.0, under));
}

double PenHolder::aperture_at(double alpha) const {
  return 2.0 * (geom_.w - geom_.f * std::sin(alpha));
}

double PenHolder::residual(double alpha, double s) const {
  const LinkagePose p = pose(alpha, s);
  return (p.attachment - p.nut).norm() - geom_.c;
}

LinkagePose PenHolder::pose(double alpha, double s) const {
  const auto& g = geom_;
  LinkagePose p;
  p.alpha = alpha;
  p.pivot = {g.w, 0.0};
  p.attachment = {g.w - g.a * std::sin(alpha), -g.a * std::cos(alpha)};
  p.nut = {0.0, -(g.h0 + s)};
  p.tip = {g.w - g.f * std::sin(alpha), -g.f * std::cos(alpha)};
  return p;
}

double PenHolder::finger_angle(double s) const {
  const double s_first = travel_at(alpha_lo_);
  const double s_last = travel_at(alpha_hi_);
  if (s < s_first - 1e-12 || s > s_last + 1e-12) {
    throw LinkageLocked(fmt::format("travel {:.6f} mm is outside the operating branch [{:.6f}, {:.6f}]",
                                    s, s_first, s_last));
  }
  const double alpha = bisect(alpha_lo_, alpha_hi_, [&](double al) { return travel_at(al); }, s);
  if (std::abs(residual(alpha, s)) >= kResidualTol) {
    throw LinkageLocked(fmt::format("linkage residual {:.3e} mm at travel {:.6f} mm",
                                    residual(alpha, s), s));
  }
  return alpha;
}

double PenHolder::aperture(double s) const {
  if (!(s >= 0.0 && s <= geom_.s_max)) {
    throw InvalidArgument(fmt::format("travel {} mm outside [0, {}]", s, geom_.s_max));
  }
  return aperture_at(finger_angle(s));
}

ScrewSetting PenHolder::solve_screw(double d) const {
  if (!(d >= geom_.d_min && d <= geom_.d_max)) {
    throw DiameterOutOfRange(fmt::format("pen diameter {} mm outside the supported [{}, {}] mm",
                                         d, geom_.d_min, geom_.d_max));
  }
  // Aperture decreases with travel; bisect on its negation.
  const double s = bisect(s_lo_, s_hi_, [&](double x) { return -aperture(x); }, -d);
  ScrewSetting out;
  out.travel = s;
  out.turns = s / geom_.pitch;
  out.residual = std::abs(aperture(s) - d);
  if (out.residual >= kDiameterTol) {
    throw LinkageLocked(fmt::format("screw solve residual {:.3e} mm", out.residual));
  }
  return out;
}

SpringCheck PenHolder::check_spring_open(const SpringSpec& spring, double d) const {
  const double alpha = finger_angle(solve_screw(d).travel);
  SpringCheck out;
  out.margin = spring.kappa * (alpha + spring.preload) - spring.tau_friction;
  out.opens = out.margin >= 0.0;
  return out;
}

double aperture(const GripperGeometry& geom, double s) { return PenHolder(geom).aperture(s); }

ScrewSetting solve_screw(const GripperGeometry& geom, double d) {
  return PenHolder(geom).solve_screw(d);
}

SpringCheck check_spring_open(const GripperGeometry& geom, const SpringSpec& spring, double d) {
  return PenHolder(geom).check_spring_open(spring, d);
}

std::string penholder_svg(const PenHolder& holder, const std::vector<double>& travels) {
  const auto& g = holder.geometry();
  const double span = std::max({g.f, g.w + g.c, g.h0 + g.s_max}) * 1.2;
  svg::Plot plot(560, 560, {-span, -1.1 * span}, {span, 0.3 * span});
  plot.line({0.0, 0.0}, {0.0, -(g.h0 + g.s_max)}, "stroke:#bbb;stroke-width:3");
  const char* colors[] = {"#2ca02c", "#1f77b4", "#d62728", "#9467bd", "#8c564b"};
  std::size_t k = 0;
  for (double s : travels) {
    const LinkagePose p = holder.pose(holder.finger_angle(s), s);
    const std::string style =
        fmt::format("stroke:{};stroke-width:2", colors[k++ % std::size(colors)]);
    for (double mirror : {1.0, -1.0}) {
      const auto m = [mirror](const Vec2& v) { return Vec2(mirror * v.x(), v.y()); };
      plot.line(m(p.pivot), m(p.tip), style);
      plot.line(m(p.attachment), p.nut, style);
      plot.circle_px(m(p.pivot), 3.0, "fill:#222");
      plot.circle_px(m(p.tip), 2.5, "fill:#555");
    }
    plot.circle_px(p.nut, 3.5, "fill:#222");
    plot.text(Vec2(-span * 0.95, -span * (0.9 - 0.07 * static_cast<double>(k))),
              fmt::format("s = {:.2f} mm, aperture = {:.2f} mm", s, holder.aperture(s)),
              fmt::format("fill:{}", colors[(k - 1) % std::size(colors)]));
  }
  plot.title("Pen holder linkage (mm)");
  return plot.str();
}

}  // namespace gripscribe
