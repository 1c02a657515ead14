#include "gripscribe/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gripscribe/errors.hpp"
#include "gripscribe/svg.hpp"

namespace gripscribe {

Sheet Sheet::legal(SheetOrientation orientation, const Vec2& center) {
  Sheet s;
  s.orientation = orientation;
  s.center = center;
  return s;
}

Vec2 Sheet::extents() const {
  return orientation == SheetOrientation::portrait ? Vec2(width, height)
                                                    : Vec2(height, width);
}

ReachBand reach_band(const MechanismConfig& config) {
  const double l1 = config.l1;
  const double l2 = config.l2;
  const double c = std::cos(config.joint_clearance_delta);
  // |gamma| in [delta, pi - delta] maps r^2 = l1^2 + l2^2 + 2 l1 l2 cos(gamma)
  // onto this band.
  return {std::sqrt(std::max(0.0, l1 * l1 + l2 * l2 - 2.0 * l1 * l2 * c)),
          std::sqrt(l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * c)};
}

double band_clearance(const MechanismConfig& config, const Vec2& point) {
  const ReachBand band = reach_band(config);
  const double r = (point - config.base).norm();
  return std::min(r - band.inner, band.outer - r);
}

bool reachable(const MechanismConfig& config, const Vec2& point) {
  IkResult result;
  try {
    result = ik(config, point);
  } catch (const OutOfReach&) {
    return false;
  }
  return std::any_of(result.solutions.begin(), result.solutions.end(),
                     [&](const JointState& s) { return is_admissible(config, s); });
}

std::vector<Vec2> sheet_samples(const Sheet& sheet, double grid_pitch) {
  if (!(grid_pitch > 0.0)) throw InvalidArgument("grid_pitch must be > 0");
  const Vec2 ext = sheet.extents();
  const auto intervals = [&](double len) {
    return std::max<long>(1, static_cast<long>(std::ceil(len / grid_pitch - 1e-9)));
  };
  const long nx = intervals(ext.x());
  const long ny = intervals(ext.y());
  const Vec2 origin = sheet.center - 0.5 * ext;
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (long j = 0; j <= ny; ++j) {
    for (long i = 0; i <= nx; ++i) {
      pts.emplace_back(origin.x() + ext.x() * static_cast<double>(i) / static_cast<double>(nx),
                       origin.y() + ext.y() * static_cast<double>(j) / static_cast<double>(ny));
    }
  }
  return pts;
}

CoverageReport coverage(const MechanismConfig& config, const Sheet& sheet,
                        double grid_pitch) {
  const std::vector<Vec2> pts = sheet_samples(sheet, grid_pitch);
  const bool limited = !config.theta1_range.is_full_circle();

  CoverageReport report;
  report.grid_pitch = grid_pitch;
  report.samples = pts.size();
  report.margin = std::numeric_limits<double>::infinity();
  const ReachBand band = reach_band(config);
  for (const Vec2& p : pts) {
    const double r = (p - config.base).norm();
    double clearance = std::min(r - band.inner, band.outer - r);
    bool ok = clearance >= 0.0;
    // With the full theta1 range the band test is exact; otherwise IK decides.
    if (ok && limited && !reachable(config, p)) {
      ok = false;
      clearance = -std::numeric_limits<double>::min();
    }
    if (ok) ++report.reachable_samples;
    report.margin = std::min(report.margin, clearance);
  }
  report.fraction =
      static_cast<double>(report.reachable_samples) / static_cast<double>(report.samples);
  report.covered = report.reachable_samples == report.samples;
  return report;
}

double manipulability(const MechanismConfig& config, const JointState& state) {
  return config.l1 * config.l2 * std::abs(std::sin(state.psi2 - state.theta1));
}

Placement place_base(const MechanismConfig& config, const Sheet& sheet,
                     const PlacementSearch& search) {
  const long half = static_cast<long>(std::lround(0.5 * search.window / search.pitch));
  MechanismConfig trial = config;

  bool found = false;
  Placement best;
  double best_margin = -std::numeric_limits<double>::infinity();
  double best_norm = std::numeric_limits<double>::infinity();
  for (long iy = -half; iy <= half; ++iy) {
    for (long ix = -half; ix <= half; ++ix) {
      const Vec2 offset(static_cast<double>(ix) * search.pitch,
                        static_cast<double>(iy) * search.pitch);
      trial.base = sheet.center + offset;
      const CoverageReport rep = coverage(trial, sheet, search.grid_pitch);
      if (!rep.covered) continue;
      const double norm = offset.norm();
      if (!found || rep.margin > best_margin ||
          (rep.margin == best_margin && norm < best_norm)) {
        found = true;
        best_margin = rep.margin;
        best_norm = norm;
        best = {offset, rep};
      }
    }
  }
  if (!found) {
    throw NoFeasiblePlacement("no base position in the search window covers the sheet");
  }
  return best;
}

std::string workspace_svg(const MechanismConfig& config, const Sheet& sheet,
                          double grid_pitch) {
  const ReachBand band = reach_band(config);
  const double extent = band.outer * 1.1;
  svg::Plot plot(640, 640,
                 {config.base.x() - extent, config.base.y() - extent},
                 {config.base.x() + extent, config.base.y() + extent});

  plot.circle(config.base, band.outer, "fill:#e8f0fb;stroke:#3b6db3;stroke-width:1.5");
  plot.circle(config.base, band.inner, "fill:#ffffff;stroke:#3b6db3;stroke-width:1.5");
  const Vec2 ext = sheet.extents();
  plot.rect(sheet.center - 0.5 * ext, ext, "fill:none;stroke:#222;stroke-width:1.5");
  plot.circle_px(config.base, 4.0, "fill:#222");

  const bool limited = !config.theta1_range.is_full_circle();
  for (const Vec2& p : sheet_samples(sheet, grid_pitch)) {
    const bool ok = band_clearance(config, p) >= 0.0 && (!limited || reachable(config, p));
    if (!ok) plot.circle_px(p, 1.5, "fill:#d62728");
  }
  plot.title("Reach band, sheet outline, uncovered samples in red");
  return plot.str();
}

}  // namespace gripscribe
