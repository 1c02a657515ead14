#pragma once

#include <string>
#include <vector>

#include "gripscribe/kinematics.hpp"

namespace gripscribe {

enum class SheetOrientation { portrait, landscape };

/// Paper sheet lying on the table. `width` is the short side and `height` the
/// long side of the format; `orientation` decides which one runs along x.
struct Sheet {
  static constexpr double kLegalWidth = 0.2159;
  static constexpr double kLegalHeight = 0.3556;

  double width = kLegalWidth;
  double height = kLegalHeight;
  Vec2 center{0.0, 0.28};
  SheetOrientation orientation = SheetOrientation::portrait;

  static Sheet legal(SheetOrientation orientation, const Vec2& center = {0.0, 0.28});

  /// Extent along table x and y.
  Vec2 extents() const;
};

struct CoverageReport {
  bool covered = false;
  double fraction = 0.0;
  /// Minimum signed distance of any sample to the reachable band boundary;
  /// negative when some sample is outside.
  double margin = 0.0;
  double grid_pitch = 0.0;
  std::size_t samples = 0;
  std::size_t reachable_samples = 0;
};

/// Radii bounding the admissible workspace around the base.
struct ReachBand {
  double inner = 0.0;
  double outer = 0.0;
};

ReachBand reach_band(const MechanismConfig& config);

/// Signed distance of a point to the reach band boundary (positive inside).
double band_clearance(const MechanismConfig& config, const Vec2& point);

/// IK-based check: some branch exists and is admissible.
bool reachable(const MechanismConfig& config, const Vec2& point);

/// Uniform grid over the sheet rectangle, always including the four corners.
std::vector<Vec2> sheet_samples(const Sheet& sheet, double grid_pitch);

CoverageReport coverage(const MechanismConfig& config, const Sheet& sheet,
                        double grid_pitch = 0.005);

/// |det J| = l1 * l2 * |sin(psi2 - theta1)|.
double manipulability(const MechanismConfig& config, const JointState& state);

struct Placement {
  Vec2 base_offset = Vec2::Zero();  ///< base position minus sheet center
  CoverageReport report;
};

struct PlacementSearch {
  double window = 0.6;  ///< side of the square search window [m]
  double pitch = 0.01;
  double grid_pitch = 0.005;
};

/// Exhaustive search of base positions around the sheet center maximizing
/// coverage margin; ties go to the smaller offset. Throws NoFeasiblePlacement.
Placement place_base(const MechanismConfig& config, const Sheet& sheet,
                     const PlacementSearch& search = {});

/// SVG map of the reach band, the sheet and any uncovered samples.
std::string workspace_svg(const MechanismConfig& config, const Sheet& sheet,
                          double grid_pitch = 0.005);

}  // namespace gripscribe
