#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "gripscribe/metrics.hpp"

namespace gripscribe {

/// Damper coefficients being tuned [N m s/rad].
struct DesignVars {
  static constexpr double kLower = 1e-3;
  static constexpr double kUpper = 1.0;

  double b1 = 0.05;
  double b2 = 0.05;

  bool in_box() const { return b1 >= kLower && b1 <= kUpper && b2 >= kLower && b2 <= kUpper; }
};

struct ObjectiveSpec {
  double tremor_freq = 8.0;   ///< [Hz]
  double intent_freq = 0.5;   ///< [Hz]
  double intent_floor = 0.8;  ///< minimum acceptable gain at intent_freq
  double penalty_weight = 10.0;

  void validate() const;
};

struct DesignEvaluation {
  double cost = 0.0;
  double tremor_gain = 0.0;
  double intent_gain = 0.0;
};

/// cost = gain(tremor) + w * max(0, floor - gain(intent)).
DesignEvaluation evaluate_design_detail(const DesignVars& vars, const ObjectiveSpec& spec,
                                        const DynamicParams& params, const MechanismConfig& config,
                                        const HandImpedance& imp, const SweepSettings& sweep = {});

double evaluate_design(const DesignVars& vars, const ObjectiveSpec& spec,
                       const DynamicParams& params, const MechanismConfig& config,
                       const HandImpedance& imp, const SweepSettings& sweep = {});

struct GridCell {
  DesignVars vars;
  DesignEvaluation eval;
};

struct GridResult {
  DesignVars best;
  double best_cost = 0.0;
  std::vector<GridCell> table;  ///< b1-major, n * n rows

  void write_csv(std::ostream& out) const;
};

/// Log-spaced n x n grid over the box. Cells are evaluated concurrently; the
/// result does not depend on evaluation order.
GridResult grid_search(const ObjectiveSpec& spec, const DynamicParams& params,
                       const MechanismConfig& config, const HandImpedance& imp, int n_per_axis,
                       const SweepSettings& sweep = {});

struct SimplexOptions {
  double tol = 1e-4;   ///< simplex size (max vertex distance to best, inf-norm)
  int max_iter = 200;
  double initial_step = 1.0;
};

struct SimplexResult {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;  ///< false when max_iter was hit (MaxIterExceeded)
  std::vector<Eigen::Vector2d> evaluated;
};

/// Nelder-Mead on a 2-D box with coefficients (1, 2, 0.5, 0.5); every
/// candidate is clamped into [lower, upper]. Returns the best vertex.
SimplexResult nelder_mead_minimize(const std::function<double(const Eigen::Vector2d&)>& objective,
                                   const Eigen::Vector2d& start, const Eigen::Vector2d& lower,
                                   const Eigen::Vector2d& upper, const SimplexOptions& options = {});

struct DesignResult {
  DesignVars vars;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<DesignVars> evaluated;
};

/// Nelder-Mead over (ln b1, ln b2). The box is shrunk by 1e-9 in log space so
/// every evaluated design lies strictly inside [1e-3, 1]^2.
DesignResult nelder_mead(const ObjectiveSpec& spec, const DynamicParams& params,
                         const MechanismConfig& config, const HandImpedance& imp,
                         const DesignVars& start, const SimplexOptions& options = {},
                         const SweepSettings& sweep = {});

}  // namespace gripscribe
