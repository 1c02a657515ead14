#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <vector>

#include "gripscribe/kinematics.hpp"

namespace gripscribe {

enum class DamperPlacement {
  relative_at_joints,  ///< variant B: b1 at J1, b2 on the relative rate at J2
  both_at_base,        ///< variant C: both dampers on absolute rates at the base
  none,                ///< variant A convention: only b1 at the base
};

DamperPlacement default_damper_placement(Variant variant);

/// Lumped rigid-body parameters. The parallelogram couplers move in
/// curvilinear translation; their mass is folded into m1/m2 as an
/// approximation rather than simulated as extra bodies.
struct DynamicParams {
  double m1 = 0.12;       ///< [kg]
  double m2 = 0.12;       ///< [kg]
  double lc1 = 0.125;     ///< COM distance from J1 [m]
  double lc2 = 0.125;     ///< COM distance from J2 [m]
  double i1 = 6.25e-4;    ///< inertia about COM [kg m^2]
  double i2 = 6.25e-4;    ///< inertia about COM [kg m^2]
  double b1 = 0.05;       ///< [N m s/rad]
  double b2 = 0.05;       ///< [N m s/rad]
  DamperPlacement damper_placement = DamperPlacement::both_at_base;
  double pen_drag = 0.0;  ///< isotropic viscous drag at the pen tip [N s/m]

  void validate() const;
};

/// Spring-damper coupling between the hand (a kinematic target) and the pen.
struct HandImpedance {
  double k = 100.0;  ///< [N/m]
  double d = 15.0;   ///< [N s/m]

  void validate() const;
};

struct TargetSample {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

using TargetFn = std::function<TargetSample(double)>;

Eigen::Matrix2d mass_matrix(const DynamicParams& params, const MechanismConfig& config,
                            const JointState& state);

struct BiasAndDamping {
  Eigen::Vector2d bias;     ///< velocity-product terms, subtracted from torques
  Eigen::Vector2d damping;  ///< damper torques, added to torques
};

BiasAndDamping bias_and_damping(const DynamicParams& params, const MechanismConfig& config,
                                const JointState& state);

/// Power absorbed by the dampers and pen drag (>= 0).
double dissipation_power(const DynamicParams& params, const MechanismConfig& config,
                         const JointState& state);

Vec2 hand_force(const HandImpedance& imp, const Vec2& target, const Vec2& target_vel,
                const Vec2& pen, const Vec2& pen_vel);

Vec2 pen_velocity(const MechanismConfig& config, const JointState& state);

double kinetic_energy(const DynamicParams& params, const MechanismConfig& config,
                      const JointState& state);

/// One RK4 step with the target held at (target, target_vel) over the step.
/// Throws SingularMass when det M < 1e-12.
JointState step(const DynamicParams& params, const MechanismConfig& config,
                const HandImpedance& imp, const JointState& state, const Vec2& target,
                const Vec2& target_vel, double dt = 1e-3);

/// One RK4 step evaluating the target at each stage time t, t + dt/2, t + dt.
JointState step(const DynamicParams& params, const MechanismConfig& config,
                const HandImpedance& imp, const JointState& state, const TargetFn& target,
                double t, double dt = 1e-3);

/// One RK4 step with no hand attached.
JointState step_unforced(const DynamicParams& params, const MechanismConfig& config,
                         const JointState& state, double dt = 1e-3);

struct TraceRow {
  double t = 0.0;
  Vec2 target = Vec2::Zero();
  JointState state;
  Vec2 pen = Vec2::Zero();
  double work_in = 0.0;     ///< cumulative hand work on the pen [J]
  double dissipated = 0.0;  ///< cumulative damper + drag losses [J]
  double kinetic = 0.0;     ///< [J]
};

struct SimTrace {
  double dt = 1e-3;
  std::vector<TraceRow> rows;
  /// |work_in - (kinetic_end - kinetic_start) - dissipated| at the final row.
  double energy_residual = 0.0;

  double total_work() const { return rows.empty() ? 0.0 : rows.back().work_in; }

  /// CSV with header
  /// t,target_x,target_y,theta1,psi2,omega1,omega2,pen_x,pen_y,work_in,dissipated,kinetic
  void write_csv(std::ostream& out) const;
};

/// Integrates from `initial` for `duration` seconds. Work and dissipation are
/// carried as extra RK4 states so the energy ledger is 4th-order accurate.
/// Throws NonFinite if the state diverges.
SimTrace simulate(const DynamicParams& params, const MechanismConfig& config,
                  const HandImpedance& imp, const JointState& initial, const TargetFn& target,
                  double duration, double dt = 1e-3);

/// Integrator state including the ledger integrals.
struct LedgerState {
  JointState joints;
  double work_in = 0.0;
  double dissipated = 0.0;
};

/// RK4 step on the ledger-augmented system. `target` may be empty for an
/// unforced step.
LedgerState step_ledger(const DynamicParams& params, const MechanismConfig& config,
                        const HandImpedance& imp, const LedgerState& state,
                        const TargetFn& target, double t, double dt);

}  // namespace gripscribe
