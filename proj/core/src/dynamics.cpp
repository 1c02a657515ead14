#include "gripscribe/dynamics.hpp"

#include <array>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "gripscribe/errors.hpp"

namespace gripscribe {
namespace {

constexpr double kMinMassDet = 1e-12;

// (theta1, psi2, omega1, omega2, work_in, dissipated)
using Augmented = std::array<double, 6>;

JointState joints_of(const Augmented& x) { return {x[0], x[1], x[2], x[3]}; }

Augmented axpy(const Augmented& x, double h, const Augmented& k) {
  Augmented out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + h * k[i];
  return out;
}

Augmented derivative(const DynamicParams& params, const MechanismConfig& config,
                     const HandImpedance* imp, const TargetFn* target, double t,
                     const Augmented& x) {
  const JointState s = joints_of(x);
  const Eigen::Matrix2d m = mass_matrix(params, config, s);
  const double det = m.determinant();
  if (!(det >= kMinMassDet)) {
    throw SingularMass(fmt::format("det M = {:.3e} below {:.0e}", det, kMinMassDet));
  }

  const Eigen::Matrix2d j = jacobian(config, s);
  const Eigen::Vector2d qdot(s.omega1, s.omega2);
  const Vec2 v_pen = j * qdot;

  Vec2 f_hand = Vec2::Zero();
  if (imp != nullptr && target != nullptr && *target) {
    const TargetSample tgt = (*target)(t);
    f_hand = hand_force(*imp, tgt.position, tgt.velocity, pen_position(config, s), v_pen);
  }
  const Vec2 f_drag = -params.pen_drag * v_pen;

  const BiasAndDamping bd = bias_and_damping(params, config, s);
  const Eigen::Vector2d tau = j.transpose() * (f_hand + f_drag) - bd.bias + bd.damping;
  const Eigen::Vector2d acc = m.ldlt().solve(tau);

  return {s.omega1, s.omega2, acc.x(), acc.y(), f_hand.dot(v_pen),
          -bd.damping.dot(qdot) + params.pen_drag * v_pen.squaredNorm()};
}

Augmented rk4(const DynamicParams& params, const MechanismConfig& config,
              const HandImpedance* imp, const TargetFn* target, double t, double dt,
              const Augmented& x) {
  const Augmented k1 = derivative(params, config, imp, target, t, x);
  const Augmented k2 = derivative(params, config, imp, target, t + 0.5 * dt, axpy(x, 0.5 * dt, k1));
  const Augmented k3 = derivative(params, config, imp, target, t + 0.5 * dt, axpy(x, 0.5 * dt, k2));
  const Augmented k4 = derivative(params, config, imp, target, t + dt, axpy(x, dt, k3));
  Augmented out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
}

}  // namespace

DamperPlacement default_damper_placement(Variant variant) {
  switch (variant) {
    case Variant::A: return DamperPlacement::none;
    case Variant::B: return DamperPlacement::relative_at_joints;
    case Variant::C: return DamperPlacement::both_at_base;
  }
  return DamperPlacement::both_at_base;
}

void DynamicParams::validate() const {
  for (double v : {m1, m2, i1, i2, b1, b2, pen_drag}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("masses, inertias, damper and drag coefficients must be >= 0");
    }
  }
  if (!std::isfinite(lc1) || !std::isfinite(lc2)) throw InvalidArgument("lc1, lc2 must be finite");
}

void HandImpedance::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("hand stiffness k must be > 0");
  if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidArgument("hand damping d must be >= 0");
}

Eigen::Matrix2d mass_matrix(const DynamicParams& p, const MechanismConfig& config,
                            const JointState& s) {
  const double l1 = config.l1;
  const double m11 = p.i1 + p.m1 * p.lc1 * p.lc1 + p.m2 * l1 * l1;
  const double m22 = p.i2 + p.m2 * p.lc2 * p.lc2;
  const double m12 = p.m2 * l1 * p.lc2 * std::cos(s.theta1 - s.psi2);
  Eigen::Matrix2d m;
  m << m11, m12, m12, m22;
  return m;
}

BiasAndDamping bias_and_damping(const DynamicParams& p, const MechanismConfig& config,
                                const JointState& s) {
  const double c = p.m2 * config.l1 * p.lc2 * std::sin(s.theta1 - s.psi2);
  BiasAndDamping out;
  out.bias = {c * s.omega2 * s.omega2, -c * s.omega1 * s.omega1};
  switch (p.damper_placement) {
    case DamperPlacement::both_at_base:
      out.damping = {-p.b1 * s.omega1, -p.b2 * s.omega2};
      break;
    case DamperPlacement::relative_at_joints: {
      const double rel = s.omega2 - s.omega1;
      out.damping = {-p.b1 * s.omega1 + p.b2 * rel, -p.b2 * rel};
      break;
    }
    case DamperPlacement::none:
      out.damping = {-p.b1 * s.omega1, 0.0};
      break;
  }
  return out;
}

double dissipation_power(const DynamicParams& params, const MechanismConfig& config,
                         const JointState& state) {
  const BiasAndDamping bd = bias_and_damping(params, config, state);
  const Vec2 v = pen_velocity(config, state);
  return -bd.damping.dot(Eigen::Vector2d(state.omega1, state.omega2)) +
         params.pen_drag * v.squaredNorm();
}

Vec2 hand_force(const HandImpedance& imp, const Vec2& target, const Vec2& target_vel,
                const Vec2& pen, const Vec2& pen_vel) {
  return imp.k * (target - pen) + imp.d * (target_vel - pen_vel);
}

Vec2 pen_velocity(const MechanismConfig& config, const JointState& s) {
  return jacobian(config, s) * Eigen::Vector2d(s.omega1, s.omega2);
}

double kinetic_energy(const DynamicParams& params, const MechanismConfig& config,
                      const JointState& s) {
  const Eigen::Vector2d qdot(s.omega1, s.omega2);
  return 0.5 * qdot.dot(mass_matrix(params, config, s) * qdot);
}

LedgerState step_ledger(const DynamicParams& params, const MechanismConfig& config,
                        const HandImpedance& imp, const LedgerState& state,
                        const TargetFn& target, double t, double dt) {
  require_dt(dt);
  const JointState& s = state.joints;
  const Augmented x{s.theta1, s.psi2, s.omega1, s.omega2, state.work_in, state.dissipated};
  const Augmented y = rk4(params, config, &imp, &target, t, dt, x);
  return {joints_of(y), y[4], y[5]};
}

JointState step(const DynamicParams& params, const MechanismConfig& config,
                const HandImpedance& imp, const JointState& state, const TargetFn& target,
                double t, double dt) {
  return step_ledger(params, config, imp, {state, 0.0, 0.0}, target, t, dt).joints;
}

JointState step(const DynamicParams& params, const MechanismConfig& config,
                const HandImpedance& imp, const JointState& state, const Vec2& target,
                const Vec2& target_vel, double dt) {
  const TargetSample held{target, target_vel};
  const TargetFn fn = [held](double) { return held; };
  return step(params, config, imp, state, fn, 0.0, dt);
}

JointState step_unforced(const DynamicParams& params, const MechanismConfig& config,
                         const JointState& state, double dt) {
  require_dt(dt);
  const Augmented x{state.theta1, state.psi2, state.omega1, state.omega2, 0.0, 0.0};
  return joints_of(rk4(params, config, nullptr, nullptr, 0.0, dt, x));
}

SimTrace simulate(const DynamicParams& params, const MechanismConfig& config,
                  const HandImpedance& imp, const JointState& initial, const TargetFn& target,
                  double duration, double dt) {
  require_dt(dt);
  if (!(duration > 0.0)) throw InvalidArgument("duration must be > 0");
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));

  SimTrace trace;
  trace.dt = dt;
  trace.rows.reserve(steps + 1);

  const auto record = [&](std::size_t i, const LedgerState& ls) {
    const double t = static_cast<double>(i) * dt;
    TraceRow row;
    row.t = t;
    row.target = target ? target(t).position : Vec2(pen_position(config, ls.joints));
    row.state = ls.joints;
    row.pen = pen_position(config, ls.joints);
    row.work_in = ls.work_in;
    row.dissipated = ls.dissipated;
    row.kinetic = kinetic_energy(params, config, ls.joints);
    trace.rows.push_back(row);
  };

  LedgerState ls{initial, 0.0, 0.0};
  record(0, ls);
  for (std::size_t i = 0; i < steps; ++i) {
    ls = step_ledger(params, config, imp, ls, target, static_cast<double>(i) * dt, dt);
    const JointState& s = ls.joints;
    if (!std::isfinite(s.theta1) || !std::isfinite(s.psi2) || !std::isfinite(s.omega1) ||
        !std::isfinite(s.omega2)) {
      throw NonFinite(fmt::format("state became non-finite at t = {:.6f} s",
                                  static_cast<double>(i + 1) * dt));
    }
    record(i + 1, ls);
  }

  const TraceRow& first = trace.rows.front();
  const TraceRow& last = trace.rows.back();
  trace.energy_residual =
      std::abs(last.work_in - (last.kinetic - first.kinetic) - last.dissipated);
  return trace;
}

void SimTrace::write_csv(std::ostream& out) const {
  out << "t,target_x,target_y,theta1,psi2,omega1,omega2,pen_x,pen_y,work_in,dissipated,kinetic\n";
  for (const TraceRow& r : rows) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                       "{:.17g},{:.17g},{:.17g}\n",
                       r.t, r.target.x(), r.target.y(), r.state.theta1, r.state.psi2,
                       r.state.omega1, r.state.omega2, r.pen.x(), r.pen.y(), r.work_in,
                       r.dissipated, r.kinetic);
  }
}

}  // namespace gripscribe
