// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gripscribe/errors.hpp"
#include "gripscribe/handlemount.hpp"
#include "gripscribe/metrics.hpp"
#include "gripscribe/optimize.hpp"
#include "gripscribe/penholder.hpp"
#include "gripscribe/session.hpp"
#include "gripscribe/workspace.hpp"

using namespace gripscribe;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

JointState random_admissible(const MechanismConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(-kPi, kPi);
  std::uniform_real_distribution<double> gam(cfg.joint_clearance_delta, kPi - cfg.joint_clearance_delta);
  std::uniform_real_distribution<double> w(-3.0, 3.0);
  JointState s;
  s.theta1 = th(rng);
  s.psi2 = wrap_angle(s.theta1 + (rng() & 1 ? 1.0 : -1.0) * gam(rng));
  s.omega1 = w(rng);
  s.omega2 = w(rng);
  return s;
}

Outcome legal_sheet_coverage() {
  Outcome o;
  const MechanismConfig cfg;
  for (SheetOrientation orient : {SheetOrientation::portrait, SheetOrientation::landscape}) {
    const Sheet sheet = Sheet::legal(orient);
    const Placement p = place_base(cfg, sheet);
    MechanismConfig placed = cfg;
    placed.base = sheet.center + p.base_offset;
    const CoverageReport r = coverage(placed, sheet, 0.005);
    const char* name = orient == SheetOrientation::portrait ? "portrait" : "landscape";
    o.require(r.fraction == 1.0 && r.margin >= 0.02 && r.grid_pitch == 0.005,
              std::string(name) + fmt(" fraction %.4f margin %+.4f m", r.fraction, r.margin));
  }
  return o;
}

Outcome pen_diameter_range() {
  Outcome o;
  const PenHolder holder{GripperGeometry{}};
  for (double d : {8.0, 14.0, 20.0}) {
    try {
      const ScrewSetting s = holder.solve_screw(d);
      const double err = std::abs(holder.aperture(s.travel) - d);
      o.require(err < 1e-6, fmt("d=%.0f mm -> s=%.4f mm", d, s.travel) + fmt(" |err| %.1e", err));
    } catch (const Error& e) {
      o.require(false, fmt("d=%.0f mm threw ", d) + e.name());
    }
  }
  bool rejected = false;
  try {
    holder.solve_screw(25.0);
  } catch (const DiameterOutOfRange&) {
    rejected = true;
  }
  o.require(rejected, "d=25 mm rejected");
  return o;
}

Outcome orientation_constancy() {
  Outcome o;
  std::mt19937_64 rng(2024);
  MechanismConfig probe;
  std::vector<JointState> sample;
  for (int i = 0; i < 10000; ++i) sample.push_back(random_admissible(probe, rng));
  for (Variant v : {Variant::B, Variant::C}) {
    MechanismConfig cfg;
    cfg.variant = v;
    double worst = 0.0;
    for (const auto& s : sample) worst = std::max(worst, std::abs(fk(cfg, s).phi));
    o.require(worst < 1e-12, std::string(v == Variant::B ? "B" : "C") + fmt(" max|phi| %.1e", worst));
  }
  MechanismConfig a;
  a.variant = Variant::A;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : sample) {
    const double phi = fk(a, s).phi;
    lo = std::min(lo, phi);
    hi = std::max(hi, phi);
  }
  o.require(hi - lo > 1.0, fmt("A range(phi) %.3f rad", hi - lo));
  return o;
}

Outcome dynamics_correctness() {
  Outcome o;
  const MechanismConfig cfg;
  const DynamicParams params;
  std::mt19937_64 rng(77);
  double min_eig = INFINITY;
  double worst_jac = 0.0;
  const double h = 1e-7;
  for (int i = 0; i < 10000; ++i) {
    const JointState s = random_admissible(cfg, rng);
    const Eigen::Matrix2d m = mass_matrix(params, cfg, s);
    if (m(0, 1) != m(1, 0)) min_eig = -1.0;
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues().minCoeff());
    Eigen::Matrix2d fd;
    for (int k = 0; k < 2; ++k) {
      JointState up = s, dn = s;
      (k == 0 ? up.theta1 : up.psi2) += h;
      (k == 0 ? dn.theta1 : dn.psi2) -= h;
      fd.col(k) = (pen_position(cfg, up) - pen_position(cfg, dn)) / (2.0 * h);
    }
    const Eigen::Matrix2d j = jacobian(cfg, s);
    worst_jac = std::max(worst_jac, (j - fd).norm() / j.norm());
  }
  o.require(min_eig > 0.0, fmt("min eig(M) %.3e", min_eig));
  o.require(worst_jac < 1e-6, fmt("Jacobian FD rel err %.1e", worst_jac));

  const JointState start = ik(cfg, {0.0, 0.28}).solutions.front();
  const TargetFn target = [](double t) {
    const double w = 2.0 * kPi * 8.0;
    return TargetSample{Vec2(0.005 * std::sin(w * t), 0.28), Vec2(0.005 * w * std::cos(w * t), 0.0)};
  };
  const SimTrace coarse = simulate(params, cfg, HandImpedance{}, start, target, 5.0, 1e-3);
  const SimTrace fine = simulate(params, cfg, HandImpedance{}, start, target, 5.0, 5e-4);
  const double rel = coarse.energy_residual / coarse.total_work();
  const double shrink = coarse.energy_residual / fine.energy_residual;
  o.require(rel < 1e-4, fmt("ledger residual/work %.2e", rel));
  o.require(shrink >= 8.0, fmt("residual shrink at dt/2 %.1fx", shrink));
  return o;
}

Outcome stabilization() {
  Outcome o;
  const MechanismConfig cfg;
  const std::vector<double> fs{0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0};
  const auto pts = frequency_sweep(DynamicParams{}, cfg, HandImpedance{}, fs);
  bool monotone = true;
  for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i].gain <= pts[i - 1].gain;
  o.require(monotone, fmt("gains %.4f .. %.4f monotone", pts.front().gain, pts.back().gain));

  double prev = INFINITY;
  bool decreasing = true;
  std::string gains;
  for (double b : {0.01, 0.05, 0.2}) {
    DynamicParams p;
    p.b1 = p.b2 = b;
    const double g = transmissibility(p, cfg, HandImpedance{}, 8.0).gain;
    decreasing = decreasing && g < prev;
    prev = g;
    gains += (gains.empty() ? "" : "/") + fmt("%.4f", g);
  }
  o.require(decreasing, "gain(8 Hz) at b=0.01/0.05/0.2: " + gains);

  const IntentPath path;
  TremorSpec tremor;
  tremor.frequency = 8.0;
  const TargetFn target = make_target_fn(path, tremor);
  const JointState s0 = ik(cfg, intent_path(path, 0.0).position).solutions.front();
  DynamicParams undamped;
  undamped.b1 = undamped.b2 = 0.0;
  const double damped_rmse = path_rmse(simulate(DynamicParams{}, cfg, HandImpedance{}, s0, target, 5.0), path);
  const double free_rmse = path_rmse(simulate(undamped, cfg, HandImpedance{}, s0, target, 5.0), path);
  o.require(damped_rmse < free_rmse,
            fmt("RMSE damped %.3f mm vs undamped %.3f mm", damped_rmse * 1e3, free_rmse * 1e3));
  return o;
}

Outcome optimizer_soundness() {
  Outcome o;
  const ObjectiveSpec spec;
  const GridResult grid = grid_search(spec, DynamicParams{}, MechanismConfig{}, HandImpedance{}, 11);
  const DesignResult nm = nelder_mead(spec, DynamicParams{}, MechanismConfig{}, HandImpedance{}, DesignVars{});
  o.require(nm.cost <= grid.best_cost + 1e-3, fmt("NM cost %.5f vs grid best %.5f", nm.cost, grid.best_cost));

  const Eigen::Vector2d x_star(0.37, -1.2);
  Eigen::Matrix2d a;
  a << 4.0, 1.5, 1.5, 1.0;
  SimplexOptions opt;
  opt.tol = 1e-8;
  opt.max_iter = 2000;
  const SimplexResult q = nelder_mead_minimize(
      [&](const Eigen::Vector2d& x) { return (x - x_star).dot(a * (x - x_star)); }, {2.0, 2.0}, {-10.0, -10.0},
      {10.0, 10.0}, opt);
  const double err = (q.x - x_star).norm();
  o.require(err < 1e-4, fmt("quadratic |x - x*| %.1e", err));
  return o;
}

Outcome roundtrips() {
  Outcome o;
  std::mt19937_64 rng(5);
  const MechanismConfig cfg;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const JointState s = random_admissible(cfg, rng);
    const Vec2 p = fk(cfg, s).position();
    double best = INFINITY;
    for (const JointState& q : ik(cfg, p).solutions) best = std::min(best, (fk(cfg, q).position() - p).norm());
    worst = std::max(worst, best);
  }
  o.require(worst < 1e-9, fmt("ik/fk %.1e m", worst));

  const MountConfig mount;
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  double worst_mount = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose2 target = mount_fk(mount, {ang(rng), ang(rng), ang(rng)});
    for (const MountAngles& m : mount_ik(mount, target)) {
      const Pose2 back = mount_fk(mount, m);
      worst_mount = std::max(worst_mount, std::hypot(back.x - target.x, back.y - target.y) +
                                              std::abs(wrap_angle(back.phi - target.phi)));
    }
  }
  o.require(worst_mount < 1e-9, fmt("mount %.1e", worst_mount));

  ProjectConfig pc;
  pc.tremor.kind = TremorKind::band_noise;
  std::ostringstream rec_stream;
  SessionRecorder recorder(rec_stream);
  SessionDriver live(pc);
  std::vector<std::string> live_out;
  std::uniform_real_distribution<double> jitter(0.008, 0.03);
  for (int i = 0; i < 600; ++i) {
    SessionFrame f;
    f.t = i / 60.0;
    f.pointer = Vec2(0.03 * std::sin(f.t), 0.28 + 0.02 * std::cos(1.7 * f.t));
    if (i == 100) f.tremor_on = true;
    if (i == 300) f.b2 = 0.4;
    const std::string line = encode_session_frame(f);
    recorder.line(line);
    for (auto& s : live.on_line(line)) live_out.push_back(s);
    const double wall = jitter(rng);
    recorder.tick(wall);
    for (auto& s : live.on_tick(wall)) live_out.push_back(s);
  }
  std::istringstream replay_in(rec_stream.str());
  const auto replayed = replay(pc, replay_in);
  o.require(replayed == live_out,
            fmt("replay of %.0f outbound lines bit-identical", static_cast<double>(live_out.size())));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "legal-sheet coverage", 5.0, legal_sheet_coverage},
      {2, "pen diameter range", 1.0, pen_diameter_range},
      {3, "orientation constancy", 1e9, orientation_constancy},
      {4, "dynamics correctness", 30.0, dynamics_correctness},
      {5, "stabilization", 120.0, stabilization},
      {6, "optimizer soundness", 300.0, optimizer_soundness},
      {7, "roundtrips", 1e9, roundtrips},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s < 1e9) o.require(secs < c.budget_s, fmt("%.2f s of %.0f s budget", secs, c.budget_s));
    if (!o.pass) ++failures;
    std::printf("criterion %d %-22s %s  (%.2f s)  %s\n", c.id, c.title, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
