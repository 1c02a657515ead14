#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "gripscribe/config.hpp"
#include "gripscribe/errors.hpp"
#include "gripscribe/metrics.hpp"
#include "gripscribe/optimize.hpp"
#include "gripscribe/server.hpp"
#include "gripscribe/session.hpp"
#include "gripscribe/workspace.hpp"

namespace gripscribe::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  double duration = 5.0;
  double dt = 1e-3;
  std::string variant;
};

ProjectConfig resolve(const Common& c) {
  ProjectConfig cfg = c.config_path.empty() ? parse_config("{}") : load_config(c.config_path);
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  if (c.seed) cfg.tremor.seed = *c.seed;
  if (!c.variant.empty()) {
    if (c.variant == "A") cfg.mechanism.variant = Variant::A;
    else if (c.variant == "B") cfg.mechanism.variant = Variant::B;
    else if (c.variant == "C") cfg.mechanism.variant = Variant::C;
    else throw ConfigError("--variant", "expected A, B or C");
    cfg.dynamics.damper_placement = default_damper_placement(cfg.mechanism.variant);
  }
  if (!(c.dt > 0.0)) throw ConfigError("--dt", "must be > 0");
  if (!(c.duration > 0.0)) throw ConfigError("--duration", "must be > 0");
  fs::create_directories(cfg.output_dir);
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

std::string sheet_name(SheetOrientation o) {
  return o == SheetOrientation::portrait ? "portrait" : "landscape";
}

ordered_json report_json(const CoverageReport& r) {
  return {{"covered", r.covered},   {"fraction", r.fraction}, {"margin_m", r.margin},
          {"grid_pitch_m", r.grid_pitch}, {"samples", r.samples},
          {"reachable_samples", r.reachable_samples}};
}

int cmd_simulate(const Common& c, std::ostream& out) {
  const ProjectConfig cfg = resolve(c);
  const TargetFn target = make_target_fn(cfg.intent, cfg.tremor);
  const IkResult start = ik(cfg.mechanism, intent_path(cfg.intent, 0.0).position);
  if (start.solutions.empty()) throw OutOfReach("intent start excluded by joint limits");
  const SimTrace trace =
      simulate(cfg.dynamics, cfg.mechanism, cfg.hand, start.solutions.front(), target, c.duration, c.dt);

  std::ostringstream csv;
  trace.write_csv(csv);
  write_file(cfg.output_dir / "trace.csv", csv.str());
  write_file(cfg.output_dir / "pen_trace.svg", pen_trace_svg(trace, cfg.intent));

  ordered_json summary{{"duration_s", c.duration},
                       {"dt_s", c.dt},
                       {"pen_rmse_m", path_rmse(trace, cfg.intent)},
                       {"raw_rmse_m", target_rmse(trace, cfg.intent)},
                       {"total_work_j", trace.total_work()},
                       {"dissipated_j", trace.rows.back().dissipated},
                       {"energy_residual_j", trace.energy_residual}};
  write_file(cfg.output_dir / "simulate_summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_workspace(const Common& c, std::ostream& out) {
  const ProjectConfig cfg = resolve(c);
  ordered_json report;
  for (SheetOrientation o : {SheetOrientation::portrait, SheetOrientation::landscape}) {
    const Sheet sheet = Sheet::legal(o);
    const Placement placement = place_base(cfg.mechanism, sheet);
    MechanismConfig placed = cfg.mechanism;
    placed.base = sheet.center + placement.base_offset;
    const std::string name = sheet_name(o);
    report[name] = report_json(placement.report);
    report[name]["base_offset_m"] = {placement.base_offset.x(), placement.base_offset.y()};
    write_file(cfg.output_dir / ("workspace_" + name + ".svg"), workspace_svg(placed, sheet));
    out << fmt::format("{:<9}  covered={}  fraction={:.4f}  margin={:+.4f} m  base offset=({:+.3f}, {:+.3f}) m\n",
                       name, placement.report.covered, placement.report.fraction,
                       placement.report.margin, placement.base_offset.x(), placement.base_offset.y());
  }
  write_file(cfg.output_dir / "workspace_report.json", report.dump(2) + "\n");
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::vector<double>& freqs_in, std::ostream& out) {
  const ProjectConfig cfg = resolve(c);
  std::vector<double> freqs = freqs_in;
  for (double f : freqs) {
    if (!(f > 0.0)) throw ConfigError("--f-list", "frequencies must be > 0");
  }
  std::sort(freqs.begin(), freqs.end());
  SweepSettings settings;
  settings.dt = c.dt;
  const auto points = frequency_sweep(cfg.dynamics, cfg.mechanism, cfg.hand, freqs, settings);
  std::ostringstream csv;
  write_sweep_csv(csv, points);
  write_file(cfg.output_dir / "sweep.csv", csv.str());
  write_file(cfg.output_dir / "sweep.svg", sweep_svg(points));
  out << csv.str();
  return kExitOk;
}

int cmd_optimize(const Common& c, int grid_n, std::ostream& out) {
  const ProjectConfig cfg = resolve(c);
  const ObjectiveSpec spec;
  SweepSettings settings;
  settings.dt = c.dt;
  const GridResult grid = grid_search(spec, cfg.dynamics, cfg.mechanism, cfg.hand, grid_n, settings);
  std::ostringstream csv;
  grid.write_csv(csv);
  write_file(cfg.output_dir / "optimize_grid.csv", csv.str());

  DesignVars start{std::clamp(cfg.dynamics.b1, DesignVars::kLower, DesignVars::kUpper),
                   std::clamp(cfg.dynamics.b2, DesignVars::kLower, DesignVars::kUpper)};
  const DesignResult nm =
      nelder_mead(spec, cfg.dynamics, cfg.mechanism, cfg.hand, start, {}, settings);
  const bool use_nm = nm.cost <= grid.best_cost;
  const DesignVars chosen = use_nm ? nm.vars : grid.best;

  ordered_json report{
      {"objective", {{"tremor_freq_hz", spec.tremor_freq}, {"intent_freq_hz", spec.intent_freq},
                     {"intent_floor", spec.intent_floor}, {"penalty_weight", spec.penalty_weight}}},
      {"grid", {{"n_per_axis", grid_n}, {"b1", grid.best.b1}, {"b2", grid.best.b2},
                {"cost", grid.best_cost}}},
      {"nelder_mead", {{"b1", nm.vars.b1}, {"b2", nm.vars.b2}, {"cost", nm.cost},
                       {"iterations", nm.iterations}, {"converged", nm.converged}}},
      {"chosen", {{"b1", chosen.b1}, {"b2", chosen.b2},
                  {"cost", use_nm ? nm.cost : grid.best_cost},
                  {"source", use_nm ? "nelder_mead" : "grid"}}}};
  write_file(cfg.output_dir / "optimize_report.json", report.dump(2) + "\n");
  out << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_penholder(const Common& c, std::optional<double> diameter, std::ostream& out) {
  const ProjectConfig cfg = resolve(c);
  const PenHolder holder(cfg.gripper);
  std::vector<double> diameters;
  if (diameter) {
    diameters.push_back(*diameter);
  } else {
    for (double d = cfg.gripper.d_min; d <= cfg.gripper.d_max + 1e-9; d += 1.0) diameters.push_back(d);
  }
  std::string csv = "d_mm,s_mm,turns,spring_opens,spring_margin_nmm\n";
  out << fmt::format("{:>8} {:>10} {:>8} {:>14}\n", "d [mm]", "s [mm]", "turns", "spring margin");
  for (double d : diameters) {
    const ScrewSetting s = holder.solve_screw(d);
    const SpringCheck sc = holder.check_spring_open(cfg.spring, d);
    csv += fmt::format("{:.17g},{:.17g},{:.17g},{},{:.17g}\n", d, s.travel, s.turns, sc.opens, sc.margin);
    out << fmt::format("{:>8.2f} {:>10.4f} {:>8.3f} {:>+11.3f} {}\n", d, s.travel, s.turns,
                       sc.margin, sc.opens ? "ok" : "FAIL");
  }
  write_file(cfg.output_dir / "penholder_table.csv", csv);
  const double s_open = holder.solve_screw(cfg.gripper.d_max).travel;
  const double s_closed = holder.solve_screw(cfg.gripper.d_min).travel;
  write_file(cfg.output_dir / "penholder.svg",
             penholder_svg(holder, {s_open, 0.5 * (s_open + s_closed), s_closed}));
  return kExitOk;
}

int cmd_mount(const Common& c, const std::vector<double>& offset, double phi_deg, std::ostream& out) {
  const ProjectConfig cfg = resolve(c);
  if (offset.size() != 2) throw ConfigError("--offset", "expected x,y");
  const Pose2 target{offset[0], offset[1], wrap_angle(deg2rad(phi_deg))};
  const auto solutions = mount_ik(cfg.mount, target);
  std::string csv = "k1_deg,k2_deg,k3_deg\n";
  out << fmt::format("{:>10} {:>10} {:>10}\n", "K1 [deg]", "K2 [deg]", "K3 [deg]");
  for (const MountAngles& a : solutions) {
    out << fmt::format("{:>10.3f} {:>10.3f} {:>10.3f}\n", rad2deg(a.a1), rad2deg(a.a2), rad2deg(a.a3));
    csv += fmt::format("{:.17g},{:.17g},{:.17g}\n", rad2deg(a.a1), rad2deg(a.a2), rad2deg(a.a3));
  }
  write_file(cfg.output_dir / "mount_settings.csv", csv);
  return kExitOk;
}

std::atomic<SessionServer*> g_server{nullptr};

extern "C" void handle_stop_signal(int) {
  if (SessionServer* s = g_server.load()) s->stop();
}

int cmd_serve(const Common& c, int port, const std::string& record, std::ostream& out) {
  const ProjectConfig cfg = resolve(c);
  if (port < 0 || port > 65535) throw ConfigError("--port", "must be in [0, 65535]");
  ServerOptions opts;
  opts.port = static_cast<std::uint16_t>(port);
  if (!record.empty()) opts.record_dir = record;
  SessionServer server(cfg, opts);
  out << fmt::format("gripscribe session service listening on 127.0.0.1:{}\n", server.port())
      << std::flush;
  g_server = &server;
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  server.run();
  g_server = nullptr;
  return kExitOk;
}

int cmd_replay(const Common& c, const std::string& input, std::ostream& out) {
  const ProjectConfig cfg = resolve(c);
  std::ifstream in(input);
  if (!in) throw ConfigError("--input", "cannot open " + input);
  const auto lines = replay(cfg, in);
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_file(cfg.output_dir / "replay_outbound.jsonl", text);
  out << fmt::format("{} outbound frames written to {}\n", lines.size(),
                     (cfg.output_dir / "replay_outbound.jsonl").string());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gripscribe: digital twin of a damped handwriting-assistance linkage"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config_path, "JSON project config")->check(CLI::ExistingFile);
  app.add_option("--out", common.out_dir, "Output directory (overrides config output_dir)");
  app.add_option("--seed", common.seed, "Tremor seed override");
  app.add_option("--duration", common.duration, "Simulated duration [s]");
  app.add_option("--dt", common.dt, "Integrator step [s]");
  app.add_option("--variant", common.variant, "Mechanism variant A, B or C");

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate intent + tremor through the device");
  auto* workspace_cmd = app.add_subcommand("workspace", "Legal-sheet coverage and base placement");
  auto* sweep_cmd = app.add_subcommand("sweep", "Transmissibility frequency sweep");
  std::vector<double> f_list{0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0};
  sweep_cmd->add_option("--f-list", f_list, "Frequencies [Hz]")->delimiter(',');
  auto* optimize_cmd = app.add_subcommand("optimize", "Tune damper coefficients");
  int grid_n = 11;
  optimize_cmd->add_option("--grid", grid_n, "Grid points per axis")->check(CLI::Range(2, 101));
  auto* penholder_cmd = app.add_subcommand("penholder", "Screw travel table for pen diameters");
  std::optional<double> diameter;
  penholder_cmd->add_option("--diameter", diameter, "Single pen diameter [mm]");
  auto* mount_cmd = app.add_subcommand("mount", "Handle mount screw settings for a pose");
  std::vector<double> offset;
  double phi_deg = 0.0;
  mount_cmd->add_option("--offset", offset, "Handle offset x,y [m]")->delimiter(',')->required();
  mount_cmd->add_option("--phi", phi_deg, "Handle orientation [deg]");
  auto* serve_cmd = app.add_subcommand("serve", "Start the live session service");
  int port = 8765;
  std::string record;
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--record", record, "Directory for per-session replay recordings");
  auto* replay_cmd = app.add_subcommand("replay", "Replay a recorded session offline");
  std::string replay_input;
  replay_cmd->add_option("--input", replay_input, "Recorded session file")->required();
  auto* config_cmd = app.add_subcommand("print-config", "Print the effective config as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate_cmd->parsed()) return cmd_simulate(common, out);
    if (workspace_cmd->parsed()) return cmd_workspace(common, out);
    if (sweep_cmd->parsed()) return cmd_sweep(common, f_list, out);
    if (optimize_cmd->parsed()) return cmd_optimize(common, grid_n, out);
    if (penholder_cmd->parsed()) return cmd_penholder(common, diameter, out);
    if (mount_cmd->parsed()) return cmd_mount(common, offset, phi_deg, out);
    if (serve_cmd->parsed()) return cmd_serve(common, port, record, out);
    if (replay_cmd->parsed()) return cmd_replay(common, replay_input, out);
    if (config_cmd->parsed()) {
      out << dump_config(resolve(common));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitConfig;
}

}  // namespace gripscribe::cli
