#include "gripscribe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "gripscribe/errors.hpp"
#include "gripscribe/svg.hpp"

namespace gripscribe {

Demodulated demodulate(std::span<const double> samples, double t0, double dt, double frequency) {
  if (samples.empty()) throw InvalidArgument("no samples to demodulate");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  const double w = 2.0 * kPi * frequency;
  double in_phase = 0.0;
  double quadrature = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    const double x = samples[i] - mean;
    in_phase += x * std::sin(w * t);
    quadrature += x * std::cos(w * t);
  }
  in_phase *= 2.0 / n;
  quadrature *= 2.0 / n;
  return {std::hypot(in_phase, quadrature), std::atan2(quadrature, in_phase)};
}

TransmissibilityPoint transmissibility(const DynamicParams& params, const MechanismConfig& config,
                                       const HandImpedance& imp, double frequency,
                                       const SweepSettings& settings) {
  if (!(frequency > 0.0)) throw InvalidArgument("frequency must be > 0");
  const Vec2 center = config.base + settings.operating_point;
  const IkResult sol = ik(config, center);
  if (sol.solutions.empty()) throw OutOfReach("operating point excluded by joint limits");

  const double periods = std::max(1.0, std::round(settings.measure * frequency));
  const auto settle_steps = static_cast<std::size_t>(std::llround(settings.settle / settings.dt));
  const auto measure_steps =
      static_cast<std::size_t>(std::llround(periods / frequency / settings.dt));

  const double w = 2.0 * kPi * frequency;
  const double a = settings.amplitude;
  const TargetFn target = [center, w, a](double t) {
    return TargetSample{center + Vec2(a * std::sin(w * t), 0.0), Vec2(a * w * std::cos(w * t), 0.0)};
  };

  LedgerState state{sol.solutions.front(), 0.0, 0.0};
  std::vector<double> pen_x;
  pen_x.reserve(measure_steps);
  const std::size_t total = settle_steps + measure_steps;
  for (std::size_t i = 0; i < total; ++i) {
    const double t = static_cast<double>(i) * settings.dt;
    if (i >= settle_steps) pen_x.push_back(pen_position(config, state.joints).x());
    state = step_ledger(params, config, imp, state, target, t, settings.dt);
    if (!std::isfinite(state.joints.theta1) || !std::isfinite(state.joints.psi2)) {
      throw NonFinite(fmt::format("transmissibility run at {} Hz diverged", frequency));
    }
  }

  const Demodulated d =
      demodulate(pen_x, static_cast<double>(settle_steps) * settings.dt, settings.dt, frequency);
  return {frequency, d.amplitude / a, d.phase};
}

std::vector<TransmissibilityPoint> frequency_sweep(const DynamicParams& params,
                                                   const MechanismConfig& config,
                                                   const HandImpedance& imp,
                                                   std::span<const double> frequencies,
                                                   const SweepSettings& settings) {
  if (!std::is_sorted(frequencies.begin(), frequencies.end())) {
    throw InvalidArgument("sweep frequencies must be sorted");
  }
  std::vector<TransmissibilityPoint> out;
  out.reserve(frequencies.size());
  for (double f : frequencies) out.push_back(transmissibility(params, config, imp, f, settings));
  return out;
}

namespace {

template <typename Select>
double rms_against_intent(const SimTrace& trace, const IntentPath& intent, double settle,
                          Select select) {
  if (trace.rows.empty()) throw InvalidArgument("trace is empty");
  double sum = 0.0;
  std::size_t n = 0;
  for (const TraceRow& row : trace.rows) {
    if (row.t < settle) continue;
    sum += (select(row) - intent_path(intent, row.t).position).squaredNorm();
    ++n;
  }
  if (n == 0) throw InvalidArgument("no trace rows after the settle time");
  return std::sqrt(sum / static_cast<double>(n));
}

}  // namespace

double path_rmse(const SimTrace& trace, const IntentPath& intent, double settle) {
  return rms_against_intent(trace, intent, settle, [](const TraceRow& r) { return r.pen; });
}

double target_rmse(const SimTrace& trace, const IntentPath& intent, double settle) {
  return rms_against_intent(trace, intent, settle, [](const TraceRow& r) { return r.target; });
}

void write_sweep_csv(std::ostream& out, std::span<const TransmissibilityPoint> points) {
  out << "f_hz,gain,phase_rad\n";
  for (const auto& p : points) {
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", p.frequency, p.gain, p.phase);
  }
}

std::string sweep_svg(std::span<const TransmissibilityPoint> points) {
  if (points.empty()) return svg::Plot(640, 400, {0.1, 0.0}, {10.0, 1.2}, true).str();
  double f_lo = points.front().frequency;
  double f_hi = points.back().frequency;
  if (f_hi <= f_lo) {
    f_lo /= 2.0;
    f_hi *= 2.0;
  }
  double g_hi = 1.0;
  for (const auto& p : points) g_hi = std::max(g_hi, p.gain);
  svg::Plot plot(640, 400, {f_lo, 0.0}, {f_hi, std::ceil(g_hi * 10.0 + 1.0) / 10.0}, true);
  plot.axes("frequency [Hz]", "gain |pen| / |target|");
  plot.line({f_lo, 1.0}, {f_hi, 1.0}, "stroke:#999;stroke-dasharray:4,3");
  std::vector<Vec2> pts;
  for (const auto& p : points) pts.emplace_back(p.frequency, p.gain);
  plot.polyline(pts, "stroke:#1f77b4;stroke-width:2");
  for (const Vec2& p : pts) plot.circle_px(p, 3.0, "fill:#1f77b4");
  plot.title("Transmissibility of the hand-coupled mechanism");
  return plot.str();
}

std::string pen_trace_svg(const SimTrace& trace, const IntentPath& intent) {
  std::vector<Vec2> pen;
  std::vector<Vec2> raw;
  std::vector<Vec2> ideal;
  Vec2 lo = Vec2::Constant(1e9);
  Vec2 hi = Vec2::Constant(-1e9);
  for (const TraceRow& r : trace.rows) {
    const Vec2 i = intent_path(intent, r.t).position;
    pen.push_back(r.pen);
    raw.push_back(r.target);
    ideal.push_back(i);
    for (const Vec2& p : {r.pen, r.target, i}) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  if (pen.empty()) {
    lo = Vec2::Zero();
    hi = Vec2::Ones();
  }
  // Equal aspect with a 10% border.
  const Vec2 mid = 0.5 * (lo + hi);
  const double half = 0.55 * std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-3});
  svg::Plot plot(640, 640, mid - Vec2::Constant(half), mid + Vec2::Constant(half));
  plot.axes("x [m]", "y [m]");
  plot.polyline(raw, "stroke:#f4a582;stroke-width:1");
  plot.polyline(ideal, "stroke:#999;stroke-width:1;stroke-dasharray:4,3");
  plot.polyline(pen, "stroke:#08306b;stroke-width:1.5");
  plot.legend({{"stroke:#999;stroke-dasharray:4,3", "intent"},
               {"stroke:#f4a582", "raw target"},
               {"stroke:#08306b;stroke-width:1.5", "pen"}});
  plot.title("Pen trace");
  return plot.str();
}

}  // namespace gripscribe
