#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gripscribe/dynamics.hpp"
#include "gripscribe/signals.hpp"

namespace gripscribe {

struct TransmissibilityPoint {
  double frequency = 0.0;  ///< [Hz]
  double gain = 0.0;       ///< pen amplitude / target amplitude
  double phase = 0.0;      ///< pen phase relative to target [rad]
};

/// Definition of the transmissibility measurement. The operating point and
/// amplitude are part of the metric: the linkage is nonlinear, so gain depends
/// on posture and excitation size.
struct SweepSettings {
  double amplitude = 0.005;             ///< [m], along table x
  double settle = 2.0;                  ///< discarded [s]
  double measure = 4.0;                 ///< rounded to whole periods (>= 1) [s]
  double dt = 1e-3;
  Vec2 operating_point{0.0, 0.28};      ///< pen position relative to the base
};

struct Demodulated {
  double amplitude = 0.0;
  double phase = 0.0;  ///< of amplitude * sin(2 pi f t + phase)
};

/// Quadrature demodulation of uniformly sampled data starting at `t0`; the
/// mean is removed first. Exact for whole-period windows.
Demodulated demodulate(std::span<const double> samples, double t0, double dt, double frequency);

TransmissibilityPoint transmissibility(const DynamicParams& params, const MechanismConfig& config,
                                       const HandImpedance& imp, double frequency,
                                       const SweepSettings& settings = {});

std::vector<TransmissibilityPoint> frequency_sweep(const DynamicParams& params,
                                                   const MechanismConfig& config,
                                                   const HandImpedance& imp,
                                                   std::span<const double> frequencies,
                                                   const SweepSettings& settings = {});

/// RMS of |pen - intent(t)| over rows with t >= settle.
double path_rmse(const SimTrace& trace, const IntentPath& intent, double settle = 0.5);

/// RMS of |target - intent(t)| over rows with t >= settle (the raw hand path).
double target_rmse(const SimTrace& trace, const IntentPath& intent, double settle = 0.5);

/// CSV `f_hz,gain,phase_rad`.
void write_sweep_csv(std::ostream& out, std::span<const TransmissibilityPoint> points);

/// Bode-style magnitude plot on a log frequency axis.
std::string sweep_svg(std::span<const TransmissibilityPoint> points);

/// Overlay of intent, raw target and stabilized pen paths.
std::string pen_trace_svg(const SimTrace& trace, const IntentPath& intent);

}  // namespace gripscribe
