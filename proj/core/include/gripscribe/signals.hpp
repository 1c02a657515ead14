#pragma once

#include <cstdint>
#include <vector>

#include "gripscribe/dynamics.hpp"

namespace gripscribe {

enum class TremorKind { sinusoid, band_noise, spasm_impulses };

/// Synthetic involuntary-motion model, expressed as a displacement added to
/// the intended hand position. These families are stand-ins, not clinical
/// tremor models.
struct TremorSpec {
  TremorKind kind = TremorKind::sinusoid;
  double amplitude = 0.005;  ///< [m]
  double frequency = 8.0;    ///< sinusoid [Hz]
  double band_lo = 4.0;      ///< band noise [Hz]
  double band_hi = 12.0;     ///< band noise [Hz]
  double rate = 0.5;         ///< spasm events per second
  double width = 0.1;        ///< spasm pulse width [s]
  Vec2 direction{1.0, 0.0};  ///< sinusoid and spasm axis (normalized on use)
  std::uint64_t seed = 1;

  void validate() const;
};

/// Number of random-phase components per axis in band noise.
inline constexpr int kBandComponents = 32;

/// Evaluates a tremor spec. Construction precomputes the band-noise
/// components; evaluation is a pure function of t.
///
/// Randomness comes from std::mt19937_64 (whose output sequence is fixed by
/// the C++ standard) mapped to doubles as (x >> 11) * 2^-53, so streams are
/// reproducible across toolchains. Band noise draws, per axis, 32 frequencies
/// uniform in [band_lo, band_hi) and then 32 phases uniform in [0, 2 pi).
/// Spasm events are generated per one-second block k from a generator seeded
/// with std::seed_seq{seed_lo32, seed_hi32, k_lo32, k_hi32}; inter-arrival
/// times are exponential with the given rate and each event draws a sign.
class Tremor {
public:
  explicit Tremor(const TremorSpec& spec);

  Vec2 displacement(double t) const;
  Vec2 velocity(double t) const;

  const TremorSpec& spec() const { return spec_; }

  struct Event {
    double start;
    double sign;
  };
  /// Spasm onsets in [block, block + 1) seconds.
  std::vector<Event> spasm_events(std::int64_t block) const;

private:
  struct Component {
    double omega;
    double phase;
  };

  template <typename F>
  void for_each_active_event(double t, F&& f) const;

  TremorSpec spec_;
  Vec2 dir_;
  double component_amplitude_ = 0.0;
  std::vector<Component> x_components_;
  std::vector<Component> y_components_;
};

Vec2 tremor_signal(const TremorSpec& spec, double t);

enum class PathKind { line, circle, lissajous_letter };

/// Intended (voluntary) hand trajectory, C1 in time.
struct IntentPath {
  PathKind kind = PathKind::line;
  Vec2 start{-0.05, 0.28};  ///< line
  Vec2 end{0.05, 0.28};     ///< line; motion continues past `end` at the same speed
  Vec2 center{0.0, 0.28};   ///< circle, lissajous
  double radius = 0.03;     ///< circle [m]
  double speed = 0.02;      ///< line, circle [m/s]
  Vec2 lobe_amplitude{0.03, 0.02};  ///< lissajous [m]
  double lobe_fx = 0.2;     ///< lissajous [Hz]
  double lobe_fy = 0.4;     ///< lissajous [Hz]
  double lobe_phase = 0.0;  ///< lissajous x phase [rad]

  void validate() const;
  /// Time to traverse start -> end for a line.
  double line_duration() const;
};

TargetSample intent_path(const IntentPath& path, double t);

TargetSample compose_target(const IntentPath& path, const Tremor& tremor, double t);
TargetSample compose_target(const IntentPath& path, const TremorSpec& tremor, double t);

/// Convenience: a TargetFn combining a path and a tremor generator.
TargetFn make_target_fn(const IntentPath& path, const TremorSpec& tremor);

}  // namespace gripscribe
