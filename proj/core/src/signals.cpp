#include "gripscribe/signals.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "gripscribe/errors.hpp"

namespace gripscribe {
namespace {

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

void TremorSpec::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw InvalidArgument("amplitude must be >= 0");
  if (!(frequency > 0.0)) throw InvalidArgument("frequency must be > 0");
  if (!(band_lo > 0.0 && band_lo < band_hi)) throw InvalidArgument("band must satisfy 0 < lo < hi");
  if (!(rate >= 0.0)) throw InvalidArgument("rate must be >= 0");
  if (!(width > 0.0)) throw InvalidArgument("width must be > 0");
  if (!(direction.norm() > 0.0)) throw InvalidArgument("direction must be nonzero");
}

Tremor::Tremor(const TremorSpec& spec) : spec_(spec), dir_(spec.direction.normalized()) {
  spec_.validate();
  if (spec_.kind != TremorKind::band_noise) return;

  // Sum of N unit-amplitude sinusoids has RMS sqrt(N/2); target RMS per axis
  // is amplitude / sqrt(2).
  component_amplitude_ = spec_.amplitude / std::sqrt(static_cast<double>(kBandComponents));
  std::mt19937_64 gen(spec_.seed);
  const auto draw_axis = [&](std::vector<Component>& out) {
    out.resize(kBandComponents);
    for (auto& c : out) {
      c.omega = 2.0 * kPi * (spec_.band_lo + (spec_.band_hi - spec_.band_lo) * uniform01(gen));
    }
    for (auto& c : out) c.phase = 2.0 * kPi * uniform01(gen);
  };
  draw_axis(x_components_);
  draw_axis(y_components_);
}

std::vector<Tremor::Event> Tremor::spasm_events(std::int64_t block) const {
  std::vector<Event> events;
  if (spec_.rate <= 0.0) return events;
  const auto seed = spec_.seed;
  const auto ublock = static_cast<std::uint64_t>(block);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(ublock), static_cast<std::uint32_t>(ublock >> 32)};
  std::mt19937_64 gen(seq);
  double t = static_cast<double>(block);
  const double end = t + 1.0;
  for (;;) {
    t += -std::log1p(-uniform01(gen)) / spec_.rate;
    if (t >= end) break;
    events.push_back({t, uniform01(gen) < 0.5 ? -1.0 : 1.0});
  }
  return events;
}

template <typename F>
void Tremor::for_each_active_event(double t, F&& f) const {
  const auto first = static_cast<std::int64_t>(std::floor(t - spec_.width));
  const auto last = static_cast<std::int64_t>(std::floor(t));
  for (std::int64_t b = std::max<std::int64_t>(first, 0); b <= last; ++b) {
    for (const Event& e : spasm_events(b)) {
      if (t >= e.start && t <= e.start + spec_.width) f(e);
    }
  }
}

Vec2 Tremor::displacement(double t) const {
  const double a = spec_.amplitude;
  switch (spec_.kind) {
    case TremorKind::sinusoid:
      return a * std::sin(2.0 * kPi * spec_.frequency * t) * dir_;
    case TremorKind::band_noise: {
      Vec2 out = Vec2::Zero();
      for (const auto& c : x_components_) out.x() += std::sin(c.omega * t + c.phase);
      for (const auto& c : y_components_) out.y() += std::sin(c.omega * t + c.phase);
      return component_amplitude_ * out;
    }
    case TremorKind::spasm_impulses: {
      double s = 0.0;
      for_each_active_event(t, [&](const Event& e) {
        s += e.sign * 0.5 * (1.0 - std::cos(2.0 * kPi * (t - e.start) / spec_.width));
      });
      return a * s * dir_;
    }
  }
  return Vec2::Zero();
}

Vec2 Tremor::velocity(double t) const {
  const double a = spec_.amplitude;
  switch (spec_.kind) {
    case TremorKind::sinusoid: {
      const double w = 2.0 * kPi * spec_.frequency;
      return a * w * std::cos(w * t) * dir_;
    }
    case TremorKind::band_noise: {
      Vec2 out = Vec2::Zero();
      for (const auto& c : x_components_) out.x() += c.omega * std::cos(c.omega * t + c.phase);
      for (const auto& c : y_components_) out.y() += c.omega * std::cos(c.omega * t + c.phase);
      return component_amplitude_ * out;
    }
    case TremorKind::spasm_impulses: {
      const double w = 2.0 * kPi / spec_.width;
      double s = 0.0;
      for_each_active_event(t, [&](const Event& e) {
        s += e.sign * 0.5 * w * std::sin(w * (t - e.start));
      });
      return a * s * dir_;
    }
  }
  return Vec2::Zero();
}

Vec2 tremor_signal(const TremorSpec& spec, double t) { return Tremor(spec).displacement(t); }

void IntentPath::validate() const {
  switch (kind) {
    case PathKind::line:
      if (!((end - start).norm() > 0.0)) throw InvalidArgument("line start and end must differ");
      if (!(speed > 0.0)) throw InvalidArgument("speed must be > 0");
      break;
    case PathKind::circle:
      if (!(radius > 0.0)) throw InvalidArgument("radius must be > 0");
      if (!(speed > 0.0)) throw InvalidArgument("speed must be > 0");
      break;
    case PathKind::lissajous_letter:
      if (!(lobe_fx > 0.0 && lobe_fy > 0.0)) throw InvalidArgument("lobe frequencies must be > 0");
      break;
  }
}

double IntentPath::line_duration() const { return (end - start).norm() / speed; }

TargetSample intent_path(const IntentPath& path, double t) {
  switch (path.kind) {
    case PathKind::line: {
      const Vec2 u = (path.end - path.start).normalized();
      return {path.start + path.speed * t * u, path.speed * u};
    }
    case PathKind::circle: {
      const double w = path.speed / path.radius;
      const Vec2 radial(std::cos(w * t), std::sin(w * t));
      return {path.center + path.radius * radial,
              path.radius * w * Vec2(-radial.y(), radial.x())};
    }
    case PathKind::lissajous_letter: {
      const double wx = 2.0 * kPi * path.lobe_fx;
      const double wy = 2.0 * kPi * path.lobe_fy;
      const Vec2& a = path.lobe_amplitude;
      return {path.center + Vec2(a.x() * std::sin(wx * t + path.lobe_phase), a.y() * std::sin(wy * t)),
              Vec2(a.x() * wx * std::cos(wx * t + path.lobe_phase), a.y() * wy * std::cos(wy * t))};
    }
  }
  return {};
}

TargetSample compose_target(const IntentPath& path, const Tremor& tremor, double t) {
  TargetSample s = intent_path(path, t);
  if (tremor.spec().amplitude == 0.0) return s;
  s.position += tremor.displacement(t);
  s.velocity += tremor.velocity(t);
  return s;
}

TargetSample compose_target(const IntentPath& path, const TremorSpec& tremor, double t) {
  return compose_target(path, Tremor(tremor), t);
}

TargetFn make_target_fn(const IntentPath& path, const TremorSpec& tremor) {
  auto gen = std::make_shared<const Tremor>(tremor);
  return [path, gen](double t) { return compose_target(path, *gen, t); };
}

}  // namespace gripscribe
