#include "gripscribe/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gripscribe/errors.hpp"

namespace gripscribe {
namespace {

using nlohmann::json;

/// Reads the fields of one JSON object, remembering which keys were consumed
/// so leftovers can be reported as unknown.
class Section {
public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = node_.find(std::string(key));
    return it == node_.end() ? nullptr : &*it;
  }

  bool has(std::string_view key) const { return node_.contains(std::string(key)); }

  void number(std::string_view key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(field(key), "must be finite");
    }
  }

  template <typename Pred>
  void number(std::string_view key, double& out, Pred&& ok, std::string_view requirement) {
    number(key, out);
    if (!ok(out)) throw ConfigError(field(key), std::string("must be ") + std::string(requirement));
  }

  void positive(std::string_view key, double& out) {
    number(key, out, [](double v) { return v > 0.0; }, "> 0");
  }

  void nonnegative(std::string_view key, double& out) {
    number(key, out, [](double v) { return v >= 0.0; }, ">= 0");
  }

  void pair(std::string_view key, double& a, double& b) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        throw ConfigError(field(key), "expected an array of two numbers");
      }
      a = (*v)[0].get<double>();
      b = (*v)[1].get<double>();
      if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError(field(key), "must be finite");
    }
  }

  void point(std::string_view key, Vec2& out) { pair(key, out.x(), out.y()); }

  void string(std::string_view key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename Enum>
  void choice(std::string_view key, Enum& out,
              std::initializer_list<std::pair<const char*, Enum>> options) {
    std::string s;
    if (!has(key)) {
      find(key);
      return;
    }
    string(key, s);
    for (const auto& [name, value] : options) {
      if (s == name) {
        out = value;
        return;
      }
    }
    std::string allowed;
    for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    throw ConfigError(field(key), "unknown value \"" + s + "\" (expected one of " + allowed + ")");
  }

  void seed(std::string_view key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }

  Section child(std::string_view key) {
    static const json empty = json::object();
    const json* v = find(key);
    return Section(v ? *v : empty, field(key));
  }

  /// Reports the first key that was never requested.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
    }
  }

  /// Runs a section-level invariant check, attributing failures to this path.
  template <typename F>
  void check(F&& validate) const {
    try {
      validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(path_, e.what());
    }
  }

private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

const std::initializer_list<std::pair<const char*, Variant>> kVariants{
    {"A", Variant::A}, {"B", Variant::B}, {"C", Variant::C}};
const std::initializer_list<std::pair<const char*, DamperPlacement>> kPlacements{
    {"relative_at_joints", DamperPlacement::relative_at_joints},
    {"both_at_base", DamperPlacement::both_at_base},
    {"none", DamperPlacement::none}};
const std::initializer_list<std::pair<const char*, TremorKind>> kTremorKinds{
    {"sinusoid", TremorKind::sinusoid},
    {"band_noise", TremorKind::band_noise},
    {"spasm_impulses", TremorKind::spasm_impulses}};
const std::initializer_list<std::pair<const char*, PathKind>> kPathKinds{
    {"line", PathKind::line}, {"circle", PathKind::circle}, {"lissajous_letter", PathKind::lissajous_letter}};

template <typename Enum>
std::string name_of(Enum value, std::initializer_list<std::pair<const char*, Enum>> options) {
  for (const auto& [name, v] : options) {
    if (v == value) return name;
  }
  return "?";
}

void read_mechanism(Section s, MechanismConfig& m) {
  s.choice("variant", m.variant, kVariants);
  s.positive("l1", m.l1);
  s.positive("l2", m.l2);
  s.point("base", m.base);
  s.number("joint_clearance_delta", m.joint_clearance_delta,
           [](double v) { return v > 0.0 && v < kPi / 2.0; }, "in (0, pi/2)");
  s.pair("theta1_range", m.theta1_range.lo, m.theta1_range.hi);
  if (!(m.theta1_range.lo <= m.theta1_range.hi)) {
    throw ConfigError(s.field("theta1_range"), "must satisfy lo <= hi");
  }
  s.finish();
  s.check([&] { m.validate(); });
}

void read_dynamics(Section s, DynamicParams& p, Variant variant) {
  for (auto [key, ref] : {std::pair<const char*, double*>{"m1", &p.m1}, {"m2", &p.m2},
                          {"i1", &p.i1}, {"i2", &p.i2}, {"b1", &p.b1}, {"b2", &p.b2},
                          {"pen_drag", &p.pen_drag}}) {
    s.nonnegative(key, *ref);
  }
  s.number("lc1", p.lc1);
  s.number("lc2", p.lc2);
  p.damper_placement = default_damper_placement(variant);
  s.choice("damper_placement", p.damper_placement, kPlacements);
  s.finish();
  s.check([&] { p.validate(); });
}

void read_hand(Section s, HandImpedance& h) {
  s.positive("k", h.k);
  s.nonnegative("d", h.d);
  s.finish();
}

void read_tremor(Section s, TremorSpec& t) {
  s.choice("kind", t.kind, kTremorKinds);
  s.nonnegative("amplitude", t.amplitude);
  s.positive("frequency", t.frequency);
  s.pair("band", t.band_lo, t.band_hi);
  if (!(t.band_lo > 0.0 && t.band_lo < t.band_hi)) {
    throw ConfigError(s.field("band"), "must satisfy 0 < low < high");
  }
  s.nonnegative("rate", t.rate);
  s.positive("width", t.width);
  s.point("direction", t.direction);
  if (!(t.direction.norm() > 0.0)) throw ConfigError(s.field("direction"), "must be nonzero");
  s.seed("seed", t.seed);
  s.finish();
  s.check([&] { t.validate(); });
}

void read_intent(Section s, IntentPath& p) {
  s.choice("kind", p.kind, kPathKinds);
  s.point("start", p.start);
  s.point("end", p.end);
  s.point("center", p.center);
  s.positive("radius", p.radius);
  s.positive("speed", p.speed);
  s.point("lobe_amplitude", p.lobe_amplitude);
  s.positive("lobe_fx", p.lobe_fx);
  s.positive("lobe_fy", p.lobe_fy);
  s.number("lobe_phase", p.lobe_phase);
  s.finish();
  s.check([&] { p.validate(); });
}

void read_gripper(Section s, GripperGeometry& g) {
  for (auto [key, ref] : {std::pair<const char*, double*>{"w", &g.w}, {"a", &g.a}, {"c", &g.c},
                          {"f", &g.f}, {"h0", &g.h0}, {"s_max", &g.s_max}, {"pitch", &g.pitch},
                          {"d_min", &g.d_min}, {"d_max", &g.d_max}}) {
    s.positive(key, *ref);
  }
  s.finish();
  s.check([&] { (void)PenHolder(g); });
}

void read_spring(Section s, SpringSpec& sp) {
  s.nonnegative("kappa", sp.kappa);
  s.nonnegative("preload", sp.preload);
  s.nonnegative("tau_friction", sp.tau_friction);
  s.finish();
}

void read_mount(Section s, MountConfig& m) {
  s.positive("k1", m.k1);
  s.positive("k2", m.k2);
  s.positive("k3", m.k3);
  s.finish();
}

json point_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

ProjectConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  Section s(root, "");
  ProjectConfig cfg;
  read_mechanism(s.child("mechanism"), cfg.mechanism);
  read_dynamics(s.child("dynamics"), cfg.dynamics, cfg.mechanism.variant);
  read_hand(s.child("hand"), cfg.hand);
  read_tremor(s.child("tremor"), cfg.tremor);
  read_intent(s.child("intent"), cfg.intent);
  read_gripper(s.child("gripper"), cfg.gripper);
  read_spring(s.child("spring"), cfg.spring);
  read_mount(s.child("mount"), cfg.mount);
  std::string out = cfg.output_dir.string();
  s.string("output_dir", out);
  cfg.output_dir = out;
  s.finish();
  return cfg;
}

ProjectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ProjectConfig& c) {
  const auto& m = c.mechanism;
  const auto& d = c.dynamics;
  const auto& t = c.tremor;
  const auto& p = c.intent;
  const auto& g = c.gripper;
  json j;
  j["mechanism"] = {{"variant", name_of(m.variant, kVariants)},
                    {"l1", m.l1},
                    {"l2", m.l2},
                    {"base", point_json(m.base)},
                    {"joint_clearance_delta", m.joint_clearance_delta},
                    {"theta1_range", json::array({m.theta1_range.lo, m.theta1_range.hi})}};
  j["dynamics"] = {{"m1", d.m1}, {"m2", d.m2}, {"lc1", d.lc1}, {"lc2", d.lc2},
                   {"i1", d.i1}, {"i2", d.i2}, {"b1", d.b1},   {"b2", d.b2},
                   {"damper_placement", name_of(d.damper_placement, kPlacements)},
                   {"pen_drag", d.pen_drag}};
  j["hand"] = {{"k", c.hand.k}, {"d", c.hand.d}};
  j["tremor"] = {{"kind", name_of(t.kind, kTremorKinds)},
                 {"amplitude", t.amplitude},
                 {"frequency", t.frequency},
                 {"band", json::array({t.band_lo, t.band_hi})},
                 {"rate", t.rate},
                 {"width", t.width},
                 {"direction", point_json(t.direction)},
                 {"seed", t.seed}};
  j["intent"] = {{"kind", name_of(p.kind, kPathKinds)},
                 {"start", point_json(p.start)},
                 {"end", point_json(p.end)},
                 {"center", point_json(p.center)},
                 {"radius", p.radius},
                 {"speed", p.speed},
                 {"lobe_amplitude", point_json(p.lobe_amplitude)},
                 {"lobe_fx", p.lobe_fx},
                 {"lobe_fy", p.lobe_fy},
                 {"lobe_phase", p.lobe_phase}};
  j["gripper"] = {{"w", g.w},         {"a", g.a},         {"c", g.c},
                  {"f", g.f},         {"h0", g.h0},       {"s_max", g.s_max},
                  {"pitch", g.pitch}, {"d_min", g.d_min}, {"d_max", g.d_max}};
  j["spring"] = {{"kappa", c.spring.kappa},
                 {"preload", c.spring.preload},
                 {"tau_friction", c.spring.tau_friction}};
  j["mount"] = {{"k1", c.mount.k1}, {"k2", c.mount.k2}, {"k3", c.mount.k3}};
  j["output_dir"] = c.output_dir.string();
  return j.dump(2) + "\n";
}

}  // namespace gripscribe
