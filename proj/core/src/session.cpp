#include "gripscribe/session.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "gripscribe/errors.hpp"

namespace gripscribe {
namespace {

using nlohmann::json;

const Vec2 kStartPoint{0.0, 0.28};

double finite_number(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ProtocolError(fmt::format("field '{}' must be a number", key));
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ProtocolError(fmt::format("field '{}' must be finite", key));
  return v;
}

json parse_object(std::string_view line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ProtocolError("malformed JSON");
  if (!j.is_object()) throw ProtocolError("frame must be a JSON object");
  return j;
}

}  // namespace

Session::Session(const ProjectConfig& config)
    : mechanism_(config.mechanism),
      params_(config.dynamics),
      hand_(config.hand),
      tremor_(config.tremor) {
  mechanism_.validate();
  params_.validate();
  hand_.validate();
  const IkResult sol = ik(mechanism_, mechanism_.base + kStartPoint);
  if (sol.solutions.empty()) throw OutOfReach("session start point excluded by joint limits");
  ledger_.joints = sol.solutions.front();
  pointer_ = pen();
}

Vec2 Session::pen() const { return pen_position(mechanism_, ledger_.joints); }

void Session::push(const SessionFrame& frame) {
  if (terminated()) throw ProtocolError("session terminated");
  if (!std::isfinite(frame.t)) throw ProtocolError("t must be finite");
  if (last_client_t_ && frame.t < *last_client_t_) {
    throw ProtocolError(fmt::format("t decreased from {} to {}", *last_client_t_, frame.t));
  }
  for (const auto& b : {frame.b1, frame.b2}) {
    if (b && !(*b >= 0.0 && std::isfinite(*b))) throw ProtocolError("damper coefficients must be >= 0");
  }
  if (frame.pointer && !frame.pointer->allFinite()) throw ProtocolError("pointer must be finite");

  last_client_t_ = frame.t;
  if (frame.b1) params_.b1 = *frame.b1;
  if (frame.b2) params_.b2 = *frame.b2;
  if (frame.tremor_on) tremor_on_ = *frame.tremor_on;
  if (frame.pointer) {
    const Vec2 p = *frame.pointer;
    if (last_pointer_t_ && frame.t > *last_pointer_t_) {
      const double gap = frame.t - *last_pointer_t_;
      Vec2 v = (p - pointer_) / gap;
      if (v.norm() > kMaxTargetSpeed) v *= kMaxTargetSpeed / v.norm();
      pointer_vel_ = v;
      // Hold the estimate for one client interval; after that the hand is
      // treated as stopped.
      vel_valid_until_ = sim_time() + gap;
    } else if (!last_pointer_t_) {
      pointer_vel_ = Vec2::Zero();
    }
    pointer_ = p;
    last_pointer_t_ = frame.t;
  }
}

TargetSample Session::target_at(double t) const {
  TargetSample s{pointer_, t < vel_valid_until_ ? pointer_vel_ : Vec2::Zero()};
  if (tremor_on_) {
    s.position += tremor_.displacement(t);
    s.velocity += tremor_.velocity(t);
  }
  return s;
}

PenFrame Session::make_frame() const {
  const Vec2 p = pen();
  const Vec2 raw = target_at(sim_time()).position;
  return {sim_time(), p.x(), p.y(), raw.x(), raw.y(), ledger_.joints.theta1, ledger_.joints.psi2,
          ledger_.dissipated, false};
}

std::vector<PenFrame> Session::advance(double wall_dt) {
  std::vector<PenFrame> frames;
  if (terminated()) return frames;
  if (std::isfinite(wall_dt) && wall_dt > 0.0) carry_ += wall_dt;
  auto n = static_cast<long long>(std::floor(carry_ / kDt));
  carry_ -= static_cast<double>(n) * kDt;
  if (n > kMaxStepsPerTick) {
    n = kMaxStepsPerTick;
    lag_pending_ = true;
  }

  const TargetFn target = [this](double t) { return target_at(t); };
  for (long long i = 0; i < n; ++i) {
    try {
      ledger_ = step_ledger(params_, mechanism_, hand_, ledger_, target, sim_time(), kDt);
    } catch (const Error& e) {
      error_ = e.name() + ": " + e.what();
      return frames;
    }
    ++steps_;
    const JointState& s = ledger_.joints;
    if (!std::isfinite(s.theta1) || !std::isfinite(s.psi2) || !std::isfinite(s.omega1) ||
        !std::isfinite(s.omega2)) {
      error_ = fmt::format("NonFinite: state diverged at t = {:.3f} s", sim_time());
      return frames;
    }
    if (steps_ % kFrameDecimation == 0) {
      PenFrame f = make_frame();
      f.lag = lag_pending_;
      lag_pending_ = false;
      frames.push_back(f);
    }
  }
  return frames;
}

std::vector<PenFrame> Session::step(std::span<const SessionFrame> frames, double wall_dt) {
  for (const SessionFrame& f : frames) push(f);
  return advance(wall_dt);
}

std::string hello_line() {
  return json{{"hello", kProtocolName}, {"version", kProtocolVersion}}.dump();
}

void check_hello(std::string_view line) {
  const json j = parse_object(line);
  const auto hello = j.find("hello");
  if (hello == j.end() || !hello->is_string() || hello->get<std::string>() != kProtocolName) {
    throw ProtocolError(fmt::format("expected {{\"hello\": \"{}\", ...}} handshake", kProtocolName));
  }
  const auto version = j.find("version");
  if (version == j.end() || !version->is_number_integer() ||
      version->get<long long>() != kProtocolVersion) {
    throw ProtocolError(fmt::format("protocol version mismatch (server speaks {})", kProtocolVersion));
  }
}

SessionFrame decode_session_frame(std::string_view line) {
  const json j = parse_object(line);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "t" && k != "x" && k != "y" && k != "tremor_on" && k != "set_params") {
      throw ProtocolError(fmt::format("unknown field '{}'", k));
    }
  }
  SessionFrame f;
  f.t = finite_number(j, "t");
  const bool has_x = j.contains("x");
  const bool has_y = j.contains("y");
  if (has_x != has_y) throw ProtocolError("x and y must be sent together");
  if (has_x) f.pointer = Vec2(finite_number(j, "x"), finite_number(j, "y"));
  if (const auto it = j.find("tremor_on"); it != j.end()) {
    if (!it->is_boolean()) throw ProtocolError("field 'tremor_on' must be a boolean");
    f.tremor_on = it->get<bool>();
  }
  if (const auto it = j.find("set_params"); it != j.end()) {
    if (!it->is_object()) throw ProtocolError("field 'set_params' must be an object");
    for (auto p = it->begin(); p != it->end(); ++p) {
      if (p.key() != "b1" && p.key() != "b2") {
        throw ProtocolError(fmt::format("set_params.{} cannot change during a session", p.key()));
      }
    }
    if (it->contains("b1")) f.b1 = finite_number(*it, "b1");
    if (it->contains("b2")) f.b2 = finite_number(*it, "b2");
  }
  return f;
}

std::string encode_session_frame(const SessionFrame& f) {
  json j{{"t", f.t}};
  if (f.pointer) {
    j["x"] = f.pointer->x();
    j["y"] = f.pointer->y();
  }
  if (f.tremor_on) j["tremor_on"] = *f.tremor_on;
  if (f.b1 || f.b2) {
    json p = json::object();
    if (f.b1) p["b1"] = *f.b1;
    if (f.b2) p["b2"] = *f.b2;
    j["set_params"] = p;
  }
  return j.dump();
}

std::string encode_pen_frame(const PenFrame& f) {
  // Key order is fixed by construction (nlohmann::ordered_json).
  nlohmann::ordered_json j;
  j["t"] = f.t;
  j["pen_x"] = f.pen_x;
  j["pen_y"] = f.pen_y;
  j["raw_x"] = f.raw_x;
  j["raw_y"] = f.raw_y;
  j["theta1"] = f.theta1;
  j["psi2"] = f.psi2;
  j["dissipated"] = f.dissipated;
  j["lag"] = f.lag;
  return j.dump();
}

PenFrame decode_pen_frame(std::string_view line) {
  const json j = parse_object(line);
  PenFrame f;
  f.t = finite_number(j, "t");
  f.pen_x = finite_number(j, "pen_x");
  f.pen_y = finite_number(j, "pen_y");
  f.raw_x = finite_number(j, "raw_x");
  f.raw_y = finite_number(j, "raw_y");
  f.theta1 = finite_number(j, "theta1");
  f.psi2 = finite_number(j, "psi2");
  f.dissipated = finite_number(j, "dissipated");
  f.lag = j.value("lag", false);
  return f;
}

std::string encode_error(std::string_view message, long line) {
  nlohmann::ordered_json j;
  j["error"] = std::string(message);
  j["line"] = line;
  return j.dump();
}

SessionDriver::SessionDriver(const ProjectConfig& config, long first_line)
    : session_(config), line_no_(first_line) {}

std::vector<std::string> SessionDriver::on_line(std::string_view line) {
  const long n = line_no_++;
  if (finished_) return {};
  try {
    session_.push(decode_session_frame(line));
  } catch (const ProtocolError& e) {
    return {encode_error(e.what(), n)};
  }
  return {};
}

std::vector<std::string> SessionDriver::on_tick(double wall_dt) {
  std::vector<std::string> out;
  if (finished_) return out;
  for (const PenFrame& f : session_.advance(wall_dt)) out.push_back(encode_pen_frame(f));
  if (session_.terminated()) {
    out.push_back(encode_error(*session_.error(), line_no_ - 1));
    finished_ = true;
  }
  return out;
}

void SessionRecorder::line(std::string_view inbound) {
  const json j = json::parse(inbound, nullptr, false);
  if (j.is_object() && !j.contains("tick") && !j.contains("raw")) {
    out_ << inbound << '\n';
  } else {
    out_ << json{{"raw", std::string(inbound)}}.dump() << '\n';
  }
}

void SessionRecorder::tick(double wall_dt) { out_ << json{{"tick", wall_dt}}.dump() << '\n'; }

std::vector<std::string> replay(const ProjectConfig& config, std::istream& recording) {
  SessionDriver driver(config);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(recording, line)) {
    const json j = json::parse(line, nullptr, false);
    std::vector<std::string> produced;
    if (j.is_object() && j.size() == 1 && j.contains("tick")) {
      produced = driver.on_tick(j["tick"].get<double>());
    } else if (j.is_object() && j.size() == 1 && j.contains("raw") && j["raw"].is_string()) {
      produced = driver.on_line(j["raw"].get<std::string>());
    } else {
      produced = driver.on_line(line);
    }
    out.insert(out.end(), produced.begin(), produced.end());
  }
  return out;
}

}  // namespace gripscribe
