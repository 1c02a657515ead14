#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gripscribe/config.hpp"
#include "gripscribe/signals.hpp"

namespace gripscribe {

inline constexpr std::string_view kProtocolName = "gripscribe";
inline constexpr int kProtocolVersion = 1;

/// Inbound frame. Every field except `t` is optional; absent fields keep the
/// previous value.
struct SessionFrame {
  double t = 0.0;                   ///< client clock [s]
  std::optional<Vec2> pointer;      ///< `x`, `y` [m], table coordinates
  std::optional<bool> tremor_on;
  std::optional<double> b1;         ///< `set_params.b1`
  std::optional<double> b2;         ///< `set_params.b2`
};

/// Outbound frame.
struct PenFrame {
  double t = 0.0;  ///< simulation clock [s]
  double pen_x = 0.0;
  double pen_y = 0.0;
  double raw_x = 0.0;  ///< target actually fed to the dynamics
  double raw_y = 0.0;
  double theta1 = 0.0;
  double psi2 = 0.0;
  double dissipated = 0.0;  ///< cumulative [J]
  bool lag = false;         ///< catch-up steps were dropped before this frame
};

/// One live drawing session: a single mechanism instance advanced in fixed
/// 1 ms steps while the pointer target is held between inbound frames.
class Session {
public:
  static constexpr double kDt = 1e-3;
  static constexpr int kFrameDecimation = 16;  ///< steps per PenFrame (62.5 Hz)
  static constexpr int kMaxStepsPerTick = 100;  ///< 100 ms of catch-up
  static constexpr double kMaxTargetSpeed = 2.0;  ///< [m/s]

  explicit Session(const ProjectConfig& config);

  /// Validates and applies one inbound frame. Throws ProtocolError.
  void push(const SessionFrame& frame);

  /// Advances floor((carry + wall_dt) / dt) steps, keeping the fractional
  /// remainder, and returns the PenFrames crossed. On divergence the session
  /// terminates and `error()` is set.
  std::vector<PenFrame> advance(double wall_dt);

  /// push() every frame, then advance().
  std::vector<PenFrame> step(std::span<const SessionFrame> frames, double wall_dt);

  bool terminated() const { return error_.has_value(); }
  const std::optional<std::string>& error() const { return error_; }

  double sim_time() const { return static_cast<double>(steps_) * kDt; }
  const JointState& state() const { return ledger_.joints; }
  Vec2 pen() const;
  Vec2 pointer() const { return pointer_; }
  const DynamicParams& params() const { return params_; }
  double dissipated() const { return ledger_.dissipated; }

private:
  TargetSample target_at(double t) const;
  PenFrame make_frame() const;

  MechanismConfig mechanism_;
  DynamicParams params_;
  HandImpedance hand_;
  Tremor tremor_;

  LedgerState ledger_;
  long long steps_ = 0;
  double carry_ = 0.0;
  bool lag_pending_ = false;

  Vec2 pointer_ = Vec2::Zero();
  Vec2 pointer_vel_ = Vec2::Zero();
  double vel_valid_until_ = 0.0;  ///< sim time after which the estimate lapses
  std::optional<double> last_client_t_;
  std::optional<double> last_pointer_t_;
  bool tremor_on_ = false;
  std::optional<std::string> error_;
};

// Wire format: newline-delimited JSON, lower_snake_case fields, SI units.

std::string hello_line();
/// Throws ProtocolError unless the line is a matching hello.
void check_hello(std::string_view line);
SessionFrame decode_session_frame(std::string_view line);
std::string encode_session_frame(const SessionFrame& frame);
std::string encode_pen_frame(const PenFrame& frame);
PenFrame decode_pen_frame(std::string_view line);
std::string encode_error(std::string_view message, long line);

/// Turns raw inbound lines and wall-clock ticks into outbound lines. The live
/// server and offline replay both run through this type, which is what makes
/// replay bit-exact.
class SessionDriver {
public:
  /// `first_line` is the line number of the first post-handshake line.
  explicit SessionDriver(const ProjectConfig& config, long first_line = 2);

  /// Immediate replies (error frames) to one inbound line.
  std::vector<std::string> on_line(std::string_view line);
  /// PenFrames (and a final error frame on divergence) for one tick.
  std::vector<std::string> on_tick(double wall_dt);

  bool finished() const { return finished_; }
  const Session& session() const { return session_; }

private:
  Session session_;
  long line_no_;
  bool finished_ = false;
};

/// Recording format, one JSON value per line: inbound frames verbatim, a
/// `{"tick": wall_dt}` line after each tick, and `{"raw": "..."}` for inbound
/// lines that are not JSON objects or could be mistaken for a tick.
class SessionRecorder {
public:
  explicit SessionRecorder(std::ostream& out) : out_(out) {}
  void line(std::string_view inbound);
  void tick(double wall_dt);

private:
  std::ostream& out_;
};

/// Replays a recording through a fresh SessionDriver.
std::vector<std::string> replay(const ProjectConfig& config, std::istream& recording);

}  // namespace gripscribe
