#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <list>
#include <mutex>
#include <optional>
#include <thread>

#include "gripscribe/config.hpp"

namespace gripscribe {

struct ServerOptions {
  std::uint16_t port = 8765;  ///< 0 picks an ephemeral port
  std::string bind_address = "127.0.0.1";
  /// When set, each connection writes `session_<n>.jsonl` here for replay.
  std::optional<std::filesystem::path> record_dir;
  double tick_seconds = 0.004;  ///< poll interval between simulation ticks
  double handshake_timeout = 5.0;
};

/// Plain TCP acceptor speaking newline-delimited JSON. Each connection runs
/// its own Session on its own thread; nothing is shared between sessions.
/// Browsers reach it through a WebSocket-to-TCP gateway.
class SessionServer {
public:
  /// Binds and listens immediately; throws std::system_error on failure.
  SessionServer(ProjectConfig config, ServerOptions options);
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  std::uint16_t port() const { return port_; }

  /// Accepts connections until stop() is called.
  void run();
  void stop();

private:
  void serve_connection(int fd, int id);

  ProjectConfig config_;
  ServerOptions options_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex workers_mutex_;
  std::list<std::thread> workers_;
};

}  // namespace gripscribe
