#include "gripscribe/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <fstream>
#include <string>
#include <system_error>

#include <fmt/format.h>

#include "gripscribe/errors.hpp"
#include "gripscribe/session.hpp"

namespace gripscribe {
namespace {

[[noreturn]] void throw_errno(const char* what) {
  throw std::system_error(errno, std::generic_category(), what);
}

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

bool send_lines(int fd, const std::vector<std::string>& lines) {
  if (lines.empty()) return true;
  std::string buf;
  for (const auto& l : lines) {
    buf += l;
    buf += '\n';
  }
  return send_all(fd, buf);
}

/// Buffered line reader over a socket.
class LineReader {
public:
  explicit LineReader(int fd) : fd_(fd) {}

  /// Waits up to `timeout_ms` for data; returns false on EOF or error.
  bool fill(int timeout_ms) {
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, timeout_ms);
    if (r < 0) return errno == EINTR;
    if (r == 0) return true;
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n <= 0) return n < 0 && errno == EINTR;
    buffer_.append(chunk, static_cast<std::size_t>(n));
    return true;
  }

  bool next(std::string& line) {
    const auto pos = buffer_.find('\n');
    if (pos == std::string::npos) return false;
    line.assign(buffer_, 0, pos);
    buffer_.erase(0, pos + 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

private:
  int fd_;
  std::string buffer_;
};

}  // namespace

SessionServer::SessionServer(ProjectConfig config, ServerOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw_errno("socket");
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options_.port);
  if (::inet_pton(AF_INET, options_.bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw InvalidArgument("bad bind address " + options_.bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    const int err = errno;
    ::close(listen_fd_);
    throw std::system_error(err, std::generic_category(), "bind");
  }
  if (::listen(listen_fd_, 16) < 0) {
    const int err = errno;
    ::close(listen_fd_);
    throw std::system_error(err, std::generic_category(), "listen");
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  if (options_.record_dir) std::filesystem::create_directories(*options_.record_dir);
}

SessionServer::~SessionServer() {
  stop();
  std::lock_guard lock(workers_mutex_);
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void SessionServer::stop() { stopping_ = true; }

void SessionServer::run() {
  int next_id = 0;
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, 50);
    if (r <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int id = next_id++;
    std::lock_guard lock(workers_mutex_);
    workers_.emplace_back([this, fd, id] { serve_connection(fd, id); });
  }
}

void SessionServer::serve_connection(int fd, int id) {
  using clock = std::chrono::steady_clock;
  LineReader reader(fd);
  std::string line;

  // Handshake.
  const auto deadline =
      clock::now() + std::chrono::duration<double>(options_.handshake_timeout);
  bool have_hello = false;
  while (!stopping_ && clock::now() < deadline) {
    if (reader.next(line)) {
      have_hello = true;
      break;
    }
    if (!reader.fill(20)) break;
  }
  if (!have_hello) {
    ::close(fd);
    return;
  }
  try {
    check_hello(line);
  } catch (const ProtocolError& e) {
    send_lines(fd, {encode_error(e.what(), 1)});
    ::close(fd);
    return;
  }
  if (!send_lines(fd, {hello_line()})) {
    ::close(fd);
    return;
  }

  std::ofstream record_file;
  std::optional<SessionRecorder> recorder;
  if (options_.record_dir) {
    record_file.open(*options_.record_dir / fmt::format("session_{:04d}.jsonl", id));
    recorder.emplace(record_file);
  }

  SessionDriver driver(config_);
  const int tick_ms = std::max(1, static_cast<int>(options_.tick_seconds * 1000.0));
  auto last = clock::now();
  bool open = true;
  while (open && !stopping_ && !driver.finished()) {
    open = reader.fill(tick_ms);
    std::vector<std::string> out;
    while (reader.next(line)) {
      if (recorder) recorder->line(line);
      auto replies = driver.on_line(line);
      out.insert(out.end(), replies.begin(), replies.end());
    }
    const auto now = clock::now();
    const double wall_dt = std::chrono::duration<double>(now - last).count();
    last = now;
    if (recorder) recorder->tick(wall_dt);
    auto frames = driver.on_tick(wall_dt);
    out.insert(out.end(), frames.begin(), frames.end());
    if (!send_lines(fd, out)) break;
  }
  if (recorder) record_file.flush();
  ::close(fd);
}

}  // namespace gripscribe
