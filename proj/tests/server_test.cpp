#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "gripscribe/server.hpp"
#include "gripscribe/session.hpp"

using namespace gripscribe;
using namespace std::chrono_literals;

namespace {

class Client {
public:
  explicit Client(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    connected_ = ::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0;
  }
  ~Client() { ::close(fd_); }

  bool connected() const { return connected_; }

  void send_line(const std::string& line) {
    const std::string data = line + "\n";
    ASSERT_EQ(::send(fd_, data.data(), data.size(), MSG_NOSIGNAL), static_cast<ssize_t>(data.size()));
  }

  void close_write() { ::shutdown(fd_, SHUT_WR); }

  /// Collects complete lines arriving within `wait`. Returns false once the
  /// peer has closed.
  bool drain(std::vector<std::string>& lines, std::chrono::milliseconds wait) {
    lines.insert(lines.end(), early_.begin(), early_.end());
    early_.clear();
    const auto until = std::chrono::steady_clock::now() + wait;
    for (;;) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(until - std::chrono::steady_clock::now());
      pollfd p{fd_, POLLIN, 0};
      if (::poll(&p, 1, std::max<int>(0, static_cast<int>(left.count()))) <= 0) return true;
      char buf[8192];
      const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
      if (n <= 0) return false;
      pending_.append(buf, static_cast<std::size_t>(n));
      for (auto pos = pending_.find('\n'); pos != std::string::npos; pos = pending_.find('\n')) {
        lines.push_back(pending_.substr(0, pos));
        pending_.erase(0, pos + 1);
      }
    }
  }

  std::vector<std::string> read_until_closed(std::chrono::milliseconds limit) {
    std::vector<std::string> lines;
    const auto until = std::chrono::steady_clock::now() + limit;
    while (std::chrono::steady_clock::now() < until && drain(lines, 50ms)) {
    }
    return lines;
  }

  std::string handshake() {
    send_line(hello_line());
    std::vector<std::string> lines;
    const auto until = std::chrono::steady_clock::now() + 2s;
    while (lines.empty() && std::chrono::steady_clock::now() < until && drain(lines, 20ms)) {
    }
    if (lines.empty()) return "";
    early_.assign(lines.begin() + 1, lines.end());
    return lines.front();
  }

private:
  int fd_ = -1;
  bool connected_ = false;
  std::string pending_;
  std::vector<std::string> early_;  ///< lines that arrived with the hello reply
};

class ServerFixture : public ::testing::Test {
protected:
  void start(ServerOptions opts = {}) {
    opts.port = 0;
    server_ = std::make_unique<SessionServer>(ProjectConfig{}, opts);
    thread_ = std::thread([this] { server_->run(); });
  }
  void TearDown() override {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
    server_.reset();
  }

  std::unique_ptr<SessionServer> server_;
  std::thread thread_;
};

struct LineRun {
  std::vector<PenFrame> frames;
  std::vector<std::string> raw;
  Vec2 last_target;
};

// 60 Hz client drawing a horizontal line for `seconds`, then idling briefly.
LineRun draw_line(std::uint16_t port, double y, double seconds, bool inject_garbage = false) {
  LineRun run;
  Client c(port);
  EXPECT_TRUE(c.connected());
  EXPECT_EQ(c.handshake(), hello_line());
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(seconds * 60.0);
  for (int i = 0; i < n; ++i) {
    const double t = i / 60.0;
    SessionFrame f;
    f.t = t;
    f.pointer = Vec2(-0.05 + 0.02 * t, y);
    run.last_target = *f.pointer;
    c.send_line(encode_session_frame(f));
    if (inject_garbage && i == n / 2) c.send_line("{\"t\": oops");
    std::this_thread::sleep_until(t0 + std::chrono::duration<double>((i + 1) / 60.0));
    c.drain(run.raw, 0ms);
  }
  c.drain(run.raw, 400ms);
  for (const auto& l : run.raw) {
    if (l.find("\"pen_x\"") != std::string::npos) run.frames.push_back(decode_pen_frame(l));
  }
  return run;
}

}  // namespace

TEST_F(ServerFixture, ScriptedLineSession) {
  start();
  const LineRun run = draw_line(server_->port(), 0.28, 5.0);
  EXPECT_GE(run.frames.size(), 290u);
  ASSERT_FALSE(run.frames.empty());
  const PenFrame& last = run.frames.back();
  EXPECT_LT((Vec2(last.pen_x, last.pen_y) - run.last_target).norm(), 0.002);
  for (std::size_t i = 1; i < run.frames.size(); ++i) EXPECT_GT(run.frames[i].t, run.frames[i - 1].t);
}

TEST_F(ServerFixture, MalformedLineGetsOneErrorAndSessionContinues) {
  start();
  const LineRun run = draw_line(server_->port(), 0.28, 1.0, true);
  int errors = 0;
  std::size_t error_at = 0;
  for (std::size_t i = 0; i < run.raw.size(); ++i) {
    if (run.raw[i].find("\"error\"") != std::string::npos) {
      ++errors;
      error_at = i;
    }
  }
  EXPECT_EQ(errors, 1);
  EXPECT_LT(error_at + 10, run.raw.size());
  EXPECT_GE(run.frames.size(), 60u);
}

TEST_F(ServerFixture, ConcurrentClientsAreIsolated) {
  start();
  LineRun a, b;
  std::thread ta([&] { a = draw_line(server_->port(), 0.25, 2.0); });
  std::thread tb([&] { b = draw_line(server_->port(), 0.33, 2.0); });
  ta.join();
  tb.join();
  ASSERT_FALSE(a.frames.empty());
  ASSERT_FALSE(b.frames.empty());
  // Before its first pointer frame each session holds the default start point.
  for (const PenFrame& f : a.frames) {
    if (f.t > 0.2) EXPECT_EQ(f.raw_y, 0.25);
  }
  for (const PenFrame& f : b.frames) {
    if (f.t > 0.2) EXPECT_EQ(f.raw_y, 0.33);
  }
  EXPECT_LT(std::abs(a.frames.back().pen_y - 0.25), 0.002);
  EXPECT_LT(std::abs(b.frames.back().pen_y - 0.33), 0.002);
}

TEST_F(ServerFixture, VersionMismatchIsRejected) {
  start();
  Client c(server_->port());
  ASSERT_TRUE(c.connected());
  c.send_line(R"({"hello":"gripscribe","version":99})");
  const auto lines = c.read_until_closed(3s);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_NE(lines[0].find("version"), std::string::npos);
  EXPECT_NE(lines[0].find("\"error\""), std::string::npos);
}

TEST_F(ServerFixture, RecordingReplaysBitExactly) {
  const auto dir = std::filesystem::temp_directory_path() / "gripscribe_server_record_test";
  std::filesystem::remove_all(dir);
  ServerOptions opts;
  opts.record_dir = dir;
  start(opts);

  std::vector<std::string> received;
  {
    Client c(server_->port());
    ASSERT_TRUE(c.connected());
    ASSERT_EQ(c.handshake(), hello_line());
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 60; ++i) {
      SessionFrame f;
      f.t = i / 60.0;
      f.pointer = Vec2(0.01 * std::sin(f.t * 3.0), 0.28);
      if (i == 10) f.tremor_on = true;
      if (i == 30) f.b1 = 0.3;
      c.send_line(encode_session_frame(f));
      if (i == 40) c.send_line("garbage");
      std::this_thread::sleep_until(t0 + std::chrono::duration<double>((i + 1) / 60.0));
      c.drain(received, 0ms);
    }
    c.close_write();
    const auto rest = c.read_until_closed(3s);
    received.insert(received.end(), rest.begin(), rest.end());
  }

  const auto file = dir / "session_0000.jsonl";
  ASSERT_TRUE(std::filesystem::exists(file));
  std::ifstream in(file);
  const auto replayed = replay(ProjectConfig{}, in);
  EXPECT_GT(replayed.size(), 50u);
  EXPECT_EQ(replayed, received);
  std::filesystem::remove_all(dir);
}
