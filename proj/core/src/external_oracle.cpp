#include "ftalloc/external_oracle.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>

#include "ftalloc/error.hpp"
#include "json.hpp"

namespace ftalloc {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string cache_key(const std::string& profile, const Allocation& s,
                      double epsilon_total) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "|%.9f|%.9f|%.9f|%.17g", s[PlayerId::L],
                s[PlayerId::T], s[PlayerId::R], epsilon_total);
  return profile + buf;
}

std::optional<ResourceEstimate> parse_response(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::kProtocol, "response is not valid JSON", line);
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kProtocol, "response is not a JSON object", line);
  }
  if (j.contains("error")) {
    if (!j.at("error").is_string()) {
      throw Error(ErrorCode::kProtocol, "'error' must be a string", line);
    }
    return std::nullopt;
  }
  if (!j.contains("Q") || !j.at("Q").is_number() || !j.contains("R_seconds") ||
      !j.at("R_seconds").is_number()) {
    throw Error(ErrorCode::kProtocol, "response lacks numeric Q and R_seconds",
                line);
  }
  ResourceEstimate est{j.at("Q").get<double>(), j.at("R_seconds").get<double>()};
  if (!std::isfinite(est.physical_qubits) || est.physical_qubits < 1.0) {
    throw Error(ErrorCode::kValidation, "Q must be >= 1", line);
  }
  if (!std::isfinite(est.runtime_seconds) || est.runtime_seconds <= 0.0) {
    throw Error(ErrorCode::kValidation, "R_seconds must be > 0", line);
  }
  return est;
}

}  // namespace

ExternalOracle::ExternalOracle(std::string command,
                               std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(ErrorCode::kOracleUnavailable,
                std::string("socketpair: ") + std::strerror(errno));
  }
  child_ = ::fork();
  if (child_ < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw Error(ErrorCode::kOracleUnavailable,
                std::string("fork: ") + std::strerror(errno));
  }
  if (child_ == 0) {
    // Own process group, so shutdown also reaches anything the shell spawns.
    ::setpgid(0, 0);
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(child_, child_);
  ::close(fds[1]);
  fd_ = fds[0];

  try {
    const std::string line = read_line();
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw Error(ErrorCode::kProtocol, "handshake is not valid JSON", line);
    }
    if (!j.is_object() || !j.contains("protocol") ||
        j.at("protocol") != kOracleProtocol) {
      throw Error(ErrorCode::kProtocol, "unexpected handshake", line);
    }
    reentrant_ = j.value("reentrant", false);
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalOracle::~ExternalOracle() { shutdown(); }

void ExternalOracle::shutdown() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (child_ > 0) {
    // Closing the socket delivers EOF; give the bridge a moment to exit.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(child_, nullptr, WNOHANG) != 0) {
        ::kill(-child_, SIGKILL);
        child_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    ::kill(-child_, SIGKILL);
    ::waitpid(child_, nullptr, 0);
    child_ = -1;
  }
}

void ExternalOracle::fail_unavailable(const std::string& why) {
  dead_ = true;
  throw Error(ErrorCode::kOracleUnavailable, why);
}

std::string ExternalOracle::read_line() {
  const auto deadline = Clock::now() + timeout_;
  while (true) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) fail_unavailable("bridge timed out");
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      fail_unavailable(std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) fail_unavailable("bridge timed out");
    char chunk[4096];
    const ssize_t n = ::read(fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      fail_unavailable(std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) fail_unavailable("bridge closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ExternalOracle::write_line(const std::string& line) {
  const std::string data = line + "\n";
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n =
        ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail_unavailable(std::string("write: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::optional<ResourceEstimate> ExternalOracle::external_estimate(
    const Allocation& s, const std::string& profile_name, double epsilon_total) {
  const std::string key = cache_key(profile_name, s, epsilon_total);
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }

  std::lock_guard wire(wire_mutex_);
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  if (dead_) throw Error(ErrorCode::kOracleUnavailable, "bridge is not running");

  const json request = {
      {"profile", profile_name},
      {"s", {s[PlayerId::L], s[PlayerId::T], s[PlayerId::R]}},
      {"epsilon_total", epsilon_total}};
  write_line(request.dump());
  const std::string line = read_line();
  ++exchanges_;
  auto result = parse_response(line);

  std::unique_lock lock(cache_mutex_);
  cache_.emplace(key, result);
  return result;
}

std::optional<ResourceEstimate> ExternalOracle::evaluate(
    const Allocation& s, const CircuitProfile& profile, const GameConfig& cfg) {
  return external_estimate(s, profile.name, cfg.epsilon_total);
}

std::int64_t ExternalOracle::wire_exchanges() const {
  std::lock_guard wire(wire_mutex_);
  return exchanges_;
}

}  // namespace ftalloc
