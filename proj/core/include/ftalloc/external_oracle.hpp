#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <sys/types.h>

#include "ftalloc/cost_model.hpp"

namespace ftalloc {

inline constexpr const char* kOracleProtocol = "ftalloc-oracle/1";

// Delegates resource estimation to a child process speaking newline-delimited
// JSON on its stdin/stdout:
//
//   bridge  -> {"protocol":"ftalloc-oracle/1","reentrant":false}   (once)
//   request -> {"profile":"<name>","s":[sL,sT,sR],"epsilon_total":0.1}
//   bridge  -> {"Q":<number>,"R_seconds":<number>} | {"error":"<message>"}
//
// Responses are cached by (profile name, s rounded to 9 decimals). Wire
// exchanges are serialized through one connection. Once the bridge dies or
// times out every later uncached request fails with kOracleUnavailable.
// An {"error": ...} reply marks the point infeasible.
class ExternalOracle final : public ResourceOracle {
 public:
  // Spawns `/bin/sh -c command` and completes the handshake.
  explicit ExternalOracle(std::string command,
                          std::chrono::milliseconds timeout = std::chrono::seconds(60));
  ~ExternalOracle() override;

  ExternalOracle(const ExternalOracle&) = delete;
  ExternalOracle& operator=(const ExternalOracle&) = delete;

  std::optional<ResourceEstimate> evaluate(const Allocation& s,
                                           const CircuitProfile& profile,
                                           const GameConfig& cfg) override;

  std::optional<ResourceEstimate> external_estimate(const Allocation& s,
                                                    const std::string& profile_name,
                                                    double epsilon_total);

  bool reentrant() const override { return reentrant_; }
  std::string describe() const override { return "exec:" + command_; }

  std::int64_t wire_exchanges() const;

 private:
  std::string read_line();
  void write_line(const std::string& line);
  [[noreturn]] void fail_unavailable(const std::string& why);
  void shutdown() noexcept;

  std::string command_;
  std::chrono::milliseconds timeout_;
  bool reentrant_ = false;

  pid_t child_ = -1;
  int fd_ = -1;
  bool dead_ = false;
  std::string buffer_;
  std::int64_t exchanges_ = 0;
  mutable std::mutex wire_mutex_;

  mutable std::shared_mutex cache_mutex_;
  std::map<std::string, std::optional<ResourceEstimate>> cache_;
};

}  // namespace ftalloc
