#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftalloc {

enum class ErrorCode {
  kDegenerateProfile,
  kInfeasibleFloor,
  kBounds,
  kOpponentFloor,
  kInterval,
  kDistanceOverflow,
  kDistillationOverflow,
  kInvalidConfig,
  kInvalidProfile,
  kProtocol,
  kOracleUnavailable,
  kOracleReported,
  kValidation,
  kIo,
  kUsage,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }

  // Raw payload that triggered the error (e.g. the offending wire line).
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace ftalloc
