#include "ftalloc/error.hpp"

namespace ftalloc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDegenerateProfile: return "degenerate profile";
    case ErrorCode::kInfeasibleFloor: return "infeasible floor";
    case ErrorCode::kBounds: return "bounds error";
    case ErrorCode::kOpponentFloor: return "opponent floor violated";
    case ErrorCode::kInterval: return "interval error";
    case ErrorCode::kDistanceOverflow: return "distance overflow";
    case ErrorCode::kDistillationOverflow: return "distillation overflow";
    case ErrorCode::kInvalidConfig: return "invalid config";
    case ErrorCode::kInvalidProfile: return "invalid profile";
    case ErrorCode::kProtocol: return "protocol error";
    case ErrorCode::kOracleUnavailable: return "oracle unavailable";
    case ErrorCode::kOracleReported: return "oracle error";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kUsage: return "usage error";
  }
  return "unknown error";
}

}  // namespace ftalloc
