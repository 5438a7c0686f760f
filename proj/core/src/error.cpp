#include "asmc/error.hpp"

namespace asmc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::PotentialViolation: return "potential-violation";
    case ErrorCode::DegenerateWeights: return "degenerate-weights";
    case ErrorCode::ExactKernelUnavailable: return "exact-kernel-unavailable";
    case ErrorCode::LagOutOfRange: return "lag-out-of-range";
    case ErrorCode::PrecisionLoss: return "precision-loss";
    case ErrorCode::TooManyIndicators: return "too-many-indicators";
    case ErrorCode::InstanceTooLarge: return "instance-too-large";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::MissingSeries: return "missing-series";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

}  // namespace asmc
