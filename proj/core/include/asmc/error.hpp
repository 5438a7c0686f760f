#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asmc {

enum class ErrorCode {
  InvalidArgument,
  PotentialViolation,     // G evaluated non-finite or <= 0
  DegenerateWeights,      // sum of selection weights non-finite
  ExactKernelUnavailable, // exact Q-application requested without a finite support
  LagOutOfRange,
  PrecisionLoss,          // a Lambda count exceeded 2^53
  TooManyIndicators,
  InstanceTooLarge,
  ParseError,
  MissingSeries,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace asmc
