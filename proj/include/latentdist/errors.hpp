#pragma once

#include <stdexcept>
#include <string>

namespace latentdist {

enum class ErrorCode {
  LengthMismatch,
  NonPositiveVariance,
  NonFinite,
  TooFewUnits,
  BadM,
  BadTau,
  BadBandwidth,
  BadLambda,
  BadSplit,
  BadLevel,
  BadParams,
  BadSpec,
  BadGrid,
  ZeroVariance,
  NoInteriorMinimum,
  BracketFailure,
  NonFiniteTransform,
};

const char* error_code_name(ErrorCode code);

// Single exception type carrying a machine-checkable code plus a message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

}  // namespace latentdist
