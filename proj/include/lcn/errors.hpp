#pragma once

#include <stdexcept>
#include <string>

namespace lcn {

// Error categories raised by the library. Each carries a code so callers
// (and tests) can distinguish failure modes without parsing messages.
enum class ErrorCode {
  NonIntegerDimension,
  FilterTooWide,
  NonPositiveDimension,
  ShapeMismatch,
  DimensionMismatch,
  EmptyFilter,
  IndexOutOfRange,
  ZeroPolynomial,
  ConstantPolynomial,
  NoConvergence,
  ZeroPolynomialInput,
  NegativeRisk,
  RankDeficientInput,
  NotCritical,
  InvalidLossSpec,
  NonFiniteState,
  ConfigError,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace lcn
