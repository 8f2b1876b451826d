#pragma once

#include <stdexcept>
#include <string>

namespace zerod {

enum class ErrorCode {
  CountMismatch,
  InvalidNetwork,
  InvalidTimeSeries,
  UnknownKind,
  DimensionMismatch,
  NonPositiveArea,
  NonPositiveGeometry,
  TooFewSamples,
  MissingBC,
  NewtonDivergence,
  SingularTangent,
  InsufficientCycles,
  MismatchedCaps,
  ZeroFlowAmplitude,
  OutOfRange,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the Newton multi-corrector exhausts its iteration budget.
class NewtonDivergence : public Error {
 public:
  NewtonDivergence(int iterations, double residual_norm, long step = -1, double time = 0.0);

  int iterations() const noexcept { return iterations_; }
  double residual_norm() const noexcept { return residual_norm_; }
  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  int iterations_;
  double residual_norm_;
  long step_;
  double time_;
};

}  // namespace zerod
