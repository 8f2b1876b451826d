#include "zerod/error.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "zerod/units.hpp"

namespace zerod {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::InvalidNetwork: return "InvalidNetwork";
    case ErrorCode::InvalidTimeSeries: return "InvalidTimeSeries";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveArea: return "NonPositiveArea";
    case ErrorCode::NonPositiveGeometry: return "NonPositiveGeometry";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::MissingBC: return "MissingBC";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::SingularTangent: return "SingularTangent";
    case ErrorCode::InsufficientCycles: return "InsufficientCycles";
    case ErrorCode::MismatchedCaps: return "MismatchedCaps";
    case ErrorCode::ZeroFlowAmplitude: return "ZeroFlowAmplitude";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

NewtonDivergence::NewtonDivergence(int iterations, double residual_norm, long step, double time)
    : Error(ErrorCode::NewtonDivergence,
            "no convergence after " + std::to_string(iterations) + " iterations, |r| = " +
                std::to_string(residual_norm) +
                (step >= 0 ? " at step " + std::to_string(step) + " (t = " + std::to_string(time) + ")" : "")),
      iterations_(iterations),
      residual_norm_(residual_norm),
      step_(step),
      time_(time) {}

namespace units {

PressureUnit parse_pressure_unit(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "cgs" || lower.empty()) return PressureUnit::CGS;
  if (lower == "mmhg") return PressureUnit::MmHg;
  if (lower == "kpa") return PressureUnit::KPa;
  throw Error(ErrorCode::Parse, "unknown unit system '" + std::string(name) + "'");
}

}  // namespace units
}  // namespace zerod
