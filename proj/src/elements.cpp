#include "zerod/elements.hpp"

#include <string>

namespace zerod {

double stenosis_coefficient(double s0, double ss, double density) {
  if (!(s0 > 0.0) || !(ss > 0.0))
    throw Error(ErrorCode::NonPositiveArea, "areas must be positive (S0=" + std::to_string(s0) +
                                                ", Ss=" + std::to_string(ss) + ")");
  if (ss > s0)
    throw Error(ErrorCode::NonPositiveArea, "stenosed area exceeds proximal area (S0=" + std::to_string(s0) +
                                                ", Ss=" + std::to_string(ss) + ")");
  const double expansion = s0 / ss - 1.0;
  return kTurbulentLossFactor * density / (2.0 * s0 * s0) * expansion * expansion;
}

}  // namespace zerod
