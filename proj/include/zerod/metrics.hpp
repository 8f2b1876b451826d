#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace zerod {

/// Pressure and flow at one cap over one cycle on a uniform grid.
struct CapSeries {
  std::string cap_id;
  bool is_inlet = false;
  Eigen::VectorXd pressure;
  Eigen::VectorXd flow;
};

/// Relative cap errors, all dimensionless fractions.
struct ErrorReport {
  double pressure_avg = 0.0;
  double flow_avg = 0.0;
  double pressure_max = 0.0;
  double flow_max = 0.0;
  double pressure_sys = 0.0;
  double flow_sys = 0.0;
  double pressure_dia = 0.0;
  double flow_dia = 0.0;
  Eigen::Index t_sys = 0;
  Eigen::Index t_dia = 0;
};

/// (argmax, argmin) of the inlet flow, first occurrence on ties.
std::pair<Eigen::Index, Eigen::Index> systole_diastole_indices(const Eigen::VectorXd& inlet_flow);

/// Pressure errors are normalized per cap by the summed reference pressure, flow errors
/// by the reference flow amplitude. The inlet cap is left out of every flow error.
/// Caps are matched by id.
/// Throws Error(MismatchedCaps) or Error(ZeroFlowAmplitude).
ErrorReport cap_errors(const std::vector<CapSeries>& reference, const std::vector<CapSeries>& test);

/// Linear interpolation of endpoint values along a branch path.
/// Throws Error(OutOfRange) for queries outside [positions.front(), positions.back()].
Eigen::VectorXd branch_interpolate(const Eigen::VectorXd& positions, const Eigen::VectorXd& values,
                                   const Eigen::VectorXd& queries);

/// Non-periodic linear resampling of (times, values) onto `grid`; clamps outside.
Eigen::VectorXd resample_linear(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                                const Eigen::VectorXd& grid);

}  // namespace zerod
