#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zerod/error.hpp"
#include "zerod/network.hpp"

namespace zerod {

/// Empirical expansion-loss correction factor.
inline constexpr double kTurbulentLossFactor = 1.52;

/// Coefficient K_s of the expansion loss K_s |Q| Q for a narrowing from area `s0` to `ss`.
/// Throws Error(NonPositiveArea) if an area is not positive or ss > s0.
double stenosis_coefficient(double s0, double ss, double density);

/// Local governing equations E ydot + F y + c = 0 of one element, with the solution
/// contractions dE = (dE/dy) ydot, dF = (dF/dy) y and dc = dc/dy.
template <typename Scalar>
struct LocalSystem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix E, F, dE, dF, dc;
  Vector c;
  std::vector<int> dofs;  // local-to-global, filled by the assembler

  LocalSystem(Eigen::Index n_eq, Eigen::Index n_local)
      : E(Matrix::Zero(n_eq, n_local)),
        F(Matrix::Zero(n_eq, n_local)),
        dE(Matrix::Zero(n_eq, n_local)),
        dF(Matrix::Zero(n_eq, n_local)),
        dc(Matrix::Zero(n_eq, n_local)),
        c(Vector::Zero(n_eq)) {}

  Eigen::Index rows() const noexcept { return F.rows(); }
  Eigen::Index cols() const noexcept { return F.cols(); }

  template <typename Dy, typename Dyd>
  Vector residual(const Eigen::MatrixBase<Dy>& y, const Eigen::MatrixBase<Dyd>& ydot) const {
    return E * ydot + F * y + c;
  }

  /// dr/dy when ydot moves with y at rate `ydot_factor`.
  Matrix tangent(Scalar ydot_factor) const { return dE + ydot_factor * E + dF + F + dc; }
};

/// Number of local unknowns: two per port plus internals.
inline int num_local_dofs(const ElementSpec& element) noexcept {
  return 2 * element.num_ports() + num_internal_dofs(element);
}

namespace detail {

template <typename Scalar>
Scalar sign(const Scalar& x) {
  return x > Scalar(0) ? Scalar(1) : (x < Scalar(0) ? Scalar(-1) : Scalar(0));
}

// Orientation of a single-port element: +1 if the port is downstream of its wire
// (flow along the wire enters the element), -1 otherwise.
inline double bc_orientation(const ElementSpec& e) noexcept { return e.inlet_wires.empty() ? -1.0 : 1.0; }

template <typename Scalar, typename Dy>
void vessel(const VesselParams& p, const Eigen::MatrixBase<Dy>& y, LocalSystem<Scalar>& s) {
  using std::abs;
  const Scalar q_in = y[1];
  const Scalar r_total = Scalar(p.resistance) + Scalar(p.stenosis_coefficient) * abs(q_in);
  const Scalar dr = -Scalar(p.stenosis_coefficient) * abs(q_in);  // (d F01 / dQ_in) * Q_in

  if (p.capacitance > 0.0) {
    // y = (P_in, Q_in, P_out, Q_out, P_c)
    s.F(0, 0) = 1;
    s.F(0, 1) = -r_total;
    s.F(0, 4) = -1;
    s.dF(0, 1) = dr;

    s.E(1, 4) = p.capacitance;
    s.F(1, 1) = -1;
    s.F(1, 3) = 1;

    s.F(2, 4) = 1;
    s.F(2, 2) = -1;
    s.E(2, 3) = -p.inductance;
  } else {
    s.F(0, 0) = 1;
    s.F(0, 1) = -r_total;
    s.F(0, 2) = -1;
    s.E(0, 3) = -p.inductance;
    s.dF(0, 1) = dr;

    s.F(1, 1) = 1;
    s.F(1, 3) = -1;
  }
}

template <typename Scalar>
void junction(const ElementSpec& e, LocalSystem<Scalar>& s) {
  const Eigen::Index m = e.num_ports();
  const Eigen::Index n_in = static_cast<Eigen::Index>(e.inlet_wires.size());
  for (Eigen::Index k = 1; k < m; ++k) {
    s.F(k - 1, 0) = 1;
    s.F(k - 1, 2 * k) = -1;
  }
  for (Eigen::Index k = 0; k < m; ++k) s.F(m - 1, 2 * k + 1) = k < n_in ? 1 : -1;
}

template <typename Scalar>
void coronary(const CoronaryParams& p, double orientation, double t, LocalSystem<Scalar>& s) {
  // y = (P, Q, P_a, Q_am, P_v)
  const double dpim = p.intramyocardial_pressure.empty() ? 0.0 : p.intramyocardial_pressure.derivative(t);

  s.F(0, 0) = 1;
  s.F(0, 2) = -1;
  s.F(0, 1) = -p.arterial_resistance * orientation;

  s.E(1, 2) = p.arterial_capacitance;
  s.F(1, 1) = -orientation;
  s.F(1, 3) = 1;
  if (p.arterial_reference == CoronaryReference::Intramyocardial) s.c(1) = -p.arterial_capacitance * dpim;

  s.F(2, 2) = 1;
  s.F(2, 4) = -1;
  s.F(2, 3) = -p.microvascular_resistance;

  s.E(3, 4) = p.intramyocardial_capacitance;
  s.F(3, 4) = 1.0 / p.venous_resistance;
  s.F(3, 3) = -1;
  s.c(3) = -p.intramyocardial_capacitance * dpim - p.venous_pressure / p.venous_resistance;
}

}  // namespace detail

/// Builds the local system of `element` at the local state (y, ydot) and time t.
/// Throws Error(DimensionMismatch) if the local vectors have the wrong length.
template <typename Scalar = double, typename Dy, typename Dyd>
LocalSystem<Scalar> element_local_system(const ElementSpec& element, const Eigen::MatrixBase<Dy>& y,
                                         const Eigen::MatrixBase<Dyd>& ydot, double t) {
  const int n_local = num_local_dofs(element);
  if (y.size() != n_local || ydot.size() != n_local) {
    throw Error(ErrorCode::DimensionMismatch,
                "element '" + element.name + "' expects " + std::to_string(n_local) + " local unknowns, got " +
                    std::to_string(y.size()) + "/" + std::to_string(ydot.size()));
  }
  LocalSystem<Scalar> s(num_equations(element), n_local);
  const double orient = detail::bc_orientation(element);

  switch (element.kind()) {
    case ElementKind::Vessel:
      detail::vessel(std::get<VesselParams>(element.params), y, s);
      break;
    case ElementKind::Junction:
      detail::junction(element, s);
      break;
    case ElementKind::FlowBC:
      s.F(0, 1) = 1;
      s.c(0) = -std::get<FlowParams>(element.params).flow(t);
      break;
    case ElementKind::PressureBC:
      s.F(0, 0) = 1;
      s.c(0) = -std::get<PressureParams>(element.params).pressure;
      break;
    case ElementKind::ResistanceBC: {
      const auto& p = std::get<ResistanceParams>(element.params);
      s.F(0, 0) = 1;
      s.F(0, 1) = -p.resistance * orient;
      s.c(0) = -p.distal_pressure;
      break;
    }
    case ElementKind::WindkesselRCR: {
      // y = (P, Q, P_c)
      const auto& p = std::get<WindkesselParams>(element.params);
      s.F(0, 0) = 1;
      s.F(0, 1) = -p.proximal_resistance * orient;
      s.F(0, 2) = -1;
      s.E(1, 2) = p.capacitance;
      s.F(1, 2) = 1.0 / p.distal_resistance;
      s.F(1, 1) = -orient;
      s.c(1) = -p.distal_pressure / p.distal_resistance;
      break;
    }
    case ElementKind::CoronaryRCRCR:
      detail::coronary(std::get<CoronaryParams>(element.params), orient, t, s);
      break;
    default:
      throw Error(ErrorCode::UnknownKind, "element '" + element.name + "'");
  }
  return s;
}

}  // namespace zerod
