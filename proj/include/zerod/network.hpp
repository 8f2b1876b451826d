#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "zerod/error.hpp"

namespace zerod {

struct FluidProperties {
  double density = 1.06;     // g/cm^3
  double viscosity = 0.04;   // g/(cm s)

  bool operator==(const FluidProperties&) const = default;
};

/// Periodic, piecewise-linear sampled signal. The period is the last sample time.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(Eigen::VectorXd times, Eigen::VectorXd values);
  TimeSeries(std::initializer_list<std::pair<double, double>> samples);

  /// Two-sample series holding `value` over `period`.
  static TimeSeries constant(double value, double period = 1.0);

  const Eigen::VectorXd& times() const noexcept { return times_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double period() const noexcept { return times_[times_.size() - 1]; }
  Eigen::Index size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.size() == 0; }

  double operator()(double t) const;
  /// Slope of the piece containing t mod period (right-sided at sample times).
  double derivative(double t) const;
  /// Time average over one period (trapezoidal rule on the samples).
  double mean() const;

  bool operator==(const TimeSeries& other) const;

 private:
  Eigen::Index locate(double& tau) const;

  Eigen::VectorXd times_;
  Eigen::VectorXd values_;
};

double interpolate_timeseries(const TimeSeries& ts, double t);

struct Wire {
  int id = 0;
  std::string label;

  bool operator==(const Wire&) const = default;
};

enum class ElementKind {
  Vessel,
  Junction,
  FlowBC,
  PressureBC,
  ResistanceBC,
  WindkesselRCR,
  CoronaryRCRCR,
};

const char* to_string(ElementKind kind) noexcept;

/// Series R (Poiseuille + flow-dependent stenosis term), C to ground, L.
struct VesselParams {
  double resistance = 0.0;            // dyn s / cm^5
  double capacitance = 0.0;           // cm^5 / dyn
  double inductance = 0.0;            // dyn s^2 / cm^5
  double stenosis_coefficient = 0.0;  // dyn s^2 / cm^8

  bool operator==(const VesselParams&) const = default;
};

struct JunctionParams {
  bool operator==(const JunctionParams&) const = default;
};

struct FlowParams {
  TimeSeries flow;  // cm^3/s
  bool operator==(const FlowParams&) const = default;
};

struct PressureParams {
  double pressure = 0.0;
  bool operator==(const PressureParams&) const = default;
};

struct ResistanceParams {
  double resistance = 0.0;
  double distal_pressure = 0.0;
  bool operator==(const ResistanceParams&) const = default;
};

struct WindkesselParams {
  double proximal_resistance = 0.0;
  double capacitance = 0.0;
  double distal_resistance = 0.0;
  double distal_pressure = 0.0;
  bool operator==(const WindkesselParams&) const = default;
};

/// Pressure the arterial compliance of the coronary chain is referenced to.
enum class CoronaryReference { Ground, Intramyocardial };

struct CoronaryParams {
  double arterial_resistance = 0.0;        // R_a
  double microvascular_resistance = 0.0;   // R_am
  double venous_resistance = 0.0;          // R_v
  double arterial_capacitance = 0.0;       // C_a
  double intramyocardial_capacitance = 0.0;  // C_im
  double venous_pressure = 0.0;            // P_v distal
  TimeSeries intramyocardial_pressure;     // P_im(t)
  CoronaryReference arterial_reference = CoronaryReference::Ground;

  bool operator==(const CoronaryParams&) const = default;
};

// Alternative order must match ElementKind.
using ElementParams = std::variant<VesselParams, JunctionParams, FlowParams, PressureParams,
                                   ResistanceParams, WindkesselParams, CoronaryParams>;

struct ElementSpec {
  int id = 0;
  std::string name;
  ElementParams params;
  std::vector<int> inlet_wires;
  std::vector<int> outlet_wires;

  ElementKind kind() const noexcept { return static_cast<ElementKind>(params.index()); }
  bool is_boundary_condition() const noexcept {
    return kind() != ElementKind::Vessel && kind() != ElementKind::Junction;
  }
  int num_ports() const noexcept { return static_cast<int>(inlet_wires.size() + outlet_wires.size()); }

  bool operator==(const ElementSpec&) const = default;
};

/// Number of element-owned unknowns beyond the (P, Q) pairs of its wires.
int num_internal_dofs(const ElementSpec& element) noexcept;
/// Number of governing equations contributed by the element.
int num_equations(const ElementSpec& element) noexcept;

struct NetworkModel {
  FluidProperties fluid;
  std::vector<Wire> wires;
  std::vector<ElementSpec> elements;
  int inlet_bc_id = -1;

  const ElementSpec* find_element(int id) const noexcept;
  ElementSpec* find_element(int id) noexcept;
  const ElementSpec* find_element(std::string_view name) const noexcept;
  const Wire* find_wire(int id) const noexcept;

  /// Wires attached to boundary conditions other than the designated inlet.
  std::vector<int> outlet_wires() const;
  /// Wire of the designated inlet boundary condition.
  int inlet_wire() const;

  bool operator==(const NetworkModel&) const = default;
};

enum class DiagnosticKind {
  DuplicateWireId,
  DuplicateElementId,
  UnknownWire,
  DanglingWire,
  UnusedWire,
  OverconnectedWire,
  BadPortCount,
  InvalidParameter,
  MissingInlet,
  Disconnected,
  CountMismatch,
};

const char* to_string(DiagnosticKind kind) noexcept;

struct Diagnostic {
  DiagnosticKind kind;
  int entity_id;
  std::string message;
};

/// Structural and parameter checks. Empty result iff the network is solvable as posed.
std::vector<Diagnostic> validate_network(const NetworkModel& network);

struct WireDofs {
  int pressure = -1;
  int flow = -1;
};

struct ElementDofs {
  std::vector<int> dofs;      // local-to-global: ports (P, Q) inlets then outlets, then internals
  std::vector<int> internal;  // subset of dofs owned by the element
  int first_equation = 0;
  int num_equations = 0;
};

class DofMap {
 public:
  const WireDofs& wire(int wire_id) const;
  const ElementDofs& element(int element_id) const;
  /// Indexed like NetworkModel::elements.
  const std::vector<ElementDofs>& elements() const noexcept { return elements_; }
  int total_dofs() const noexcept { return total_dofs_; }
  int total_equations() const noexcept { return total_equations_; }

 private:
  friend DofMap build_dof_map(const NetworkModel& network);

  std::map<int, WireDofs> wires_;
  std::map<int, int> element_index_;
  std::vector<ElementDofs> elements_;
  int total_dofs_ = 0;
  int total_equations_ = 0;
};

/// Wire unknowns first (P, Q per wire in wire order), then element internals in element
/// order. Equations are numbered per element, in element order.
/// Throws Error(CountMismatch) if the equation count differs from the unknown count.
DofMap build_dof_map(const NetworkModel& network);

struct SolutionState {
  double t = 0.0;
  Eigen::VectorXd y;
  Eigen::VectorXd ydot;

  static SolutionState zero(const DofMap& dofs, double t = 0.0) {
    return {t, Eigen::VectorXd::Zero(dofs.total_dofs()), Eigen::VectorXd::Zero(dofs.total_dofs())};
  }
};

}  // namespace zerod
