#include "zerod/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace zerod {

// ---------------------------------------------------------------------------
// TimeSeries

TimeSeries::TimeSeries(Eigen::VectorXd times, Eigen::VectorXd values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size())
    throw Error(ErrorCode::InvalidTimeSeries, "times and values differ in length");
  if (times_.size() < 2) throw Error(ErrorCode::InvalidTimeSeries, "need at least two samples");
  if (times_[0] != 0.0) throw Error(ErrorCode::InvalidTimeSeries, "first sample time must be 0");
  for (Eigen::Index i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i]))
      throw Error(ErrorCode::InvalidTimeSeries, "non-finite sample");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw Error(ErrorCode::InvalidTimeSeries, "sample times must be strictly increasing");
  }
}

namespace {
std::pair<Eigen::VectorXd, Eigen::VectorXd> unzip(std::initializer_list<std::pair<double, double>> samples) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(samples.size()));
  Eigen::VectorXd v(t.size());
  Eigen::Index i = 0;
  for (const auto& [ti, vi] : samples) {
    t[i] = ti;
    v[i++] = vi;
  }
  return {t, v};
}
}  // namespace

TimeSeries::TimeSeries(std::initializer_list<std::pair<double, double>> samples)
    : TimeSeries(unzip(samples).first, unzip(samples).second) {}

TimeSeries TimeSeries::constant(double value, double period) {
  return TimeSeries(Eigen::Vector2d(0.0, period), Eigen::Vector2d(value, value));
}

Eigen::Index TimeSeries::locate(double& tau) const {
  const double period = this->period();
  tau = std::fmod(tau, period);
  if (tau < 0.0) tau += period;
  if (tau >= period) tau = 0.0;  // fmod of a negative rounding to period
  const double* begin = times_.data();
  const double* end = begin + times_.size();
  auto it = std::upper_bound(begin, end, tau);
  return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(it - begin) - 1, 0, times_.size() - 2);
}

double TimeSeries::operator()(double t) const {
  if (empty()) throw Error(ErrorCode::InvalidTimeSeries, "evaluating an empty series");
  double tau = t;
  const Eigen::Index i = locate(tau);
  const double t0 = times_[i], t1 = times_[i + 1];
  return values_[i] + (values_[i + 1] - values_[i]) * ((tau - t0) / (t1 - t0));
}

double TimeSeries::derivative(double t) const {
  if (empty()) throw Error(ErrorCode::InvalidTimeSeries, "evaluating an empty series");
  double tau = t;
  const Eigen::Index i = locate(tau);
  return (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
}

double TimeSeries::mean() const {
  double integral = 0.0;
  for (Eigen::Index i = 0; i + 1 < times_.size(); ++i)
    integral += 0.5 * (values_[i] + values_[i + 1]) * (times_[i + 1] - times_[i]);
  return integral / period();
}

bool TimeSeries::operator==(const TimeSeries& other) const {
  return times_.size() == other.times_.size() && times_ == other.times_ && values_ == other.values_;
}

double interpolate_timeseries(const TimeSeries& ts, double t) { return ts(t); }

// ---------------------------------------------------------------------------
// Element bookkeeping

const char* to_string(ElementKind kind) noexcept {
  switch (kind) {
    case ElementKind::Vessel: return "Vessel";
    case ElementKind::Junction: return "Junction";
    case ElementKind::FlowBC: return "FlowBC";
    case ElementKind::PressureBC: return "PressureBC";
    case ElementKind::ResistanceBC: return "ResistanceBC";
    case ElementKind::WindkesselRCR: return "WindkesselRCR";
    case ElementKind::CoronaryRCRCR: return "CoronaryRCRCR";
  }
  return "Unknown";
}

int num_internal_dofs(const ElementSpec& element) noexcept {
  switch (element.kind()) {
    case ElementKind::Vessel: return std::get<VesselParams>(element.params).capacitance > 0.0 ? 1 : 0;
    case ElementKind::WindkesselRCR: return 1;
    case ElementKind::CoronaryRCRCR: return 3;
    default: return 0;
  }
}

int num_equations(const ElementSpec& element) noexcept {
  switch (element.kind()) {
    case ElementKind::Vessel: return std::get<VesselParams>(element.params).capacitance > 0.0 ? 3 : 2;
    case ElementKind::Junction: return element.num_ports();
    case ElementKind::WindkesselRCR: return 2;
    case ElementKind::CoronaryRCRCR: return 4;
    default: return 1;
  }
}

const ElementSpec* NetworkModel::find_element(int id) const noexcept {
  auto it = std::find_if(elements.begin(), elements.end(), [id](const ElementSpec& e) { return e.id == id; });
  return it == elements.end() ? nullptr : &*it;
}

ElementSpec* NetworkModel::find_element(int id) noexcept {
  auto it = std::find_if(elements.begin(), elements.end(), [id](const ElementSpec& e) { return e.id == id; });
  return it == elements.end() ? nullptr : &*it;
}

const ElementSpec* NetworkModel::find_element(std::string_view name) const noexcept {
  auto it = std::find_if(elements.begin(), elements.end(), [name](const ElementSpec& e) { return e.name == name; });
  return it == elements.end() ? nullptr : &*it;
}

const Wire* NetworkModel::find_wire(int id) const noexcept {
  auto it = std::find_if(wires.begin(), wires.end(), [id](const Wire& w) { return w.id == id; });
  return it == wires.end() ? nullptr : &*it;
}

namespace {
int single_wire(const ElementSpec& e) { return e.inlet_wires.empty() ? e.outlet_wires.front() : e.inlet_wires.front(); }
}  // namespace

std::vector<int> NetworkModel::outlet_wires() const {
  std::vector<int> out;
  for (const auto& e : elements) {
    if (e.is_boundary_condition() && e.id != inlet_bc_id && e.num_ports() == 1) out.push_back(single_wire(e));
  }
  return out;
}

int NetworkModel::inlet_wire() const {
  const ElementSpec* inlet = find_element(inlet_bc_id);
  if (inlet == nullptr || inlet->num_ports() != 1)
    throw Error(ErrorCode::InvalidNetwork, "no designated inlet boundary condition");
  return single_wire(*inlet);
}

// ---------------------------------------------------------------------------
// Validation

const char* to_string(DiagnosticKind kind) noexcept {
  switch (kind) {
    case DiagnosticKind::DuplicateWireId: return "DuplicateWireId";
    case DiagnosticKind::DuplicateElementId: return "DuplicateElementId";
    case DiagnosticKind::UnknownWire: return "UnknownWire";
    case DiagnosticKind::DanglingWire: return "DanglingWire";
    case DiagnosticKind::UnusedWire: return "UnusedWire";
    case DiagnosticKind::OverconnectedWire: return "OverconnectedWire";
    case DiagnosticKind::BadPortCount: return "BadPortCount";
    case DiagnosticKind::InvalidParameter: return "InvalidParameter";
    case DiagnosticKind::MissingInlet: return "MissingInlet";
    case DiagnosticKind::Disconnected: return "Disconnected";
    case DiagnosticKind::CountMismatch: return "CountMismatch";
  }
  return "Unknown";
}

namespace {

struct ParameterChecker {
  const ElementSpec& e;
  std::vector<Diagnostic>& out;

  void require(bool ok, const std::string& what) {
    if (!ok) out.push_back({DiagnosticKind::InvalidParameter, e.id, "element '" + e.name + "': " + what});
  }
  void nonnegative(double v, const char* name) {
    require(std::isfinite(v) && v >= 0.0, std::string(name) + " must be finite and >= 0");
  }
  void positive(double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, std::string(name) + " must be finite and > 0");
  }
  void finite(double v, const char* name) { require(std::isfinite(v), std::string(name) + " must be finite"); }

  void operator()(const VesselParams& p) {
    nonnegative(p.resistance, "R_poiseuille");
    nonnegative(p.capacitance, "C");
    nonnegative(p.inductance, "L");
    nonnegative(p.stenosis_coefficient, "stenosis_coefficient");
  }
  void operator()(const JunctionParams&) {}
  void operator()(const FlowParams& p) { require(!p.flow.empty(), "flow series is empty"); }
  void operator()(const PressureParams& p) { finite(p.pressure, "P"); }
  void operator()(const ResistanceParams& p) {
    nonnegative(p.resistance, "R");
    finite(p.distal_pressure, "Pd");
  }
  void operator()(const WindkesselParams& p) {
    nonnegative(p.proximal_resistance, "Rp");
    positive(p.distal_resistance, "Rd");
    positive(p.capacitance, "C");
    finite(p.distal_pressure, "Pd");
  }
  void operator()(const CoronaryParams& p) {
    nonnegative(p.arterial_resistance, "Ra");
    nonnegative(p.microvascular_resistance, "Ram");
    positive(p.venous_resistance, "Rv");
    positive(p.arterial_capacitance, "Ca");
    positive(p.intramyocardial_capacitance, "Cim");
    finite(p.venous_pressure, "Pv");
  }
};

void check_ports(const ElementSpec& e, std::vector<Diagnostic>& out) {
  const auto n_in = e.inlet_wires.size();
  const auto n_out = e.outlet_wires.size();
  std::string problem;
  switch (e.kind()) {
    case ElementKind::Vessel:
      if (n_in != 1 || n_out != 1) problem = "vessel needs exactly one inlet and one outlet wire";
      break;
    case ElementKind::Junction:
      if (n_in < 1 || n_out < 1 || n_in + n_out < 3)
        problem = "junction needs >= 1 inlet, >= 1 outlet and >= 3 ports";
      break;
    default:
      if (n_in + n_out != 1) problem = "boundary condition must attach to exactly one wire";
  }
  if (!problem.empty())
    out.push_back({DiagnosticKind::BadPortCount, e.id, "element '" + e.name + "': " + problem});
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

std::vector<Diagnostic> validate_network(const NetworkModel& network) {
  std::vector<Diagnostic> out;

  std::map<int, int> wire_pos;
  for (std::size_t i = 0; i < network.wires.size(); ++i) {
    const int id = network.wires[i].id;
    if (!wire_pos.emplace(id, static_cast<int>(i)).second)
      out.push_back({DiagnosticKind::DuplicateWireId, id, "wire id " + std::to_string(id) + " used twice"});
  }
  std::set<int> element_ids;
  for (const auto& e : network.elements) {
    if (!element_ids.insert(e.id).second)
      out.push_back({DiagnosticKind::DuplicateElementId, e.id, "element id " + std::to_string(e.id) + " used twice"});
  }

  std::vector<int> upstream(network.wires.size(), 0), downstream(network.wires.size(), 0);
  std::vector<std::vector<int>> wire_elements(network.wires.size());
  bool unknown = false;
  for (std::size_t k = 0; k < network.elements.size(); ++k) {
    const auto& e = network.elements[k];
    check_ports(e, out);
    std::visit(ParameterChecker{e, out}, e.params);
    auto tally = [&](const std::vector<int>& wires, std::vector<int>& count) {
      for (int w : wires) {
        auto it = wire_pos.find(w);
        if (it == wire_pos.end()) {
          unknown = true;
          out.push_back({DiagnosticKind::UnknownWire, w,
                         "element '" + e.name + "' references unknown wire " + std::to_string(w)});
          continue;
        }
        ++count[it->second];
        wire_elements[it->second].push_back(static_cast<int>(k));
      }
    };
    tally(e.inlet_wires, downstream);  // the element sits downstream of its inlet wires
    tally(e.outlet_wires, upstream);
  }

  bool wiring_ok = !unknown;
  for (std::size_t i = 0; i < network.wires.size(); ++i) {
    const int id = network.wires[i].id;
    const int refs = upstream[i] + downstream[i];
    if (refs == 0) {
      out.push_back({DiagnosticKind::UnusedWire, id, "wire " + std::to_string(id) + " is not connected"});
      wiring_ok = false;
    } else if (refs == 1) {
      out.push_back({DiagnosticKind::DanglingWire, id,
                     "wire " + std::to_string(id) + " is referenced by only one element"});
      wiring_ok = false;
    } else if (upstream[i] != 1 || downstream[i] != 1) {
      out.push_back({DiagnosticKind::OverconnectedWire, id,
                     "wire " + std::to_string(id) + " must join one upstream and one downstream port"});
      wiring_ok = false;
    }
  }

  const ElementSpec* inlet = network.find_element(network.inlet_bc_id);
  if (inlet == nullptr || inlet->kind() != ElementKind::FlowBC) {
    out.push_back({DiagnosticKind::MissingInlet, network.inlet_bc_id, "inlet_bc_id must name a FlowBC element"});
  }

  if (!unknown && !network.elements.empty()) {
    std::vector<int> parent(network.elements.size());
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& attached : wire_elements) {
      for (std::size_t j = 1; j < attached.size(); ++j)
        parent[find_root(parent, attached[j])] = find_root(parent, attached[0]);
    }
    const int root = find_root(parent, 0);
    for (std::size_t k = 1; k < network.elements.size(); ++k) {
      if (find_root(parent, static_cast<int>(k)) != root) {
        out.push_back({DiagnosticKind::Disconnected, network.elements[k].id,
                       "element '" + network.elements[k].name + "' is not connected to '" +
                           network.elements.front().name + "'"});
      }
    }
  }

  if (wiring_ok) {
    long dofs = 2 * static_cast<long>(network.wires.size());
    long equations = 0;
    for (const auto& e : network.elements) {
      dofs += num_internal_dofs(e);
      equations += num_equations(e);
    }
    if (dofs != equations) {
      out.push_back({DiagnosticKind::CountMismatch, -1,
                     std::to_string(dofs) + " unknowns vs " + std::to_string(equations) + " equations"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// DofMap

const WireDofs& DofMap::wire(int wire_id) const {
  auto it = wires_.find(wire_id);
  if (it == wires_.end()) throw Error(ErrorCode::InvalidNetwork, "unknown wire " + std::to_string(wire_id));
  return it->second;
}

const ElementDofs& DofMap::element(int element_id) const {
  auto it = element_index_.find(element_id);
  if (it == element_index_.end())
    throw Error(ErrorCode::InvalidNetwork, "unknown element " + std::to_string(element_id));
  return elements_[it->second];
}

DofMap build_dof_map(const NetworkModel& network) {
  DofMap map;
  int next = 0;
  for (const auto& w : network.wires) {
    map.wires_[w.id] = {next, next + 1};
    next += 2;
  }
  int equation = 0;
  map.elements_.reserve(network.elements.size());
  for (std::size_t k = 0; k < network.elements.size(); ++k) {
    const auto& e = network.elements[k];
    ElementDofs ed;
    for (const auto* list : {&e.inlet_wires, &e.outlet_wires}) {
      for (int w : *list) {
        const WireDofs& wd = map.wire(w);
        ed.dofs.push_back(wd.pressure);
        ed.dofs.push_back(wd.flow);
      }
    }
    for (int i = 0; i < num_internal_dofs(e); ++i) {
      ed.internal.push_back(next);
      ed.dofs.push_back(next++);
    }
    ed.first_equation = equation;
    ed.num_equations = num_equations(e);
    equation += ed.num_equations;
    map.element_index_[e.id] = static_cast<int>(k);
    map.elements_.push_back(std::move(ed));
  }
  map.total_dofs_ = next;
  map.total_equations_ = equation;
  if (map.total_dofs_ != map.total_equations_) {
    throw Error(ErrorCode::CountMismatch, std::to_string(map.total_dofs_) + " unknowns vs " +
                                              std::to_string(map.total_equations_) + " equations");
  }
  return map;
}

}  // namespace zerod
