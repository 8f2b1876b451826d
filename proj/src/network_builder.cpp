#include "zerod/network_builder.hpp"

namespace zerod {

int NetworkBuilder::add_vessel(std::string name, VesselParams params) {
  vessels_.push_back({std::move(name), params, {}, {}});
  return static_cast<int>(vessels_.size()) - 1;
}

int NetworkBuilder::add_boundary_condition(std::string name, ElementParams params) {
  if (std::holds_alternative<VesselParams>(params) || std::holds_alternative<JunctionParams>(params))
    throw Error(ErrorCode::InvalidNetwork, "'" + name + "' is not a boundary condition");
  bcs_.push_back({std::move(name), std::move(params)});
  return static_cast<int>(bcs_.size()) - 1;
}

void NetworkBuilder::set_end(End& end, EndKind kind, int index, const std::string& what) {
  if (end.kind != EndKind::None) throw Error(ErrorCode::InvalidNetwork, what + " is already connected");
  end = {kind, index};
}

void NetworkBuilder::attach_inlet_bc(int vessel, int bc) {
  auto& v = vessels_.at(vessel);
  set_end(v.inlet, EndKind::Bc, bc, "inlet of vessel '" + v.name + "'");
}

void NetworkBuilder::attach_outlet_bc(int vessel, int bc) {
  auto& v = vessels_.at(vessel);
  set_end(v.outlet, EndKind::Bc, bc, "outlet of vessel '" + v.name + "'");
}

void NetworkBuilder::connect(int upstream_vessel, int downstream_vessel) {
  auto& up = vessels_.at(upstream_vessel);
  auto& down = vessels_.at(downstream_vessel);
  set_end(up.outlet, EndKind::Vessel, downstream_vessel, "outlet of vessel '" + up.name + "'");
  set_end(down.inlet, EndKind::Vessel, upstream_vessel, "inlet of vessel '" + down.name + "'");
}

void NetworkBuilder::add_junction(std::string name, std::vector<int> inlet_vessels, std::vector<int> outlet_vessels) {
  if (inlet_vessels.size() == 1 && outlet_vessels.size() == 1) {
    connect(inlet_vessels.front(), outlet_vessels.front());
    return;
  }
  const int j = static_cast<int>(junctions_.size());
  for (int v : inlet_vessels) {
    auto& vessel = vessels_.at(v);
    set_end(vessel.outlet, EndKind::Junction, j, "outlet of vessel '" + vessel.name + "'");
  }
  for (int v : outlet_vessels) {
    auto& vessel = vessels_.at(v);
    set_end(vessel.inlet, EndKind::Junction, j, "inlet of vessel '" + vessel.name + "'");
  }
  junctions_.push_back({std::move(name), std::move(inlet_vessels), std::move(outlet_vessels)});
}

NetworkModel NetworkBuilder::build() const {
  NetworkModel net;
  net.fluid = fluid_;

  const int n_v = num_vessels();
  const int n_j = static_cast<int>(junctions_.size());
  const int junction_base = n_v;
  const int bc_base = n_v + n_j;

  for (int v = 0; v < n_v; ++v) net.elements.push_back({v, vessels_[v].name, vessels_[v].params, {}, {}});
  for (int j = 0; j < n_j; ++j)
    net.elements.push_back({junction_base + j, junctions_[j].name, JunctionParams{}, {}, {}});
  for (int b = 0; b < static_cast<int>(bcs_.size()); ++b)
    net.elements.push_back({bc_base + b, bcs_[b].name, bcs_[b].params, {}, {}});

  auto name_of = [&](const End& end) -> const std::string& {
    switch (end.kind) {
      case EndKind::Bc: return bcs_[end.index].name;
      case EndKind::Vessel: return vessels_[end.index].name;
      default: return junctions_[end.index].name;
    }
  };
  auto new_wire = [&](const std::string& up, const std::string& down) {
    const int id = static_cast<int>(net.wires.size());
    net.wires.push_back({id, up + "->" + down});
    return id;
  };

  // Junction port order follows the junction's vessel lists, so wires are collected
  // per vessel first and placed afterwards.
  std::vector<int> inlet_wire(n_v, -1), outlet_wire(n_v, -1);
  for (int v = 0; v < n_v; ++v) {
    const auto& vessel = vessels_[v];
    if (vessel.inlet.kind == EndKind::None || vessel.outlet.kind == EndKind::None)
      throw Error(ErrorCode::InvalidNetwork, "vessel '" + vessel.name + "' has an open end");

    if (vessel.inlet.kind != EndKind::Vessel) {
      const int w = new_wire(name_of(vessel.inlet), vessel.name);
      inlet_wire[v] = w;
      net.elements[v].inlet_wires.push_back(w);
      if (vessel.inlet.kind == EndKind::Bc) net.elements[bc_base + vessel.inlet.index].outlet_wires.push_back(w);
    } else {
      const int w = outlet_wire[vessel.inlet.index];
      if (w < 0) {
        // Upstream vessel comes later in the order; its outlet wire is created here.
        const int nw = new_wire(vessels_[vessel.inlet.index].name, vessel.name);
        outlet_wire[vessel.inlet.index] = nw;
        inlet_wire[v] = nw;
      } else {
        inlet_wire[v] = w;
      }
      net.elements[v].inlet_wires.push_back(inlet_wire[v]);
    }

    if (outlet_wire[v] < 0) {
      const int w = new_wire(vessel.name, name_of(vessel.outlet));
      outlet_wire[v] = w;
      if (vessel.outlet.kind == EndKind::Bc) net.elements[bc_base + vessel.outlet.index].inlet_wires.push_back(w);
      if (vessel.outlet.kind == EndKind::Vessel) inlet_wire[vessel.outlet.index] = w;
    }
    net.elements[v].outlet_wires.push_back(outlet_wire[v]);
  }
  for (int j = 0; j < n_j; ++j) {
    auto& e = net.elements[junction_base + j];
    for (int v : junctions_[j].inlets) e.inlet_wires.push_back(outlet_wire[v]);
    for (int v : junctions_[j].outlets) e.outlet_wires.push_back(inlet_wire[v]);
  }

  if (inlet_bc_) {
    net.inlet_bc_id = bc_base + *inlet_bc_;
  } else {
    for (int v = 0; v < n_v && net.inlet_bc_id < 0; ++v) {
      const End& in = vessels_[v].inlet;
      if (in.kind == EndKind::Bc && std::holds_alternative<FlowParams>(bcs_[in.index].params))
        net.inlet_bc_id = bc_base + in.index;
    }
  }
  return net;
}

}  // namespace zerod
