#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zerod/network.hpp"

namespace zerod {

/// Assembles a NetworkModel from a vessel-centric description: vessels, boundary
/// conditions attached to vessel ends, and junctions between vessel ends.
///
/// Output is canonical. Elements are ordered vessels, junctions, then boundary
/// conditions (each in insertion order) and numbered from zero. Wires are created while
/// walking the vessels in order (inlet end, then outlet end) and labelled
/// "<upstream>-><downstream>". A one-to-one junction becomes a plain wire.
class NetworkBuilder {
 public:
  explicit NetworkBuilder(FluidProperties fluid = {}) : fluid_(fluid) {}

  int add_vessel(std::string name, VesselParams params);
  /// Registers a boundary condition; params must not be a vessel or junction.
  int add_boundary_condition(std::string name, ElementParams params);

  void attach_inlet_bc(int vessel, int bc);
  void attach_outlet_bc(int vessel, int bc);
  void connect(int upstream_vessel, int downstream_vessel);
  void add_junction(std::string name, std::vector<int> inlet_vessels, std::vector<int> outlet_vessels);
  void set_inlet(int bc) { inlet_bc_ = bc; }

  int num_vessels() const noexcept { return static_cast<int>(vessels_.size()); }

  /// Throws Error(InvalidNetwork) when a vessel end is left open or attached twice.
  NetworkModel build() const;

 private:
  enum class EndKind { None, Bc, Vessel, Junction };
  struct End {
    EndKind kind = EndKind::None;
    int index = -1;  // bc, vessel or junction index
  };
  struct VesselEntry {
    std::string name;
    VesselParams params;
    End inlet, outlet;
  };
  struct BcEntry {
    std::string name;
    ElementParams params;
  };
  struct JunctionEntry {
    std::string name;
    std::vector<int> inlets, outlets;
  };

  void set_end(End& end, EndKind kind, int index, const std::string& what);

  FluidProperties fluid_;
  std::vector<VesselEntry> vessels_;
  std::vector<BcEntry> bcs_;
  std::vector<JunctionEntry> junctions_;
  std::optional<int> inlet_bc_;
};

}  // namespace zerod
