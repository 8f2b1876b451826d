#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zerod/network.hpp"
#include "zerod/network_builder.hpp"

namespace zt {

using namespace zerod;

/// FlowBC -> Vessel(R) -> PressureBC.
inline NetworkModel resistor_network(double q, double r, double p_out) {
  NetworkBuilder b;
  const int v = b.add_vessel("V", {r, 0.0, 0.0, 0.0});
  const int in = b.add_boundary_condition("IN", FlowParams{TimeSeries::constant(q)});
  const int out = b.add_boundary_condition("OUT", PressureParams{p_out});
  b.attach_inlet_bc(v, in);
  b.attach_outlet_bc(v, out);
  return b.build();
}

/// FlowBC wired straight into a Windkessel: one wire, one internal P_c.
inline NetworkModel rcr_network(const TimeSeries& inflow, const WindkesselParams& p) {
  NetworkModel net;
  net.wires = {{0, "IN->RCR"}};
  net.elements = {{0, "IN", FlowParams{inflow}, {}, {0}}, {1, "RCR", p, {0}, {}}};
  net.inlet_bc_id = 0;
  return net;
}

/// Constant inflow into a junction feeding one resistor vessel per entry of `r`, each
/// ending at a zero-pressure cap.
inline NetworkModel split_network(double q, const std::vector<double>& r) {
  NetworkBuilder b;
  const int trunk = b.add_vessel("trunk", {0.0, 0.0, 0.0, 0.0});
  b.attach_inlet_bc(trunk, b.add_boundary_condition("IN", FlowParams{TimeSeries::constant(q)}));
  std::vector<int> outs;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const int v = b.add_vessel("branch" + std::to_string(k), {r[k], 0.0, 0.0, 0.0});
    b.attach_outlet_bc(v, b.add_boundary_condition("OUT" + std::to_string(k), PressureParams{0.0}));
    outs.push_back(v);
  }
  b.add_junction("J", {trunk}, outs);
  return b.build();
}

/// Periodic pulsatile inflow, mean `mean`, sampled at n points over `period`.
inline TimeSeries pulsatile_inflow(double mean, double amplitude, double period = 1.0, int n = 101) {
  Eigen::VectorXd t(n), q(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    t[i] = period * i / (n - 1);
    const double phase = 2.0 * pi * t[i] / period;
    q[i] = mean + amplitude * std::sin(phase) + 0.3 * amplitude * std::sin(2.0 * phase);
  }
  return TimeSeries(t, q);
}

struct TreeOptions {
  int junctions = 3;            // bifurcations
  int segments_per_branch = 1;  // chained vessels per branch
  double stenosis_probability = 0.0;
  bool pulsatile = true;
  bool mixed_outlets = true;    // otherwise RCR only
};

/// Random bifurcating tree: a trunk, `junctions` bifurcations, vessels with physiological
/// RCL values, RCR / resistance / coronary outlets. Deterministic in the seed.
inline NetworkModel random_tree(std::uint64_t seed, const TreeOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

  NetworkBuilder b;
  int counter = 0;
  auto add_branch = [&](double radius) {
    std::vector<int> chain;
    for (int s = 0; s < opt.segments_per_branch; ++s) {
      const double r = radius * uniform(0.9, 1.1);
      const double l = uniform(1.0, 4.0);
      const double pi = std::acos(-1.0);
      VesselParams p;
      p.resistance = 8.0 * 0.04 * l / (pi * std::pow(r, 4));
      p.capacitance = 3.0 * l * pi * r * r / (2.0e6);
      p.inductance = 1.06 * l / (pi * r * r);
      if (u(rng) < opt.stenosis_probability) p.stenosis_coefficient = uniform(0.01, 0.5) / (pi * r * r);
      const int v = b.add_vessel("v" + std::to_string(counter++), p);
      if (!chain.empty()) b.connect(chain.back(), v);
      chain.push_back(v);
    }
    return chain;
  };

  struct Open {
    int vessel;
    double radius;
  };
  std::vector<Open> open;
  const auto trunk = add_branch(1.0);
  const TimeSeries inflow =
      opt.pulsatile ? pulsatile_inflow(60.0, 40.0) : TimeSeries::constant(60.0);
  b.attach_inlet_bc(trunk.front(), b.add_boundary_condition("INFLOW", FlowParams{inflow}));
  open.push_back({trunk.back(), 1.0});

  int junction = 0;
  while (junction < opt.junctions) {
    const std::size_t pick = static_cast<std::size_t>(u(rng) * static_cast<double>(open.size())) % open.size();
    const Open parent = open[pick];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    std::vector<int> children;
    const int n_children = (u(rng) < 0.2) ? 3 : 2;
    for (int c = 0; c < n_children; ++c) {
      const double radius = parent.radius * uniform(0.6, 0.85);
      const auto chain = add_branch(radius);
      children.push_back(chain.front());
      open.push_back({chain.back(), radius});
    }
    b.add_junction("J" + std::to_string(junction++), {parent.vessel}, children);
  }

  int k = 0;
  for (const Open& o : open) {
    const double share = 1.0 / static_cast<double>(open.size());
    const double r_total = 1.0e5 / 60.0 / share;  // roughly 100 mmHg mean pressure
    const double kind = opt.mixed_outlets ? u(rng) : 0.0;
    ElementParams bc;
    if (kind < 0.6) {
      bc = WindkesselParams{0.1 * r_total, 1.0e-4 * share, 0.9 * r_total, 0.0};
    } else if (kind < 0.8) {
      bc = ResistanceParams{r_total, 0.0};
    } else {
      CoronaryParams c;
      c.arterial_resistance = 0.3 * r_total;
      c.microvascular_resistance = 0.5 * r_total;
      c.venous_resistance = 0.2 * r_total;
      c.arterial_capacitance = 2.0e-5 * share;
      c.intramyocardial_capacitance = 1.0e-4 * share;
      c.venous_pressure = 0.0;
      c.intramyocardial_pressure = TimeSeries({{0.0, 0.0}, {0.3, 1.0e4}, {0.6, 2.0e3}, {1.0, 0.0}});
      bc = c;
    }
    b.attach_outlet_bc(o.vessel, b.add_boundary_condition("OUT" + std::to_string(k++), bc));
  }
  return b.build();
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace zt
