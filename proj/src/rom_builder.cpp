#include "zerod/rom_builder.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "zerod/elements.hpp"
#include "zerod/network_builder.hpp"

namespace zerod {

void BranchProfile::validate() const {
  const std::string where = "branch " + std::to_string(branch_id);
  if (path_length.size() != area.size())
    throw Error(ErrorCode::NonPositiveGeometry, where + ": path and area sample counts differ");
  if (path_length.size() < 2) throw Error(ErrorCode::NonPositiveGeometry, where + ": needs at least two samples");
  if (path_length[0] != 0.0) throw Error(ErrorCode::NonPositiveGeometry, where + ": path length must start at 0");
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (!(area[i] > 0.0) || !std::isfinite(area[i]))
      throw Error(ErrorCode::NonPositiveGeometry, where + ": areas must be positive");
    if (i > 0 && !(path_length[i] > path_length[i - 1]))
      throw Error(ErrorCode::NonPositiveGeometry, where + ": path length must increase strictly");
  }
}

const char* to_string(SegmentRole role) noexcept {
  switch (role) {
    case SegmentRole::Proximal: return "proximal";
    case SegmentRole::Stenosis: return "stenosis";
    case SegmentRole::Distal: return "distal";
    case SegmentRole::Plain: return "plain";
  }
  return "unknown";
}

namespace {

// Maximal runs of equal samples.
struct Run {
  Eigen::Index first, last;
  double value;
};

std::vector<Run> collapse_runs(const Eigen::VectorXd& v) {
  std::vector<Run> runs;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!runs.empty() && v[i] == runs.back().value)
      runs.back().last = i;
    else
      runs.push_back({i, i, v[i]});
  }
  return runs;
}

enum class RunKind { None, Min, Max };

std::vector<RunKind> classify(const std::vector<Run>& runs) {
  const std::size_t n = runs.size();
  std::vector<RunKind> kind(n, RunKind::None);
  if (n < 2) return kind;
  if (runs[0].value > runs[1].value) kind[0] = RunKind::Max;
  if (runs[n - 1].value > runs[n - 2].value) kind[n - 1] = RunKind::Max;
  for (std::size_t r = 1; r + 1 < n; ++r) {
    const double prev = runs[r - 1].value, here = runs[r].value, next = runs[r + 1].value;
    if (here < prev && here < next) kind[r] = RunKind::Min;
    if (here > prev && here > next) kind[r] = RunKind::Max;
  }
  return kind;
}

double representative_area(double area_start, double area_end) {
  const double r = 0.5 * (std::sqrt(area_start / std::numbers::pi) + std::sqrt(area_end / std::numbers::pi));
  return std::numbers::pi * r * r;
}

Segment make_segment(const BranchProfile& p, Eigen::Index i0, Eigen::Index i1, SegmentRole role) {
  Segment s;
  s.s_start = p.path_length[i0];
  s.s_end = p.path_length[i1];
  s.area_start = p.area[i0];
  s.area_end = p.area[i1];
  s.proximal_area = s.area_start;
  s.segment_area = representative_area(s.area_start, s.area_end);
  s.role = role;
  return s;
}

}  // namespace

Extrema relative_extrema(const Eigen::VectorXd& values) {
  const auto runs = collapse_runs(values);
  const auto kind = classify(runs);
  Extrema ex;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (kind[r] == RunKind::Min) ex.minima.push_back(runs[r].first);
    if (kind[r] == RunKind::Max) ex.maxima.push_back(runs[r].first);
  }
  return ex;
}

Segmentation detect_stenosis(const BranchProfile& profile, double threshold) {
  profile.validate();
  Segmentation seg;
  seg.branch_id = profile.branch_id;

  const auto runs = collapse_runs(profile.area);
  const auto kind = classify(runs);

  std::optional<std::size_t> best_min, best_prox, best_dist;
  double best_ratio = 0.0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (kind[r] != RunKind::Min) continue;
    // A minimum always has a maximum on each side (possibly an end point).
    std::size_t p = r, d = r;
    while (p > 0 && kind[--p] != RunKind::Max) {
    }
    while (d + 1 < runs.size() && kind[++d] != RunKind::Max) {
    }
    if (kind[p] != RunKind::Max || kind[d] != RunKind::Max) continue;
    const double ratio = runs[p].value / runs[r].value;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_min = r;
      best_prox = p;
      best_dist = d;
    }
  }

  const Eigen::Index last = profile.size() - 1;
  if (!best_min || best_ratio < threshold) {
    seg.segments.push_back(make_segment(profile, 0, last, SegmentRole::Plain));
    return seg;
  }

  const Run& prox = runs[*best_prox];
  const Run& dist = runs[*best_dist];
  const Run& narrow = runs[*best_min];
  seg.stenosis = StenosisSite{narrow.first, prox.first, dist.first, prox.value, narrow.value};

  // Segment boundaries sit on the flanking maxima; a plateau maximum contributes the
  // sample next to the narrowing.
  const Eigen::Index split0 = prox.last;
  const Eigen::Index split1 = dist.first;
  if (split0 > 0) seg.segments.push_back(make_segment(profile, 0, split0, SegmentRole::Proximal));
  Segment sten = make_segment(profile, split0, split1, SegmentRole::Stenosis);
  sten.proximal_area = prox.value;
  sten.segment_area = narrow.value;
  seg.segments.push_back(sten);
  if (split1 < last) seg.segments.push_back(make_segment(profile, split1, last, SegmentRole::Distal));
  return seg;
}

Segmentation fit_segments(const BranchProfile& profile, int n, double threshold) {
  profile.validate();
  const PiecewiseLinearFit fit = fit_piecewise_linear(profile.path_length, profile.area, n);

  Segmentation seg;
  seg.branch_id = profile.branch_id;
  for (int j = 0; j < n; ++j) {
    Segment s;
    s.s_start = profile.path_length[fit.knots[j]];
    s.s_end = profile.path_length[fit.knots[j + 1]];
    // A fit overshooting below zero on noisy data falls back to the sampled area.
    auto knot_area = [&](int k) {
      const double v = fit.knot_values[k];
      return v > 0.0 ? v : profile.area[fit.knots[k]];
    };
    s.area_start = knot_area(j);
    s.area_end = knot_area(j + 1);
    s.proximal_area = s.area_start;
    s.segment_area = representative_area(s.area_start, s.area_end);
    if (j > 0) {
      const double upstream = seg.segments.back().segment_area;
      if (upstream / s.segment_area >= threshold) {
        s.role = SegmentRole::Stenosis;
        s.proximal_area = upstream;
      }
    }
    seg.segments.push_back(s);
  }
  return seg;
}

double effective_radius(const Segment& segment) {
  return 0.5 * (std::sqrt(segment.area_start / std::numbers::pi) + std::sqrt(segment.area_end / std::numbers::pi));
}

VesselParams vessel_parameters(const Segment& segment, const FluidProperties& fluid, const WallModel& wall) {
  const double l = segment.length();
  if (!(l > 0.0) || !(segment.area_start > 0.0) || !(segment.area_end > 0.0))
    throw Error(ErrorCode::NonPositiveGeometry, "segment length and end areas must be positive");
  if (!(wall.stiffness > 0.0)) throw Error(ErrorCode::NonPositiveGeometry, "wall stiffness must be positive");

  const double r = effective_radius(segment);
  const double pi = std::numbers::pi;
  VesselParams p;
  p.resistance = 8.0 * fluid.viscosity * l / (pi * r * r * r * r);
  p.capacitance = 3.0 * l * pi * r * r / (2.0 * wall.stiffness);  // E h = k0 r
  p.inductance = fluid.density * l / (pi * r * r);
  if (segment.role == SegmentRole::Stenosis) {
    if (!(segment.segment_area > 0.0) || !(segment.proximal_area > 0.0))
      throw Error(ErrorCode::NonPositiveGeometry, "stenosis areas must be positive");
    // Noise can put S_s above S_0; Poiseuille is the lower bound then.
    p.stenosis_coefficient = segment.segment_area > segment.proximal_area
                                 ? 0.0
                                 : stenosis_coefficient(segment.proximal_area, segment.segment_area, fluid.density);
  }
  return p;
}

const BranchProfile* CenterlineTree::find_branch(int id) const noexcept {
  for (const auto& b : branches)
    if (b.branch_id == id) return &b;
  return nullptr;
}

RomBuild build_rom(const CenterlineTree& tree, SegmentationMode mode, double threshold) {
  auto invalid = [](const std::string& msg) { return Error(ErrorCode::InvalidNetwork, msg); };

  std::map<int, std::size_t> branch_pos;
  for (std::size_t i = 0; i < tree.branches.size(); ++i) {
    if (!branch_pos.emplace(tree.branches[i].branch_id, i).second)
      throw invalid("duplicate branch id " + std::to_string(tree.branches[i].branch_id));
  }
  if (!branch_pos.count(tree.inlet_branch)) throw invalid("inlet branch " + std::to_string(tree.inlet_branch) + " not found");
  if (tree.inflow.empty()) throw invalid("inlet has no flow series");

  std::map<int, int> start_owner, end_owner;  // branch -> junction id
  for (const auto& j : tree.junctions) {
    for (int b : j.inlet_branches) {
      if (!branch_pos.count(b)) throw invalid("junction " + std::to_string(j.id) + " references unknown branch " + std::to_string(b));
      if (!end_owner.emplace(b, j.id).second) throw invalid("branch " + std::to_string(b) + " ends in two junctions");
    }
    for (int b : j.outlet_branches) {
      if (!branch_pos.count(b)) throw invalid("junction " + std::to_string(j.id) + " references unknown branch " + std::to_string(b));
      if (!start_owner.emplace(b, j.id).second) throw invalid("branch " + std::to_string(b) + " starts in two junctions");
    }
  }
  if (start_owner.count(tree.inlet_branch)) throw invalid("inlet branch cannot start at a junction");
  for (const auto& b : tree.branches) {
    if (b.branch_id != tree.inlet_branch && !start_owner.count(b.branch_id))
      throw invalid("branch " + std::to_string(b.branch_id) + " has an unattached start");
    if (!end_owner.count(b.branch_id) && !tree.outlets.count(b.branch_id))
      throw Error(ErrorCode::MissingBC, "outlet branch " + std::to_string(b.branch_id) + " has no boundary condition");
    if (end_owner.count(b.branch_id) && tree.outlets.count(b.branch_id))
      throw invalid("branch " + std::to_string(b.branch_id) + " ends in a junction and an outlet cap");
  }

  RomBuild out;
  NetworkBuilder builder(tree.fluid);
  std::map<int, std::pair<int, int>> vessel_range;  // branch -> (first, last) vessel index
  for (const auto& branch : tree.branches) {
    Segmentation seg = mode.kind == SegmentationMode::Kind::Automatic
                           ? detect_stenosis(branch, threshold)
                           : fit_segments(branch, mode.segments, threshold);
    int first = -1, prev = -1;
    for (std::size_t k = 0; k < seg.segments.size(); ++k) {
      const int v = builder.add_vessel("branch" + std::to_string(branch.branch_id) + "_seg" + std::to_string(k),
                                       vessel_parameters(seg.segments[k], tree.fluid, tree.wall));
      if (prev >= 0) builder.connect(prev, v);
      if (first < 0) first = v;
      prev = v;
    }
    vessel_range[branch.branch_id] = {first, prev};
    out.segmentations.push_back(std::move(seg));
  }

  const int inflow = builder.add_boundary_condition("INFLOW", FlowParams{tree.inflow});
  builder.attach_inlet_bc(vessel_range[tree.inlet_branch].first, inflow);
  builder.set_inlet(inflow);
  for (const auto& branch : tree.branches) {
    auto it = tree.outlets.find(branch.branch_id);
    if (it == tree.outlets.end()) continue;
    const int bc = builder.add_boundary_condition("OUTLET_" + std::to_string(branch.branch_id), it->second);
    builder.attach_outlet_bc(vessel_range[branch.branch_id].second, bc);
  }
  for (const auto& j : tree.junctions) {
    std::vector<int> ins, outs;
    for (int b : j.inlet_branches) ins.push_back(vessel_range[b].second);
    for (int b : j.outlet_branches) outs.push_back(vessel_range[b].first);
    builder.add_junction("J" + std::to_string(j.id), std::move(ins), std::move(outs));
  }

  out.network = builder.build();
  const auto diagnostics = validate_network(out.network);
  if (!diagnostics.empty()) {
    std::string msg = "generated network is invalid:";
    for (const auto& d : diagnostics) msg += "\n  " + d.message;
    throw invalid(msg);
  }
  return out;
}

NetworkModel build_network(const CenterlineTree& tree, const FluidProperties& fluid, const WallModel& wall,
                           SegmentationMode mode, double threshold) {
  CenterlineTree copy = tree;
  copy.fluid = fluid;
  copy.wall = wall;
  return build_rom(copy, mode, threshold).network;
}

}  // namespace zerod
