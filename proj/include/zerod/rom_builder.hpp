#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zerod/network.hpp"

namespace zerod {

/// Cross-sectional area sampled along a branch centerline.
struct BranchProfile {
  int branch_id = 0;
  Eigen::VectorXd path_length;  // cm, strictly increasing from 0
  Eigen::VectorXd area;         // cm^2, positive

  Eigen::Index size() const noexcept { return path_length.size(); }
  double length() const noexcept { return path_length[path_length.size() - 1]; }
  /// Throws Error(NonPositiveGeometry) if the invariants do not hold.
  void validate() const;
};

enum class SegmentRole { Proximal, Stenosis, Distal, Plain };

const char* to_string(SegmentRole role) noexcept;

struct Segment {
  double s_start = 0.0;
  double s_end = 0.0;
  double area_start = 0.0;     // area at s_start
  double area_end = 0.0;       // area at s_end
  double proximal_area = 0.0;  // S_0 feeding the expansion loss (Stenosis role)
  double segment_area = 0.0;   // S_s for a stenosis, representative area otherwise
  SegmentRole role = SegmentRole::Plain;

  double length() const noexcept { return s_end - s_start; }
};

/// Narrowing found by detect_stenosis, as sample indices into the profile.
struct StenosisSite {
  Eigen::Index minimum = 0;
  Eigen::Index proximal_max = 0;
  Eigen::Index distal_max = 0;
  double proximal_area = 0.0;  // S_0
  double stenosis_area = 0.0;  // S_s

  double ratio() const noexcept { return proximal_area / stenosis_area; }
};

struct Segmentation {
  int branch_id = 0;
  std::vector<Segment> segments;
  std::optional<StenosisSite> stenosis;  // automatic mode only
};

struct WallModel {
  double stiffness = 1.0e6;  // k_0 = E h / r, dyn/cm^2
};

inline constexpr double kDefaultStenosisThreshold = 1.1;

/// Relative extrema of a sampled signal. Runs of equal samples collapse to their first
/// index; interior points need strict inequality against both neighbours. The end
/// points qualify as maxima only.
struct Extrema {
  std::vector<Eigen::Index> minima;
  std::vector<Eigen::Index> maxima;
};
Extrema relative_extrema(const Eigen::VectorXd& values);

/// Splits a branch into proximal/stenosis/distal segments around the narrowing with the
/// largest S_0/S_s ratio (ties go to the earliest), or returns one plain segment when no
/// ratio reaches `threshold`.
Segmentation detect_stenosis(const BranchProfile& profile, double threshold = kDefaultStenosisThreshold);

/// Continuous piecewise-linear least-squares fit with knots restricted to sample
/// locations.
struct PiecewiseLinearFit {
  std::vector<Eigen::Index> knots;  // sample indices, first 0, last n_samples - 1
  Eigen::VectorXd knot_values;
  double sse = 0.0;
};

/// Optimal `n`-piece fit. Exact dynamic programming over knot positions with the
/// cost-to-go kept as a lower envelope of quadratics in the knot value. Among fits
/// within round-off of the optimum the lexicographically earliest knot set is returned.
/// Throws Error(TooFewSamples) if there are fewer than n + 1 samples.
PiecewiseLinearFit fit_piecewise_linear(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n);

/// Least-squares knot values and SSE for a fixed knot set.
PiecewiseLinearFit fit_with_knots(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                  std::vector<Eigen::Index> knots);

/// n-segment split of the branch from fit_piecewise_linear. A segment whose
/// representative area drops below its proximal neighbour's by `threshold` or more is
/// tagged as a stenosis with S_0 taken from that neighbour. A non-positive fitted knot
/// value is replaced by the sampled area there.
Segmentation fit_segments(const BranchProfile& profile, int n, double threshold = kDefaultStenosisThreshold);

/// Radius of a segment: mean of the end radii sqrt(S / pi).
double effective_radius(const Segment& segment);

/// Poiseuille R, wall compliance C, inertance L and, for stenosis segments, K_s.
/// Throws Error(NonPositiveGeometry) for non-positive length or areas.
VesselParams vessel_parameters(const Segment& segment, const FluidProperties& fluid, const WallModel& wall);

struct CenterlineJunction {
  int id = 0;
  std::vector<int> inlet_branches;
  std::vector<int> outlet_branches;
};

struct CenterlineTree {
  std::vector<BranchProfile> branches;
  std::vector<CenterlineJunction> junctions;
  int inlet_branch = 0;
  TimeSeries inflow;
  std::map<int, ElementParams> outlets;  // outlet branch -> boundary condition
  FluidProperties fluid;
  WallModel wall;

  const BranchProfile* find_branch(int id) const noexcept;
};

struct SegmentationMode {
  enum class Kind { Automatic, Fixed };
  Kind kind = Kind::Automatic;
  int segments = 1;

  static SegmentationMode automatic() { return {}; }
  static SegmentationMode fixed(int n) { return {Kind::Fixed, n}; }
};

struct RomBuild {
  NetworkModel network;
  std::vector<Segmentation> segmentations;  // branch order
};

/// Full tree to network conversion, keeping the per-branch segmentations.
/// Throws Error(MissingBC) for an unassigned outlet and Error(InvalidNetwork) for a
/// malformed tree.
RomBuild build_rom(const CenterlineTree& tree, SegmentationMode mode,
                   double threshold = kDefaultStenosisThreshold);

NetworkModel build_network(const CenterlineTree& tree, const FluidProperties& fluid, const WallModel& wall,
                           SegmentationMode mode, double threshold = kDefaultStenosisThreshold);

}  // namespace zerod
