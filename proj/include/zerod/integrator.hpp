#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "zerod/network.hpp"

namespace zerod {

struct IntegratorParams {
  double spectral_radius = 0.0;  // rho_inf in [0, 1]
  double dt = 1.0e-3;            // s
  int steps_per_cycle = 1000;
  int max_newton_iters = 30;
  double newton_abs_tol = 1.0e-8;
  double newton_rel_tol = 1.0e-5;

  /// Steps of period / steps_per_cycle.
  static IntegratorParams for_cycle(double period, int steps_per_cycle, double spectral_radius = 0.0);
  void validate() const;
};

struct GenAlphaCoefficients {
  double alpha_m;
  double alpha_f;
  double gamma;

  static GenAlphaCoefficients from_spectral_radius(double rho) noexcept {
    const double am = (3.0 - rho) / (2.0 + 2.0 * rho);
    const double af = 1.0 / (1.0 + rho);
    return {am, af, 0.5 + am - af};
  }

  /// d(ydot_{n+alpha_m}) / d(y_{n+alpha_f}).
  double ydot_factor(double dt) const noexcept { return alpha_m / (alpha_f * gamma * dt); }

  /// Predicted ydot_{n+1}; the predicted y_{n+1} is y_n.
  template <typename Derived>
  Eigen::VectorXd predict_ydot(const Eigen::MatrixBase<Derived>& ydot_n) const {
    return ((gamma - 1.0) / gamma) * ydot_n;
  }
};

using SparseMatrix = Eigen::SparseMatrix<double>;

struct GlobalSystem {
  Eigen::VectorXd residual;
  SparseMatrix tangent;
};

/// Residual r = E ydot + F y + c and tangent K = dE + ydot_factor E + dF + F + dc
/// scattered from every element.
GlobalSystem assemble(const NetworkModel& network, const DofMap& dofs, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& ydot, double t, double ydot_factor);

/// Sparse LU with partial pivoting. Throws Error(SingularTangent) on rank deficiency.
Eigen::VectorXd solve_linear(const SparseMatrix& K, const Eigen::VectorXd& rhs);

struct StepResult {
  SolutionState state;
  int iterations = 0;                  // Newton corrections applied
  std::vector<double> residual_norms;  // max-norm before each correction and at exit
};

/// Generalized-alpha time stepper. Owns its factorization workspace, so one instance
/// must not be shared between concurrent simulations.
class GenAlphaStepper {
 public:
  GenAlphaStepper(const NetworkModel& network, const DofMap& dofs, const IntegratorParams& params);

  /// Advances one step of params.dt from `state`. `step_index` only labels errors.
  /// Throws NewtonDivergence or Error(SingularTangent).
  StepResult step(const SolutionState& state, long step_index = -1);

  const GenAlphaCoefficients& coefficients() const noexcept { return coeff_; }

 private:
  Eigen::VectorXd solve(const SparseMatrix& K, const Eigen::VectorXd& rhs);

  const NetworkModel& network_;
  const DofMap& dofs_;
  IntegratorParams params_;
  GenAlphaCoefficients coeff_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  bool pattern_analyzed_ = false;
};

StepResult gen_alpha_step(const SolutionState& state, const IntegratorParams& params, const NetworkModel& network,
                          const DofMap& dofs);

/// Per-wire pressures and flows of a run. Rows of `solution` are stored samples.
struct ResultSet {
  DofMap dofs;
  std::vector<Wire> wires;
  std::vector<int> outlet_wires;
  int inlet_wire = -1;

  double dt = 0.0;
  int steps_per_cycle = 0;
  int n_cycles = 0;

  Eigen::VectorXd time;
  Eigen::MatrixXd solution;        // stored samples x total_dofs
  std::vector<long> step_index;    // global step of every stored row (0 = initial state)
  std::vector<int> newton_iterations;  // per step, length n_cycles * steps_per_cycle
  /// Mean pressure of each wire over each cycle: n_cycles x wires.size(), wire order.
  Eigen::MatrixXd cycle_mean_pressure;

  Eigen::VectorXd pressure(int wire_id) const { return solution.col(dofs.wire(wire_id).pressure); }
  Eigen::VectorXd flow(int wire_id) const { return solution.col(dofs.wire(wire_id).flow); }
  /// Stored rows [first, last] of cycle c, if the whole cycle was kept.
  std::optional<std::pair<Eigen::Index, Eigen::Index>> cycle_rows(int c) const;
  int wire_position(int wire_id) const;
};

struct RunOptions {
  int n_cycles = 1;
  std::optional<SolutionState> initial;
  bool store_all_cycles = true;  // otherwise only the last cycle is kept
  bool warm_start = false;       // start from a steady solve with cycle-averaged inputs
  double warm_start_tol = 0.01;
  int warm_start_max_cycles = 50;
};

/// Integrates n_cycles * steps_per_cycle steps from t = 0. Cold start (y = ydot = 0)
/// unless an initial state is given. Errors propagate with the failing step attached.
ResultSet run_simulation(const NetworkModel& network, const IntegratorParams& params, const RunOptions& options);

inline ResultSet run_simulation(const NetworkModel& network, const IntegratorParams& params, int n_cycles,
                                std::optional<SolutionState> initial = std::nullopt) {
  RunOptions options;
  options.n_cycles = n_cycles;
  options.initial = std::move(initial);
  return run_simulation(network, params, options);
}

/// Copy of `network` with every prescribed signal replaced by its time average.
NetworkModel time_averaged_network(const NetworkModel& network);

/// Steady state under time-averaged inputs, reached by integrating cycle by cycle until
/// consecutive outlet cycle-mean pressures agree within `tol`.
SolutionState steady_state(const NetworkModel& network, const IntegratorParams& params, double tol = 0.01,
                           int max_cycles = 50);

struct PeriodicityReport {
  bool converged = false;
  double tolerance = 0.01;
  std::vector<int> outlet_wires;
  std::vector<double> deltas;  // per outlet, relative change between the last two cycles
  /// First cycle c whose means differ from cycle c-1 by less than the tolerance at every outlet.
  std::optional<int> first_converged_cycle;
};

/// Relative delta |m_c - m_{c-1}| / |m_{c-1}| of cycle-mean outlet pressures.
/// Throws Error(InsufficientCycles) with fewer than two cycles.
PeriodicityReport check_periodicity(const ResultSet& results, double tol = 0.01);

}  // namespace zerod
