#include "zerod/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zerod/elements.hpp"

namespace zerod {

IntegratorParams IntegratorParams::for_cycle(double period, int steps_per_cycle, double spectral_radius) {
  IntegratorParams p;
  p.spectral_radius = spectral_radius;
  p.steps_per_cycle = steps_per_cycle;
  p.dt = period / steps_per_cycle;
  return p;
}

void IntegratorParams::validate() const {
  if (!(spectral_radius >= 0.0 && spectral_radius <= 1.0))
    throw Error(ErrorCode::InvalidNetwork, "spectral radius must lie in [0, 1]");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidNetwork, "time step must be positive");
  if (steps_per_cycle < 1) throw Error(ErrorCode::InvalidNetwork, "steps_per_cycle must be >= 1");
  if (max_newton_iters < 1) throw Error(ErrorCode::InvalidNetwork, "max_newton_iters must be >= 1");
}

GlobalSystem assemble(const NetworkModel& network, const DofMap& dofs, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& ydot, double t, double ydot_factor) {
  const Eigen::Index n = dofs.total_dofs();
  if (y.size() != n || ydot.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "state length does not match the dof map");

  GlobalSystem sys{Eigen::VectorXd::Zero(n), SparseMatrix(n, n)};
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(16 * network.elements.size()));

  for (std::size_t k = 0; k < network.elements.size(); ++k) {
    const ElementDofs& ed = dofs.elements()[k];
    const Eigen::VectorXd yl = y(ed.dofs);
    const Eigen::VectorXd ydl = ydot(ed.dofs);
    const auto local = element_local_system<double>(network.elements[k], yl, ydl, t);

    sys.residual.segment(ed.first_equation, ed.num_equations) += local.residual(yl, ydl);
    const Eigen::MatrixXd K = local.tangent(ydot_factor);
    for (Eigen::Index i = 0; i < K.rows(); ++i)
      for (Eigen::Index j = 0; j < K.cols(); ++j) triplets.emplace_back(ed.first_equation + i, ed.dofs[j], K(i, j));
  }
  // Explicit zeros stay in the pattern so the symbolic factorization can be reused.
  sys.tangent.setFromTriplets(triplets.begin(), triplets.end());
  sys.tangent.makeCompressed();
  return sys;
}

Eigen::VectorXd solve_linear(const SparseMatrix& K, const Eigen::VectorXd& rhs) {
  if (K.rows() != K.cols() || K.rows() != rhs.size())
    throw Error(ErrorCode::DimensionMismatch, "linear system shape mismatch");
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  SparseMatrix A = K;
  A.makeCompressed();
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorCode::SingularTangent, lu.lastErrorMessage());
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorCode::SingularTangent, "solve produced non-finite values");
  return x;
}

GenAlphaStepper::GenAlphaStepper(const NetworkModel& network, const DofMap& dofs, const IntegratorParams& params)
    : network_(network),
      dofs_(dofs),
      params_(params),
      coeff_(GenAlphaCoefficients::from_spectral_radius(params.spectral_radius)) {
  params_.validate();
}

Eigen::VectorXd GenAlphaStepper::solve(const SparseMatrix& K, const Eigen::VectorXd& rhs) {
  if (!pattern_analyzed_) {
    lu_.analyzePattern(K);
    pattern_analyzed_ = true;
  }
  lu_.factorize(K);
  if (lu_.info() != Eigen::Success) throw Error(ErrorCode::SingularTangent, lu_.lastErrorMessage());
  Eigen::VectorXd x = lu_.solve(rhs);
  if (!x.allFinite()) throw Error(ErrorCode::SingularTangent, "solve produced non-finite values");
  return x;
}

StepResult GenAlphaStepper::step(const SolutionState& state, long step_index) {
  const double dt = params_.dt;
  const auto [am, af, gamma] = coeff_;
  const double factor = coeff_.ydot_factor(dt);
  const double t_af = state.t + af * dt;

  const Eigen::VectorXd ydot_pred = coeff_.predict_ydot(state.ydot);
  // Initiator, evaluated at the intermediate levels.
  Eigen::VectorXd y_af = state.y;
  Eigen::VectorXd ydot_am = state.ydot + am * (ydot_pred - state.ydot);

  StepResult result;
  double r0 = 0.0;
  for (int k = 0;; ++k) {
    GlobalSystem sys = assemble(network_, dofs_, y_af, ydot_am, t_af, factor);
    const double norm = sys.residual.lpNorm<Eigen::Infinity>();
    result.residual_norms.push_back(norm);
    if (!std::isfinite(norm)) throw NewtonDivergence(k, norm, step_index, state.t);
    if (k == 0) r0 = norm;
    if (norm < params_.newton_abs_tol || (k > 0 && norm < params_.newton_rel_tol * r0)) {
      result.iterations = k;
      break;
    }
    if (k == params_.max_newton_iters) throw NewtonDivergence(k, norm, step_index, state.t);

    const Eigen::VectorXd dy = solve(sys.tangent, -sys.residual);
    y_af += dy;
    ydot_am += factor * dy;
  }

  // Update back to t_{n+1}.
  result.state.t = state.t + dt;
  result.state.y = state.y + (y_af - state.y) / af;
  result.state.ydot = state.ydot + (ydot_am - state.ydot) / am;
  return result;
}

StepResult gen_alpha_step(const SolutionState& state, const IntegratorParams& params, const NetworkModel& network,
                          const DofMap& dofs) {
  GenAlphaStepper stepper(network, dofs, params);
  return stepper.step(state);
}

// ---------------------------------------------------------------------------

std::optional<std::pair<Eigen::Index, Eigen::Index>> ResultSet::cycle_rows(int c) const {
  const long first = static_cast<long>(c) * steps_per_cycle;
  const long last = first + steps_per_cycle;
  auto it = std::lower_bound(step_index.begin(), step_index.end(), first);
  if (it == step_index.end() || *it != first) return std::nullopt;
  const auto row = static_cast<Eigen::Index>(it - step_index.begin());
  const Eigen::Index end_row = row + steps_per_cycle;
  if (end_row >= static_cast<Eigen::Index>(step_index.size()) || step_index[end_row] != last) return std::nullopt;
  return std::make_pair(row, end_row);
}

int ResultSet::wire_position(int wire_id) const {
  for (std::size_t i = 0; i < wires.size(); ++i)
    if (wires[i].id == wire_id) return static_cast<int>(i);
  throw Error(ErrorCode::InvalidNetwork, "unknown wire " + std::to_string(wire_id));
}

namespace {

void require_valid(const NetworkModel& network) {
  const auto diagnostics = validate_network(network);
  if (diagnostics.empty()) return;
  std::string msg;
  for (const auto& d : diagnostics) msg += "\n  " + std::string(to_string(d.kind)) + ": " + d.message;
  throw Error(ErrorCode::InvalidNetwork, "network failed validation:" + msg);
}

Eigen::VectorXd wire_pressures(const DofMap& dofs, const std::vector<Wire>& wires, const Eigen::VectorXd& y) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(wires.size()));
  for (std::size_t i = 0; i < wires.size(); ++i) p[static_cast<Eigen::Index>(i)] = y[dofs.wire(wires[i].id).pressure];
  return p;
}

StepResult step_with_context(GenAlphaStepper& stepper, const SolutionState& state, long n) {
  try {
    return stepper.step(state, n);
  } catch (const NewtonDivergence&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), "step " + std::to_string(n) + " (t = " + std::to_string(state.t) + "): " + e.what());
  }
}

}  // namespace

NetworkModel time_averaged_network(const NetworkModel& network) {
  NetworkModel avg = network;
  for (auto& e : avg.elements) {
    if (auto* flow = std::get_if<FlowParams>(&e.params)) {
      flow->flow = TimeSeries::constant(flow->flow.mean(), flow->flow.period());
    } else if (auto* cor = std::get_if<CoronaryParams>(&e.params)) {
      if (!cor->intramyocardial_pressure.empty()) {
        const auto& pim = cor->intramyocardial_pressure;
        cor->intramyocardial_pressure = TimeSeries::constant(pim.mean(), pim.period());
      }
    }
  }
  return avg;
}

SolutionState steady_state(const NetworkModel& network, const IntegratorParams& params, double tol, int max_cycles) {
  const NetworkModel avg = time_averaged_network(network);
  require_valid(avg);
  const DofMap dofs = build_dof_map(avg);
  GenAlphaStepper stepper(avg, dofs, params);
  const std::vector<int> outlets = avg.outlet_wires();

  SolutionState state = SolutionState::zero(dofs);
  Eigen::VectorXd previous;
  long n = 0;
  for (int c = 0; c < max_cycles; ++c) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(outlets.size()));
    for (int s = 0; s < params.steps_per_cycle; ++s, ++n) {
      state = step_with_context(stepper, state, n).state;
      for (std::size_t i = 0; i < outlets.size(); ++i)
        mean[static_cast<Eigen::Index>(i)] += state.y[dofs.wire(outlets[i]).pressure];
    }
    mean /= params.steps_per_cycle;
    if (previous.size() > 0) {
      bool converged = true;
      for (Eigen::Index i = 0; i < mean.size(); ++i) {
        const double scale = std::abs(previous[i]);
        const double delta = scale > 0.0 ? std::abs(mean[i] - previous[i]) / scale : std::abs(mean[i]);
        converged = converged && delta < tol;
      }
      if (converged) break;
    }
    previous = mean;
  }
  state.t = 0.0;
  return state;
}

ResultSet run_simulation(const NetworkModel& network, const IntegratorParams& params, const RunOptions& options) {
  require_valid(network);
  params.validate();
  if (options.n_cycles < 1) throw Error(ErrorCode::InvalidNetwork, "n_cycles must be >= 1");

  ResultSet res;
  res.dofs = build_dof_map(network);
  res.wires = network.wires;
  res.outlet_wires = network.outlet_wires();
  res.inlet_wire = network.inlet_wire();
  res.dt = params.dt;
  res.steps_per_cycle = params.steps_per_cycle;
  res.n_cycles = options.n_cycles;

  SolutionState state;
  if (options.initial) {
    state = *options.initial;
    if (state.y.size() != res.dofs.total_dofs() || state.ydot.size() != res.dofs.total_dofs())
      throw Error(ErrorCode::DimensionMismatch, "initial state length does not match the dof map");
  } else if (options.warm_start) {
    state = steady_state(network, params, options.warm_start_tol, options.warm_start_max_cycles);
  } else {
    state = SolutionState::zero(res.dofs);
  }
  state.t = 0.0;

  const long N = params.steps_per_cycle;
  const long total = N * options.n_cycles;
  const long first_stored = options.store_all_cycles ? 0 : total - N;
  const Eigen::Index n_rows = static_cast<Eigen::Index>(total - first_stored + 1);
  res.time.resize(n_rows);
  res.solution.resize(n_rows, res.dofs.total_dofs());
  res.step_index.reserve(static_cast<std::size_t>(n_rows));
  res.newton_iterations.reserve(static_cast<std::size_t>(total));
  res.cycle_mean_pressure = Eigen::MatrixXd::Zero(options.n_cycles, static_cast<Eigen::Index>(res.wires.size()));

  Eigen::Index row = 0;
  auto store = [&](long n) {
    if (n < first_stored) return;
    res.time[row] = state.t;
    res.solution.row(row) = state.y.transpose();
    res.step_index.push_back(n);
    ++row;
  };
  store(0);

  GenAlphaStepper stepper(network, res.dofs, params);
  for (long n = 0; n < total; ++n) {
    StepResult step = step_with_context(stepper, state, n);
    state = std::move(step.state);
    state.t = static_cast<double>(n + 1) * params.dt;
    res.newton_iterations.push_back(step.iterations);
    res.cycle_mean_pressure.row(n / N) += wire_pressures(res.dofs, res.wires, state.y).transpose();
    store(n + 1);
  }
  res.cycle_mean_pressure /= static_cast<double>(N);
  return res;
}

PeriodicityReport check_periodicity(const ResultSet& results, double tol) {
  if (results.n_cycles < 2)
    throw Error(ErrorCode::InsufficientCycles, "periodicity needs two cycles, got " + std::to_string(results.n_cycles));

  PeriodicityReport report;
  report.tolerance = tol;
  report.outlet_wires = results.outlet_wires;

  auto delta = [&](int c, int pos) {
    const double prev = results.cycle_mean_pressure(c - 1, pos);
    const double curr = results.cycle_mean_pressure(c, pos);
    if (prev == 0.0) return curr == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(curr - prev) / std::abs(prev);
  };

  std::vector<int> positions;
  for (int w : results.outlet_wires) positions.push_back(results.wire_position(w));

  for (int c = 1; c < results.n_cycles; ++c) {
    const bool ok = std::all_of(positions.begin(), positions.end(), [&](int p) { return delta(c, p) < tol; });
    if (ok && !report.first_converged_cycle) report.first_converged_cycle = c;
  }
  const int last = results.n_cycles - 1;
  for (int p : positions) report.deltas.push_back(delta(last, p));
  report.converged = std::all_of(report.deltas.begin(), report.deltas.end(), [&](double d) { return d < tol; });
  return report;
}

}  // namespace zerod
