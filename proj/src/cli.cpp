#include "zerod/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "zerod/error.hpp"
#include "zerod/integrator.hpp"
#include "zerod/io.hpp"
#include "zerod/metrics.hpp"
#include "zerod/rom_builder.hpp"
#include "zerod/units.hpp"

namespace zerod::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Thrown inside a subcommand to end it with a specific exit code.
struct Exit {
  int code;
  std::string message;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return kParseError;
    case ErrorCode::NewtonDivergence:
    case ErrorCode::SingularTangent: return kSolverError;
    case ErrorCode::MismatchedCaps:
    case ErrorCode::ZeroFlowAmplitude:
    case ErrorCode::OutOfRange: return kComparisonError;
    default: return kValidationError;
  }
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Exit{kParseError, "cannot write " + path.string()};
  out << doc.dump(2) << '\n';
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Exit{kParseError, "cannot create directory " + dir.string() + ": " + ec.message()};
}

// JSON cannot carry inf/nan; they become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------------------
// Simulation flags shared by run and sweep.

struct SimFlags {
  std::optional<int> cycles;
  std::optional<int> steps;
  std::optional<double> rho;
  std::optional<int> max_iters;
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  bool warm_start = false;
  bool last_cycle_only = false;

  void add_to(CLI::App* app) {
    app->add_option("--cycles", cycles, "Number of cardiac cycles");
    app->add_option("--steps-per-cycle", steps, "Time steps per cycle");
    app->add_option("--rho-inf", rho, "Generalized-alpha spectral radius in [0, 1]");
    app->add_option("--max-newton-iters", max_iters, "Newton iteration budget per step");
    app->add_option("--abs-tol", abs_tol, "Absolute Newton residual tolerance");
    app->add_option("--rel-tol", rel_tol, "Relative Newton residual tolerance");
    app->add_flag("--warm-start", warm_start, "Start from the steady state under cycle-averaged inputs");
    app->add_flag("--last-cycle-only", last_cycle_only, "Keep and write only the final cycle");
  }

  void apply(io::SimulationParameters& s) const {
    if (cycles) s.n_cycles = *cycles;
    if (steps) s.steps_per_cycle = *steps;
    if (rho) s.spectral_radius = *rho;
    if (max_iters) s.max_newton_iters = *max_iters;
    if (abs_tol) s.newton_abs_tol = *abs_tol;
    if (rel_tol) s.newton_rel_tol = *rel_tol;
  }
};

double cycle_period(const NetworkModel& net) {
  const ElementSpec* inlet = net.find_element(net.inlet_bc_id);
  if (inlet == nullptr) throw Error(ErrorCode::InvalidNetwork, "no inlet boundary condition");
  const auto* flow = std::get_if<FlowParams>(&inlet->params);
  if (flow == nullptr || flow->flow.empty())
    throw Error(ErrorCode::InvalidNetwork, "inlet '" + inlet->name + "' is not a flow boundary condition");
  return flow->flow.period();
}

IntegratorParams integrator_params(const io::ModelFile& model) {
  const auto& s = model.simulation;
  if (s.n_cycles < 1) throw Error(ErrorCode::InvalidNetwork, "number of cycles must be >= 1");
  if (s.steps_per_cycle < 1) throw Error(ErrorCode::InvalidNetwork, "steps per cycle must be >= 1");
  IntegratorParams p = IntegratorParams::for_cycle(cycle_period(model.network), s.steps_per_cycle, s.spectral_radius);
  p.max_newton_iters = s.max_newton_iters;
  p.newton_abs_tol = s.newton_abs_tol;
  p.newton_rel_tol = s.newton_rel_tol;
  p.validate();
  return p;
}

void require_valid(const NetworkModel& net) {
  const auto diagnostics = validate_network(net);
  if (diagnostics.empty()) return;
  std::string msg = "invalid network:";
  for (const auto& d : diagnostics) msg += "\n  " + std::string(to_string(d.kind)) + ": " + d.message;
  throw Exit{kValidationError, msg};
}

// ---------------------------------------------------------------------------------------
// build

struct BuildArgs {
  std::string tree;
  std::string bc;
  std::string output;
  std::string mode = "auto";
  double threshold = kDefaultStenosisThreshold;
};

SegmentationMode parse_mode(const std::string& text) {
  if (text == "auto" || text == "automatic") return SegmentationMode::automatic();
  if (text.rfind("fixed:", 0) == 0) {
    const std::string n = text.substr(6);
    int value = 0;
    std::size_t used = 0;
    try {
      value = std::stoi(n, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == n.size() && !n.empty() && value >= 1) return SegmentationMode::fixed(value);
  }
  throw Exit{kParseError, "--mode must be 'auto' or 'fixed:N' with N >= 1, got '" + text + "'"};
}

int cmd_build(const BuildArgs& a, std::ostream& out) {
  const SegmentationMode mode = parse_mode(a.mode);
  CenterlineTree tree = a.bc.empty() ? io::read_centerline_tree(a.tree) : io::read_centerline_tree(a.tree, a.bc);

  RomBuild rom;
  try {
    rom = build_rom(tree, mode, a.threshold);
  } catch (const Error& e) {
    throw Exit{e.code() == ErrorCode::Parse ? kParseError : kValidationError, e.what()};
  }

  int vessels = 0, junctions = 0, bcs = 0;
  for (const auto& e : rom.network.elements) {
    if (e.kind() == ElementKind::Vessel) ++vessels;
    else if (e.kind() == ElementKind::Junction) ++junctions;
    else ++bcs;
  }
  out << "branches: " << rom.segmentations.size() << ", vessels: " << vessels << ", junctions: " << junctions
      << ", boundary conditions: " << bcs << '\n';
  for (const auto& seg : rom.segmentations) {
    out << "  branch " << seg.branch_id << ": " << seg.segments.size() << " segment(s)";
    for (const auto& s : seg.segments)
      if (s.role == SegmentRole::Stenosis)
        out << ", stenosis on s = [" << s.s_start << ", " << s.s_end << "] with S0/Ss = "
            << s.proximal_area / s.segment_area;
    out << '\n';
  }

  io::ModelFile model{rom.network, {}};
  io::write_model(a.output, model);
  out << "wrote " << a.output << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------------------
// run

struct RunArgs {
  std::string model;
  std::string output = ".";
  SimFlags sim;
  std::optional<double> periodicity_tol;
  std::string units = "cgs";
};

json newton_stats(const std::vector<int>& iterations) {
  long total = 0;
  int max_it = 0;
  for (int k : iterations) {
    total += k;
    max_it = std::max(max_it, k);
  }
  const double mean = iterations.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(iterations.size());
  return {{"steps", iterations.size()}, {"total_iterations", total}, {"max_iterations", max_it},
          {"mean_iterations", mean}};
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const units::PressureUnit unit = [&] {
    try {
      return units::parse_pressure_unit(a.units);
    } catch (const Error& e) {
      throw Exit{kParseError, e.what()};
    }
  }();

  io::ModelFile model = io::read_model(a.model);
  a.sim.apply(model.simulation);
  require_valid(model.network);
  const IntegratorParams params = integrator_params(model);
  if (a.periodicity_tol && model.simulation.n_cycles < 2)
    throw Exit{kValidationError, "--check-periodicity needs at least 2 cycles"};

  RunOptions options;
  options.n_cycles = model.simulation.n_cycles;
  options.store_all_cycles = !a.sim.last_cycle_only;
  options.warm_start = a.sim.warm_start;

  const fs::path dir = a.output;
  ensure_directory(dir);

  json manifest{{"model", a.model},
                {"n_cycles", options.n_cycles},
                {"steps_per_cycle", params.steps_per_cycle},
                {"dt", params.dt},
                {"spectral_radius", params.spectral_radius},
                {"newton_abs_tol", params.newton_abs_tol},
                {"newton_rel_tol", params.newton_rel_tol},
                {"warm_start", options.warm_start}};

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  ResultSet results;
  try {
    results = run_simulation(model.network, params, options);
  } catch (const NewtonDivergence& e) {
    manifest["converged"] = false;
    manifest["wall_clock_s"] = elapsed();
    manifest["failure"] = {{"kind", "NewtonDivergence"},
                           {"step", e.step()},
                           {"time", e.time()},
                           {"iterations", e.iterations()},
                           {"residual_norm", finite_or_null(e.residual_norm())},
                           {"message", e.what()}};
    write_json(dir / "manifest.json", manifest);
    err << "error: " << e.what() << '\n';
    return kSolverError;
  } catch (const Error& e) {
    if (exit_code_for(e.code()) != kSolverError) throw;
    manifest["converged"] = false;
    manifest["wall_clock_s"] = elapsed();
    manifest["failure"] = {{"kind", to_string(e.code())}, {"message", e.what()}};
    write_json(dir / "manifest.json", manifest);
    err << "error: " << e.what() << '\n';
    return kSolverError;
  }
  const double wall = elapsed();

  io::write_csv(dir / "results.csv", io::results_table(results, a.sim.last_cycle_only));

  manifest["converged"] = true;
  manifest["wall_clock_s"] = wall;
  manifest["newton"] = newton_stats(results.newton_iterations);
  manifest["pressure_units"] = a.units;

  const int last = results.n_cycles - 1;
  json means = json::object();
  for (std::size_t i = 0; i < results.wires.size(); ++i)
    means[results.wires[i].label] =
        units::from_cgs_pressure(results.cycle_mean_pressure(last, static_cast<Eigen::Index>(i)), unit);
  manifest["last_cycle_mean_pressure"] = means;

  if (a.periodicity_tol) {
    const PeriodicityReport rep = check_periodicity(results, *a.periodicity_tol);
    json deltas = json::object();
    for (std::size_t i = 0; i < rep.outlet_wires.size(); ++i)
      deltas[results.wires[static_cast<std::size_t>(results.wire_position(rep.outlet_wires[i]))].label] =
          finite_or_null(rep.deltas[i]);
    manifest["periodicity"] = {{"tolerance", rep.tolerance},
                               {"converged", rep.converged},
                               {"deltas", deltas},
                               {"first_converged_cycle", rep.first_converged_cycle
                                                             ? json(*rep.first_converged_cycle)
                                                             : json(nullptr)}};
  }
  write_json(dir / "manifest.json", manifest);

  out << "steps: " << results.newton_iterations.size() << ", wall clock: " << wall << " s, wrote "
      << (dir / "results.csv").string() << '\n';
  if (a.periodicity_tol)
    out << "periodic: " << (manifest["periodicity"]["converged"].get<bool>() ? "yes" : "no") << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string results;
  std::string reference;
  std::string caps;
  std::string output;
  std::string resample;
  std::optional<double> period;
};

struct CapColumns {
  std::string id;
  std::string test_label;
  std::string reference_label;
  bool inlet = false;
};

std::vector<CapColumns> read_cap_map(const std::string& path) {
  const json doc = io::read_json(path);
  const json* caps = doc.is_array() ? &doc : (doc.is_object() && doc.contains("caps") ? &doc["caps"] : nullptr);
  if (caps == nullptr || !caps->is_array()) throw Error(ErrorCode::Parse, path + ": expected a 'caps' array");
  std::vector<CapColumns> out;
  for (std::size_t i = 0; i < caps->size(); ++i) {
    const json& c = (*caps)[i];
    const std::string where = path + ": caps[" + std::to_string(i) + "]";
    if (!c.is_object() || !c.contains("column") || !c["column"].is_string())
      throw Error(ErrorCode::Parse, where + ": needs a string 'column'");
    CapColumns cap;
    cap.test_label = c["column"].get<std::string>();
    cap.id = c.value("id", cap.test_label);
    cap.reference_label = c.value("reference_column", cap.test_label);
    cap.inlet = c.value("inlet", false);
    out.push_back(std::move(cap));
  }
  return out;
}

/// Time column and the window of rows to compare, with times shifted into (0, period]
/// when a period is given.
struct Window {
  Eigen::Index first = 0;
  Eigen::Index rows = 0;
  Eigen::VectorXd time;
};

Window window_of(const io::CsvTable& table, std::optional<double> period, const std::string& name) {
  const Eigen::Index tcol = table.column("time");
  if (tcol < 0) throw Exit{kComparisonError, name + " has no 'time' column"};
  if (table.data.rows() < 2) throw Exit{kComparisonError, name + " has fewer than two rows"};
  Window w;
  w.rows = table.data.rows();
  if (period) {
    const double t_end = table.data(table.data.rows() - 1, tcol);
    const double t_start = t_end - *period;
    const double eps = 1e-9 * std::max(1.0, std::abs(t_end));
    while (w.first < table.data.rows() && table.data(w.first, tcol) <= t_start + eps) ++w.first;
    w.rows = table.data.rows() - w.first;
    if (w.rows < 2) throw Exit{kComparisonError, name + " has fewer than two rows in the final period"};
    w.time = table.data.col(tcol).segment(w.first, w.rows).array() - t_start;
  } else {
    w.time = table.data.col(tcol);
  }
  return w;
}

Eigen::VectorXd column_of(const io::CsvTable& table, const Window& w, const std::string& label, const std::string& name) {
  const Eigen::Index c = table.column(label);
  if (c < 0) throw Exit{kComparisonError, name + " has no column '" + label + "'"};
  return table.data.col(c).segment(w.first, w.rows);
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  if (!a.resample.empty() && a.resample != "linear")
    throw Exit{kParseError, "--resample only supports 'linear'"};
  const io::CsvTable test = io::read_csv(a.results);
  const io::CsvTable ref = io::read_csv(a.reference);
  const std::vector<CapColumns> caps = read_cap_map(a.caps);

  const Window wt = window_of(test, a.period, "results");
  const Window wr = window_of(ref, a.period, "reference");

  bool same_grid = wt.rows == wr.rows;
  if (same_grid) {
    const double scale = std::max(1.0, wr.time.cwiseAbs().maxCoeff());
    same_grid = (wt.time - wr.time).cwiseAbs().maxCoeff() <= 1e-9 * scale;
  }
  if (!same_grid && a.resample.empty())
    throw Exit{kComparisonError, "results and reference use different time grids (" + std::to_string(wt.rows) +
                                     " vs " + std::to_string(wr.rows) + " samples); pass --resample linear"};

  std::vector<CapSeries> reference, tested;
  for (const auto& cap : caps) {
    CapSeries r{cap.id, cap.inlet, column_of(ref, wr, cap.reference_label + ":pressure", "reference"),
                column_of(ref, wr, cap.reference_label + ":flow", "reference")};
    CapSeries t{cap.id, cap.inlet, column_of(test, wt, cap.test_label + ":pressure", "results"),
                column_of(test, wt, cap.test_label + ":flow", "results")};
    if (!same_grid) {
      t.pressure = resample_linear(wt.time, t.pressure, wr.time);
      t.flow = resample_linear(wt.time, t.flow, wr.time);
    }
    reference.push_back(std::move(r));
    tested.push_back(std::move(t));
  }

  const ErrorReport rep = cap_errors(reference, tested);
  const json doc{{"pressure_avg", rep.pressure_avg},
                 {"flow_avg", rep.flow_avg},
                 {"pressure_max", rep.pressure_max},
                 {"flow_max", rep.flow_max},
                 {"pressure_sys", rep.pressure_sys},
                 {"flow_sys", rep.flow_sys},
                 {"pressure_dia", rep.pressure_dia},
                 {"flow_dia", rep.flow_dia},
                 {"t_sys", rep.t_sys},
                 {"t_dia", rep.t_dia},
                 {"n_t", wr.rows},
                 {"n_caps", caps.size()},
                 {"resampled", !same_grid},
                 {"systole_definition", "argmax of reference inlet flow"}};
  if (a.output.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    write_json(a.output, doc);
    out << "wrote " << a.output << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string model;
  std::string output = "sweep";
  std::string param;
  std::optional<std::string> values;
  std::string range;
  int jobs = 1;
  SimFlags sim;
};

/// Locates the number addressed by `section.name.key` (or `simulation_parameters.key`).
json* resolve_parameter(json& doc, const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);

  json* target = nullptr;
  if (parts.size() == 2 && parts[0] == "simulation_parameters") {
    if (!doc.contains("simulation_parameters")) doc["simulation_parameters"] = json::object();
    target = &doc["simulation_parameters"][parts[1]];
  } else if (parts.size() == 3 && (parts[0] == "boundary_conditions" || parts[0] == "vessels")) {
    const bool bc = parts[0] == "boundary_conditions";
    if (!doc.contains(parts[0]) || !doc[parts[0]].is_array()) return nullptr;
    for (auto& entry : doc[parts[0]]) {
      const char* name_key = bc ? "bc_name" : "vessel_name";
      const char* values_key = bc ? "bc_values" : "zero_d_element_values";
      const bool match = (entry.contains(name_key) && entry[name_key] == parts[1]) ||
                         (!bc && entry.contains("vessel_id") && entry["vessel_id"].dump() == parts[1]);
      if (!match) continue;
      if (!entry.contains(values_key) || !entry[values_key].contains(parts[2])) return nullptr;
      target = &entry[values_key][parts[2]];
      break;
    }
  }
  if (target == nullptr || !(target->is_number() || target->is_null())) return nullptr;
  return target;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  try {
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(std::stod(p));
  } catch (const std::exception&) {
    parts.clear();
  }
  if (parts.size() != 3 || parts[2] < 1 || parts[2] != std::floor(parts[2]))
    throw Exit{kParseError, "--range must be start:stop:count with count >= 1, got '" + text + "'"};
  const int n = static_cast<int>(parts[2]);
  std::vector<double> out;
  for (int k = 0; k < n; ++k)
    out.push_back(n == 1 ? parts[0] : parts[0] + (parts[1] - parts[0]) * static_cast<double>(k) / (n - 1));
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item.substr(first), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", first + used) != std::string::npos)
      throw Exit{kParseError, "bad sweep value '" + item + "'"};
    out.push_back(v);
  }
  return out;
}

int sweep_parallelism(int requested) {
  int jobs = std::max(1, requested);
  if (const char* env = std::getenv("ZEROD_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) jobs = std::min(jobs, cap);
    } catch (const std::exception&) {
    }
  }
  return jobs;
}

struct SweepRow {
  bool converged = false;
  std::string message;
  double inlet_mean = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> outlet_labels;
  std::vector<double> outlet_means;
  io::CsvTable table;
};

SweepRow sweep_one(const json& base, const std::string& param, double value, const SimFlags& sim) {
  SweepRow row;
  try {
    json doc = base;
    *resolve_parameter(doc, param) = value;
    io::ModelFile model = io::parse_model(doc);
    sim.apply(model.simulation);
    const IntegratorParams params = integrator_params(model);
    RunOptions options;
    options.n_cycles = model.simulation.n_cycles;
    options.store_all_cycles = !sim.last_cycle_only;
    options.warm_start = sim.warm_start;
    const ResultSet res = run_simulation(model.network, params, options);

    const int last = res.n_cycles - 1;
    row.inlet_mean = res.cycle_mean_pressure(last, res.wire_position(res.inlet_wire));
    for (int w : res.outlet_wires) {
      const int pos = res.wire_position(w);
      row.outlet_labels.push_back(res.wires[static_cast<std::size_t>(pos)].label);
      row.outlet_means.push_back(res.cycle_mean_pressure(last, pos));
    }
    row.table = io::results_table(res, sim.last_cycle_only);
    row.converged = true;
  } catch (const std::exception& e) {
    row.message = e.what();
  }
  return row;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> values;
  if (!a.range.empty()) {
    if (a.values) throw Exit{kParseError, "--values and --range are mutually exclusive"};
    values = parse_range(a.range);
  } else if (a.values) {
    values = parse_values(*a.values);
  }
  if (values.empty()) throw Exit{kParseError, "sweep needs at least one value"};

  const json base = io::read_json(a.model);
  {
    json probe = base;
    if (resolve_parameter(probe, a.param) == nullptr)
      throw Exit{kParseError, "parameter path '" + a.param + "' does not name a numeric field of the model"};
    io::ModelFile model = io::parse_model(base);
    require_valid(model.network);
  }

  const int jobs = std::min<int>(sweep_parallelism(a.jobs), static_cast<int>(values.size()));
  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) rows[k] = sweep_one(base, a.param, values[k], a.sim);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const fs::path dir = a.output;
  ensure_directory(dir);

  std::vector<std::string> labels;
  for (const auto& r : rows)
    if (r.converged) {
      labels = r.outlet_labels;
      break;
    }

  std::ofstream summary(dir / "summary.csv");
  if (!summary) throw Exit{kParseError, "cannot write " + (dir / "summary.csv").string()};
  summary << "index,value,converged,inlet_mean_pressure";
  for (const auto& l : labels) summary << ',' << l << ":mean_pressure";
  summary << ",message\n";

  std::size_t ok = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SweepRow& r = rows[k];
    summary << k << ',' << io::format_double(values[k]) << ',' << (r.converged ? 1 : 0) << ','
            << io::format_double(r.inlet_mean);
    for (std::size_t i = 0; i < labels.size(); ++i)
      summary << ','
              << io::format_double(i < r.outlet_means.size() ? r.outlet_means[i]
                                                              : std::numeric_limits<double>::quiet_NaN());
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    summary << ',' << msg << '\n';

    if (r.converged) {
      ++ok;
      char name[32];
      std::snprintf(name, sizeof name, "row_%03zu", k);
      ensure_directory(dir / name);
      io::write_csv(dir / name / "results.csv", r.table);
    } else {
      err << "row " << k << " (value " << io::format_double(values[k]) << ") failed: " << r.message << '\n';
    }
  }
  out << ok << " of " << rows.size() << " rows succeeded, wrote " << (dir / "summary.csv").string() << '\n';
  return ok > 0 ? kOk : kSolverError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lumped-parameter hemodynamics solver and reduced-order model builder", "zerod"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build a model file from a centerline tree");
  build_cmd->add_option("tree", build.tree, "Centerline tree JSON")->required();
  build_cmd->add_option("--bc", build.bc, "Boundary-condition JSON overriding the tree's inlet/outlets");
  build_cmd->add_option("-o,--output", build.output, "Model file to write")->required();
  build_cmd->add_option("--mode", build.mode, "auto or fixed:N")->capture_default_str();
  build_cmd->add_option("--threshold", build.threshold, "Minimum S0/Ss for a stenosis")->capture_default_str();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a model file");
  run_cmd->add_option("model", run.model, "Model JSON")->required();
  run_cmd->add_option("-o,--output", run.output, "Output directory")->capture_default_str();
  run.sim.add_to(run_cmd);
  run_cmd->add_option("--check-periodicity", run.periodicity_tol, "Relative tolerance on cycle-mean outlet pressures");
  run_cmd->add_option("--units", run.units, "Pressure units for the manifest: cgs, mmHg or kPa")->capture_default_str();

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Relative cap errors of results against a reference");
  cmp_cmd->add_option("results", cmp.results, "Results CSV")->required();
  cmp_cmd->add_option("reference", cmp.reference, "Reference CSV")->required();
  cmp_cmd->add_option("--caps", cmp.caps, "Cap map JSON")->required();
  cmp_cmd->add_option("-o,--output", cmp.output, "Report JSON (stdout if omitted)");
  cmp_cmd->add_option("--resample", cmp.resample, "Resample results onto the reference grid (linear)");
  cmp_cmd->add_option("--period", cmp.period, "Compare only the final period of both files");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one simulation per parameter value");
  sweep_cmd->add_option("model", sweep.model, "Model JSON")->required();
  sweep_cmd->add_option("--param", sweep.param, "boundary_conditions.NAME.KEY, vessels.NAME.KEY or "
                                                "simulation_parameters.KEY")
      ->required();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values");
  sweep_cmd->add_option("--range", sweep.range, "start:stop:count, inclusive");
  sweep_cmd->add_option("-j,--jobs", sweep.jobs, "Concurrent simulations (capped by ZEROD_THREADS)")
      ->capture_default_str();
  sweep_cmd->add_option("-o,--output", sweep.output, "Output directory")->capture_default_str();
  sweep.sim.add_to(sweep_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (*build_cmd) return cmd_build(build, out);
    if (*run_cmd) return cmd_run(run, out, err);
    if (*cmp_cmd) return cmd_compare(cmp, out);
    if (*sweep_cmd) return cmd_sweep(sweep, out, err);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
  return kParseError;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace zerod::cli
