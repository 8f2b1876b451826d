#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "zerod/integrator.hpp"
#include "zerod/network.hpp"
#include "zerod/rom_builder.hpp"

namespace zerod::io {

struct SimulationParameters {
  int n_cycles = 1;
  int steps_per_cycle = 1000;
  double spectral_radius = 0.0;
  int max_newton_iters = 30;
  double newton_abs_tol = 1.0e-8;
  double newton_rel_tol = 1.0e-5;

  bool operator==(const SimulationParameters&) const = default;
};

/// Model file contents. Sections: boundary_conditions, vessels, junctions,
/// simulation_parameters.
struct ModelFile {
  NetworkModel network;
  SimulationParameters simulation;

  bool operator==(const ModelFile&) const = default;
};

/// All parse failures throw Error(Parse) with the offending field path.
ModelFile parse_model(const nlohmann::json& doc);
ModelFile read_model(const std::filesystem::path& path);
/// Throws Error(InvalidNetwork) for networks without a vessel-centric form, e.g. a
/// boundary condition wired straight into a junction.
nlohmann::json model_to_json(const ModelFile& model);
void write_model(const std::filesystem::path& path, const ModelFile& model);

/// Centerline tree plus optional boundary-condition file whose `inlet` and `outlets`
/// entries override those of the tree file.
CenterlineTree parse_centerline_tree(const nlohmann::json& tree, const nlohmann::json* bcs = nullptr);
CenterlineTree read_centerline_tree(const std::filesystem::path& tree_path,
                                    const std::optional<std::filesystem::path>& bc_path = std::nullopt);

/// Parses a boundary-condition record {"type": ..., "values": {...}, "units": ...}.
ElementParams parse_boundary_condition(const nlohmann::json& bc, const std::string& where);

nlohmann::json read_json(const std::filesystem::path& path);

/// Header-plus-numbers CSV.
struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd data;  // rows x columns

  Eigen::Index column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// "%.17g" rendering, exact on re-read.
std::string format_double(double v);

/// Columns: time, then <label>:pressure, <label>:flow for every wire. CGS units.
CsvTable results_table(const ResultSet& results, bool last_cycle_only = false);

}  // namespace zerod::io
