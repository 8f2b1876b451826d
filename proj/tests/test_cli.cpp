#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "zerod/cli.hpp"
#include "zerod/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace zerod;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("zerod_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& path, const json& doc) {
  std::ofstream(path) << doc.dump(2);
  return path;
}

/// Summary rows as raw cells; the message column is free text.
std::vector<std::vector<std::string>> summary_rows(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), {}};
}

json single_branch_tree(std::vector<double> areas, bool with_outlet = true) {
  json samples = json::array();
  for (std::size_t i = 0; i < areas.size(); ++i) samples.push_back({0.5 * static_cast<double>(i), areas[i]});
  json tree{{"branches", {{{"id", 0}, {"samples", samples}}}},
            {"inlet", {{"branch", 0}, {"flow", {{"t", {0, 1}}, {"Q", {5, 5}}}}}}};
  tree["outlets"] = json::array();
  if (with_outlet) tree["outlets"].push_back({{"branch", 0}, {"type", "RCR"}, {"values", {{"Rp", 100}, {"C", 1e-4}, {"Rd", 900}}}});
  return tree;
}

/// FLOW -> vessel -> RCR. Steady inlet pressure Q (R + Rp + Rd) + Pd.
json rcr_model(double q, double rd, double pd, int cycles = 1, bool pulsatile = false) {
  json flow = pulsatile ? json{{"t", {0, 0.25, 0.5, 0.75, 1}}, {"Q", {q, 3 * q, q, 0.2 * q, q}}}
                        : json{{"t", {0, 1}}, {"Q", {q, q}}};
  return {{"simulation_parameters", {{"number_of_cardiac_cycles", cycles}, {"number_of_time_pts_per_cardiac_cycle", 100}}},
          {"boundary_conditions",
           {{{"bc_name", "INFLOW"}, {"bc_type", "FLOW"}, {"bc_values", flow}, {"is_inlet", true}},
            {{"bc_name", "OUT"}, {"bc_type", "RCR"}, {"bc_values", {{"Rp", 100}, {"C", 1e-4}, {"Rd", rd}, {"Pd", pd}}}}}},
          {"vessels",
           {{{"vessel_id", 0},
             {"vessel_name", "aorta"},
             {"zero_d_element_values", {{"R_poiseuille", 0.0}}},
             {"boundary_conditions", {{"inlet", "INFLOW"}, {"outlet", "OUT"}}}}}},
          {"junctions", json::array()}};
}

json resistor_model() {
  return {{"boundary_conditions",
           {{{"bc_name", "IN"}, {"bc_type", "FLOW"}, {"bc_values", {{"t", {0, 1}}, {"Q", {2, 2}}}}, {"is_inlet", true}},
            {{"bc_name", "OUT"}, {"bc_type", "PRESSURE"}, {"bc_values", {{"P", 1}}}}}},
          {"vessels",
           {{{"vessel_id", 0},
             {"vessel_name", "V"},
             {"zero_d_element_values", {{"R_poiseuille", 3.0}}},
             {"boundary_conditions", {{"inlet", "IN"}, {"outlet", "OUT"}}}}}},
          {"simulation_parameters", {{"number_of_time_pts_per_cardiac_cycle", 10}}}};
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == cli::kParseError);
  CHECK(invoke({"frobnicate"}).code == cli::kParseError);
  CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("build") {
  const fs::path dir = workdir("build");

  SUBCASE("single plain branch gives one vessel") {
    const auto tree = write(dir / "tree.json", single_branch_tree({4, 4, 4, 4}));
    const Result r = invoke({"build", tree.string(), "-o", (dir / "model.json").string()});
    CHECK(r.code == cli::kOk);
    const io::ModelFile m = io::read_model(dir / "model.json");
    CHECK(m.network.elements.size() == 3);
    CHECK(r.out.find("vessels: 1") != std::string::npos);
  }
  SUBCASE("stenosis is reported") {
    const auto tree = write(dir / "tree.json", single_branch_tree({3.9, 4.0, 3.5, 1.2, 3.4, 4.1, 4.0}));
    const Result r = invoke({"build", tree.string(), "-o", (dir / "model.json").string()});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("S0/Ss = 3.33333") != std::string::npos);
  }
  SUBCASE("output re-reads as the in-memory network") {
    const json doc = single_branch_tree({3.9, 4.0, 3.5, 1.2, 3.4, 4.1, 4.0});
    const auto tree = write(dir / "tree.json", doc);
    REQUIRE(invoke({"build", tree.string(), "-o", (dir / "model.json").string()}).code == cli::kOk);
    const RomBuild rom = build_rom(io::parse_centerline_tree(doc), SegmentationMode::automatic());
    CHECK(io::read_model(dir / "model.json").network == rom.network);
  }
  SUBCASE("fixed mode") {
    std::vector<double> areas;
    for (int i = 0; i < 25; ++i) areas.push_back(3.0 + std::sin(0.4 * i));
    const auto tree = write(dir / "tree.json", single_branch_tree(areas));
    CHECK(invoke({"build", tree.string(), "-o", (dir / "m.json").string(), "--mode", "fixed:10"}).code == cli::kOk);
    int vessels = 0;
    for (const auto& e : io::read_model(dir / "m.json").network.elements) vessels += e.kind() == ElementKind::Vessel;
    CHECK(vessels == 10);
    CHECK(invoke({"build", tree.string(), "-o", (dir / "m.json").string(), "--mode", "fixed:x"}).code == cli::kParseError);
    CHECK(invoke({"build", tree.string(), "-o", (dir / "m.json").string(), "--mode", "fixed:40"}).code ==
          cli::kValidationError);
  }
  SUBCASE("boundary-condition file") {
    const auto tree = write(dir / "tree.json", single_branch_tree({4, 4, 4}, false));
    const auto bcs = write(dir / "bc.json", json{{"outlets", {{{"branch", 0}, {"type", "RESISTANCE"}, {"values", {{"R", 10}}}}}}});
    CHECK(invoke({"build", tree.string(), "--bc", bcs.string(), "-o", (dir / "m.json").string()}).code == cli::kOk);
  }
  SUBCASE("unassigned outlet") {
    const auto tree = write(dir / "tree.json", single_branch_tree({4, 4, 4}, false));
    const Result r = invoke({"build", tree.string(), "-o", (dir / "m.json").string()});
    CHECK(r.code == cli::kValidationError);
    CHECK(r.err.find("outlet branch 0") != std::string::npos);
  }
  SUBCASE("malformed input") {
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(invoke({"build", (dir / "broken.json").string(), "-o", (dir / "m.json").string()}).code == cli::kParseError);
    json doc = single_branch_tree({4, 4});
    doc["branches"][0]["samples"][1][1] = "wide";
    const auto tree = write(dir / "tree.json", doc);
    const Result r = invoke({"build", tree.string(), "-o", (dir / "m.json").string()});
    CHECK(r.code == cli::kParseError);
    CHECK(r.err.find("branches[0].samples[1]") != std::string::npos);
  }
}

TEST_CASE("run") {
  const fs::path dir = workdir("run");

  SUBCASE("resistor model") {
    const auto model = write(dir / "model.json", resistor_model());
    const Result r = invoke({"run", model.string(), "-o", (dir / "out").string()});
    REQUIRE(r.code == cli::kOk);
    const io::CsvTable t = io::read_csv(dir / "out" / "results.csv");
    CHECK(t.columns.size() == 5);
    CHECK(t.data(t.data.rows() - 1, 1) == doctest::Approx(7.0));
    const json manifest = io::read_json(dir / "out" / "manifest.json");
    CHECK(manifest["converged"] == true);
    CHECK(manifest["newton"]["steps"] == 10);
    CHECK(manifest.contains("wall_clock_s"));
  }
  SUBCASE("periodicity report") {
    const auto model = write(dir / "model.json", rcr_model(5, 900, 0, 1, true));
    const Result r = invoke({"run", model.string(), "-o", dir.string(), "--cycles", "6", "--check-periodicity", "0.01"});
    REQUIRE(r.code == cli::kOk);
    const json p = io::read_json(dir / "manifest.json")["periodicity"];
    CHECK(p["tolerance"] == 0.01);
    CHECK(p["deltas"].size() == 1);
    CHECK(p["converged"].is_boolean());
    CHECK(invoke({"run", model.string(), "-o", dir.string(), "--check-periodicity", "0.01"}).code == cli::kValidationError);
  }
  SUBCASE("units and last cycle") {
    const auto model = write(dir / "model.json", rcr_model(5, 900, 0, 3));
    REQUIRE(invoke({"run", model.string(), "-o", dir.string(), "--units", "mmHg", "--last-cycle-only", "--warm-start"}).code ==
            cli::kOk);
    const json m = io::read_json(dir / "manifest.json");
    for (const auto& [label, value] : m["last_cycle_mean_pressure"].items())
      if (label.rfind("INFLOW", 0) == 0) CHECK(value.get<double>() == doctest::Approx(5000.0 / 1333.22).epsilon(1e-9));
    CHECK(io::read_csv(dir / "results.csv").data.rows() == 100);
    CHECK(invoke({"run", model.string(), "-o", dir.string(), "--units", "psi"}).code == cli::kParseError);
  }
  SUBCASE("missing and invalid models") {
    CHECK(invoke({"run", (dir / "nope.json").string()}).code == cli::kParseError);
    json doc = resistor_model();
    doc["vessels"][0]["zero_d_element_values"]["R_poiseuille"] = -1.0;
    const auto model = write(dir / "bad.json", doc);
    CHECK(invoke({"run", model.string(), "-o", dir.string()}).code == cli::kValidationError);
    CHECK(invoke({"run", write(dir / "m.json", resistor_model()).string(), "--rho-inf", "2"}).code == cli::kValidationError);
  }
  SUBCASE("solver failure is recorded") {
    json doc = rcr_model(5, 900, 0, 1, true);
    doc["vessels"][0]["zero_d_element_values"]["stenosis_coefficient"] = 50.0;
    const auto model = write(dir / "model.json", doc);
    const Result r = invoke({"run", model.string(), "-o", dir.string(), "--max-newton-iters", "1", "--abs-tol", "1e-300",
                          "--rel-tol", "1e-300"});
    CHECK(r.code == cli::kSolverError);
    const json m = io::read_json(dir / "manifest.json");
    CHECK(m["converged"] == false);
    CHECK(m["failure"]["kind"] == "NewtonDivergence");
    CHECK(m["failure"]["step"] == 0);
  }
}

TEST_CASE("compare") {
  const fs::path dir = workdir("compare");
  const auto model = write(dir / "model.json", rcr_model(5, 900, 0, 2, true));
  REQUIRE(invoke({"run", model.string(), "-o", (dir / "a").string(), "--last-cycle-only"}).code == cli::kOk);
  REQUIRE(invoke({"run", model.string(), "-o", (dir / "b").string(), "--last-cycle-only", "--steps-per-cycle", "50"}).code ==
          cli::kOk);
  const io::CsvTable t = io::read_csv(dir / "a" / "results.csv");
  const std::string in = t.columns[1].substr(0, t.columns[1].find(':'));
  const std::string out = t.columns[3].substr(0, t.columns[3].find(':'));
  const auto caps = write(dir / "caps.json", json{{"caps",
                                                   {{{"id", "inlet"}, {"column", in}, {"inlet", true}},
                                                    {{"id", "outlet"}, {"column", out}}}}});
  const std::string a = (dir / "a" / "results.csv").string(), b = (dir / "b" / "results.csv").string();

  SUBCASE("self comparison is zero") {
    const Result r = invoke({"compare", a, a, "--caps", caps.string(), "-o", (dir / "report.json").string()});
    REQUIRE(r.code == cli::kOk);
    const json rep = io::read_json(dir / "report.json");
    for (const char* key : {"pressure_avg", "pressure_max", "pressure_sys", "pressure_dia", "flow_avg", "flow_max",
                            "flow_sys", "flow_dia"})
      CHECK(rep[key] == 0.0);
    CHECK(rep["n_t"] == 100);
    CHECK(rep.contains("t_sys"));
  }
  SUBCASE("grid mismatch needs resampling") {
    CHECK(invoke({"compare", b, a, "--caps", caps.string()}).code == cli::kComparisonError);
    const Result r = invoke({"compare", b, a, "--caps", caps.string(), "--resample", "linear"});
    CHECK(r.code == cli::kOk);
    const json rep = json::parse(r.out);
    CHECK(rep["resampled"] == true);
    CHECK(rep["pressure_avg"].get<double>() > 0.0);
    CHECK(rep["pressure_avg"].get<double>() < 0.05);
    CHECK(invoke({"compare", b, a, "--caps", caps.string(), "--resample", "cubic"}).code == cli::kParseError);
  }
  SUBCASE("unknown column") {
    const auto bad = write(dir / "bad.json", json{{"caps", {{{"id", "x"}, {"column", "nope"}, {"inlet", true}}}}});
    CHECK(invoke({"compare", a, a, "--caps", bad.string()}).code == cli::kComparisonError);
  }
}

TEST_CASE("sweep") {
  const fs::path dir = workdir("sweep");
  const auto model = write(dir / "model.json", rcr_model(5, 900, 0));

  SUBCASE("steady closure per row") {
    const Result r = invoke({"sweep", model.string(), "--param", "boundary_conditions.OUT.Rd", "--values", "900,1800", "-o",
                          (dir / "s").string(), "--warm-start"});
    REQUIRE(r.code == cli::kOk);
    const auto rows = summary_rows(dir / "s" / "summary.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][3] == "inlet_mean_pressure");
    CHECK(std::stod(rows[1][3]) == doctest::Approx(5000.0).epsilon(1e-8));
    CHECK(std::stod(rows[2][3]) == doctest::Approx(9500.0).epsilon(1e-8));
    CHECK(rows[2][1] == "1800");
    CHECK(fs::exists(dir / "s" / "row_001" / "results.csv"));
  }
  SUBCASE("parallelism does not change the output") {
    const std::vector<std::string> base = {"sweep", model.string(), "--param", "boundary_conditions.OUT.Rd",
                                           "--range", "500:2000:7"};
    auto with = [&](const std::string& jobs, const std::string& out) {
      auto args = base;
      args.insert(args.end(), {"-j", jobs, "-o", (dir / out).string()});
      return invoke(args).code;
    };
    REQUIRE(with("1", "j1") == cli::kOk);
    REQUIRE(with("4", "j4") == cli::kOk);
    CHECK(slurp(dir / "j1" / "summary.csv") == slurp(dir / "j4" / "summary.csv"));
    CHECK(slurp(dir / "j1" / "row_006" / "results.csv") == slurp(dir / "j4" / "row_006" / "results.csv"));
  }
  SUBCASE("vessel and simulation parameters") {
    CHECK(invoke({"sweep", model.string(), "--param", "vessels.aorta.R_poiseuille", "--values", "0,10", "-o",
               (dir / "v").string()}).code == cli::kOk);
    CHECK(invoke({"sweep", model.string(), "--param", "simulation_parameters.spectral_radius", "--values", "0,1", "-o",
               (dir / "p").string()}).code == cli::kOk);
  }
  SUBCASE("errors") {
    CHECK(invoke({"sweep", model.string(), "--param", "boundary_conditions.OUT.Rd", "--values", "", "-o", dir.string()}).code ==
          cli::kParseError);
    CHECK(invoke({"sweep", model.string(), "--param", "boundary_conditions.NOPE.Rd", "--values", "1", "-o", dir.string()}).code ==
          cli::kParseError);
    // Every row invalid: negative capacitance fails validation inside each row.
    const Result r = invoke({"sweep", model.string(), "--param", "boundary_conditions.OUT.C", "--values", "-1,-2", "-o",
                          (dir / "f").string()});
    CHECK(r.code == cli::kSolverError);
    const auto rows = summary_rows(dir / "f" / "summary.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][2] == "0");
    CHECK_FALSE(rows[1].back().empty());
  }
}
