#include "zerod/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "zerod/error.hpp"
#include "zerod/network_builder.hpp"
#include "zerod/units.hpp"

namespace zerod::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Parse, where + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) parse_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_error(where + "." + key, "missing field");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) parse_error(where + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

int integer(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) parse_error(where + "." + key, "expected an integer");
  return v.get<int>();
}

int integer_or(const json& obj, const std::string& key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return integer(obj, key, where);
}

std::string text(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) parse_error(where + "." + key, "expected a string");
  return v.get<std::string>();
}

Eigen::VectorXd number_array(const json& v, const std::string& where) {
  if (!v.is_array()) parse_error(where, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) parse_error(where + "[" + std::to_string(i) + "]", "expected a number");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

std::vector<int> int_array(const json& v, const std::string& where) {
  if (!v.is_array()) parse_error(where, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) parse_error(where + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

TimeSeries series(const json& values, const std::string& key, double scale, const std::string& where) {
  Eigen::VectorXd t = number_array(field(values, "t", where), where + ".t");
  Eigen::VectorXd v = number_array(field(values, key, where), where + "." + key);
  try {
    return TimeSeries(std::move(t), v * scale);
  } catch (const Error& e) {
    parse_error(where, e.what());
  }
}

json series_json(const TimeSeries& ts, const std::string& key) {
  return {{"t", std::vector<double>(ts.times().begin(), ts.times().end())},
          {key, std::vector<double>(ts.values().begin(), ts.values().end())}};
}

ElementParams parse_bc_values(const std::string& type, const json& values, units::PressureUnit unit,
                              const std::string& where) {
  using units::to_cgs_capacitance;
  using units::to_cgs_pressure;
  using units::to_cgs_resistance;
  const std::string kind = upper(type);
  if (kind == "FLOW") return FlowParams{series(values, "Q", 1.0, where)};
  if (kind == "PRESSURE") return PressureParams{to_cgs_pressure(number(values, "P", where), unit)};
  if (kind == "RESISTANCE")
    return ResistanceParams{to_cgs_resistance(number(values, "R", where), unit),
                            to_cgs_pressure(number_or(values, "Pd", 0.0, where), unit)};
  if (kind == "RCR")
    return WindkesselParams{to_cgs_resistance(number(values, "Rp", where), unit),
                            to_cgs_capacitance(number(values, "C", where), unit),
                            to_cgs_resistance(number(values, "Rd", where), unit),
                            to_cgs_pressure(number_or(values, "Pd", 0.0, where), unit)};
  if (kind == "CORONARY") {
    CoronaryParams p;
    p.arterial_resistance = to_cgs_resistance(number(values, "Ra", where), unit);
    p.microvascular_resistance = to_cgs_resistance(number(values, "Ram", where), unit);
    p.venous_resistance = to_cgs_resistance(number(values, "Rv", where), unit);
    p.arterial_capacitance = to_cgs_capacitance(number(values, "Ca", where), unit);
    p.intramyocardial_capacitance = to_cgs_capacitance(number(values, "Cim", where), unit);
    p.venous_pressure = to_cgs_pressure(number_or(values, "Pv", 0.0, where), unit);
    p.intramyocardial_pressure = series(values, "Pim", units::pressure_scale(unit), where);
    if (values.contains("Ca_reference")) {
      const std::string ref = upper(text(values, "Ca_reference", where));
      if (ref == "GROUND") p.arterial_reference = CoronaryReference::Ground;
      else if (ref == "PIM" || ref == "INTRAMYOCARDIAL") p.arterial_reference = CoronaryReference::Intramyocardial;
      else parse_error(where + ".Ca_reference", "expected 'ground' or 'Pim'");
    }
    return p;
  }
  parse_error(where, "unknown boundary condition type '" + type + "'");
}

units::PressureUnit unit_of(const json& obj, const std::string& where) {
  if (!obj.contains("units")) return units::PressureUnit::CGS;
  try {
    return units::parse_pressure_unit(text(obj, "units", where));
  } catch (const Error& e) {
    parse_error(where + ".units", e.what());
  }
}

struct BcJson {
  std::string type;
  json values;
};

BcJson bc_to_json(const ElementParams& params) {
  return std::visit(
      [](const auto& p) -> BcJson {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FlowParams>) {
          return {"FLOW", series_json(p.flow, "Q")};
        } else if constexpr (std::is_same_v<T, PressureParams>) {
          return {"PRESSURE", {{"P", p.pressure}}};
        } else if constexpr (std::is_same_v<T, ResistanceParams>) {
          return {"RESISTANCE", {{"R", p.resistance}, {"Pd", p.distal_pressure}}};
        } else if constexpr (std::is_same_v<T, WindkesselParams>) {
          return {"RCR",
                  {{"Rp", p.proximal_resistance}, {"C", p.capacitance}, {"Rd", p.distal_resistance},
                   {"Pd", p.distal_pressure}}};
        } else if constexpr (std::is_same_v<T, CoronaryParams>) {
          json v = series_json(p.intramyocardial_pressure, "Pim");
          v["Ra"] = p.arterial_resistance;
          v["Ram"] = p.microvascular_resistance;
          v["Rv"] = p.venous_resistance;
          v["Ca"] = p.arterial_capacitance;
          v["Cim"] = p.intramyocardial_capacitance;
          v["Pv"] = p.venous_pressure;
          v["Ca_reference"] = p.arterial_reference == CoronaryReference::Ground ? "ground" : "Pim";
          return {"CORONARY", v};
        } else {
          throw Error(ErrorCode::InvalidNetwork, "not a boundary condition");
        }
      },
      params);
}

}  // namespace

ElementParams parse_boundary_condition(const json& bc, const std::string& where) {
  return parse_bc_values(text(bc, "type", where), field(bc, "values", where), unit_of(bc, where), where + ".values");
}

ModelFile parse_model(const json& doc) {
  if (!doc.is_object()) parse_error("model", "expected a JSON object");
  ModelFile model;

  if (doc.contains("simulation_parameters")) {
    const json& sp = doc["simulation_parameters"];
    const std::string w = "simulation_parameters";
    auto& s = model.simulation;
    s.n_cycles = integer_or(sp, "number_of_cardiac_cycles", s.n_cycles, w);
    s.steps_per_cycle = integer_or(sp, "number_of_time_pts_per_cardiac_cycle", s.steps_per_cycle, w);
    s.spectral_radius = number_or(sp, "spectral_radius", s.spectral_radius, w);
    s.max_newton_iters = integer_or(sp, "maximum_nonlinear_iterations", s.max_newton_iters, w);
    s.newton_abs_tol = number_or(sp, "absolute_tolerance", s.newton_abs_tol, w);
    s.newton_rel_tol = number_or(sp, "relative_tolerance", s.newton_rel_tol, w);
    model.network.fluid.density = number_or(sp, "density", model.network.fluid.density, w);
    model.network.fluid.viscosity = number_or(sp, "viscosity", model.network.fluid.viscosity, w);
  }

  NetworkBuilder builder(model.network.fluid);

  std::map<std::string, int> bc_index;
  std::optional<int> inlet;
  const json& bcs = field(doc, "boundary_conditions", "model");
  if (!bcs.is_array()) parse_error("boundary_conditions", "expected an array");
  for (std::size_t i = 0; i < bcs.size(); ++i) {
    const std::string w = "boundary_conditions[" + std::to_string(i) + "]";
    const std::string name = text(bcs[i], "bc_name", w);
    ElementParams params =
        parse_bc_values(text(bcs[i], "bc_type", w), field(bcs[i], "bc_values", w), unit_of(bcs[i], w), w + ".bc_values");
    if (bc_index.count(name)) parse_error(w + ".bc_name", "duplicate name '" + name + "'");
    const int idx = builder.add_boundary_condition(name, std::move(params));
    bc_index[name] = idx;
    if (bcs[i].contains("is_inlet")) {
      const json& flag = bcs[i]["is_inlet"];
      if (!flag.is_boolean()) parse_error(w + ".is_inlet", "expected a boolean");
      if (flag.get<bool>()) {
        if (inlet) parse_error(w + ".is_inlet", "more than one inlet");
        inlet = idx;
      }
    }
  }
  if (inlet) builder.set_inlet(*inlet);

  std::map<int, int> vessel_index;
  std::map<std::string, int> vessel_by_name;
  const json& vessels = field(doc, "vessels", "model");
  if (!vessels.is_array()) parse_error("vessels", "expected an array");
  auto lookup_bc = [&](const std::string& name, const std::string& w) {
    auto it = bc_index.find(name);
    if (it == bc_index.end()) parse_error(w, "unknown boundary condition '" + name + "'");
    return it->second;
  };
  for (std::size_t i = 0; i < vessels.size(); ++i) {
    const std::string w = "vessels[" + std::to_string(i) + "]";
    const json& v = vessels[i];
    const int id = integer(v, "vessel_id", w);
    const std::string name = v.contains("vessel_name") ? text(v, "vessel_name", w) : "V" + std::to_string(id);
    if (v.contains("zero_d_element_type") && text(v, "zero_d_element_type", w) != "BloodVessel")
      parse_error(w + ".zero_d_element_type", "only BloodVessel is supported");
    const json& values = field(v, "zero_d_element_values", w);
    const std::string vw = w + ".zero_d_element_values";
    VesselParams p{number_or(values, "R_poiseuille", 0.0, vw), number_or(values, "C", 0.0, vw),
                   number_or(values, "L", 0.0, vw), number_or(values, "stenosis_coefficient", 0.0, vw)};
    if (vessel_index.count(id)) parse_error(w + ".vessel_id", "duplicate id " + std::to_string(id));
    if (vessel_by_name.count(name)) parse_error(w + ".vessel_name", "duplicate name '" + name + "'");
    const int idx = builder.add_vessel(name, p);
    vessel_index[id] = idx;
    vessel_by_name[name] = idx;

    if (v.contains("boundary_conditions")) {
      const json& ends = v["boundary_conditions"];
      const std::string bw = w + ".boundary_conditions";
      try {
        if (ends.contains("inlet")) builder.attach_inlet_bc(idx, lookup_bc(text(ends, "inlet", bw), bw + ".inlet"));
        if (ends.contains("outlet")) builder.attach_outlet_bc(idx, lookup_bc(text(ends, "outlet", bw), bw + ".outlet"));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) throw;
        parse_error(bw, e.what());
      }
    }
  }

  if (doc.contains("junctions")) {
    const json& junctions = doc["junctions"];
    if (!junctions.is_array()) parse_error("junctions", "expected an array");
    for (std::size_t i = 0; i < junctions.size(); ++i) {
      const std::string w = "junctions[" + std::to_string(i) + "]";
      const json& j = junctions[i];
      auto resolve = [&](const std::string& key) {
        std::vector<int> out;
        for (int id : int_array(field(j, key, w), w + "." + key)) {
          auto it = vessel_index.find(id);
          if (it == vessel_index.end()) parse_error(w + "." + key, "unknown vessel id " + std::to_string(id));
          out.push_back(it->second);
        }
        return out;
      };
      const std::string name = j.contains("junction_name") ? text(j, "junction_name", w) : "J" + std::to_string(i);
      try {
        builder.add_junction(name, resolve("inlet_vessels"), resolve("outlet_vessels"));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) throw;
        parse_error(w, e.what());
      }
    }
  }

  try {
    model.network = builder.build();
  } catch (const Error& e) {
    parse_error("model", e.what());
  }
  return model;
}

ModelFile read_model(const std::filesystem::path& path) { return parse_model(read_json(path)); }

json model_to_json(const ModelFile& model) {
  const NetworkModel& net = model.network;

  // Which element sits at the other end of every wire.
  std::map<int, const ElementSpec*> upstream, downstream;
  for (const auto& e : net.elements) {
    for (int w : e.outlet_wires) upstream[w] = &e;
    for (int w : e.inlet_wires) downstream[w] = &e;
  }
  auto other = [](const std::map<int, const ElementSpec*>& m, int w) -> const ElementSpec* {
    auto it = m.find(w);
    if (it == m.end()) throw Error(ErrorCode::InvalidNetwork, "wire " + std::to_string(w) + " is open");
    return it->second;
  };

  json doc;
  json& bcs = doc["boundary_conditions"] = json::array();
  json& vessels = doc["vessels"] = json::array();
  json& junctions = doc["junctions"] = json::array();
  json one_to_one = json::array();

  for (const auto& e : net.elements) {
    switch (e.kind()) {
      case ElementKind::Vessel: {
        const auto& p = std::get<VesselParams>(e.params);
        json v{{"vessel_id", e.id},
               {"vessel_name", e.name},
               {"zero_d_element_type", "BloodVessel"},
               {"zero_d_element_values",
                {{"R_poiseuille", p.resistance}, {"C", p.capacitance}, {"L", p.inductance},
                 {"stenosis_coefficient", p.stenosis_coefficient}}}};
        json ends = json::object();
        if (e.inlet_wires.size() != 1 || e.outlet_wires.size() != 1)
          throw Error(ErrorCode::InvalidNetwork, "vessel '" + e.name + "' needs one inlet and one outlet");
        const ElementSpec* up = other(upstream, e.inlet_wires[0]);
        const ElementSpec* down = other(downstream, e.outlet_wires[0]);
        if (up->is_boundary_condition()) ends["inlet"] = up->name;
        if (down->is_boundary_condition()) ends["outlet"] = down->name;
        if (down->kind() == ElementKind::Vessel)
          one_to_one.push_back({{"junction_name", net.find_wire(e.outlet_wires[0])->label},
                                {"inlet_vessels", {e.id}},
                                {"outlet_vessels", {down->id}}});
        if (!ends.empty()) v["boundary_conditions"] = ends;
        vessels.push_back(v);
        break;
      }
      case ElementKind::Junction: {
        json in = json::array(), out = json::array();
        for (int w : e.inlet_wires) {
          const ElementSpec* up = other(upstream, w);
          if (up->kind() != ElementKind::Vessel)
            throw Error(ErrorCode::InvalidNetwork, "junction '" + e.name + "' must connect vessels only");
          in.push_back(up->id);
        }
        for (int w : e.outlet_wires) {
          const ElementSpec* down = other(downstream, w);
          if (down->kind() != ElementKind::Vessel)
            throw Error(ErrorCode::InvalidNetwork, "junction '" + e.name + "' must connect vessels only");
          out.push_back(down->id);
        }
        junctions.push_back({{"junction_name", e.name}, {"inlet_vessels", in}, {"outlet_vessels", out}});
        break;
      }
      default: {
        for (int w : e.inlet_wires)
          if (other(upstream, w)->kind() != ElementKind::Vessel)
            throw Error(ErrorCode::InvalidNetwork, "boundary condition '" + e.name + "' must attach to a vessel");
        for (int w : e.outlet_wires)
          if (other(downstream, w)->kind() != ElementKind::Vessel)
            throw Error(ErrorCode::InvalidNetwork, "boundary condition '" + e.name + "' must attach to a vessel");
        BcJson b = bc_to_json(e.params);
        json entry{{"bc_name", e.name}, {"bc_type", b.type}, {"bc_values", b.values}};
        if (e.id == net.inlet_bc_id) entry["is_inlet"] = true;
        bcs.push_back(entry);
        break;
      }
    }
  }
  // Vessel ids must survive the round trip, so they have to be 0..n-1 in element order.
  for (std::size_t i = 0; i < vessels.size(); ++i)
    if (vessels[i]["vessel_id"].get<int>() != static_cast<int>(i))
      throw Error(ErrorCode::InvalidNetwork, "vessels must be the first elements, numbered from 0");
  for (auto& j : one_to_one) junctions.push_back(j);

  const auto& s = model.simulation;
  doc["simulation_parameters"] = {{"number_of_cardiac_cycles", s.n_cycles},
                                  {"number_of_time_pts_per_cardiac_cycle", s.steps_per_cycle},
                                  {"spectral_radius", s.spectral_radius},
                                  {"maximum_nonlinear_iterations", s.max_newton_iters},
                                  {"absolute_tolerance", s.newton_abs_tol},
                                  {"relative_tolerance", s.newton_rel_tol},
                                  {"density", net.fluid.density},
                                  {"viscosity", net.fluid.viscosity}};
  return doc;
}

void write_model(const std::filesystem::path& path, const ModelFile& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
}

CenterlineTree parse_centerline_tree(const json& tree, const json* bcs) {
  if (!tree.is_object()) parse_error("tree", "expected a JSON object");
  CenterlineTree out;

  if (tree.contains("fluid")) {
    const json& f = tree["fluid"];
    out.fluid.density = number_or(f, "density", out.fluid.density, "fluid");
    out.fluid.viscosity = number_or(f, "viscosity", out.fluid.viscosity, "fluid");
  }
  if (tree.contains("wall")) out.wall.stiffness = number_or(tree["wall"], "stiffness", out.wall.stiffness, "wall");

  const json& branches = field(tree, "branches", "tree");
  if (!branches.is_array()) parse_error("branches", "expected an array");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string w = "branches[" + std::to_string(i) + "]";
    BranchProfile b;
    b.branch_id = integer(branches[i], "id", w);
    const json& samples = field(branches[i], "samples", w);
    if (!samples.is_array()) parse_error(w + ".samples", "expected an array of [s, area] pairs");
    b.path_length.resize(static_cast<Eigen::Index>(samples.size()));
    b.area.resize(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const std::string sw = w + ".samples[" + std::to_string(k) + "]";
      const json& pair = samples[k];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        parse_error(sw, "expected [s, area]");
      b.path_length[static_cast<Eigen::Index>(k)] = pair[0].get<double>();
      b.area[static_cast<Eigen::Index>(k)] = pair[1].get<double>();
    }
    try {
      b.validate();
    } catch (const Error& e) {
      parse_error(w, e.what());
    }
    out.branches.push_back(std::move(b));
  }

  if (tree.contains("junctions")) {
    const json& js = tree["junctions"];
    if (!js.is_array()) parse_error("junctions", "expected an array");
    for (std::size_t i = 0; i < js.size(); ++i) {
      const std::string w = "junctions[" + std::to_string(i) + "]";
      CenterlineJunction j;
      j.id = integer_or(js[i], "id", static_cast<int>(i), w);
      j.inlet_branches = int_array(field(js[i], "inlets", w), w + ".inlets");
      j.outlet_branches = int_array(field(js[i], "outlets", w), w + ".outlets");
      out.junctions.push_back(std::move(j));
    }
  }

  const json& source = (bcs != nullptr && bcs->contains("inlet")) ? *bcs : tree;
  const std::string src = (&source == bcs) ? "bc" : "tree";
  const json& inlet = field(source, "inlet", src);
  out.inlet_branch = integer(inlet, "branch", src + ".inlet");
  out.inflow = series(field(inlet, "flow", src + ".inlet"), "Q", 1.0, src + ".inlet.flow");

  const json* outlets_src = (bcs != nullptr && bcs->contains("outlets")) ? bcs : &tree;
  const std::string osrc = (outlets_src == bcs) ? "bc" : "tree";
  if (outlets_src->contains("outlets")) {
    const json& os = (*outlets_src)["outlets"];
    if (!os.is_array()) parse_error(osrc + ".outlets", "expected an array");
    for (std::size_t i = 0; i < os.size(); ++i) {
      const std::string w = osrc + ".outlets[" + std::to_string(i) + "]";
      const int branch = integer(os[i], "branch", w);
      if (out.outlets.count(branch)) parse_error(w + ".branch", "outlet assigned twice");
      out.outlets.emplace(branch, parse_boundary_condition(os[i], w));
    }
  }
  return out;
}

CenterlineTree read_centerline_tree(const std::filesystem::path& tree_path,
                                    const std::optional<std::filesystem::path>& bc_path) {
  const json tree = read_json(tree_path);
  if (!bc_path) return parse_centerline_tree(tree);
  const json bcs = read_json(*bc_path);
  return parse_centerline_tree(tree, &bcs);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

Eigen::Index CsvTable::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<Eigen::Index>(it - columns.begin());
}

namespace {
std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t k = 0;
  while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
  return s.substr(k);
}
}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, path.string() + ": empty file");
  for (auto& c : split(trim(line), ',')) table.columns.push_back(trim(c));

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != table.columns.size())
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.columns.size()) + " cells");
    for (const auto& c : cells) {
      const std::string cell = trim(c);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      values.push_back(v);
    }
    ++rows;
  }
  const auto n_cols = static_cast<Eigen::Index>(table.columns.size());
  table.data = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(rows), n_cols);
  return table;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path.string());
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (Eigen::Index r = 0; r < table.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.data.cols(); ++c) out << (c ? "," : "") << format_double(table.data(r, c));
    out << '\n';
  }
}

CsvTable results_table(const ResultSet& results, bool last_cycle_only) {
  Eigen::Index first = 0, last = results.solution.rows() - 1;
  if (last_cycle_only) {
    const auto rows = results.cycle_rows(results.n_cycles - 1);
    if (!rows) throw Error(ErrorCode::InsufficientCycles, "last cycle was not stored");
    first = rows->first + 1;  // end-of-step samples only
    last = rows->second;
  }
  CsvTable table;
  table.columns.push_back("time");
  for (const auto& w : results.wires) {
    table.columns.push_back(w.label + ":pressure");
    table.columns.push_back(w.label + ":flow");
  }
  const Eigen::Index n = last - first + 1;
  table.data.resize(n, static_cast<Eigen::Index>(table.columns.size()));
  table.data.col(0) = results.time.segment(first, n);
  for (std::size_t k = 0; k < results.wires.size(); ++k) {
    const auto& d = results.dofs.wire(results.wires[k].id);
    table.data.col(static_cast<Eigen::Index>(2 * k + 1)) = results.solution.col(d.pressure).segment(first, n);
    table.data.col(static_cast<Eigen::Index>(2 * k + 2)) = results.solution.col(d.flow).segment(first, n);
  }
  return table;
}

}  // namespace zerod::io
