#include "sidewinder/config.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "sidewinder/errors.hpp"

namespace sidewinder {

namespace {

using nlohmann::json;

constexpr double kDegree = 3.14159265358979323846 / 180.0;

int line_of_offset(const std::string& text, size_t byte) {
  int line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

std::string joined(std::initializer_list<const char*> keys) {
  std::string out;
  for (const char* k : keys) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw SchemaError("field '" + path + "': expected an object");
  for (const auto& item : obj.items()) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&](const char* k) { return item.key() == k; });
    if (!known)
      throw SchemaError("unknown key '" + item.key() + "' in '" + path +
                        "' (allowed: " + joined(allowed) + ")");
  }
}

double get_num(const json& obj, const std::string& path, const char* key,
               double def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw SchemaError("field '" + path + "." + key + "': expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key,
            int def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw SchemaError("field '" + path + "." + key + "': expected an integer");
  return v.get<int>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_string())
    throw SchemaError("field '" + path + "." + key + "': expected a string");
  return v.get<std::string>();
}

std::vector<double> get_num_list(const json& obj, const std::string& path,
                                 const char* key, std::vector<double> def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_array())
    throw SchemaError("field '" + path + "." + key +
                      "': expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number())
      throw SchemaError("field '" + path + "." + key +
                        "': expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "flat_sweep") return ExperimentKind::FlatSweep;
  if (name == "spacing_sweep") return ExperimentKind::SpacingSweep;
  if (name == "gait_sweep") return ExperimentKind::GaitSweep;
  if (name == "single") return ExperimentKind::Single;
  throw SchemaError(
      "field 'experiment': expected one of flat_sweep, spacing_sweep, "
      "gait_sweep, single; got '" +
      name + "'");
}

std::vector<double> default_compliance(ExperimentKind kind) {
  if (kind == ExperimentKind::FlatSweep)
    return {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  return {0.0, 0.5, 1.0};
}

std::vector<double> default_spacings(ExperimentKind kind) {
  if (kind == ExperimentKind::SpacingSweep)
    return {0.60, 0.65, 0.70, 0.75, 0.80};
  return {0.70};
}

std::vector<RunConfig::GaitPair> default_gait_grid() {
  return {{82.5, 1.1}, {75.0, 1.0}, {67.5, 0.9}};
}

}  // namespace

GaitParams RunConfig::gait_params() const {
  GaitParams params;
  params.amplitude_h = gait.amplitude_h_deg * kDegree;
  params.spatial_freq_h = gait.spatial_freq_h;
  params.amplitude_v = gait.amplitude_v_deg * kDegree;
  params.spatial_freq_v = gait.spatial_freq_v;
  params.omega = gait.omega_cps;
  return params;
}

CableGeometry RunConfig::cable_geometry() const {
  CableGeometry geom;
  geom.attach_lateral = cable.attach_lateral_m;
  geom.attach_longitudinal = cable.attach_longitudinal_m;
  geom.slack_rate = cable.slack_rate_m_per_rad;
  geom.alpha_limit = cable.alpha_limit_deg * kDegree;
  return geom;
}

void RunConfig::validate() const {
  if (schema_version != 1)
    throw RangeError("config.schema_version: only version 1 is understood");
  robot.validate();
  gait_params().validate();
  cable_geometry().validate();
  solver.validate();
  if (compliance_grid.empty())
    throw RangeError("config.compliance.grid is empty");
  for (double g : compliance_grid) CompliancePolicy{g}.validate();
  if (env.mu <= 0.0) throw RangeError("config.environment.mu <= 0");
  if (env.board_length_m <= 0.0 || env.board_width_m <= 0.0)
    throw RangeError("config.environment board dimensions must be > 0");
  if (env.spacings_m.empty())
    throw RangeError("config.environment.spacings_m is empty");
  for (double d : env.spacings_m)
    if (d <= 0.0) throw RangeError("config.environment.spacings_m entry <= 0");
  if (env.pegs_per_row < 2)
    throw RangeError("config.environment.pegs_per_row < 2");
  if (env.peg_radius_m <= 0.0)
    throw RangeError("config.environment.peg_radius_m <= 0");
  if (gait_grid.empty()) throw RangeError("config.gait_grid is empty");
  if (single.ic_index < 0 || single.ic_index >= kInitialConditions)
    throw RangeError("config.single.ic_index outside the battery's pose set");
  CompliancePolicy{single.G}.validate();
  if (single.spacing_m <= 0.0) throw RangeError("config.single.spacing_m <= 0");
  if (output_dir.empty()) throw RangeError("config.output_dir is empty");
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw SchemaError("config is not valid JSON (line " +
                      std::to_string(line_of_offset(text, err.byte)) +
                      "): " + err.what());
  }
  check_keys(doc, "config",
             {"schema_version", "experiment", "output_dir", "seed", "robot",
              "gait", "cable", "solver", "compliance", "environment",
              "gait_grid", "single"});

  RunConfig cfg;
  cfg.schema_version = get_int(doc, "config", "schema_version", 1);
  cfg.experiment = parse_kind(get_str(doc, "config", "experiment", "single"));
  cfg.output_dir = get_str(doc, "config", "output_dir", "out");
  cfg.seed = get_int(doc, "config", "seed", 0);

  if (doc.contains("robot")) {
    const json& r = doc.at("robot");
    check_keys(r, "robot",
               {"n_modules", "module_length_m", "module_radius_m",
                "total_length_m", "vertical_joints", "mass_kg",
                "contact_threshold_m"});
    cfg.robot.n_modules = get_int(r, "robot", "n_modules", cfg.robot.n_modules);
    cfg.robot.module_length =
        get_num(r, "robot", "module_length_m", cfg.robot.module_length);
    cfg.robot.module_radius =
        get_num(r, "robot", "module_radius_m", cfg.robot.module_radius);
    cfg.robot.total_length =
        get_num(r, "robot", "total_length_m", cfg.robot.total_length);
    cfg.robot.mass_total = get_num(r, "robot", "mass_kg", cfg.robot.mass_total);
    cfg.robot.contact_threshold = get_num(r, "robot", "contact_threshold_m",
                                          cfg.robot.contact_threshold);
    if (r.contains("vertical_joints")) {
      const json& v = r.at("vertical_joints");
      if (!v.is_array())
        throw SchemaError(
            "field 'robot.vertical_joints': expected an array of integers");
      cfg.robot.vertical_joints.clear();
      for (const json& e : v) {
        if (!e.is_number_integer())
          throw SchemaError(
              "field 'robot.vertical_joints': expected an array of integers");
        cfg.robot.vertical_joints.insert(e.get<int>());
      }
    }
  }

  if (doc.contains("gait")) {
    const json& g = doc.at("gait");
    check_keys(g, "gait",
               {"amplitude_h_deg", "spatial_freq_h", "amplitude_v_deg",
                "spatial_freq_v", "omega_cps"});
    cfg.gait.amplitude_h_deg =
        get_num(g, "gait", "amplitude_h_deg", cfg.gait.amplitude_h_deg);
    cfg.gait.spatial_freq_h =
        get_num(g, "gait", "spatial_freq_h", cfg.gait.spatial_freq_h);
    cfg.gait.amplitude_v_deg =
        get_num(g, "gait", "amplitude_v_deg", cfg.gait.amplitude_v_deg);
    cfg.gait.spatial_freq_v =
        get_num(g, "gait", "spatial_freq_v", cfg.gait.spatial_freq_v);
    cfg.gait.omega_cps = get_num(g, "gait", "omega_cps", cfg.gait.omega_cps);
  }

  if (doc.contains("cable")) {
    const json& c = doc.at("cable");
    check_keys(c, "cable",
               {"attach_lateral_m", "attach_longitudinal_m",
                "slack_rate_m_per_rad", "alpha_limit_deg"});
    cfg.cable.attach_lateral_m =
        get_num(c, "cable", "attach_lateral_m", cfg.cable.attach_lateral_m);
    cfg.cable.attach_longitudinal_m = get_num(
        c, "cable", "attach_longitudinal_m", cfg.cable.attach_longitudinal_m);
    cfg.cable.slack_rate_m_per_rad = get_num(c, "cable", "slack_rate_m_per_rad",
                                             cfg.cable.slack_rate_m_per_rad);
    cfg.cable.alpha_limit_deg =
        get_num(c, "cable", "alpha_limit_deg", cfg.cable.alpha_limit_deg);
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    check_keys(s, "solver",
               {"w_stick", "w_track", "w_track_slack", "w_prev",
                "slip_tolerance_m", "slip_downweight", "max_slip_iters",
                "max_peg_iters", "kkt_tol", "kkt_stall_tol",
                "penetration_tol_m", "steps_per_cycle"});
    SolverParams& p = cfg.solver;
    p.w_stick = get_num(s, "solver", "w_stick", p.w_stick);
    p.w_track = get_num(s, "solver", "w_track", p.w_track);
    p.w_track_slack = get_num(s, "solver", "w_track_slack", p.w_track_slack);
    p.w_prev = get_num(s, "solver", "w_prev", p.w_prev);
    p.slip_tolerance = get_num(s, "solver", "slip_tolerance_m", p.slip_tolerance);
    p.slip_downweight =
        get_num(s, "solver", "slip_downweight", p.slip_downweight);
    p.max_slip_iters = get_int(s, "solver", "max_slip_iters", p.max_slip_iters);
    p.max_peg_iters = get_int(s, "solver", "max_peg_iters", p.max_peg_iters);
    p.kkt_tol = get_num(s, "solver", "kkt_tol", p.kkt_tol);
    p.kkt_stall_tol = get_num(s, "solver", "kkt_stall_tol", p.kkt_stall_tol);
    p.penetration_tol =
        get_num(s, "solver", "penetration_tol_m", p.penetration_tol);
    p.steps_per_cycle = get_int(s, "solver", "steps_per_cycle", p.steps_per_cycle);
  }

  cfg.compliance_grid = default_compliance(cfg.experiment);
  if (doc.contains("compliance")) {
    const json& c = doc.at("compliance");
    check_keys(c, "compliance", {"grid"});
    cfg.compliance_grid =
        get_num_list(c, "compliance", "grid", cfg.compliance_grid);
  }

  cfg.env.spacings_m = default_spacings(cfg.experiment);
  if (doc.contains("environment")) {
    const json& e = doc.at("environment");
    check_keys(e, "environment",
               {"mu", "board_length_m", "board_width_m", "obstacle_line_y_m",
                "spacings_m", "pegs_per_row", "peg_radius_m"});
    cfg.env.mu = get_num(e, "environment", "mu", cfg.env.mu);
    cfg.env.board_length_m =
        get_num(e, "environment", "board_length_m", cfg.env.board_length_m);
    cfg.env.board_width_m =
        get_num(e, "environment", "board_width_m", cfg.env.board_width_m);
    cfg.env.obstacle_line_y_m = get_num(e, "environment", "obstacle_line_y_m",
                                        cfg.env.obstacle_line_y_m);
    cfg.env.spacings_m =
        get_num_list(e, "environment", "spacings_m", cfg.env.spacings_m);
    cfg.env.pegs_per_row =
        get_int(e, "environment", "pegs_per_row", cfg.env.pegs_per_row);
    cfg.env.peg_radius_m =
        get_num(e, "environment", "peg_radius_m", cfg.env.peg_radius_m);
  }

  cfg.gait_grid = default_gait_grid();
  if (doc.contains("gait_grid")) {
    const json& g = doc.at("gait_grid");
    if (!g.is_array())
      throw SchemaError("field 'gait_grid': expected an array of objects");
    cfg.gait_grid.clear();
    for (const json& e : g) {
      check_keys(e, "gait_grid[]", {"amplitude_h_deg", "spatial_freq_h"});
      RunConfig::GaitPair pair;
      pair.amplitude_h_deg =
          get_num(e, "gait_grid[]", "amplitude_h_deg", pair.amplitude_h_deg);
      pair.spatial_freq_h =
          get_num(e, "gait_grid[]", "spatial_freq_h", pair.spatial_freq_h);
      cfg.gait_grid.push_back(pair);
    }
  }

  if (doc.contains("single")) {
    const json& s = doc.at("single");
    check_keys(s, "single", {"G", "spacing_m", "ic_index"});
    cfg.single.G = get_num(s, "single", "G", cfg.single.G);
    cfg.single.spacing_m = get_num(s, "single", "spacing_m", cfg.single.spacing_m);
    cfg.single.ic_index = get_int(s, "single", "ic_index", cfg.single.ic_index);
  }

  cfg.validate();
  return cfg;
}

std::string echo_config(const RunConfig& cfg) {
  json doc;
  doc["schema_version"] = cfg.schema_version;
  doc["experiment"] = to_string(cfg.experiment);
  doc["output_dir"] = cfg.output_dir;
  doc["seed"] = cfg.seed;
  doc["robot"] = {
      {"n_modules", cfg.robot.n_modules},
      {"module_length_m", cfg.robot.module_length},
      {"module_radius_m", cfg.robot.module_radius},
      {"total_length_m", cfg.robot.total_length},
      {"vertical_joints",
       std::vector<int>(cfg.robot.vertical_joints.begin(),
                        cfg.robot.vertical_joints.end())},
      {"mass_kg", cfg.robot.mass_total},
      {"contact_threshold_m", cfg.robot.contact_threshold},
  };
  doc["gait"] = {
      {"amplitude_h_deg", cfg.gait.amplitude_h_deg},
      {"spatial_freq_h", cfg.gait.spatial_freq_h},
      {"amplitude_v_deg", cfg.gait.amplitude_v_deg},
      {"spatial_freq_v", cfg.gait.spatial_freq_v},
      {"omega_cps", cfg.gait.omega_cps},
  };
  doc["cable"] = {
      {"attach_lateral_m", cfg.cable.attach_lateral_m},
      {"attach_longitudinal_m", cfg.cable.attach_longitudinal_m},
      {"slack_rate_m_per_rad", cfg.cable.slack_rate_m_per_rad},
      {"alpha_limit_deg", cfg.cable.alpha_limit_deg},
  };
  doc["solver"] = {
      {"w_stick", cfg.solver.w_stick},
      {"w_track", cfg.solver.w_track},
      {"w_track_slack", cfg.solver.w_track_slack},
      {"w_prev", cfg.solver.w_prev},
      {"slip_tolerance_m", cfg.solver.slip_tolerance},
      {"slip_downweight", cfg.solver.slip_downweight},
      {"max_slip_iters", cfg.solver.max_slip_iters},
      {"max_peg_iters", cfg.solver.max_peg_iters},
      {"kkt_tol", cfg.solver.kkt_tol},
      {"kkt_stall_tol", cfg.solver.kkt_stall_tol},
      {"penetration_tol_m", cfg.solver.penetration_tol},
      {"steps_per_cycle", cfg.solver.steps_per_cycle},
  };
  doc["compliance"] = {{"grid", cfg.compliance_grid}};
  doc["environment"] = {
      {"mu", cfg.env.mu},
      {"board_length_m", cfg.env.board_length_m},
      {"board_width_m", cfg.env.board_width_m},
      {"obstacle_line_y_m", cfg.env.obstacle_line_y_m},
      {"spacings_m", cfg.env.spacings_m},
      {"pegs_per_row", cfg.env.pegs_per_row},
      {"peg_radius_m", cfg.env.peg_radius_m},
  };
  doc["gait_grid"] = json::array();
  for (const RunConfig::GaitPair& pair : cfg.gait_grid)
    doc["gait_grid"].push_back({{"amplitude_h_deg", pair.amplitude_h_deg},
                                {"spatial_freq_h", pair.spatial_freq_h}});
  doc["single"] = {
      {"G", cfg.single.G},
      {"spacing_m", cfg.single.spacing_m},
      {"ic_index", cfg.single.ic_index},
  };
  return doc.dump(2) + "\n";
}

std::pair<ExperimentKind, std::vector<TrialSpec>> build_specs(
    const RunConfig& cfg) {
  cfg.validate();
  const GaitParams gait = cfg.gait_params();
  const CableGeometry cable = cfg.cable_geometry();
  RowLayout layout;
  layout.pegs_per_row = cfg.env.pegs_per_row;
  layout.peg_radius = cfg.env.peg_radius_m;
  layout.y_line = cfg.env.obstacle_line_y_m;
  layout.board_length = cfg.env.board_length_m;
  layout.board_width = cfg.env.board_width_m;

  std::vector<TrialSpec> specs;
  switch (cfg.experiment) {
    case ExperimentKind::FlatSweep:
      specs = flat_sweep_specs(cfg.robot, cable, gait, cfg.solver, cfg.env.mu,
                               cfg.compliance_grid);
      break;
    case ExperimentKind::SpacingSweep:
      specs = spacing_sweep_specs(cfg.robot, cable, gait, cfg.solver,
                                  cfg.env.mu, cfg.compliance_grid,
                                  cfg.env.spacings_m, layout);
      break;
    case ExperimentKind::GaitSweep: {
      std::vector<std::pair<double, double>> grid;
      for (const RunConfig::GaitPair& pair : cfg.gait_grid)
        grid.emplace_back(pair.amplitude_h_deg * kDegree,
                          pair.spatial_freq_h);
      specs = gait_sweep_specs(cfg.robot, cable, gait, cfg.solver, cfg.env.mu,
                               grid, cfg.compliance_grid, cfg.env.spacings_m,
                               layout);
      break;
    }
    case ExperimentKind::Single:
      specs = {single_spec(cfg.robot, cable, gait, cfg.solver, cfg.env.mu,
                           cfg.single.G, cfg.single.spacing_m,
                           cfg.single.ic_index, layout)};
      break;
  }
  for (TrialSpec& spec : specs) spec.seed = cfg.seed;
  return {cfg.experiment, std::move(specs)};
}

}  // namespace sidewinder
