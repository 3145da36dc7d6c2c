#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sidewinder/harness.hpp"

namespace sidewinder {

// Experiment configuration as written in the JSON file. Angles are degrees
// here (file convention) and converted to radians when specs are built;
// trajectory logs are radians. Every field has a default, and the echo
// written next to results records all of them explicitly.
struct RunConfig {
  int schema_version = 1;
  ExperimentKind experiment = ExperimentKind::Single;
  std::string output_dir = "out";
  int seed = 0;

  RobotConfig robot;

  struct Gait {
    double amplitude_h_deg = 75.0;
    double spatial_freq_h = 1.0;
    double amplitude_v_deg = 25.0;
    double spatial_freq_v = 1.0;
    double omega_cps = 0.25;
  } gait;

  struct Cable {
    double attach_lateral_m = 0.025;
    double attach_longitudinal_m = 0.025;
    double slack_rate_m_per_rad = 0.0418;
    double alpha_limit_deg = 90.0;
  } cable;

  SolverParams solver;

  // Defaults depend on the experiment: the flat sweep uses the full G grid
  // {0 .. 1.5} in steps of 0.25, obstacle batteries use {0, 0.5, 1}.
  std::vector<double> compliance_grid;

  struct Env {
    double mu = 0.7;
    double board_length_m = 2.4;
    double board_width_m = 1.2;
    double obstacle_line_y_m = 1.0;
    // Default {0.60 .. 0.80} for the spacing sweep, {0.70} for the gait
    // sweep and single trials.
    std::vector<double> spacings_m;
    int pegs_per_row = 4;
    double peg_radius_m = 0.025;
  } env;

  struct GaitPair {
    double amplitude_h_deg = 75.0;
    double spatial_freq_h = 1.0;
  };
  std::vector<GaitPair> gait_grid;  // default: the three tested pairs

  struct Single {
    double G = 1.0;
    double spacing_m = 0.70;
    int ic_index = 2;  // centered pose
  } single;

  GaitParams gait_params() const;      // radians
  CableGeometry cable_geometry() const;

  void validate() const;  // throws RangeError
};

// Parses and validates a JSON config document. Missing fields take their
// defaults (experiment-dependent where noted above); unknown keys and type
// mismatches throw SchemaError with the field path and line; out-of-range
// values throw RangeError.
RunConfig parse_config(const std::string& text);

// Canonical JSON echo with every resolved value explicit (keys sorted,
// two-space indent). parse_config(echo_config(c)) reproduces c exactly.
std::string echo_config(const RunConfig& config);

// Builds the trial list the configured experiment runs.
std::pair<ExperimentKind, std::vector<TrialSpec>> build_specs(
    const RunConfig& config);

}  // namespace sidewinder
