#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sidewinder/cable.hpp"
#include "sidewinder/environment.hpp"
#include "sidewinder/gait.hpp"
#include "sidewinder/kinematics.hpp"
#include "sidewinder/metrics.hpp"
#include "sidewinder/solver.hpp"

namespace sidewinder {

// Experiment protocol constants. These are part of the measurement
// definition, not tuning knobs: changing any of them changes what the
// reported numbers mean.
//
// kTrialStartPhase is the gait phase (fraction of a cycle) at which the
// robot is set down, applied identically to heading calibration and every
// obstacle trial. Outcomes are deterministic but phase-sensitive, so the
// protocol fixes one value for the whole suite. Flat sweeps measure the
// settled gait, where the start phase is immaterial; they start at zero.
inline constexpr double kTrialStartPhase = 0.600;
inline constexpr double kStandoff = 0.9;        // m, COM to obstacle line
inline constexpr int kMaxCycles = 10;           // traverse budget
inline constexpr int kSettleCycles = 2;         // flat sweep: discarded
inline constexpr int kMeasureCycles = 3;        // flat sweep: measured
inline constexpr int kCalibrationCycles = 3;    // open-field drift window
inline constexpr int kInitialConditions = 5;    // poses per battery cell

struct TrialSpec {
  RobotConfig robot;
  CableGeometry cable;
  GaitParams gait;
  double G = 0.0;
  Environment env;
  PlanarPose initial_pose;
  int max_cycles = kMaxCycles;
  int settle_cycles = 0;     // leading cycles excluded from metrics
  SolverParams solver;
  double start_phase = 0.0;  // fraction of a cycle at t = 0
  int seed = 0;
  int ic_index = -1;         // battery pose index; -1 outside batteries
  std::string label;

  void validate() const;  // throws RangeError
};

// One solver step of a logged trajectory.
struct TrajectoryRecord {
  double t = 0.0;
  double phase = 0.0;
  PlanarPose base;
  std::vector<double> alpha;   // radians, body order
  std::vector<int> contacts;   // 0-based module indices on the ground
  double slip_total = 0.0;     // m, summed over contacts this step
  double work_increment = 0.0; // J
};

using TrajectoryLog = std::vector<TrajectoryRecord>;

// A sweep row ties a trial's outcome to the condition that produced it.
struct SweepRow {
  std::string label;
  double G = 0.0;
  double amplitude_h = 0.0;       // radians
  double spatial_freq_h = 0.0;
  std::optional<double> spacing;  // m; empty for flat trials
  int ic_index = -1;              // -1 for flat trials
  TrialResult result;
};

// Per-condition aggregate. Metric means/stds are over successful trials
// (sample std, zero for a single trial); traverse_probability is
// successes / trials for obstacle groups and empty for flat groups.
struct AggregateRow {
  std::string group;
  double G = 0.0;
  std::optional<double> spacing;
  int n_trials = 0;
  int n_success = 0;
  std::optional<double> traverse_probability;
  std::optional<double> mean_cycles, std_cycles;
  std::optional<double> mean_displacement, std_displacement;
  std::optional<double> mean_speed, std_speed;
  std::optional<double> mean_work, std_work;
  std::optional<double> mean_cot, std_cot;
  std::optional<double> mean_reorientation, std_reorientation;
};

enum class ExperimentKind { FlatSweep, SpacingSweep, GaitSweep, Single };

const char* to_string(ExperimentKind kind);

struct SweepResult {
  ExperimentKind kind = ExperimentKind::Single;
  std::vector<SweepRow> rows;             // sorted by label
  std::vector<AggregateRow> aggregates;   // grouped, deterministic order
  double wavelength = 0.0;                // displayed wavelength of the
                                          // sweep's gait, for plot axes
};

// Angle between the +x body axis and the mean marker drift direction over
// kCalibrationCycles open-field cycles from a centered start pose.
// Deterministic; propagates solver errors.
double calibrate_heading(const RobotConfig& robot, const CableGeometry& cable,
                         const GaitParams& gait, double G, double mu,
                         const SolverParams& solver,
                         double start_phase = kTrialStartPhase);

// Start poses for an obstacle battery: body axis rotated so the open-field
// drift (measured by calibrate_heading) points square at the obstacle line,
// COM kStandoff before the line, lateral offsets spanning one spacing
// period symmetrically ({-d/2, -d/4, 0, d/4, d/2} for n = 5).
std::vector<PlanarPose> initial_conditions(const RobotConfig& robot,
                                           const GaitParams& gait,
                                           const Environment& env, int n,
                                           double calibration_angle,
                                           double start_phase);

// Steps one trial to traverse, failure, or the cycle budget.
//   success: every module center past the obstacle line;
//   jam: COM advanced less than the jam threshold over a completed cycle,
//        or the solver could not find an equilibrium (diagnostic recorded);
//   timeout: budget exhausted, or any module center left the board in x
//            (the trial ran out of room instead of cycles).
// Flat environments run the full budget and report metrics only; the
// board rule and failure modes apply only when an obstacle line exists.
// Never throws on solver failure; config errors still throw.
TrialResult run_trial(const TrialSpec& spec, TrajectoryLog* trace = nullptr);

// Runs independent trials (possibly on several threads), then reduces
// deterministically: rows sorted by label, aggregates grouped in label
// order (per (spacing, G) cells first, then per-G pools for obstacle
// sweeps). Results are identical for any parallelism >= 1.
SweepResult run_sweep(ExperimentKind kind, const std::vector<TrialSpec>& specs,
                      int parallelism);

// Obstacle-row layout shared by the battery builders.
struct RowLayout {
  int pegs_per_row = 4;
  double peg_radius = 0.025;  // m
  double y_line = 1.0;        // m, obstacle line
  double board_length = 2.4;  // m
  double board_width = 1.2;   // m
};

// Experiment builders. Obstacle builders run one heading calibration per
// (gait, G) and lay out kInitialConditions poses per spacing; the peg count
// per row is reduced below the requested count only when the row would not
// fit the board.
std::vector<TrialSpec> flat_sweep_specs(const RobotConfig& robot,
                                        const CableGeometry& cable,
                                        const GaitParams& gait,
                                        const SolverParams& solver, double mu,
                                        const std::vector<double>& G_grid);

std::vector<TrialSpec> spacing_sweep_specs(
    const RobotConfig& robot, const CableGeometry& cable,
    const GaitParams& gait, const SolverParams& solver, double mu,
    const std::vector<double>& G_grid, const std::vector<double>& spacings,
    const RowLayout& layout);

std::vector<TrialSpec> gait_sweep_specs(
    const RobotConfig& robot, const CableGeometry& cable,
    const GaitParams& base_gait, const SolverParams& solver, double mu,
    const std::vector<std::pair<double, double>>& gait_grid,  // (A_H, xi_H)
    const std::vector<double>& G_grid, const std::vector<double>& spacings,
    const RowLayout& layout);

TrialSpec single_spec(const RobotConfig& robot, const CableGeometry& cable,
                      const GaitParams& gait, const SolverParams& solver,
                      double mu, double G, double spacing, int ic_index,
                      const RowLayout& layout);

}  // namespace sidewinder
