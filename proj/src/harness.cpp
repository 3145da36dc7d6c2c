#include "sidewinder/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <thread>

#include "sidewinder/errors.hpp"

namespace sidewinder {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* f, ...) {
  char buf[160];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<AngleInterval> joint_intervals(const TrialSpec& spec,
                                           const std::vector<double>& cmd) {
  const CompliancePolicy policy{spec.G};
  std::vector<AngleInterval> iv(spec.robot.n_joints());
  for (int j = 1; j <= spec.robot.n_joints(); ++j) {
    if (spec.robot.is_vertical(j))
      iv[j - 1] = {cmd[j - 1], cmd[j - 1]};
    else
      iv[j - 1] = admissible_interval_for(spec.cable, policy,
                                          spec.gait.amplitude_h, cmd[j - 1]);
  }
  return iv;
}

Eigen::Vector2d marker_mean(const RobotConfig& robot,
                            const std::vector<Frame>& frames) {
  return planar_center(robot, frames);
}

// Sum of marker-mean step norms between consecutive samples: the body's
// transport distance at cycle resolution, the denominator of cot.
double transport_distance(const RobotConfig& robot,
                          const std::vector<BodyState>& samples) {
  double total = 0.0;
  for (size_t i = 1; i < samples.size(); ++i)
    total += (marker_mean(robot, samples[i].frames) -
              marker_mean(robot, samples[i - 1].frames))
                 .norm();
  return total;
}

bool any_module_off_board(const RobotConfig& robot, const Environment& env,
                          const std::vector<Frame>& frames) {
  for (int m = 0; m < robot.n_modules; ++m) {
    const double x = frames[m].p.x();
    if (x < 0.0 || x > env.board_length) return true;
  }
  return false;
}

Environment fit_peg_row(double spacing, const RowLayout& layout, double mu) {
  for (int c = layout.pegs_per_row; c >= 2; --c) {
    try {
      return make_peg_row(spacing, c, layout.y_line, layout.peg_radius, mu,
                          layout.board_length, layout.board_width);
    } catch (const BoundsExceeded&) {
      if (c == 2) throw;
    }
  }
  throw BoundsExceeded("fit_peg_row: requested fewer than two pegs");
}

struct Calibrations {
  std::vector<double> G;
  std::vector<double> angle;
  double of(double g) const {
    for (size_t i = 0; i < G.size(); ++i)
      if (G[i] == g) return angle[i];
    throw RangeError("calibration missing for requested G");
  }
};

Calibrations calibrate_grid(const RobotConfig& robot,
                            const CableGeometry& cable, const GaitParams& gait,
                            const SolverParams& solver, double mu,
                            const std::vector<double>& G_grid) {
  Calibrations cal;
  for (double g : G_grid) {
    cal.G.push_back(g);
    cal.angle.push_back(calibrate_heading(robot, cable, gait, g, mu, solver));
  }
  return cal;
}

std::string gait_tag(const GaitParams& gait) {
  return fmt("aH%.1f-xi%.2f", gait.amplitude_h * 180.0 / kPi,
             gait.spatial_freq_h);
}

void append_obstacle_specs(std::vector<TrialSpec>& out,
                           const RobotConfig& robot,
                           const CableGeometry& cable, const GaitParams& gait,
                           const SolverParams& solver, double mu,
                           const std::vector<double>& G_grid,
                           const std::vector<double>& spacings,
                           const RowLayout& layout, bool tag_gait) {
  const Calibrations cal =
      calibrate_grid(robot, cable, gait, solver, mu, G_grid);
  for (double d : spacings) {
    const Environment env = fit_peg_row(d, layout, mu);
    for (double g : G_grid) {
      const std::vector<PlanarPose> poses = initial_conditions(
          robot, gait, env, kInitialConditions, cal.of(g), kTrialStartPhase);
      for (size_t ic = 0; ic < poses.size(); ++ic) {
        TrialSpec spec;
        spec.robot = robot;
        spec.cable = cable;
        spec.gait = gait;
        spec.G = g;
        spec.env = env;
        spec.initial_pose = poses[ic];
        spec.solver = solver;
        spec.start_phase = kTrialStartPhase;
        spec.ic_index = int(ic);
        spec.label = fmt("%sd%.2f-G%.2f-ic%zu",
                         tag_gait ? (gait_tag(gait) + "-").c_str() : "", d, g,
                         ic);
        out.push_back(std::move(spec));
      }
    }
  }
}

struct SuccessStats {
  int n = 0;
  double sum[6] = {}, sumsq[6] = {};
  void add(const TrialResult& r) {
    ++n;
    const double v[6] = {r.cycles_to_traverse, r.displacement_per_cycle,
                         r.speed_bl_per_cycle, r.work_total, r.cot,
                         r.reorientation};
    for (int i = 0; i < 6; ++i) {
      sum[i] += v[i];
      sumsq[i] += v[i] * v[i];
    }
  }
  void fill(AggregateRow& row) const {
    if (n == 0) return;
    double mean[6], sd[6];
    for (int i = 0; i < 6; ++i) {
      mean[i] = sum[i] / n;
      const double var =
          n > 1 ? std::max(0.0, (sumsq[i] - n * mean[i] * mean[i]) / (n - 1))
                : 0.0;
      sd[i] = std::sqrt(var);
    }
    row.mean_cycles = mean[0];
    row.std_cycles = sd[0];
    row.mean_displacement = mean[1];
    row.std_displacement = sd[1];
    row.mean_speed = mean[2];
    row.std_speed = sd[2];
    row.mean_work = mean[3];
    row.std_work = sd[3];
    row.mean_cot = mean[4];
    row.std_cot = sd[4];
    row.mean_reorientation = mean[5];
    row.std_reorientation = sd[5];
  }
};

// Groups sorted rows by key extracted per row, preserving first-seen order.
template <typename KeyFn>
std::vector<AggregateRow> group_rows(const std::vector<SweepRow>& rows,
                                     bool obstacle, KeyFn key_of) {
  std::vector<std::string> order;
  std::vector<std::vector<const SweepRow*>> buckets;
  for (const SweepRow& row : rows) {
    const std::string key = key_of(row);
    size_t i = 0;
    for (; i < order.size(); ++i)
      if (order[i] == key) break;
    if (i == order.size()) {
      order.push_back(key);
      buckets.emplace_back();
    }
    buckets[i].push_back(&row);
  }
  std::vector<AggregateRow> out;
  for (size_t i = 0; i < order.size(); ++i) {
    AggregateRow agg;
    agg.group = order[i];
    agg.G = buckets[i].front()->G;
    agg.spacing = buckets[i].front()->spacing;
    for (const SweepRow* row : buckets[i]) {
      if (row->spacing != agg.spacing) agg.spacing.reset();
      ++agg.n_trials;
      if (row->result.success) ++agg.n_success;
    }
    if (obstacle)
      agg.traverse_probability = double(agg.n_success) / agg.n_trials;
    SuccessStats stats;
    for (const SweepRow* row : buckets[i])
      if (row->result.success || !obstacle) stats.add(row->result);
    stats.fill(agg);
    out.push_back(agg);
  }
  return out;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::FlatSweep: return "flat_sweep";
    case ExperimentKind::SpacingSweep: return "spacing_sweep";
    case ExperimentKind::GaitSweep: return "gait_sweep";
    case ExperimentKind::Single: return "single";
  }
  return "single";
}

void TrialSpec::validate() const {
  robot.validate();
  cable.validate();
  gait.validate();
  solver.validate();
  env.validate();
  CompliancePolicy{G}.validate();
  if (max_cycles < 1) throw RangeError("trial.max_cycles < 1");
  if (settle_cycles < 0 || settle_cycles >= max_cycles)
    throw RangeError("trial.settle_cycles outside [0, max_cycles)");
  if (!(start_phase >= 0.0 && start_phase < 1.0))
    throw RangeError("trial.start_phase outside [0, 1)");
}

double calibrate_heading(const RobotConfig& robot, const CableGeometry& cable,
                         const GaitParams& gait, double G, double mu,
                         const SolverParams& solver, double start_phase) {
  TrialSpec probe;
  probe.robot = robot;
  probe.cable = cable;
  probe.gait = gait;
  probe.G = G;
  probe.env = Environment::flat(mu);
  probe.solver = solver;
  probe.start_phase = start_phase;
  probe.validate();

  const double t0 = start_phase / gait.omega;
  const double dt = 1.0 / (gait.omega * solver.steps_per_cycle);
  const CommandFrame cmd0 = joint_commands(gait, robot, t0);
  BodyState state = make_state(robot, {probe.env.board_length / 2,
                                       probe.env.board_width / 2, 0.0},
                               command_vector(robot, cmd0), t0);
  const std::vector<Eigen::Vector2d> m0 = markers(robot, state.frames);
  for (int k = 1; k <= kCalibrationCycles * solver.steps_per_cycle; ++k) {
    const CommandFrame cmd = joint_commands(gait, robot, t0 + k * dt);
    const StepSolution sol =
        solve_step(robot, state, cmd,
                   joint_intervals(probe, command_vector(robot, cmd)),
                   probe.env, solver);
    state = sol.new_state;
  }
  const std::vector<Eigen::Vector2d> m1 = markers(robot, state.frames);
  Eigen::Vector2d drift = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < m0.size(); ++i) drift += m1[i] - m0[i];
  drift /= double(m0.size());
  return std::atan2(drift.y(), drift.x());
}

std::vector<PlanarPose> initial_conditions(const RobotConfig& robot,
                                           const GaitParams& gait,
                                           const Environment& env, int n,
                                           double calibration_angle,
                                           double start_phase) {
  if (n < 1) throw RangeError("initial_conditions: n < 1");
  if (!env.obstacle_line || !env.peg_spacing)
    throw RangeError("initial_conditions: environment has no obstacle row");
  const double d = *env.peg_spacing;
  const double theta0 = kPi / 2 - calibration_angle;

  // COM offset of the start shape, so the poses place the COM exactly.
  const double t0 = start_phase / gait.omega;
  const std::vector<double> alpha0 =
      command_vector(robot, joint_commands(gait, robot, t0));
  const BodyState shape = make_state(robot, {0.0, 0.0, theta0}, alpha0, t0);
  const Eigen::Vector2d c = planar_center(robot, shape.frames);

  std::vector<PlanarPose> poses;
  for (int i = 0; i < n; ++i) {
    const double off = n == 1 ? 0.0 : -d / 2 + i * d / (n - 1);
    poses.push_back({env.board_length / 2 + off - c.x(),
                     *env.obstacle_line - kStandoff - c.y(), theta0});
  }
  return poses;
}

TrialResult run_trial(const TrialSpec& spec, TrajectoryLog* trace) {
  spec.validate();
  const RobotConfig& robot = spec.robot;
  const int spc = spec.solver.steps_per_cycle;
  const double t0 = spec.start_phase / spec.gait.omega;
  const double dt = 1.0 / (spec.gait.omega * spc);
  const bool obstacle = spec.env.obstacle_line.has_value();
  const double y_line = obstacle ? *spec.env.obstacle_line : 0.0;

  const CommandFrame cmd0 = joint_commands(spec.gait, robot, t0);
  BodyState state =
      make_state(robot, spec.initial_pose, command_vector(robot, cmd0), t0);

  TrialResult result;
  std::vector<BodyState> samples{state};  // cycle boundaries (+ final partial)
  int cycle_samples = 1;                  // how many sit exactly on boundaries
  double work = 0.0;
  Eigen::Vector2d cycle_start = planar_center(robot, state.frames);
  bool ended = false;

  for (int k = 1; k <= spec.max_cycles * spc && !ended; ++k) {
    const CommandFrame cmd = joint_commands(spec.gait, robot, t0 + k * dt);
    try {
      const StepSolution sol =
          solve_step(robot, state, cmd,
                     joint_intervals(spec, command_vector(robot, cmd)),
                     spec.env, spec.solver);
      state = sol.new_state;
      if (k > spec.settle_cycles * spc) work += sol.work_increment;
      if (trace) {
        TrajectoryRecord rec;
        rec.t = t0 + k * dt;
        rec.phase = cmd.phase;
        rec.base = state.base;
        rec.alpha = state.alpha;
        rec.contacts = state.contacts;
        rec.slip_total = sol.slip.size() ? sol.slip.sum() : 0.0;
        rec.work_increment = sol.work_increment;
        trace->push_back(std::move(rec));
      }
    } catch (const SolverError& err) {
      result.failure_mode = FailureMode::Jam;
      result.solver_failed = true;
      result.cycles_to_traverse = double(k) / spc;
      result.diagnostic = err.what();
      ended = true;
      break;
    }

    if (obstacle && body_cleared(robot, state.frames, y_line)) {
      samples.push_back(state);
      if (k % spc == 0) ++cycle_samples;
      result.success = true;
      result.cycles_to_traverse = double(k) / spc;
      ended = true;
      break;
    }
    if (obstacle && any_module_off_board(robot, spec.env, state.frames)) {
      samples.push_back(state);
      if (k % spc == 0) ++cycle_samples;
      result.failure_mode = FailureMode::Timeout;
      result.cycles_to_traverse = double(k) / spc;
      result.diagnostic = "left the board in x before the obstacle line";
      ended = true;
      break;
    }
    if (k % spc == 0) {
      samples.push_back(state);
      ++cycle_samples;
      const Eigen::Vector2d c = planar_center(robot, state.frames);
      if (obstacle && (c - cycle_start).norm() < kJamThreshold) {
        result.failure_mode = FailureMode::Jam;
        result.cycles_to_traverse = double(k) / spc;
        result.diagnostic = "per-cycle progress below the jam threshold";
        ended = true;
        break;
      }
      cycle_start = c;
    }
  }
  if (!ended) {
    result.cycles_to_traverse = spec.max_cycles;
    result.failure_mode =
        obstacle ? FailureMode::Timeout : FailureMode::None;
  }

  // Metric window: drop the settle cycles, keep boundaries + final partial.
  const int drop = std::min<int>(spec.settle_cycles, cycle_samples - 1);
  samples.erase(samples.begin(), samples.begin() + drop);
  cycle_samples -= drop;

  if (cycle_samples >= 2) {
    std::vector<BodyState> cycles(samples.begin(),
                                  samples.begin() + cycle_samples);
    result.displacement_per_cycle = displacement_per_cycle(robot, cycles);
  }
  result.speed_bl_per_cycle =
      result.displacement_per_cycle / robot.total_length;
  result.work_total = work;
  const double distance = transport_distance(robot, samples);
  result.cot = distance > 1e-15
                   ? cost_of_transport(work, robot.mass_total, distance)
                   : 0.0;
  if (samples.size() >= 2) result.reorientation = reorientation(samples);
  return result;
}

SweepResult run_sweep(ExperimentKind kind, const std::vector<TrialSpec>& specs,
                      int parallelism) {
  if (specs.empty()) throw RangeError("run_sweep: empty spec list");
  if (parallelism < 1) throw RangeError("run_sweep: parallelism < 1");
  for (const TrialSpec& spec : specs) spec.validate();

  std::vector<SweepRow> rows(specs.size());
  const auto make_row = [&](size_t i) {
    SweepRow row;
    row.label = specs[i].label;
    row.G = specs[i].G;
    row.amplitude_h = specs[i].gait.amplitude_h;
    row.spatial_freq_h = specs[i].gait.spatial_freq_h;
    row.spacing = specs[i].env.peg_spacing;
    row.ic_index = specs[i].ic_index;
    row.result = run_trial(specs[i]);
    rows[i] = std::move(row);
  };

  if (parallelism == 1 || specs.size() == 1) {
    for (size_t i = 0; i < specs.size(); ++i) make_row(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads =
        int(std::min(size_t(parallelism), specs.size()));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (size_t i = next++; i < specs.size(); i = next++) make_row(i);
      });
    for (std::thread& t : pool) t.join();
  }

  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.label < b.label; });

  SweepResult sweep;
  sweep.kind = kind;
  sweep.rows = std::move(rows);
  try {
    sweep.wavelength = displayed_wavelength(specs[0].gait, specs[0].robot);
  } catch (const ShapeDegenerate&) {
    sweep.wavelength = 0.0;
  }

  const bool obstacle = kind != ExperimentKind::FlatSweep;
  const auto detail_key = [&](const SweepRow& row) {
    std::string key;
    if (kind == ExperimentKind::GaitSweep)
      key += fmt("aH%.1f-xi%.2f-", row.amplitude_h * 180.0 / kPi,
                 row.spatial_freq_h);
    if (row.spacing) key += fmt("d%.2f-", *row.spacing);
    key += fmt("G%.2f", row.G);
    return key;
  };
  sweep.aggregates = group_rows(sweep.rows, obstacle, detail_key);
  if (obstacle && kind != ExperimentKind::Single) {
    // Pooled per-G rows (per gait pair for gait sweeps) across spacings.
    const auto pool_key = [&](const SweepRow& row) {
      std::string key;
      if (kind == ExperimentKind::GaitSweep)
        key += fmt("aH%.1f-xi%.2f-", row.amplitude_h * 180.0 / kPi,
                   row.spatial_freq_h);
      key += fmt("G%.2f", row.G);
      return key;
    };
    const std::vector<AggregateRow> pooled =
        group_rows(sweep.rows, obstacle, pool_key);
    sweep.aggregates.insert(sweep.aggregates.end(), pooled.begin(),
                            pooled.end());
  }
  return sweep;
}

std::vector<TrialSpec> flat_sweep_specs(const RobotConfig& robot,
                                        const CableGeometry& cable,
                                        const GaitParams& gait,
                                        const SolverParams& solver, double mu,
                                        const std::vector<double>& G_grid) {
  if (G_grid.empty()) throw RangeError("flat_sweep: empty G grid");
  std::vector<TrialSpec> specs;
  for (double g : G_grid) {
    TrialSpec spec;
    spec.robot = robot;
    spec.cable = cable;
    spec.gait = gait;
    spec.G = g;
    spec.env = Environment::flat(mu);
    spec.initial_pose = {spec.env.board_length / 2, spec.env.board_width / 2,
                         0.0};
    spec.max_cycles = kSettleCycles + kMeasureCycles;
    spec.settle_cycles = kSettleCycles;
    spec.solver = solver;
    spec.start_phase = 0.0;
    spec.label = fmt("flat-G%.2f", g);
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<TrialSpec> spacing_sweep_specs(
    const RobotConfig& robot, const CableGeometry& cable,
    const GaitParams& gait, const SolverParams& solver, double mu,
    const std::vector<double>& G_grid, const std::vector<double>& spacings,
    const RowLayout& layout) {
  if (G_grid.empty() || spacings.empty())
    throw RangeError("spacing_sweep: empty G grid or spacing list");
  std::vector<TrialSpec> specs;
  append_obstacle_specs(specs, robot, cable, gait, solver, mu, G_grid,
                        spacings, layout, false);
  return specs;
}

std::vector<TrialSpec> gait_sweep_specs(
    const RobotConfig& robot, const CableGeometry& cable,
    const GaitParams& base_gait, const SolverParams& solver, double mu,
    const std::vector<std::pair<double, double>>& gait_grid,
    const std::vector<double>& G_grid, const std::vector<double>& spacings,
    const RowLayout& layout) {
  if (gait_grid.empty() || G_grid.empty() || spacings.empty())
    throw RangeError("gait_sweep: empty gait grid, G grid, or spacing list");
  std::vector<TrialSpec> specs;
  for (const auto& [amplitude_h, xi_h] : gait_grid) {
    GaitParams gait = base_gait;
    gait.amplitude_h = amplitude_h;
    gait.spatial_freq_h = xi_h;
    append_obstacle_specs(specs, robot, cable, gait, solver, mu, G_grid,
                          spacings, layout, true);
  }
  return specs;
}

TrialSpec single_spec(const RobotConfig& robot, const CableGeometry& cable,
                      const GaitParams& gait, const SolverParams& solver,
                      double mu, double G, double spacing, int ic_index,
                      const RowLayout& layout) {
  if (ic_index < 0 || ic_index >= kInitialConditions)
    throw RangeError("single: ic_index outside the battery's pose set");
  const Environment env = fit_peg_row(spacing, layout, mu);
  const double cal = calibrate_heading(robot, cable, gait, G, mu, solver);
  const std::vector<PlanarPose> poses = initial_conditions(
      robot, gait, env, kInitialConditions, cal, kTrialStartPhase);
  TrialSpec spec;
  spec.robot = robot;
  spec.cable = cable;
  spec.gait = gait;
  spec.G = G;
  spec.env = env;
  spec.initial_pose = poses[ic_index];
  spec.solver = solver;
  spec.start_phase = kTrialStartPhase;
  spec.ic_index = ic_index;
  spec.label = fmt("single-d%.2f-G%.2f-ic%d", spacing, G, ic_index);
  return spec;
}

}  // namespace sidewinder
