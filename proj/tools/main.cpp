#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sidewinder/config.hpp"
#include "sidewinder/errors.hpp"
#include "sidewinder/harness.hpp"
#include "sidewinder/report.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sidewinder::IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_traces(const std::vector<sidewinder::TrialSpec>& specs,
                  const std::string& dir) {
  for (const sidewinder::TrialSpec& spec : specs) {
    sidewinder::TrajectoryLog log;
    sidewinder::run_trial(spec, &log);
    sidewinder::write_trajectory(spec.label, log, dir);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sidewinder;

  CLI::App app{"Quasi-static simulator for a cable-driven sidewinding robot"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int parallel = 1;
  bool trace = false;
  app.add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--parallel", parallel, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  app.add_flag("--trace", trace, "write trajectory-<label>.jsonl per trial");

  CLI::App* cmd_run = app.add_subcommand("run", "run the single trial");
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run the configured experiment");
  CLI::App* cmd_plot =
      app.add_subcommand("plot", "recompute the sweep, write figures only");
  CLI::App* cmd_validate =
      app.add_subcommand("validate", "check the config, write nothing");
  CLI::App* cmd_calibrate = app.add_subcommand(
      "calibrate", "print open-field heading drift per compliance value");
  for (CLI::App* sub :
       {cmd_run, cmd_sweep, cmd_plot, cmd_validate, cmd_calibrate})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = parse_config(slurp(config_path));
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    if (*cmd_validate) {
      auto [kind, specs] = build_specs(cfg);
      std::printf("ok: %s, %zu trial(s)\n", to_string(kind), specs.size());
      return 0;
    }

    if (*cmd_calibrate) {
      const CableGeometry cable = cfg.cable_geometry();
      std::vector<std::pair<double, double>> grid;  // (A_H deg, xi_H)
      if (cfg.experiment == ExperimentKind::GaitSweep)
        for (const RunConfig::GaitPair& p : cfg.gait_grid)
          grid.emplace_back(p.amplitude_h_deg, p.spatial_freq_h);
      else
        grid.emplace_back(cfg.gait.amplitude_h_deg, cfg.gait.spatial_freq_h);
      for (const auto& [ah_deg, xi] : grid) {
        GaitParams gait = cfg.gait_params();
        gait.amplitude_h = ah_deg * GaitParams::kDegree;
        gait.spatial_freq_h = xi;
        for (double G : cfg.compliance_grid) {
          const double drift = calibrate_heading(cfg.robot, cable, gait, G,
                                                 cfg.env.mu, cfg.solver);
          std::printf(
              "aH=%.1f xi=%.2f G=%.2f  drift=%+8.4f deg  start_heading=%8.4f "
              "deg\n",
              ah_deg, xi, G, drift / GaitParams::kDegree,
              90.0 - drift / GaitParams::kDegree);
        }
      }
      return 0;
    }

    if (*cmd_run) {
      cfg.experiment = ExperimentKind::Single;
      auto [kind, specs] = build_specs(cfg);
      SweepResult sweep = run_sweep(kind, specs, 1);
      write_results(sweep, cfg.output_dir);
      write_config_echo(echo_config(cfg), cfg.output_dir);
      if (trace) write_traces(specs, cfg.output_dir);

      const TrialResult& r = sweep.rows.front().result;
      if (r.success)
        std::printf("%s: traversed in %.2f cycles\n",
                    sweep.rows.front().label.c_str(), r.cycles_to_traverse);
      else
        std::printf("%s: %s after %.2f cycles%s%s\n",
                    sweep.rows.front().label.c_str(),
                    to_string(r.failure_mode), r.cycles_to_traverse,
                    r.diagnostic.empty() ? "" : " — ", r.diagnostic.c_str());
      std::printf(
          "displacement %.4f m/cycle, speed %.3f BL/cycle, work %.2f J, "
          "cot %.4f, reorientation %.1f deg\n",
          r.displacement_per_cycle, r.speed_bl_per_cycle, r.work_total, r.cot,
          r.reorientation);
      if (r.solver_failed) {
        std::fprintf(stderr, "solver failure: %s\n", r.diagnostic.c_str());
        return 3;
      }
      return 0;
    }

    if (*cmd_sweep) {
      auto [kind, specs] = build_specs(cfg);
      SweepResult sweep = run_sweep(kind, specs, parallel);
      write_results(sweep, cfg.output_dir);
      write_config_echo(echo_config(cfg), cfg.output_dir);
      if (kind != ExperimentKind::Single) emit_plots(sweep, cfg.output_dir);
      if (trace) write_traces(specs, cfg.output_dir);
      std::printf("%s: %zu trials, %zu aggregate rows -> %s\n",
                  to_string(kind), sweep.rows.size(), sweep.aggregates.size(),
                  cfg.output_dir.c_str());
      return 0;
    }

    // plot: recompute (deterministic) and write only the figures.
    auto [kind, specs] = build_specs(cfg);
    SweepResult sweep = run_sweep(kind, specs, parallel);
    emit_plots(sweep, cfg.output_dir);
    std::printf("%s figures -> %s\n", to_string(kind), cfg.output_dir.c_str());
    return 0;
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
}
