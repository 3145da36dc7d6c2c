#pragma once

#include <string>

#include "sidewinder/harness.hpp"

namespace sidewinder {

// Serialization of sweep results into an output directory. All writers are
// deterministic: the same sweep produces byte-identical files. Angles in
// CSV files are degrees; trajectory logs are radians.

// Writes results.csv (one row per trial, frozen column order) and
// aggregates.csv (one row per condition group). Creates the directory if
// needed; throws IoError with the path on failure.
void write_results(const SweepResult& sweep, const std::string& dir);

// Writes `trajectory-<label>.jsonl`, one JSON record per solver step with
// t, phase, base pose, joint angles (radians), ground-contact module
// indices, total slip, and the work increment. Returns the file name.
std::string write_trajectory(const std::string& label,
                             const TrajectoryLog& log, const std::string& dir);

// Writes the canonical config echo to `config.echo`.
void write_config_echo(const std::string& echo_text, const std::string& dir);

// Emits the figures matching the sweep's experiment:
//   flat_sweep    -> fig5.svg  (speed and cost of transport vs G, dual axis)
//   spacing_sweep -> fig6c.svg (traverse probability vs spacing / wavelength)
//                    fig6e.svg (cycles-to-traverse bars)
//                    fig6f.svg (reorientation bars)
//   gait_sweep    -> fig6d.svg (traverse probability per gait pair)
// Pure-text SVG, byte-deterministic. Throws MismatchedExperiment for an
// empty sweep or a single trial (no figure is defined for it).
void emit_plots(const SweepResult& sweep, const std::string& dir);

}  // namespace sidewinder
