#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sidewinder/environment.hpp"
#include "sidewinder/kinematics.hpp"

namespace sidewinder {

enum class FailureMode { None, Timeout, Jam };

const char* to_string(FailureMode mode);

// One trial's summary row. Displacement and speed are per gait cycle;
// reorientation is the unsigned unwrapped heading change in degrees.
struct TrialResult {
  bool success = false;
  FailureMode failure_mode = FailureMode::None;
  double cycles_to_traverse = 0.0;      // fractional cycles
  double displacement_per_cycle = 0.0;  // m
  double speed_bl_per_cycle = 0.0;      // body lengths per cycle
  double work_total = 0.0;              // J
  double cot = 0.0;
  double reorientation = 0.0;           // degrees
  bool solver_failed = false;  // Jam came from the step solver, not progress
  std::string trace_ref;
  std::string diagnostic;               // failure detail (solver message)
};

// COM net displacement per cycle, in meters, from body states sampled at
// consecutive cycle boundaries: per cycle the 13 marker displacement
// vectors (12 module centers + head tip) are averaged — their mean is the
// center-of-geometry step, immune to body spin — and the step norms are
// averaged across cycles. Throws TooShort on fewer than two samples.
double displacement_per_cycle(const RobotConfig& robot,
                              const std::vector<BodyState>& cycle_states);

// W / (m g d). Throws ZeroDisplacement when displacement <= 0.
double cost_of_transport(double work, double mass, double displacement);

struct TraverseOutcome {
  bool success = false;
  double cycles_to_traverse = 0.0;
  FailureMode failure_mode = FailureMode::None;
};

// COM progress below this over a full cycle counts as jammed.
inline constexpr double kJamThreshold = 0.02;  // m/cycle

// True when every module center has passed the obstacle line.
bool body_cleared(const RobotConfig& robot, const std::vector<Frame>& frames,
                  double y_line);

// Walks per-step states: success at the first step where the whole body has
// cleared the obstacle line (cycles = step index / steps_per_cycle), jam if
// COM moved less than kJamThreshold over any completed cycle before that,
// timeout otherwise.
TraverseOutcome traverse_check(const RobotConfig& robot,
                               const std::vector<BodyState>& step_states,
                               const Environment& env, int steps_per_cycle);

// Unsigned change of the tail-to-head heading, in degrees, between the
// first and last sample, unwrapped sample-to-sample. Samples must be at
// equal gait phase (cycle boundaries), optionally ending with the final
// partial-cycle state. Throws TooShort on fewer than two samples.
double reorientation(const std::vector<BodyState>& samples);

}  // namespace sidewinder
