#include "sidewinder/metrics.hpp"

#include <cmath>

#include "sidewinder/errors.hpp"

namespace sidewinder {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_pi(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a <= -kPi) a += 2 * kPi;
  return a;
}
}  // namespace

const char* to_string(FailureMode mode) {
  switch (mode) {
    case FailureMode::None: return "none";
    case FailureMode::Timeout: return "timeout";
    case FailureMode::Jam: return "jam";
  }
  return "none";
}

double displacement_per_cycle(const RobotConfig& robot,
                              const std::vector<BodyState>& cycle_states) {
  if (cycle_states.size() < 2)
    throw TooShort("displacement_per_cycle needs at least one full cycle");
  double total = 0.0;
  std::vector<Eigen::Vector2d> prev = markers(robot, cycle_states[0].frames);
  for (size_t c = 1; c < cycle_states.size(); ++c) {
    std::vector<Eigen::Vector2d> cur = markers(robot, cycle_states[c].frames);
    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    for (size_t i = 0; i < cur.size(); ++i) step += cur[i] - prev[i];
    total += (step / double(cur.size())).norm();
    prev = std::move(cur);
  }
  return total / double(cycle_states.size() - 1);
}

double cost_of_transport(double work, double mass, double displacement) {
  if (displacement <= 0.0)
    throw ZeroDisplacement("cost of transport undefined at zero displacement");
  return work / (mass * 9.81 * displacement);
}

bool body_cleared(const RobotConfig& robot, const std::vector<Frame>& frames,
                  double y_line) {
  for (int m = 0; m < robot.n_modules; ++m)
    if (frames[m].p.y() <= y_line) return false;
  return true;
}

TraverseOutcome traverse_check(const RobotConfig& robot,
                               const std::vector<BodyState>& step_states,
                               const Environment& env, int steps_per_cycle) {
  TraverseOutcome out;
  const double y_line = env.obstacle_line.value();
  Eigen::Vector2d cycle_start = planar_center(robot, step_states[0].frames);
  for (size_t k = 0; k < step_states.size(); ++k) {
    if (body_cleared(robot, step_states[k].frames, y_line)) {
      out.success = true;
      out.cycles_to_traverse = double(k) / steps_per_cycle;
      out.failure_mode = FailureMode::None;
      return out;
    }
    if (k > 0 && k % steps_per_cycle == 0) {
      Eigen::Vector2d c = planar_center(robot, step_states[k].frames);
      if ((c - cycle_start).norm() < kJamThreshold) {
        out.failure_mode = FailureMode::Jam;
        out.cycles_to_traverse = double(k) / steps_per_cycle;
        return out;
      }
      cycle_start = c;
    }
  }
  out.failure_mode = FailureMode::Timeout;
  out.cycles_to_traverse =
      double(step_states.size() - 1) / steps_per_cycle;
  return out;
}

double reorientation(const std::vector<BodyState>& samples) {
  if (samples.size() < 2)
    throw TooShort("reorientation needs at least two heading samples");
  double prev = body_heading(samples[0].frames);
  double acc = 0.0;
  for (size_t i = 1; i < samples.size(); ++i) {
    double h = body_heading(samples[i].frames);
    acc += wrap_pi(h - prev);
    prev = h;
  }
  return std::abs(acc) * 180.0 / kPi;
}

}  // namespace sidewinder
