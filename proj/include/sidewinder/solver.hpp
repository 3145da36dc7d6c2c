#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sidewinder/cable.hpp"
#include "sidewinder/environment.hpp"
#include "sidewinder/gait.hpp"
#include "sidewinder/kinematics.hpp"

namespace sidewinder {

struct SolverParams {
  double w_stick = 1.0;        // anchor weight for stuck contacts
  double w_track = 0.01;       // pull toward the command projected on bounds
  double w_prev = 0.001;       // regularization toward the previous angles
  double slip_tolerance = 0.002;   // m per step before an anchor is demoted
  double slip_downweight = 0.1;
  int max_slip_iters = 5;
  int max_peg_iters = 10;
  double kkt_tol = 1e-8;
  double kkt_stall_tol = 1e-5;     // acceptance cap when iteration stalls
  double w_track_slack = 1e-4;     // residual template weight on slack joints
  double penetration_tol = 5e-4;   // m
  int steps_per_cycle = 200;

  void validate() const;  // throws RangeError
};

struct PegForce {
  int peg = -1;
  int module = -1;          // 0-based module index
  Eigen::Vector2d normal;   // unit vector from peg center toward the module
  double magnitude = 0.0;   // constraint multiplier (model units)
};

// One quasi-static step: the equilibrium pose/angle update and its
// certificates. Angle bounds are respected exactly; peg clearances to
// penetration_tol; kkt_residual certifies stationarity of the nonlinear
// objective under the returned multipliers.
struct StepSolution {
  BodyState new_state;
  std::vector<int> contact_modules;  // ground contacts the step solved with
  std::vector<int> stick_set;        // anchors that held (slip <= tolerance)
  Eigen::VectorXd slip;              // per contact_modules entry (m)
  std::vector<PegForce> peg_forces;  // active peg constraints
  double work_increment = 0.0;       // J, friction dissipation of this step
  double kkt_residual = 0.0;
  int gn_iterations = 0;
  int slip_rounds = 0;
};

// Advances the body one step toward the commanded frame. Decision variables
// are the planar base correction (dx, dy, dtheta) and the lateral joint
// angles; vertical joints are pinned to their commands (their intervals must
// be degenerate). Minimizes
//   w_stick * sum_{stuck j} w_j |p_j - p_j_prev|^2
//   + sum_i w_track_i * (alpha_i - clamp(cmd_i))^2
//   + w_prev * sum_i (alpha_i - alpha_i_prev)^2
// subject to the angle intervals (hard) and peg non-penetration (hard,
// re-linearized). w_track_i is w_track where the clamped command lies on an
// interval bound (a taut cable transmits the command) and w_track_slack
// where it lies strictly inside (both cables slack). Anchors slipping beyond
// slip_tolerance are down-weighted and the solve repeats. Deterministic.
// Throws NonConvergence (KKT residual not reached) or Jammed (peg
// constraints inconsistent with the angle bounds).
StepSolution solve_step(const RobotConfig& robot, const BodyState& prev,
                        const CommandFrame& cmd,
                        const std::vector<AngleInterval>& intervals,
                        const Environment& env, const SolverParams& params);

// Friction dissipation of one step under uniform normal-load sharing:
//   W = sum over contacts of mu * (m g / n_contacts) * slip.
double work_increment(const Eigen::VectorXd& slip, int n_contacts,
                      double mu, double mass_total);

}  // namespace sidewinder
