#pragma once

#include <vector>

#include "sidewinder/kinematics.hpp"

namespace sidewinder {

// Two-wave gait template: a lateral traveling wave and a vertical traveling
// wave a quarter period behind it. Angles are radians, frequencies are
// cycles (spatial: per body, temporal: per second).
struct GaitParams {
  double amplitude_h = 75.0 * kDegree;   // lateral joint amplitude
  double spatial_freq_h = 1.0;           // waves along the lateral plane
  double amplitude_v = 25.0 * kDegree;   // vertical joint amplitude
  double spatial_freq_v = 1.0;
  double omega = 0.25;                   // temporal frequency, cycles/s
  double phase_offset = kQuarterTurn;    // vertical wave lag, fixed

  static constexpr double kDegree = 3.14159265358979323846 / 180.0;
  static constexpr double kQuarterTurn = 3.14159265358979323846 / 2.0;

  void validate() const;  // throws RangeError
};

// Commanded joint angles at one instant, indexed per plane (1-based wave
// index i maps to the i-th joint of that plane in body order).
struct CommandFrame {
  double t = 0.0;
  double phase = 0.0;            // fraction of cycle in [0, 1)
  std::vector<double> alpha_h;   // lateral commands, body order
  std::vector<double> alpha_v;   // vertical commands, body order
};

CommandFrame joint_commands(const GaitParams& gait, const RobotConfig& robot,
                            double t);

// Expands a CommandFrame to a full joint vector in global body order.
std::vector<double> command_vector(const RobotConfig& robot,
                                   const CommandFrame& cmd);

// Straight-line span of one spatial period of the lateral wave. Flattened,
// the wave traces a serpenoid path whose heading swings sinusoidally with
// peak Theta = amplitude_h * n_lateral / (2 pi spatial_freq_h); the chord of
// one period contracts relative to its arc length (total_length / xi) by the
// Bessel factor J0 evaluated at the wave's effective (root-mean-square)
// heading amplitude Theta / sqrt(2). Reduces to total_length / xi for a
// straight body and decreases monotonically with amplitude. Throws
// ShapeDegenerate if the flattened midline self-intersects at t = 0 or the
// wave is curled past the point of a measurable span (first J0 zero).
double displayed_wavelength(const GaitParams& gait, const RobotConfig& robot);

}  // namespace sidewinder
