#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sidewinder/kinematics.hpp"

namespace sidewinder {

struct Peg {
  Eigen::Vector2d center;
  double radius = 0.025;
};

// Flat frictional board with optional peg obstacles. Pegs are immovable
// rigid cylinders tall enough that lifted body segments still collide.
struct Environment {
  double mu = 0.7;                   // Coulomb friction coefficient
  double board_length = 2.4;         // x extent (m)
  double board_width = 1.2;          // y extent (m)
  std::vector<Peg> pegs;
  std::optional<double> obstacle_line;  // y of the line through peg centers
  std::optional<double> peg_spacing;    // center spacing when built as a row

  void validate() const;  // throws RangeError / BoundsExceeded

  static Environment flat(double mu = 0.7);
};

// Builds a single row of pegs at y = y_line, centered on the board in x.
// Throws BoundsExceeded if the row (including radii) does not fit.
Environment make_peg_row(double spacing, int count, double y_line,
                         double radius = 0.025, double mu = 0.7,
                         double board_length = 2.4, double board_width = 1.2);

// Signed distance from each module's lateral surface to each peg's surface;
// negative means penetration. Row-major (module, peg).
Eigen::MatrixXd clearances(const RobotConfig& robot,
                           const std::vector<Frame>& frames,
                           const Environment& env);

}  // namespace sidewinder
