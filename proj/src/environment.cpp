#include "sidewinder/environment.hpp"

#include "sidewinder/errors.hpp"

namespace sidewinder {

void Environment::validate() const {
  if (mu <= 0.0) throw RangeError("environment.mu must be > 0");
  if (board_length <= 0.0 || board_width <= 0.0)
    throw RangeError("board dimensions must be > 0");
  for (const Peg& p : pegs) {
    if (p.radius <= 0.0) throw RangeError("peg radius must be > 0");
    if (p.center.x() - p.radius < 0.0 ||
        p.center.x() + p.radius > board_length ||
        p.center.y() - p.radius < 0.0 || p.center.y() + p.radius > board_width)
      throw BoundsExceeded("peg outside board bounds");
  }
}

Environment Environment::flat(double mu) {
  Environment env;
  env.mu = mu;
  return env;
}

Environment make_peg_row(double spacing, int count, double y_line,
                         double radius, double mu, double board_length,
                         double board_width) {
  if (count < 2) throw RangeError("peg row needs at least 2 pegs");
  if (spacing <= 2.0 * radius)
    throw RangeError("peg spacing must exceed one peg diameter");

  Environment env;
  env.mu = mu;
  env.board_length = board_length;
  env.board_width = board_width;
  const double row_width = spacing * (count - 1);
  const double x0 = 0.5 * (env.board_length - row_width);
  for (int k = 0; k < count; ++k)
    env.pegs.push_back({{x0 + k * spacing, y_line}, radius});
  env.obstacle_line = y_line;
  env.peg_spacing = spacing;
  env.validate();  // throws BoundsExceeded if the row does not fit
  return env;
}

Eigen::MatrixXd clearances(const RobotConfig& robot,
                           const std::vector<Frame>& frames,
                           const Environment& env) {
  Eigen::MatrixXd out(frames.size(), env.pegs.size());
  for (size_t m = 0; m < frames.size(); ++m) {
    Eigen::Vector2d c = frames[m].p.head<2>();
    for (size_t p = 0; p < env.pegs.size(); ++p)
      out(m, p) = (c - env.pegs[p].center).norm() -
                  (robot.module_radius + env.pegs[p].radius);
  }
  return out;
}

}  // namespace sidewinder
