#include "sidewinder/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sidewinder/errors.hpp"

namespace sidewinder {

std::vector<int> RobotConfig::lateral_joint_ids() const {
  std::vector<int> ids;
  for (int j = 1; j <= n_joints(); ++j)
    if (!is_vertical(j)) ids.push_back(j);
  return ids;
}

std::vector<int> RobotConfig::vertical_joint_ids() const {
  std::vector<int> ids;
  for (int j = 1; j <= n_joints(); ++j)
    if (is_vertical(j)) ids.push_back(j);
  return ids;
}

void RobotConfig::validate() const {
  if (n_modules < 2) throw RangeError("robot.n_modules must be >= 2");
  if (module_length <= 0.0) throw RangeError("robot.module_length_m must be > 0");
  if (module_radius <= 0.0) throw RangeError("robot.module_radius_m must be > 0");
  if (total_length < n_modules * module_length)
    throw RangeError("robot.total_length_m shorter than the modules it holds");
  for (int j : vertical_joints)
    if (j < 1 || j > n_joints())
      throw RangeError("robot.vertical_joints entry outside 1..n_joints");
  if (mass_total <= 0.0) throw RangeError("robot.mass_kg must be > 0");
  if (contact_threshold <= 0.0)
    throw RangeError("robot.contact_threshold_m must be > 0");
}

namespace {

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d m;
  double c = std::cos(a), s = std::sin(a);
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d m;
  double c = std::cos(a), s = std::sin(a);
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

}  // namespace

std::vector<Frame> forward_kinematics(const RobotConfig& robot,
                                      const PlanarPose& base,
                                      const std::vector<double>& alpha) {
  if (static_cast<int>(alpha.size()) != robot.n_joints())
    throw RangeError("joint vector size does not match robot");
  std::vector<Frame> frames(robot.n_modules);
  frames[0].R = rot_z(base.theta);
  frames[0].p = Eigen::Vector3d(base.x, base.y, 0.0);
  const double h = robot.half_link();
  const Eigen::Vector3d along(h, 0.0, 0.0);
  for (int j = 1; j <= robot.n_joints(); ++j) {
    const Frame& prev = frames[j - 1];
    Eigen::Vector3d pivot = prev.p + prev.R * along;
    // Positive lateral angle bends rightward: rotation about local -z.
    // Positive vertical angle lifts the downstream chain: about local -y.
    Eigen::Matrix3d joint = robot.is_vertical(j) ? rot_y(-alpha[j - 1])
                                                 : rot_z(-alpha[j - 1]);
    frames[j].R = prev.R * joint;
    frames[j].p = pivot + frames[j].R * along;
  }
  return frames;
}

double drop_offset(const RobotConfig& robot, const std::vector<Frame>& frames) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const Frame& f : frames)
    lowest = std::min(lowest, f.p.z() - robot.module_radius);
  return -lowest;
}

std::vector<double> bottom_heights(const RobotConfig& robot,
                                   const std::vector<Frame>& frames,
                                   double dz) {
  std::vector<double> h(frames.size());
  for (size_t k = 0; k < frames.size(); ++k)
    h[k] = frames[k].p.z() - robot.module_radius + dz;
  return h;
}

std::vector<int> ground_contact(const RobotConfig& robot,
                                const std::vector<double>& heights) {
  std::vector<int> c;
  for (size_t k = 0; k < heights.size(); ++k)
    if (heights[k] < robot.contact_threshold) c.push_back(static_cast<int>(k));
  return c;
}

BodyState make_state(const RobotConfig& robot, const PlanarPose& base,
                     const std::vector<double>& alpha, double t) {
  BodyState s;
  s.base = base;
  s.alpha = alpha;
  s.frames = forward_kinematics(robot, base, alpha);
  double dz = drop_offset(robot, s.frames);
  for (Frame& f : s.frames) f.p.z() += dz;
  s.heights = bottom_heights(robot, s.frames, 0.0);
  s.contacts = ground_contact(robot, s.heights);
  s.t = t;
  return s;
}

std::vector<Eigen::Vector2d> markers(const RobotConfig& robot,
                                     const std::vector<Frame>& frames) {
  std::vector<Eigen::Vector2d> m;
  m.reserve(frames.size() + 1);
  for (const Frame& f : frames) m.emplace_back(f.p.x(), f.p.y());
  Eigen::Vector3d tip =
      frames.front().p - frames.front().R.col(0) * (0.5 * robot.module_length);
  m.emplace_back(tip.x(), tip.y());
  return m;
}

Eigen::Vector2d planar_center(const RobotConfig& robot,
                              const std::vector<Frame>& frames) {
  Eigen::Vector2d c(0.0, 0.0);
  auto m = markers(robot, frames);
  for (const auto& p : m) c += p;
  return c / static_cast<double>(m.size());
}

double body_heading(const std::vector<Frame>& frames) {
  Eigen::Vector3d v = frames.front().p - frames.back().p;
  return std::atan2(v.y(), v.x());
}

double chain_arc_length(const RobotConfig& robot,
                        const std::vector<Frame>& frames) {
  // head tip -> c1 -> pivot1 -> c2 -> ... -> c_n -> tail tip
  double len = 0.5 * robot.module_length;  // head tip to first center
  const double h = robot.half_link();
  for (size_t k = 0; k + 1 < frames.size(); ++k) {
    Eigen::Vector3d pivot = frames[k].p + frames[k].R.col(0) * h;
    len += (pivot - frames[k].p).norm();
    len += (frames[k + 1].p - pivot).norm();
  }
  len += 0.5 * robot.module_length;  // last center to tail tip
  return len;
}

JointAxis joint_axis(const RobotConfig& robot, const std::vector<Frame>& frames,
                     int joint) {
  const Frame& up = frames[joint - 1];  // upstream module
  JointAxis a;
  a.pivot = up.p + up.R.col(0) * robot.half_link();
  a.axis = robot.is_vertical(joint) ? Eigen::Vector3d(-up.R.col(1))
                                    : Eigen::Vector3d(-up.R.col(2));
  return a;
}

}  // namespace sidewinder
