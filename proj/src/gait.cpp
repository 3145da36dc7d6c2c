#include "sidewinder/gait.hpp"

#include <cmath>

#include "sidewinder/errors.hpp"

namespace sidewinder {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTau = 2.0 * kPi;
}  // namespace

void GaitParams::validate() const {
  if (amplitude_h < 0.0 || amplitude_h > 85.0 * kDegree)
    throw RangeError("gait.amplitude_h_deg outside [0, 85]");
  if (amplitude_v < 0.0 || amplitude_v > 85.0 * kDegree)
    throw RangeError("gait.amplitude_v_deg outside [0, 85]");
  if (spatial_freq_h <= 0.0 || spatial_freq_v <= 0.0)
    throw RangeError("gait spatial frequencies must be > 0");
  if (omega <= 0.0) throw RangeError("gait.omega_hz must be > 0");
  if (std::abs(phase_offset - kQuarterTurn) > 1e-12)
    throw RangeError("gait.phase offset between waves is fixed at pi/2");
}

CommandFrame joint_commands(const GaitParams& gait, const RobotConfig& robot,
                            double t) {
  CommandFrame cmd;
  cmd.t = t;
  double cycles = gait.omega * t;
  cmd.phase = cycles - std::floor(cycles);
  double wt = kTau * cmd.phase;

  const int nh = robot.n_lateral();
  const int nv = robot.n_vertical();
  cmd.alpha_h.resize(nh);
  cmd.alpha_v.resize(nv);
  for (int i = 1; i <= nh; ++i)
    cmd.alpha_h[i - 1] =
        gait.amplitude_h * std::sin(kTau * gait.spatial_freq_h * i / nh - wt);
  for (int i = 1; i <= nv; ++i)
    cmd.alpha_v[i - 1] =
        gait.amplitude_v *
        std::sin(kTau * gait.spatial_freq_v * i / nv - wt - gait.phase_offset);
  return cmd;
}

std::vector<double> command_vector(const RobotConfig& robot,
                                   const CommandFrame& cmd) {
  std::vector<double> alpha(robot.n_joints(), 0.0);
  int ih = 0, iv = 0;
  for (int j = 1; j <= robot.n_joints(); ++j) {
    if (robot.is_vertical(j))
      alpha[j - 1] = cmd.alpha_v[iv++];
    else
      alpha[j - 1] = cmd.alpha_h[ih++];
  }
  return alpha;
}

namespace {

// Midline polyline of the flattened body: head tip, pivots, tail tip.
// Returned points are planar; cumulative arc lengths returned alongside.
struct Midline {
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> arc;
};

Midline flattened_midline(const GaitParams& gait, const RobotConfig& robot) {
  CommandFrame cmd = joint_commands(gait, robot, 0.0);
  std::vector<double> alpha = command_vector(robot, cmd);
  for (int j : robot.vertical_joint_ids()) alpha[j - 1] = 0.0;
  std::vector<Frame> frames = forward_kinematics(robot, PlanarPose{}, alpha);

  Midline m;
  const double h = robot.half_link();
  auto push = [&m](const Eigen::Vector3d& p) {
    Eigen::Vector2d q(p.x(), p.y());
    if (m.pts.empty()) {
      m.pts.push_back(q);
      m.arc.push_back(0.0);
    } else {
      m.arc.push_back(m.arc.back() + (q - m.pts.back()).norm());
      m.pts.push_back(q);
    }
  };
  push(frames.front().p - frames.front().R.col(0) * (0.5 * robot.module_length));
  push(frames.front().p);
  for (size_t k = 0; k + 1 < frames.size(); ++k) {
    push(frames[k].p + frames[k].R.col(0) * h);
    push(frames[k + 1].p);
  }
  push(frames.back().p + frames.back().R.col(0) * (0.5 * robot.module_length));
  return m;
}

bool segments_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                    const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  auto orient = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                   const Eigen::Vector2d& r) {
    double v = (q.x() - p.x()) * (r.y() - p.y()) -
               (q.y() - p.y()) * (r.x() - p.x());
    return (v > 0.0) - (v < 0.0);
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

bool self_intersects(const Midline& m) {
  for (size_t i = 0; i + 1 < m.pts.size(); ++i)
    for (size_t j = i + 2; j + 1 < m.pts.size(); ++j)
      if (segments_cross(m.pts[i], m.pts[i + 1], m.pts[j], m.pts[j + 1]))
        return true;
  return false;
}

// J0 by power series; converges to machine precision for |x| < 3.
double bessel_j0(double x) {
  double term = 1.0, sum = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 40; ++k) {
    term *= -q / (double(k) * double(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

constexpr double kFirstJ0Zero = 2.40482555769577;

}  // namespace

double displayed_wavelength(const GaitParams& gait, const RobotConfig& robot) {
  Midline m = flattened_midline(gait, robot);
  if (self_intersects(m))
    throw ShapeDegenerate("flattened body self-intersects at t = 0");

  const double xi = gait.spatial_freq_h;
  const double theta = gait.amplitude_h * robot.n_lateral() / (kTau * xi);
  const double effective = theta / std::sqrt(2.0);
  if (effective >= kFirstJ0Zero)
    throw ShapeDegenerate("lateral wave curls past a measurable period span");
  return robot.total_length / xi * bessel_j0(effective);
}

}  // namespace sidewinder
