#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <set>
#include <vector>

namespace sidewinder {

// Chain layout. Modules are rigid cylinders joined by 1-DOF hinges placed at
// the centers of the inter-module gaps. Joint axes alternate by plane:
// lateral joints bend in the ground plane, vertical joints pitch out of it.
struct RobotConfig {
  int n_modules = 12;
  double module_length = 0.10;   // m
  double module_radius = 0.0375; // m
  double total_length = 1.31;    // m, tip to tip when straight
  std::set<int> vertical_joints = {3, 6, 9};  // 1-based joint indices
  double mass_total = 3.0;           // kg
  double contact_threshold = 0.048;  // m, contact band: touching below this,
                                     // anchor weight fading to zero across it

  int n_joints() const { return n_modules - 1; }
  int n_vertical() const { return static_cast<int>(vertical_joints.size()); }
  int n_lateral() const { return n_joints() - n_vertical(); }
  bool is_vertical(int joint) const { return vertical_joints.count(joint) > 0; }
  // Gap between module end faces; hinge pivots sit at gap centers.
  double gap() const {
    return (total_length - n_modules * module_length) / n_joints();
  }
  // Module center to adjacent pivot distance.
  double half_link() const { return 0.5 * module_length + 0.5 * gap(); }

  // Global joint indices (1-based) of each plane, in body order.
  std::vector<int> lateral_joint_ids() const;
  std::vector<int> vertical_joint_ids() const;

  void validate() const;  // throws RangeError
};

struct Frame {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
};

// World pose of module 1's center projected to the plane.
struct PlanarPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Full kinematic state after a step: module frames are post-drop (the whole
// body is translated vertically so the lowest module bottom rests at z = 0).
struct BodyState {
  PlanarPose base;
  std::vector<double> alpha;   // n_joints, radians, body order
  std::vector<Frame> frames;   // n_modules
  std::vector<double> heights; // module bottom heights after drop
  std::vector<int> contacts;   // module indices (0-based) with height < h_c
  double t = 0.0;
};

// Module frames for a base pose and joint vector, before any vertical drop.
// Module x axis points head -> tail; lateral joint angle alpha > 0 bends the
// chain rightward (clockwise in top view), vertical angle pitches it.
std::vector<Frame> forward_kinematics(const RobotConfig& robot,
                                      const PlanarPose& base,
                                      const std::vector<double>& alpha);

// Vertical drop: translation dz such that min over modules of
// (p.z - module_radius) + dz == 0. Never tilts the body.
double drop_offset(const RobotConfig& robot, const std::vector<Frame>& frames);

// Bottom heights after applying dz, and the contact set they imply.
std::vector<double> bottom_heights(const RobotConfig& robot,
                                   const std::vector<Frame>& frames,
                                   double dz);
std::vector<int> ground_contact(const RobotConfig& robot,
                                const std::vector<double>& heights);

// Convenience: FK + drop + contacts in one BodyState.
BodyState make_state(const RobotConfig& robot, const PlanarPose& base,
                     const std::vector<double>& alpha, double t);

// 13 virtual tracking markers: 12 module centers plus the head tip, planar.
std::vector<Eigen::Vector2d> markers(const RobotConfig& robot,
                                     const std::vector<Frame>& frames);

// Mean of the markers; used as the body's center for progress checks.
Eigen::Vector2d planar_center(const RobotConfig& robot,
                              const std::vector<Frame>& frames);

// Direction angle of the tail-center -> head-center vector.
double body_heading(const std::vector<Frame>& frames);

// Arc length of the polyline head tip -> centers/pivots -> tail tip.
// Constant for all joint angles (inextensible chain).
double chain_arc_length(const RobotConfig& robot,
                        const std::vector<Frame>& frames);

// World hinge axis and pivot point of a joint, for Jacobian columns.
// `frames` must be the chain the joint belongs to; joint is 1-based.
struct JointAxis {
  Eigen::Vector3d axis;
  Eigen::Vector3d pivot;
};
JointAxis joint_axis(const RobotConfig& robot, const std::vector<Frame>& frames,
                     int joint);

}  // namespace sidewinder
