#include "sidewinder/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "sidewinder/errors.hpp"
#include "sidewinder/qp.hpp"

namespace sidewinder {

namespace {

constexpr double kGravity = 9.81;
constexpr double kPegMargin = 0.05;  // clearance below which a peg row is kept

// Linearization of the step subproblem at one iterate.
struct Linearization {
  Eigen::VectorXd r;   // residual vector
  Eigen::MatrixXd J;   // d r / d q
  Eigen::MatrixXd C;   // constraint normals (rows), in q-step coordinates
  Eigen::VectorXd d;   // right-hand sides: C*dq >= d
  std::vector<std::pair<int, int>> peg_rows;  // row -> (module, peg)
  std::vector<Eigen::Vector2d> peg_normals;
  int n_box_rows = 0;
  double max_penetration = 0.0;
};

struct Workspace {
  const RobotConfig& robot;
  const Environment& env;
  const SolverParams& prm;
  PlanarPose base0;                 // previous base pose
  std::vector<int> lat;             // lateral joint ids, 1-based
  std::vector<double> alpha_tmpl;   // full joint vector with verticals pinned
  std::vector<double> abar, aprev, lo, hi;  // per lateral joint
  std::vector<double> w_track;      // per joint: 0 when both cables are slack
  std::vector<int> stick;           // anchored module indices, 0-based
  std::vector<double> stick_w;      // per anchor weight factor
  std::vector<Eigen::Vector2d> pbar;

  int nq() const { return 3 + static_cast<int>(lat.size()); }

  PlanarPose base_at(const Eigen::VectorXd& q) const {
    return {base0.x + q[0], base0.y + q[1], base0.theta + q[2]};
  }

  std::vector<double> alpha_at(const Eigen::VectorXd& q) const {
    std::vector<double> alpha = alpha_tmpl;
    for (size_t i = 0; i < lat.size(); ++i) alpha[lat[i] - 1] = q[3 + i];
    return alpha;
  }

  std::vector<Frame> frames_at(const Eigen::VectorXd& q) const {
    return forward_kinematics(robot, base_at(q), alpha_at(q));
  }

  // Planar velocity of module m's center per unit of each decision variable.
  Eigen::Matrix2Xd point_jacobian(const std::vector<Frame>& frames,
                                  int m) const {
    Eigen::Matrix2Xd jac = Eigen::Matrix2Xd::Zero(2, nq());
    jac(0, 0) = 1.0;
    jac(1, 1) = 1.0;
    Eigen::Vector2d rel =
        frames[m].p.head<2>() - frames[0].p.head<2>();
    jac(0, 2) = -rel.y();
    jac(1, 2) = rel.x();
    for (size_t i = 0; i < lat.size(); ++i) {
      int joint = lat[i];
      if (m < joint) continue;  // module upstream of the joint
      JointAxis ja = joint_axis(robot, frames, joint);
      Eigen::Vector3d vel = ja.axis.cross(frames[m].p - ja.pivot);
      jac.col(3 + i) = vel.head<2>();
    }
    return jac;
  }

  Linearization linearize(const Eigen::VectorXd& q) const {
    const int n = nq();
    const int n_lat = static_cast<int>(lat.size());
    const std::vector<Frame> frames = frames_at(q);

    Linearization lin;
    const int n_res = 2 * static_cast<int>(stick.size()) + 2 * n_lat;
    lin.r.resize(n_res);
    lin.J = Eigen::MatrixXd::Zero(n_res, n);

    int row = 0;
    for (size_t k = 0; k < stick.size(); ++k) {
      const int m = stick[k];
      const double scale = std::sqrt(prm.w_stick * stick_w[k]);
      Eigen::Vector2d diff = frames[m].p.head<2>() - pbar[k];
      Eigen::Matrix2Xd pj = point_jacobian(frames, m);
      lin.r.segment<2>(row) = scale * diff;
      lin.J.block(row, 0, 2, n) = scale * pj;
      row += 2;
    }
    const double sp = std::sqrt(prm.w_prev);
    for (int i = 0; i < n_lat; ++i) {
      const double st = std::sqrt(w_track[i]);
      lin.r[row] = st * (q[3 + i] - abar[i]);
      lin.J(row, 3 + i) = st;
      ++row;
      lin.r[row] = sp * (q[3 + i] - aprev[i]);
      lin.J(row, 3 + i) = sp;
      ++row;
    }

    // Hard constraints. Box rows are exact (the variables are the angles);
    // peg rows are linearized and recomputed at every iterate.
    std::vector<Eigen::VectorXd> crows;
    std::vector<double> crhs;
    for (int i = 0; i < n_lat; ++i) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      c[3 + i] = 1.0;
      crows.push_back(c);
      crhs.push_back(lo[i] - q[3 + i]);
      crows.push_back(-c);
      crhs.push_back(q[3 + i] - hi[i]);
    }
    lin.n_box_rows = static_cast<int>(crows.size());

    for (int m = 0; m < robot.n_modules; ++m) {
      Eigen::Vector2d c = frames[m].p.head<2>();
      for (size_t p = 0; p < env.pegs.size(); ++p) {
        Eigen::Vector2d rel = c - env.pegs[p].center;
        double dist = rel.norm();
        double clr = dist - (robot.module_radius + env.pegs[p].radius);
        lin.max_penetration = std::max(lin.max_penetration, -clr);
        if (clr >= kPegMargin) continue;
        Eigen::Vector2d normal =
            dist > 1e-12 ? Eigen::Vector2d(rel / dist) : Eigen::Vector2d(1, 0);
        Eigen::Matrix2Xd pj = point_jacobian(frames, m);
        crows.push_back(pj.transpose() * normal);
        crhs.push_back(-clr);
        lin.peg_rows.emplace_back(m, static_cast<int>(p));
        lin.peg_normals.push_back(normal);
      }
    }

    lin.C.resize(static_cast<int>(crows.size()), n);
    lin.d.resize(static_cast<int>(crows.size()));
    for (size_t k = 0; k < crows.size(); ++k) {
      lin.C.row(k) = crows[k].transpose();
      lin.d[k] = crhs[k];
    }
    return lin;
  }
};

// Multiplier-weighted stationarity and complementarity of the nonlinear
// problem at q, with multipliers taken from the last QP solve. Rows are
// matched by identity (box) or (module, peg) key so the certificate survives
// changes in the active peg row set between iterates.
double kkt_residual(const Linearization& lin, const Eigen::VectorXd& u) {
  Eigen::VectorXd grad = 2.0 * lin.J.transpose() * lin.r;
  Eigen::VectorXd station = grad - lin.C.transpose() * u;
  double res = station.cwiseAbs().maxCoeff();
  // Constraint value at the current iterate (zero step) is -d.
  for (int k = 0; k < u.size(); ++k)
    res = std::max(res, std::abs(u[k] * lin.d[k]));
  return res;
}

// Carries multipliers from the previous iterate's rows onto the current
// rows: box rows map one-to-one, peg rows by (module, peg).
Eigen::VectorXd remap_multipliers(const Linearization& prev_lin,
                                  const Eigen::VectorXd& prev_u,
                                  const Linearization& lin) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(lin.C.rows());
  int nb = std::min(prev_lin.n_box_rows, lin.n_box_rows);
  u.head(nb) = prev_u.head(nb);
  for (size_t k = 0; k < lin.peg_rows.size(); ++k) {
    for (size_t j = 0; j < prev_lin.peg_rows.size(); ++j) {
      if (prev_lin.peg_rows[j] == lin.peg_rows[k]) {
        u[lin.n_box_rows + k] = prev_u[prev_lin.n_box_rows + j];
        break;
      }
    }
  }
  return u;
}

}  // namespace

void SolverParams::validate() const {
  if (w_stick <= 0.0 || w_track <= 0.0 || w_prev <= 0.0)
    throw RangeError("solver weights must be > 0");
  if (slip_tolerance <= 0.0) throw RangeError("solver.slip_tolerance_m <= 0");
  if (slip_downweight <= 0.0 || slip_downweight >= 1.0)
    throw RangeError("solver.slip_downweight outside (0, 1)");
  if (max_slip_iters < 1 || max_peg_iters < 1)
    throw RangeError("solver iteration counts must be >= 1");
  if (kkt_tol <= 0.0) throw RangeError("solver.kkt_tol <= 0");
  if (kkt_stall_tol < kkt_tol)
    throw RangeError("solver.kkt_stall_tol < solver.kkt_tol");
  if (w_track_slack < 0.0 || w_track_slack > w_track)
    throw RangeError("solver.w_track_slack outside [0, w_track]");
  if (penetration_tol <= 0.0) throw RangeError("solver.penetration_tol_m <= 0");
  if (steps_per_cycle < 8) throw RangeError("solver.steps_per_cycle < 8");
}

double work_increment(const Eigen::VectorXd& slip, int n_contacts, double mu,
                      double mass_total) {
  if (n_contacts <= 0) return 0.0;
  const double share = mass_total * kGravity / n_contacts;
  double w = 0.0;
  for (int i = 0; i < slip.size(); ++i) w += mu * share * slip[i];
  return w;
}

StepSolution solve_step(const RobotConfig& robot, const BodyState& prev,
                        const CommandFrame& cmd,
                        const std::vector<AngleInterval>& intervals,
                        const Environment& env, const SolverParams& params) {
  if (static_cast<int>(intervals.size()) != robot.n_joints())
    throw RangeError("solve_step: one interval per joint required");

  std::vector<double> alpha_cmd = command_vector(robot, cmd);

  Workspace ws{robot, env, params, prev.base, robot.lateral_joint_ids(),
               prev.alpha};
  for (int j : robot.vertical_joint_ids()) {
    if (intervals[j - 1].width() > 1e-12)
      throw RangeError("solve_step: vertical joint intervals must be degenerate");
    ws.alpha_tmpl[j - 1] = alpha_cmd[j - 1];
  }
  for (int j : ws.lat) {
    const AngleInterval& iv = intervals[j - 1];
    const double abar = iv.clamp(alpha_cmd[j - 1]);
    ws.abar.push_back(abar);
    ws.aprev.push_back(prev.alpha[j - 1]);
    ws.lo.push_back(iv.lo);
    ws.hi.push_back(iv.hi);
    // The command pulls at full strength only through a taut cable, i.e.
    // when it coincides with an interval bound. A command strictly inside
    // its interval means both cables are slack: the joint keeps a small
    // residual pull toward the template so the objective stays well
    // conditioned, but is otherwise held by w_prev and dragged by the
    // moving bounds alone.
    const bool taut =
        std::abs(abar - iv.lo) <= 1e-9 || std::abs(abar - iv.hi) <= 1e-9;
    ws.w_track.push_back(taut ? params.w_track : params.w_track_slack);
  }

  // Contact prediction: previous lateral shape with the new vertical wave
  // decides which modules can anchor this step. Anchor weight fades with
  // height so that modules entering or leaving the contact band hand off
  // load gradually instead of snapping in and out of the stick set.
  std::vector<double> alpha_pred = ws.alpha_tmpl;
  BodyState pred = make_state(robot, prev.base, alpha_pred, prev.t);
  std::vector<int> contact_modules = pred.contacts;
  for (int m : contact_modules) {
    if (std::binary_search(prev.contacts.begin(), prev.contacts.end(), m)) {
      const double h =
          pred.frames[m].p.z() - robot.module_radius;
      const double load = 1.0 - h / robot.contact_threshold;
      ws.stick.push_back(m);
      ws.stick_w.push_back(load * load);
      ws.pbar.push_back(prev.frames[m].p.head<2>());
    }
  }

  const int n = ws.nq();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  for (size_t i = 0; i < ws.lat.size(); ++i)
    q[3 + i] = prev.alpha[ws.lat[i] - 1];

  StepSolution sol;
  Linearization lin;
  Eigen::VectorXd u;
  const int max_gn = 10 * params.max_peg_iters;

  for (int round = 0; round < params.max_slip_iters; ++round) {
    ++sol.slip_rounds;
    bool converged = false;
    lin = ws.linearize(q);
    u = Eigen::VectorXd::Zero(lin.C.rows());

    double prev_kkt = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_gn; ++it) {
      ++sol.gn_iterations;
      QpProblem qp;
      qp.G = 2.0 * (lin.J.transpose() * lin.J);
      qp.G.diagonal().array() += 2e-12;
      qp.a = 2.0 * lin.J.transpose() * lin.r;
      qp.C = lin.C;
      qp.d = lin.d;
      QpSolution qs = solve_qp(qp);
      if (!qs.feasible) {
        throw Jammed("peg constraints inconsistent with angle bounds (" +
                     std::to_string(lin.peg_rows.size()) + " peg rows, " +
                     std::to_string(ws.stick.size()) + " anchors)");
      }
      q += qs.x;

      Linearization next = ws.linearize(q);
      Eigen::VectorXd u_next = remap_multipliers(lin, qs.u, next);
      lin = std::move(next);
      u = std::move(u_next);
      sol.kkt_residual = kkt_residual(lin, u);
      if (sol.kkt_residual <= params.kkt_tol &&
          lin.max_penetration <= params.penetration_tol) {
        converged = true;
        break;
      }
      // Wedged poses with near-parallel peg normals leave the multiplier
      // set non-unique: the pose stops moving but the stationarity residual
      // stalls above kkt_tol. Accept the step once progress stops, provided
      // contacts are resolved and the stall is mild.
      if (it >= 2 && sol.kkt_residual > 0.9 * prev_kkt &&
          sol.kkt_residual <= params.kkt_stall_tol &&
          lin.max_penetration <= params.penetration_tol) {
        converged = true;
        break;
      }
      prev_kkt = sol.kkt_residual;
    }
    if (!converged) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "step did not reach the KKT tolerance (residual %.3e, "
                    "penetration %.3e)",
                    sol.kkt_residual, lin.max_penetration);
      throw NonConvergence(msg);
    }

    // Demote anchors that slid beyond tolerance and re-solve.
    std::vector<Frame> frames = ws.frames_at(q);
    bool offenders = false;
    for (size_t k = 0; k < ws.stick.size(); ++k) {
      double slip = (frames[ws.stick[k]].p.head<2>() - ws.pbar[k]).norm();
      if (slip > params.slip_tolerance) {
        ws.stick_w[k] *= params.slip_downweight;
        offenders = true;
      }
    }
    if (!offenders || round + 1 == params.max_slip_iters) break;
  }

  sol.new_state = make_state(robot, ws.base_at(q), ws.alpha_at(q), cmd.t);
  sol.contact_modules = contact_modules;
  sol.stick_set.clear();
  sol.slip.resize(contact_modules.size());
  {
    std::vector<Frame> frames = ws.frames_at(q);
    for (size_t k = 0; k < contact_modules.size(); ++k) {
      int m = contact_modules[k];
      sol.slip[k] =
          (frames[m].p.head<2>() - prev.frames[m].p.head<2>()).norm();
    }
    for (size_t k = 0; k < ws.stick.size(); ++k) {
      double slip = (frames[ws.stick[k]].p.head<2>() - ws.pbar[k]).norm();
      if (slip <= params.slip_tolerance) sol.stick_set.push_back(ws.stick[k]);
    }
  }
  sol.work_increment = work_increment(
      sol.slip, static_cast<int>(contact_modules.size()), env.mu,
      robot.mass_total);
  for (size_t k = 0; k < lin.peg_rows.size(); ++k) {
    double mag = u[lin.n_box_rows + static_cast<int>(k)];
    if (mag > 0.0)
      sol.peg_forces.push_back({lin.peg_rows[k].second, lin.peg_rows[k].first,
                                lin.peg_normals[k], mag});
  }
  return sol;
}

}  // namespace sidewinder
