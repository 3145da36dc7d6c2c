#include "sidewinder/qp.hpp"

#include <algorithm>
#include <limits>

#include "sidewinder/errors.hpp"

namespace sidewinder {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-11;   // violation below this counts as satisfied
constexpr double kDirTol = 1e-14;    // curvature / dual-direction threshold
}  // namespace

QpSolution solve_qp(const QpProblem& qp) {
  const int n = static_cast<int>(qp.G.rows());
  const int m = static_cast<int>(qp.C.rows());

  Eigen::LLT<Eigen::MatrixXd> llt(qp.G);
  if (llt.info() != Eigen::Success)
    throw NonConvergence("qp: hessian is not positive definite");

  QpSolution sol;
  sol.x = -llt.solve(qp.a);
  sol.u = Eigen::VectorXd::Zero(m);
  if (m == 0) return sol;

  std::vector<int> active;
  std::vector<double> mult;
  std::vector<char> in_active(m, 0);

  const int max_iters = 50 * (n + m + 1);
  int iters = 0;
  while (true) {
    if (++iters > max_iters)
      throw NonConvergence("qp: iteration budget exhausted");

    // Most violated inactive constraint; finish when none remain.
    int p = -1;
    double worst = -kFeasTol;
    for (int i = 0; i < m; ++i) {
      if (in_active[i]) continue;
      double s = qp.C.row(i).dot(sol.x) - qp.d[i];
      if (s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) break;

    Eigen::VectorXd cp = qp.C.row(p).transpose();
    const Eigen::VectorXd gicp = llt.solve(cp);
    double up = 0.0;  // multiplier accumulating for the incoming constraint

    while (true) {
      if (++iters > max_iters)
        throw NonConvergence("qp: iteration budget exhausted");

      const int k = static_cast<int>(active.size());
      Eigen::VectorXd z, r;
      if (k == 0) {
        z = gicp;
        r.resize(0);
      } else {
        Eigen::MatrixXd N(n, k);
        for (int j = 0; j < k; ++j) N.col(j) = qp.C.row(active[j]).transpose();
        Eigen::MatrixXd gin = llt.solve(N);
        Eigen::MatrixXd M = N.transpose() * gin;
        r = M.ldlt().solve(N.transpose() * gicp);
        z = gicp - gin * r;
      }

      const double curvature = z.dot(cp);
      const double sp = cp.dot(sol.x) - qp.d[p];

      double t1 = kInf;
      int drop = -1;
      for (int j = 0; j < k; ++j) {
        if (r[j] > kDirTol) {
          double tj = mult[j] / r[j];
          if (tj < t1) {
            t1 = tj;
            drop = j;
          }
        }
      }
      const double t2 = curvature > kDirTol ? -sp / curvature : kInf;
      const double t = std::min(t1, t2);

      if (t == kInf) {
        // Dual is unbounded: the constraint set is inconsistent.
        sol.feasible = false;
        sol.iterations = iters;
        for (size_t j = 0; j < active.size(); ++j)
          sol.u[active[j]] = mult[j];
        sol.active = active;
        return sol;
      }

      for (int j = 0; j < k; ++j) mult[j] -= t * r[j];
      up += t;
      if (curvature > kDirTol) sol.x += t * z;

      if (t == t2) {
        active.push_back(p);
        mult.push_back(up);
        in_active[p] = 1;
        break;
      }
      // Partial step: the blocking constraint leaves the active set and the
      // incoming one is retried against the reduced set.
      in_active[active[drop]] = 0;
      active.erase(active.begin() + drop);
      mult.erase(mult.begin() + drop);
    }
  }

  sol.iterations = iters;
  for (size_t j = 0; j < active.size(); ++j) sol.u[active[j]] = mult[j];
  sol.active = active;
  return sol;
}

}  // namespace sidewinder
