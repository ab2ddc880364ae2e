/*
 Copyright 2026 The slipwalk Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "slipwalk/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slipwalk/errors.hpp"

namespace slipwalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Internal form: constraints n_i' x + c_i (= 0 | >= 0), normals stored as columns.
struct Work {
  int n = 0;
  Eigen::MatrixXd J;  // L^{-T} rotated so that its tail columns span the free subspace
  Eigen::MatrixXd R;  // upper-triangular factor of J' N_active
  int q = 0;          // number of active constraints
  double r_norm = 1.0;

  Eigen::VectorXd d;
  Eigen::VectorXd z;
  Eigen::VectorXd r;

  void compute_d(const Eigen::VectorXd& np) { d.noalias() = J.transpose() * np; }

  void update_z() {
    z.setZero();
    for (int j = q; j < n; ++j) z += J.col(j) * d(j);
  }

  void update_r() {
    for (int i = q - 1; i >= 0; --i) {
      double sum = d(i);
      for (int j = i + 1; j < q; ++j) sum -= R(i, j) * r(j);
      r(i) = sum / R(i, i);
    }
  }

  // Appends the constraint whose d = J' n was last computed. False when dependent.
  bool add_constraint() {
    for (int j = n - 1; j >= q + 1; --j) {
      double cc = d(j - 1);
      double ss = d(j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d(j) = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d(j - 1) = -h;
      } else {
        d(j - 1) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = 0; k < n; ++k) {
        const double t1 = J(k, j - 1);
        const double t2 = J(k, j);
        J(k, j - 1) = t1 * cc + t2 * ss;
        J(k, j) = xny * (t1 + J(k, j - 1)) - t2;
      }
    }
    ++q;
    for (int i = 0; i < q; ++i) R(i, q - 1) = d(i);
    if (std::abs(d(q - 1)) <= kEps * r_norm) return false;
    r_norm = std::max(r_norm, std::abs(d(q - 1)));
    return true;
  }

  // Removes active position pos and restores the triangular factor.
  void delete_position(int pos) {
    for (int j = pos; j < q - 1; ++j)
      for (int i = 0; i <= j + 1 && i < n; ++i) R(i, j) = R(i, j + 1);
    for (int i = 0; i < n; ++i) R(i, q - 1) = 0.0;
    --q;
    for (int j = pos; j < q; ++j) {
      double cc = R(j, j);
      double ss = R(j + 1, j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      R(j + 1, j) = 0.0;
      if (cc < 0.0) {
        R(j, j) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R(j, j) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = j + 1; k < q; ++k) {
        const double t1 = R(j, k);
        const double t2 = R(j + 1, k);
        R(j, k) = t1 * cc + t2 * ss;
        R(j + 1, k) = xny * (t1 + R(j, k)) - t2;
      }
      for (int k = 0; k < n; ++k) {
        const double t1 = J(k, j);
        const double t2 = J(k, j + 1);
        J(k, j) = t1 * cc + t2 * ss;
        J(k, j + 1) = xny * (J(k, j) + t1) - t2;
      }
    }
  }
};

void check_shapes(const QpProblem& qp) {
  const int n = qp.n();
  if (n == 0) throw InvalidParameter("QP has no variables");
  if (qp.H.rows() != n || qp.H.cols() != n) throw InvalidParameter("QP Hessian has the wrong shape");
  if (qp.A_eq.rows() != qp.b_eq.size() || (qp.A_eq.rows() > 0 && qp.A_eq.cols() != n))
    throw InvalidParameter("QP equality constraints have the wrong shape");
  if (qp.A_in.rows() != qp.b_in.size() || (qp.A_in.rows() > 0 && qp.A_in.cols() != n))
    throw InvalidParameter("QP inequality constraints have the wrong shape");
  if (!qp.H.allFinite() || !qp.g.allFinite() || !qp.A_eq.allFinite() || !qp.b_eq.allFinite() ||
      !qp.A_in.allFinite() || !qp.b_in.allFinite())
    throw InvalidParameter("QP data must be finite");
}

}  // namespace

double kkt_residual(const QpProblem& qp, const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                    const Eigen::VectorXd& mu) {
  Eigen::VectorXd stat = qp.H * x + qp.g;
  if (qp.A_eq.rows() > 0) stat += qp.A_eq.transpose() * nu;
  if (qp.A_in.rows() > 0) stat += qp.A_in.transpose() * mu;
  double res = stat.cwiseAbs().maxCoeff();
  if (qp.A_eq.rows() > 0) res = std::max(res, (qp.A_eq * x - qp.b_eq).cwiseAbs().maxCoeff());
  if (qp.A_in.rows() > 0) {
    const Eigen::VectorXd slack = qp.A_in * x - qp.b_in;
    for (int i = 0; i < slack.size(); ++i) {
      res = std::max(res, std::max(slack(i), 0.0));
      res = std::max(res, std::max(-mu(i), 0.0));
      res = std::max(res, std::abs(mu(i) * slack(i)));
    }
  }
  return res;
}

QpResult solve_qp(const QpProblem& qp, const QpOptions& options) {
  check_shapes(qp);
  const int n = qp.n();
  const int me = static_cast<int>(qp.A_eq.rows());
  const int mi = static_cast<int>(qp.A_in.rows());

  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (qp.H + qp.H.transpose()));
  if (llt.info() != Eigen::Success) throw InvalidParameter("QP Hessian is not positive definite");

  Work w;
  w.n = n;
  const Eigen::MatrixXd U = llt.matrixU();
  w.J = U.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
  w.R = Eigen::MatrixXd::Zero(n, n);
  w.d = Eigen::VectorXd::Zero(n);
  w.z = Eigen::VectorXd::Zero(n);
  w.r = Eigen::VectorXd::Zero(n + 1);

  // Constraint normals in the n'x + c >= 0 convention.
  auto normal_in = [&](int i) -> Eigen::VectorXd { return -qp.A_in.row(i).transpose(); };
  auto value_in = [&](int i, const Eigen::VectorXd& x) {
    return qp.b_in(i) - qp.A_in.row(i).dot(x);
  };

  Eigen::VectorXd x = -llt.solve(qp.g);
  // u holds multipliers of active constraints by position; active holds their ids
  // (-1 - e for equality e, i for inequality i).
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
  std::vector<int> active(n + 1, 0);

  for (int e = 0; e < me; ++e) {
    const Eigen::VectorXd np = qp.A_eq.row(e).transpose();
    w.compute_d(np);
    w.update_z();
    w.update_r();
    const double zn = w.z.dot(np);
    const double viol = qp.b_eq(e) - np.dot(x);
    double t2 = 0.0;
    if (std::abs(zn) > kEps * (1.0 + np.norm())) t2 = viol / zn;
    else if (std::abs(viol) > 1e-9 * (1.0 + std::abs(qp.b_eq(e))))
      throw InfeasibleError("QP equality constraints are inconsistent");
    x += t2 * w.z;
    u(w.q) = t2;
    for (int k = 0; k < w.q; ++k) u(k) -= t2 * w.r(k);
    active[w.q] = -1 - e;
    if (!w.add_constraint()) {
      if (std::abs(viol) > 1e-9 * (1.0 + std::abs(qp.b_eq(e))))
        throw InfeasibleError("QP equality constraints are inconsistent");
      --w.q;  // redundant equality; drop it again
      for (int i = 0; i < n; ++i) w.R(i, w.q) = 0.0;
    }
  }
  const int q_eq = w.q;

  std::vector<char> excluded(mi, 0);
  int iterations = 0;
  auto is_active = [&](int i) {
    for (int k = q_eq; k < w.q; ++k)
      if (active[k] == i) return true;
    return false;
  };

  while (true) {
    if (++iterations > options.max_iterations)
      throw ConvergenceError("QP solver hit the iteration cap", kInf);
    // Most violated inactive inequality.
    int ip = -1;
    double worst = -options.feasibility_tol;
    for (int i = 0; i < mi; ++i) {
      if (excluded[i] || is_active(i)) continue;
      const double s = value_in(i, x) / (1.0 + qp.A_in.row(i).norm());
      if (s < worst) {
        worst = s;
        ip = i;
      }
    }
    if (ip < 0) break;

    const Eigen::VectorXd np = normal_in(ip);
    const Eigen::VectorXd x_old = x;
    const Eigen::VectorXd u_old = u;
    const std::vector<int> active_old = active;
    const int q_old = w.q;
    const Eigen::MatrixXd J_old = w.J;
    const Eigen::MatrixXd R_old = w.R;
    const double r_norm_old = w.r_norm;
    u(w.q) = 0.0;
    active[w.q] = ip;

    bool added = false;
    while (!added) {
      w.compute_d(np);
      w.update_z();
      w.update_r();

      // Partial step: largest dual step keeping active inequality multipliers >= 0.
      double t1 = kInf;
      int l = -1;
      for (int k = q_eq; k < w.q; ++k) {
        if (w.r(k) > 0.0) {
          const double ratio = u(k) / w.r(k);
          if (ratio < t1) {
            t1 = ratio;
            l = k;
          }
        }
      }
      // Full step: primal step that satisfies the new constraint.
      double t2 = kInf;
      const double zn = w.z.dot(np);
      if (w.z.norm() > kEps * 1e3 * (1.0 + x.norm())) t2 = -value_in(ip, x) / zn;

      const double t = std::min(t1, t2);
      if (!std::isfinite(t))
        throw InfeasibleError("QP constraints are infeasible (constraint " + std::to_string(ip) +
                              " cannot be satisfied)");
      if (!std::isfinite(t2)) {
        // Dual step only.
        for (int k = 0; k < w.q; ++k) u(k) -= t * w.r(k);
        u(w.q) += t;
        const int keep_id = active[w.q];
        const double keep_u = u(w.q);
        for (int k = l; k < w.q - 1; ++k) {
          active[k] = active[k + 1];
          u(k) = u(k + 1);
        }
        w.delete_position(l);
        active[w.q] = keep_id;
        u(w.q) = keep_u;
        if (++iterations > options.max_iterations)
          throw ConvergenceError("QP solver hit the iteration cap", kInf);
        continue;
      }

      x += t * w.z;
      for (int k = 0; k < w.q; ++k) u(k) -= t * w.r(k);
      u(w.q) += t;

      if (t == t2) {
        if (!w.add_constraint()) {
          // Numerically dependent: skip this constraint and restore.
          excluded[ip] = 1;
          x = x_old;
          u = u_old;
          active = active_old;
          w.q = q_old;
          w.J = J_old;
          w.R = R_old;
          w.r_norm = r_norm_old;
        }
        added = true;
      } else {
        const int keep_id = active[w.q];
        const double keep_u = u(w.q);
        for (int k = l; k < w.q - 1; ++k) {
          active[k] = active[k + 1];
          u(k) = u(k + 1);
        }
        w.delete_position(l);
        active[w.q] = keep_id;
        u(w.q) = keep_u;
        if (++iterations > options.max_iterations)
          throw ConvergenceError("QP solver hit the iteration cap", kInf);
      }
    }
  }

  QpResult res;
  res.x = x;
  res.nu = Eigen::VectorXd::Zero(me);
  res.mu = Eigen::VectorXd::Zero(mi);
  for (int k = 0; k < w.q; ++k) {
    if (active[k] < 0)
      res.nu(-1 - active[k]) = -u(k);
    else {
      res.mu(active[k]) = u(k);
      res.active.push_back(active[k]);
    }
  }
  std::sort(res.active.begin(), res.active.end());
  res.objective = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
  res.iterations = iterations;
  res.kkt_residual = kkt_residual(qp, x, res.nu, res.mu);

  // Excluded (dependent) constraints must still hold.
  for (int i = 0; i < mi; ++i)
    if (excluded[i] && value_in(i, x) < -1e-9 * (1.0 + std::abs(qp.b_in(i))))
      throw InfeasibleError("QP constraints are infeasible (dependent constraint " +
                            std::to_string(i) + " violated)");
  return res;
}

}  // namespace slipwalk
