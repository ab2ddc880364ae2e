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

#include "slipwalk/planner.hpp"

#include <cmath>
#include <string>

#include "slipwalk/errors.hpp"

namespace slipwalk {

void PlanProblem::validate() const {
  if (planes.empty() || planes.size() > 2) throw InvalidParameter("plan needs one or two planes");
  if (N < 1) throw InvalidParameter("plan horizon N must be at least 1");
  if (!(u_max > 0.0)) throw InvalidParameter("plan u_max must be positive");
  if (!(R > 0.0)) throw InvalidParameter("plan R must be positive");
  if (!Q.allFinite() || (Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidParameter("plan Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(Q);
  if (eig.eigenvalues().minCoeff() < -1e-12) throw InvalidParameter("plan Q must be PSD");
  for (const auto& p : planes) {
    if (static_cast<int>(p.target.size()) != N)
      throw InvalidParameter("plan needs one target per predicted state (" + std::to_string(N) +
                             ")");
    if (!(p.min_step >= 0.0)) throw InvalidParameter("plan min_step must be non-negative");
    if (p.min_step > u_max) throw InvalidParameter("plan min_step exceeds u_max");
  }
}

CondensedPlan build_plan(const PlanProblem& problem) {
  problem.validate();
  const int N = problem.N;
  const int P = static_cast<int>(problem.planes.size());
  const int n = N * P;

  CondensedPlan out;
  out.qp.H = Eigen::MatrixXd::Zero(n, n);
  out.qp.g = Eigen::VectorXd::Zero(n);
  out.input_map = Eigen::MatrixXd::Zero(n, n);
  out.input_offset = Eigen::VectorXd::Zero(n);

  for (int pi = 0; pi < P; ++pi) {
    const PlanePlan& pl = problem.planes[pi];
    const Eigen::Vector3d& B = pl.s2s.B;
    // Open-loop powers of A reach cond(H) ~ 1e11 at N = 10; the nilpotent
    // deadbeat loop keeps every prediction block bounded.
    const Eigen::RowVector3d K = deadbeat_gain(pl.s2s).K;
    const Eigen::Matrix3d Acl = pl.s2s.A + B * K;

    Eigen::MatrixXd Phi(3 * N, 3);
    Eigen::MatrixXd Gamma = Eigen::MatrixXd::Zero(3 * N, N);
    Eigen::Matrix3d Ak = Acl;
    for (int k = 0; k < N; ++k) {
      Phi.block<3, 3>(3 * k, 0) = Ak;
      Ak = Acl * Ak;
    }
    // Row block k (state x_{k+1}) depends on v_i, i <= k, through Acl^{k-i} B.
    for (int i = 0; i < N; ++i) {
      Eigen::Vector3d col = B;
      for (int k = i; k < N; ++k) {
        Gamma.block<3, 1>(3 * k, i) = col;
        col = Acl * col;
      }
    }
    // u_k = K x_k + v_k with x_0 = x0 and x_k from row block k - 1.
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N);
    Eigen::VectorXd c(N);
    c(0) = K * pl.x0;
    for (int k = 1; k < N; ++k) {
      M.row(k).head(k) = K * Gamma.block(3 * (k - 1), 0, 3, k);
      c(k) = K * Phi.block<3, 3>(3 * (k - 1), 0) * pl.x0;
    }

    Eigen::VectorXd Xd(3 * N);
    for (int k = 0; k < N; ++k) Xd.segment<3>(3 * k) = pl.target[k];
    const Eigen::VectorXd free = Phi * pl.x0 - Xd;

    Eigen::MatrixXd QGamma(3 * N, N);
    Eigen::VectorXd Qfree(3 * N);
    for (int k = 0; k < N; ++k) {
      QGamma.middleRows<3>(3 * k) = problem.Q * Gamma.middleRows<3>(3 * k);
      Qfree.segment<3>(3 * k) = problem.Q * free.segment<3>(3 * k);
    }
    out.qp.H.block(pi * N, pi * N, N, N) =
        2.0 * (Gamma.transpose() * QGamma + problem.R * M.transpose() * M);
    out.qp.g.segment(pi * N, N) =
        2.0 * (Gamma.transpose() * Qfree + problem.R * M.transpose() * c);
    out.constant += free.dot(Qfree) + problem.R * c.squaredNorm();
    out.input_map.block(pi * N, pi * N, N, N) = M;
    out.input_offset.segment(pi * N, N) = c;
    out.Phi.push_back(Phi);
    out.Gamma.push_back(Gamma);
  }
  out.qp.H = 0.5 * (out.qp.H + out.qp.H.transpose());

  // Box and min-step rows act on U = M v + c.
  const Eigen::MatrixXd& M = out.input_map;
  const Eigen::VectorXd& c = out.input_offset;
  int rows = 2 * n;
  for (const auto& pl : problem.planes)
    if (pl.min_step > 0.0) rows += N;
  out.qp.A_in = Eigen::MatrixXd::Zero(rows, n);
  out.qp.b_in = Eigen::VectorXd::Zero(rows);
  int r = 0;
  for (int j = 0; j < n; ++j) {
    out.qp.A_in.row(r) = M.row(j);
    out.qp.b_in(r++) = problem.u_max - c(j);
    out.qp.A_in.row(r) = -M.row(j);
    out.qp.b_in(r++) = problem.u_max + c(j);
  }
  for (int pi = 0; pi < P; ++pi) {
    const double m = problem.planes[pi].min_step;
    if (!(m > 0.0)) continue;
    for (int k = 0; k < N; ++k) {
      const bool left_stance = (problem.first_step + k) % 2 == 0;
      // Left stance lands the right foot: u <= -m; right stance: u >= m.
      const double sign = left_stance ? 1.0 : -1.0;
      const int j = pi * N + k;
      out.qp.A_in.row(r) = sign * M.row(j);
      out.qp.b_in(r++) = -m - sign * c(j);
    }
  }

  if (problem.terminal == TerminalMode::Equality) {
    out.qp.A_eq = Eigen::MatrixXd::Zero(3 * P, n);
    out.qp.b_eq = Eigen::VectorXd::Zero(3 * P);
    for (int pi = 0; pi < P; ++pi) {
      const PlanePlan& pl = problem.planes[pi];
      out.qp.A_eq.block(3 * pi, pi * N, 3, N) = out.Gamma[pi].bottomRows<3>();
      out.qp.b_eq.segment<3>(3 * pi) = pl.target[N - 1] - out.Phi[pi].bottomRows<3>() * pl.x0;
    }
  } else {
    out.qp.A_eq.resize(0, n);
    out.qp.b_eq.resize(0);
  }
  return out;
}

double plan_objective(const PlanProblem& problem, const std::vector<std::vector<double>>& u) {
  double J = 0.0;
  for (std::size_t pi = 0; pi < problem.planes.size(); ++pi) {
    const PlanePlan& pl = problem.planes[pi];
    Eigen::Vector3d x = pl.x0;
    for (int k = 0; k < problem.N; ++k) {
      x = pl.s2s.A * x + pl.s2s.B * u[pi][k];
      const Eigen::Vector3d e = x - pl.target[k];
      J += e.dot(problem.Q * e) + problem.R * u[pi][k] * u[pi][k];
    }
  }
  return J;
}

PlanSolution solve_plan(const PlanProblem& problem, const QpOptions& options) {
  const CondensedPlan cp = build_plan(problem);
  QpResult qr;
  try {
    qr = solve_qp(cp.qp, options);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string("plan infeasible: ") + e.what());
  }

  const Eigen::VectorXd U = cp.input_map * qr.x + cp.input_offset;
  PlanSolution sol;
  const int N = problem.N;
  for (std::size_t pi = 0; pi < problem.planes.size(); ++pi) {
    const PlanePlan& pl = problem.planes[pi];
    std::vector<double> u(N);
    std::vector<Eigen::Vector3d> xs;
    xs.reserve(N + 1);
    xs.push_back(pl.x0);
    for (int k = 0; k < N; ++k) {
      u[k] = U(static_cast<int>(pi) * N + k);
      xs.push_back(pl.s2s.A * xs.back() + pl.s2s.B * u[k]);
    }
    sol.u_seq.push_back(std::move(u));
    sol.x_seq.push_back(std::move(xs));
  }
  sol.objective = plan_objective(problem, sol.u_seq);
  sol.status = "optimal";
  sol.kkt_residual = qr.kkt_residual;
  sol.iterations = qr.iterations;
  return sol;
}

std::vector<MpcStep> mpc_track(const PlanProblem& problem_template, const TrajectorySource& source,
                               const std::vector<Eigen::Vector3d>& x0,
                               const std::vector<double>& u0, int n_steps, double T, double t0) {
  const std::size_t P = problem_template.planes.size();
  if (x0.size() != P || u0.size() != P)
    throw InvalidParameter("MPC initial state needs one entry per plane");
  if (n_steps < 0) throw InvalidParameter("MPC step count must be non-negative");
  if (!(T > 0.0)) throw InvalidParameter("MPC step period must be positive");

  std::vector<MpcStep> out;
  out.reserve(n_steps + 1);
  out.push_back({x0, u0, false});

  PlanProblem problem = problem_template;
  PlanSolution previous;
  int previous_at = -1;
  for (int k = 1; k <= n_steps; ++k) {
    MpcStep step;
    const MpcStep& last = out.back();
    for (std::size_t pi = 0; pi < P; ++pi) {
      const ExtendedS2S& s2s = problem.planes[pi].s2s;
      step.x.push_back(s2s.A * last.x[pi] + s2s.B * last.u[pi]);
    }
    problem.first_step = problem_template.first_step + k;
    for (std::size_t pi = 0; pi < P; ++pi) {
      problem.planes[pi].x0 = step.x[pi];
      problem.planes[pi].target.resize(problem.N);
      for (int j = 0; j < problem.N; ++j)
        problem.planes[pi].target[j] = source(static_cast<int>(pi), t0 + (k + j + 1) * T);
    }
    try {
      const PlanSolution sol = solve_plan(problem);
      for (std::size_t pi = 0; pi < P; ++pi) step.u.push_back(sol.u_seq[pi][0]);
      previous = sol;
      previous_at = k;
    } catch (const RuntimeFailure&) {
      const int shift = k - previous_at;
      if (previous_at < 0 || shift >= problem.N) throw;
      for (std::size_t pi = 0; pi < P; ++pi) step.u.push_back(previous.u_seq[pi][shift]);
      step.fallback = true;
    }
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace slipwalk
