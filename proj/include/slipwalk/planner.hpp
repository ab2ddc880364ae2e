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

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "slipwalk/hlip.hpp"
#include "slipwalk/qp.hpp"

namespace slipwalk {

enum class TerminalMode { CostOnly, Equality };

/// One plane of a plan: extended S2S dynamics, current state, and the targets
/// of the predicted states x_1..x_N.
struct PlanePlan {
  ExtendedS2S s2s;
  Eigen::Vector3d x0 = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> target;
  /// |u_k| >= min_step with the side fixed by stance parity; 0 disables it.
  double min_step = 0.0;
};

/**
 * Step-size plan over inputs u_0..u_{N-1} and states x_1..x_N:
 *   J = sum_k (x_k - xd_k)' Q (x_k - xd_k) + R sum_k u_k^2,  |u_k| <= u_max.
 * One plane for the planar case, two (x then y) for the 3D case.
 */
struct PlanProblem {
  std::vector<PlanePlan> planes;
  int N = 10;
  double u_max = 0.5;
  Eigen::Matrix3d Q = Eigen::Vector3d(10.0, 1.0, 1.0).asDiagonal();
  double R = 0.1;
  TerminalMode terminal = TerminalMode::CostOnly;
  /// Step index of u_0; sets the sign of min-step constraints (even: left stance,
  /// so the right foot lands and u_y <= -min_step).
  int first_step = 0;

  void validate() const;
};

/**
 * Condensed plan in pre-stabilized form. Each plane's inputs are
 * u_k = K x_k + v_k with K the extended deadbeat gain, and the QP variable
 * is the stacked correction v (plane-major).
 */
struct CondensedPlan {
  QpProblem qp;
  /// Stacked predicted states per plane: X = Phi x0 + Gamma v.
  std::vector<Eigen::MatrixXd> Phi;
  std::vector<Eigen::MatrixXd> Gamma;
  /// Step sizes from the QP variable: U = input_map v + input_offset.
  Eigen::MatrixXd input_map;
  Eigen::VectorXd input_offset;
  /// Constant term so that J = 1/2 v'Hv + g'v + constant.
  double constant = 0.0;
};

/// Eliminates the states by forward substitution.
CondensedPlan build_plan(const PlanProblem& problem);

struct PlanSolution {
  /// Per plane: N inputs and N + 1 states (x_0 first).
  std::vector<std::vector<double>> u_seq;
  std::vector<std::vector<Eigen::Vector3d>> x_seq;
  double objective = 0.0;
  std::string status;
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// Plan objective J for a given input sequence (per plane).
double plan_objective(const PlanProblem& problem, const std::vector<std::vector<double>>& u);

/// Throws InfeasibleError (e.g. unreachable terminal equality) or ConvergenceError.
PlanSolution solve_plan(const PlanProblem& problem, const QpOptions& options = {});

/// Desired extended state of a plane at time t.
using TrajectorySource = std::function<Eigen::Vector3d(int plane, double t)>;

struct MpcStep {
  std::vector<Eigen::Vector3d> x;  // per plane
  std::vector<double> u;           // per plane
  /// True when the plan failed and the shifted previous plan was used.
  bool fallback = false;
};

/**
 * Receding-horizon tracking on the H-LIP. Entry 0 is the synchronized initial
 * state with the realized first step u0; for k >= 1 the H-LIP state evolves with
 * the first input of a plan solved from it against targets at t0 + (k+j) T,
 * j = 1..N. A failed plan reuses the previous one shifted by one step.
 * Returns n_steps + 1 entries. The problem's x0 and targets are overwritten.
 */
std::vector<MpcStep> mpc_track(const PlanProblem& problem_template, const TrajectorySource& source,
                               const std::vector<Eigen::Vector3d>& x0,
                               const std::vector<double>& u0, int n_steps, double T,
                               double t0 = 0.0);

}  // namespace slipwalk
