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
#include <vector>

namespace slipwalk {

/// minimize 1/2 x'Hx + g'x  subject to  A_eq x = b_eq,  A_in x <= b_in.
/// H must be symmetric positive definite.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;

  int n() const { return static_cast<int>(g.size()); }
};

struct QpOptions {
  int max_iterations = 1000;
  /// Violation below which an inequality counts as satisfied.
  double feasibility_tol = 1e-12;
};

/// Multipliers follow H x + g + A_eq' nu + A_in' mu = 0 with mu >= 0.
struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd nu;
  Eigen::VectorXd mu;
  double objective = 0.0;
  int iterations = 0;
  std::vector<int> active;
  double kkt_residual = 0.0;
};

/// Largest of the stationarity, primal, dual and complementarity violations.
double kkt_residual(const QpProblem& qp, const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                    const Eigen::VectorXd& mu);

/**
 * Dense dual active-set solver (Goldfarb-Idnani). Starts from the
 * unconstrained minimizer and adds violated constraints, so no feasible
 * starting point is needed. Throws InfeasibleError, ConvergenceError, or
 * InvalidParameter when H is not positive definite.
 */
QpResult solve_qp(const QpProblem& qp, const QpOptions& options = {});

}  // namespace slipwalk
