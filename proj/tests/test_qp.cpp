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

#include <gtest/gtest.h>

#include <limits>
#include <optional>
#include <random>

#include "slipwalk/errors.hpp"
#include "slipwalk/qp.hpp"
#include "test_util.hpp"

namespace slipwalk {
namespace {

using testing::uniform;

// Exhaustive active-set enumeration: solve the KKT system of every subset of
// inequality rows (plus all equalities) and keep the primal and dual feasible
// point with the lowest objective. Exponential, fine for m <= 10.
std::optional<Eigen::VectorXd> enumerate_qp(const QpProblem& qp) {
  const int n = qp.n();
  const int me = static_cast<int>(qp.b_eq.size());
  const int mi = static_cast<int>(qp.b_in.size());
  std::optional<Eigen::VectorXd> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << mi); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < mi; ++i)
      if (mask & (1u << i)) act.push_back(i);
    const int m = me + static_cast<int>(act.size());
    if (m > n) continue;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
    Eigen::VectorXd rhs(n + m);
    K.topLeftCorner(n, n) = qp.H;
    rhs.head(n) = -qp.g;
    for (int r = 0; r < me; ++r) {
      K.block(0, n + r, n, 1) = qp.A_eq.row(r).transpose();
      K.block(n + r, 0, 1, n) = qp.A_eq.row(r);
      rhs(n + r) = qp.b_eq(r);
    }
    for (std::size_t r = 0; r < act.size(); ++r) {
      const int row = n + me + static_cast<int>(r);
      K.block(0, row, n, 1) = qp.A_in.row(act[r]).transpose();
      K.block(row, 0, 1, n) = qp.A_in.row(act[r]);
      rhs(row) = qp.b_in(act[r]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + m) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    bool ok = true;
    // H x + g + A' lambda = 0, so active inequality multipliers must be >= 0.
    for (std::size_t r = 0; r < act.size(); ++r)
      if (sol(n + me + static_cast<int>(r)) < -1e-9) ok = false;
    if (mi > 0 && ((qp.A_in * x - qp.b_in).array() > 1e-9).any()) ok = false;
    if (!ok) continue;
    const double obj = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
    if (obj < best_obj - 1e-12) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

QpProblem random_qp(std::mt19937_64& rng, int n, int m_in, int m_eq) {
  QpProblem qp;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = uniform(rng, -1.0, 1.0);
  qp.H = M * M.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  qp.g = Eigen::VectorXd::NullaryExpr(n, [&] { return uniform(rng, -3.0, 3.0); });
  qp.A_in = Eigen::MatrixXd::NullaryExpr(m_in, n, [&] { return uniform(rng, -1.0, 1.0); });
  // Rows satisfied with margin at a random interior point keep the problem feasible.
  const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(n, [&] { return uniform(rng, -0.5, 0.5); });
  qp.b_in = qp.A_in * x0 +
            Eigen::VectorXd::NullaryExpr(m_in, [&] { return uniform(rng, 0.05, 0.5); });
  qp.A_eq = Eigen::MatrixXd::NullaryExpr(m_eq, n, [&] { return uniform(rng, -1.0, 1.0); });
  qp.b_eq = qp.A_eq * x0;
  return qp;
}

TEST(Qp, MatchesActiveSetEnumeration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m_in = static_cast<int>(rng() % 9);
    const int m_eq = static_cast<int>(rng() % 2) * std::min(1, n - 1);
    const QpProblem qp = random_qp(rng, n, m_in, m_eq);
    const auto oracle = enumerate_qp(qp);
    ASSERT_TRUE(oracle.has_value()) << "trial " << trial;
    const QpResult r = solve_qp(qp);
    EXPECT_LT((r.x - *oracle).norm(), 1e-8) << "trial " << trial;
    EXPECT_LT(r.kkt_residual, 1e-8);
    EXPECT_NEAR(r.objective, 0.5 * r.x.dot(qp.H * r.x) + qp.g.dot(r.x), 1e-10);
  }
}

TEST(Qp, UnconstrainedIsNewtonStep) {
  QpProblem qp;
  qp.H = Eigen::Matrix2d{{2.0, 0.5}, {0.5, 1.0}};
  qp.g = Eigen::Vector2d(1.0, -1.0);
  const QpResult r = solve_qp(qp);
  EXPECT_LT((r.x - qp.H.ldlt().solve(-qp.g)).norm(), 1e-13);
  EXPECT_TRUE(r.active.empty());
}

TEST(Qp, ActiveBoxIsReported) {
  QpProblem qp;
  qp.H = Eigen::Matrix<double, 1, 1>(1.0);
  qp.g = Eigen::Matrix<double, 1, 1>(-5.0);
  qp.A_in = Eigen::Matrix<double, 1, 1>(1.0);
  qp.b_in = Eigen::Matrix<double, 1, 1>(2.0);
  const QpResult r = solve_qp(qp);
  EXPECT_NEAR(r.x(0), 2.0, 1e-14);
  ASSERT_EQ(r.active.size(), 1u);
  EXPECT_EQ(r.active[0], 0);
  EXPECT_LT(r.kkt_residual, 1e-12);
}

TEST(Qp, InfeasibleAndInvalidProblems) {
  QpProblem qp;
  qp.H = Eigen::Matrix<double, 1, 1>(1.0);
  qp.g = Eigen::Matrix<double, 1, 1>(0.0);
  qp.A_in = Eigen::Vector2d(1.0, -1.0);
  qp.b_in = Eigen::Vector2d(-1.0, -1.0);  // x <= -1 and x >= 1
  EXPECT_THROW(solve_qp(qp), InfeasibleError);

  QpProblem bad;
  bad.H = Eigen::Matrix2d{{1.0, 0.0}, {0.0, -1.0}};
  bad.g = Eigen::Vector2d::Zero();
  EXPECT_THROW(solve_qp(bad), InvalidParameter);
}

TEST(Qp, KktResidualDetectsWrongPoint) {
  QpProblem qp;
  qp.H = Eigen::Matrix2d::Identity();
  qp.g = Eigen::Vector2d(-1.0, -1.0);
  const Eigen::VectorXd none;
  EXPECT_LT(kkt_residual(qp, Eigen::Vector2d(1.0, 1.0), none, none), 1e-15);
  EXPECT_GT(kkt_residual(qp, Eigen::Vector2d(0.0, 1.0), none, none), 0.5);
}

}  // namespace
}  // namespace slipwalk
