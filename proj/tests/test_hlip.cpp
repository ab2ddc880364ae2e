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

#include <cmath>
#include <random>

#include "slipwalk/errors.hpp"
#include "slipwalk/hlip.hpp"
#include "test_util.hpp"

namespace slipwalk {
namespace {

using testing::random_hlip;
using testing::rk4_lip;
using testing::uniform;

// Impact moves the reference to the new foot, the DSP keeps velocity, then the SSP flows.
Eigen::Vector2d numeric_step(const HlipParams& hp, const Eigen::Vector2d& x, double u) {
  const Eigen::Vector2d start(x(0) - u + hp.T_dsp * x(1), x(1));
  return rk4_lip(start, hp.T_ssp, hp.lambda());
}

TEST(Hlip, StepMapMatchesNumericalFlow) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const HlipParams hp = random_hlip(rng);
    const LinearS2S s2s = s2s_matrices(hp);
    const Eigen::Vector2d x(uniform(rng, -0.2, 0.2), uniform(rng, -0.5, 0.5));
    const double u = uniform(rng, -0.4, 0.4);
    const Eigen::Vector2d expect = numeric_step(hp, x, u);
    EXPECT_LT((hlip_step<2>(x, u, s2s) - expect).norm(), 1e-9) << "trial " << trial;
  }
}

TEST(Hlip, ExtendedMapTracksGlobalPosition) {
  std::mt19937_64 rng(2);
  const HlipParams hp = random_hlip(rng);
  const LinearS2S s2s = s2s_matrices(hp);
  const ExtendedS2S ext = extend_s2s(s2s);
  // Global mass position = stance foot + p; the next stance foot is foot + u.
  const double foot = 0.7;
  const Eigen::Vector2d x(0.05, 0.3);
  const double u = 0.2;
  const Eigen::Vector2d next = hlip_step<2>(x, u, s2s);
  const Eigen::Vector3d xe(foot + x(0), x(0), x(1));
  const Eigen::Vector3d ne = hlip_step<3>(xe, u, ext);
  EXPECT_NEAR(ne(0), foot + u + next(0), 1e-12);
  EXPECT_NEAR(ne(1), next(0), 1e-12);
  EXPECT_NEAR(ne(2), next(1), 1e-12);
}

TEST(Hlip, P1OrbitIsSymmetricAndCloses) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const HlipParams hp = random_hlip(rng);
    const double vd = uniform(rng, -1.0, 1.0);
    const P1Orbit o = p1_orbit(hp, vd);
    const LinearS2S s2s = s2s_matrices(hp);
    EXPECT_LT((hlip_step<2>(o.state(), o.u_star, s2s) - o.state()).norm(), 1e-10);
    // A period-one SSP of the LIP is time symmetric: it starts at (-p*, v*).
    const Eigen::Vector2d ssp_start(o.p_star - o.u_star + hp.T_dsp * o.v_star, o.v_star);
    EXPECT_NEAR(ssp_start(0), -o.p_star, 1e-10);
    EXPECT_NEAR(o.u_star / hp.period(), vd, 1e-12);
  }
}

TEST(Hlip, P2OrbitAlternatesOnOneLine) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const HlipParams hp = random_hlip(rng);
    const double vd = uniform(rng, -0.5, 0.5);
    const double uL = uniform(rng, -0.4, 0.4);
    const P2Orbit o = p2_orbit(hp, vd, uL);
    const LinearS2S s2s = s2s_matrices(hp);
    EXPECT_LT((hlip_step<2>(o.state_left(), o.u_star_L, s2s) - o.state_right()).norm(), 1e-10);
    EXPECT_LT((hlip_step<2>(o.state_right(), o.u_star_R, s2s) - o.state_left()).norm(), 1e-10);
    const double lam = hp.lambda();
    const double sigma2 = lam * std::tanh(0.5 * lam * hp.T_ssp);
    EXPECT_NEAR(o.v_star_L - sigma2 * o.p_star_L, o.v_star_R - sigma2 * o.p_star_R, 1e-10);
    EXPECT_NEAR(0.5 * (o.u_star_L + o.u_star_R) / hp.period(), vd, 1e-12);
  }
}

TEST(Hlip, SspFlowConservesOrbitalEnergy) {
  HlipParams hp;
  const double lam = hp.lambda();
  const Eigen::Vector2d x0(-0.1, 0.4);
  const auto flow = hlip_flow(x0, hp.T_ssp, hp, HlipDomain::SSP, 50);
  ASSERT_EQ(flow.size(), 50u);
  const double e0 = x0(1) * x0(1) - lam * lam * x0(0) * x0(0);
  for (const auto& s : flow) EXPECT_NEAR(s.v * s.v - lam * lam * s.p * s.p, e0, 1e-12);
  EXPECT_LT((rk4_lip(x0, hp.T_ssp, lam) - Eigen::Vector2d(flow.back().p, flow.back().v)).norm(),
            1e-10);
  const auto dsp = hlip_flow(x0, 0.1, hp, HlipDomain::DSP, 3);
  EXPECT_DOUBLE_EQ(dsp.back().v, x0(1));
  EXPECT_NEAR(dsp.back().p, x0(0) + 0.1 * x0(1), 1e-15);
}

TEST(Hlip, DeadbeatIsNilpotent) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const LinearS2S s2s = s2s_matrices(random_hlip(rng));
    const Eigen::Matrix2d Acl = s2s.A + s2s.B * deadbeat_gain(s2s).K;
    EXPECT_LT((Acl * Acl).norm(), 1e-10);
    const ExtendedS2S ext = extend_s2s(s2s);
    const Eigen::Matrix3d Ae = ext.A + ext.B * deadbeat_gain(ext).K;
    EXPECT_LT((Ae * Ae * Ae).norm(), 1e-9);
  }
}

TEST(Hlip, DeadbeatRejectsUncontrollablePair) {
  LinearS2S s2s = s2s_matrices(HlipParams{});
  s2s.B.setZero();
  EXPECT_THROW(deadbeat_gain(s2s), UncontrollableError);
}

// Hewer's policy iteration with a Kronecker Lyapunov solve; independent of
// the library's Riccati value iteration.
template <int N>
Eigen::Matrix<double, N, N> hewer_dare(const StepToStep<N>& s, const LqrWeights<N>& w,
                                       GainVec<N> K) {
  using Mat = Eigen::Matrix<double, N, N>;
  Mat P = Mat::Zero();
  for (int it = 0; it < 60; ++it) {
    const Mat Acl = s.A + s.B * K;
    const Mat stage = w.Q + w.N_cross * K + K.transpose() * w.N_cross.transpose() +
                      K.transpose() * w.R * K;
    // vec(Acl' P Acl) = (Acl' kron Acl') vec(P), column-major.
    Eigen::MatrixXd kron = Eigen::MatrixXd::Identity(N * N, N * N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        kron.block(i * N, j * N, N, N) -= Acl(j, i) * Acl.transpose();
    Eigen::Map<const Eigen::VectorXd> rhs(stage.data(), N * N);
    const Eigen::VectorXd vecP = kron.fullPivLu().solve(Eigen::VectorXd(rhs));
    P = Eigen::Map<const Mat>(vecP.data());
    P = 0.5 * (P + P.transpose()).eval();
    K = -(s.B.transpose() * P * s.A + w.N_cross.transpose()) / (w.R + s.B.dot(P * s.B));
  }
  return P;
}

template <int N>
LqrWeights<N> random_weights(std::mt19937_64& rng) {
  LqrWeights<N> w;
  Eigen::Matrix<double, N, N> M;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) M(i, j) = uniform(rng, -1.0, 1.0);
  w.Q = M * M.transpose() + 1e-3 * Eigen::Matrix<double, N, N>::Identity();
  w.R = uniform(rng, 0.05, 5.0);
  return w;
}

TEST(Hlip, LqrMatchesPolicyIteration) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const LinearS2S s2s = s2s_matrices(random_hlip(rng));
    const auto w = random_weights<2>(rng);
    const Eigen::Matrix2d P = solve_dare(s2s, w);
    const Eigen::Matrix2d P_ref = hewer_dare(s2s, w, deadbeat_gain(s2s).K);
    EXPECT_LT((P - P_ref).norm(), 1e-8 * (1.0 + P_ref.norm()));
    EXPECT_LT((P - riccati_map(s2s, w, P)).norm(), 1e-8);
    EXPECT_LT(closed_loop_radius(s2s, lqr_gain(s2s, w).K), 1.0);

    const ExtendedS2S ext = extend_s2s(s2s);
    const auto we = random_weights<3>(rng);
    const Eigen::Matrix3d Pe = solve_dare(ext, we);
    const Eigen::Matrix3d Pe_ref = hewer_dare(ext, we, deadbeat_gain(ext).K);
    EXPECT_LT((Pe - Pe_ref).norm(), 1e-7 * (1.0 + Pe_ref.norm()));
  }
}

TEST(Hlip, LqrCostMatchesSimulation) {
  const LinearS2S s2s = s2s_matrices(HlipParams{});
  LqrWeights<2> w;
  w.Q = Eigen::Vector2d(3.0, 0.5).asDiagonal();
  w.R = 0.7;
  const Eigen::Matrix2d P = solve_dare(s2s, w);
  const auto K = lqr_gain(s2s, w).K;
  Eigen::Vector2d x(0.1, -0.2);
  const double predicted = x.dot(P * x);
  double cost = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double u = K * x;
    cost += x.dot(w.Q * x) + w.R * u * u;
    x = hlip_step<2>(x, u, s2s);
  }
  EXPECT_NEAR(cost, predicted, 1e-10 * (1.0 + predicted));
}

TEST(Hlip, InvalidInputsAreRejected) {
  HlipParams hp;
  hp.z0 = -1.0;
  EXPECT_THROW(s2s_matrices(hp), InvalidParameter);
  hp = HlipParams{};
  hp.T_dsp = -0.1;
  EXPECT_THROW(p1_orbit(hp, 0.3), InvalidParameter);

  const LinearS2S s2s = s2s_matrices(HlipParams{});
  LqrWeights<2> w;
  w.R = 0.0;
  EXPECT_THROW(lqr_gain(s2s, w), InvalidParameter);
  w = LqrWeights<2>{};
  w.Q(0, 1) = 1.0;
  EXPECT_THROW(lqr_gain(s2s, w), InvalidParameter);
  w = LqrWeights<2>{};
  w.Q(0, 0) = -1.0;
  EXPECT_THROW(lqr_gain(s2s, w), InvalidParameter);
}

TEST(Hlip, SpectralRadius) {
  Eigen::Matrix2d rot;
  rot << 0.0, -0.9, 0.9, 0.0;
  EXPECT_NEAR(spectral_radius(rot), 0.9, 1e-14);
  EXPECT_NEAR(spectral_radius(Eigen::Vector3d(0.1, -2.0, 0.5).asDiagonal().toDenseMatrix()), 2.0,
              1e-14);
}

}  // namespace
}  // namespace slipwalk
