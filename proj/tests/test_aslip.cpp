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

#include "slipwalk/aslip.hpp"
#include "slipwalk/errors.hpp"
#include "test_util.hpp"

namespace slipwalk {
namespace {

using testing::default_gait;

ASlipState standing_state() {
  ASlipState st;
  st.P = Eigen::Vector3d(0.05, -0.02, 0.95);
  st.Pdot = Eigen::Vector3d(0.3, 0.1, -0.2);
  st.left.in_contact = true;
  st.left.foot = Eigen::Vector3d(0.0, 0.1, 0.0);
  st.left.L = 1.0;
  st.left.Ldot = 0.4;
  st.right.in_contact = false;
  st.right.foot = Eigen::Vector3d(-0.2, -0.1, 0.05);
  st.domain = Domain::SspLeft;
  st.leading = Side::Left;
  return st;
}

TEST(ASlip, DynamicsMatchSpringDamperAlongLeg) {
  const ASlipParams prm;
  const ASlipState st = standing_state();
  const StateDerivative d = continuous_dynamics(st, Eigen::Vector2d(1.5, -2.0), prm);
  // Independent evaluation: compression from geometry, force along the unit leg.
  const Eigen::Vector3d leg = st.P - st.left.foot;
  const double r = leg.norm();
  const double rdot = leg.dot(st.Pdot) / r;
  const double F = prm.K_s * (st.left.L - r) + prm.D_s * (st.left.Ldot - rdot);
  ASSERT_GT(F, 0.0);
  const Eigen::Vector3d acc = F / prm.m * leg / r - Eigen::Vector3d(0, 0, prm.g);
  EXPECT_LT((d.Pddot - acc).norm(), 1e-12);
  EXPECT_LT((d.Pdot - st.Pdot).norm(), 0.0 + 1e-15);
  EXPECT_DOUBLE_EQ(d.Lddot[0], 1.5);
  EXPECT_DOUBLE_EQ(d.Lddot[1], -2.0);
  EXPECT_DOUBLE_EQ(d.Ldot[0], 0.4);
}

TEST(ASlip, LegCannotPull) {
  const ASlipParams prm;
  ASlipState st = standing_state();
  st.left.L = 0.5;  // far shorter than the mass distance: tension
  const StateDerivative d = continuous_dynamics(st, Eigen::Vector2d::Zero(), prm);
  EXPECT_LT((d.Pddot - Eigen::Vector3d(0, 0, -prm.g)).norm(), 1e-14);
}

TEST(ASlip, ImpactResetsLandingLeg) {
  const ASlipParams prm;
  ASlipState st = standing_state();
  st.right.foot.z() = 0.0;
  st.right.foot_vel = Eigen::Vector3d(0.0, 0.0, -0.3);
  st.right.Ldot = 0.2;
  const ASlipState out = impact_map(st, prm);
  const double r = (out.P - out.right.foot).norm();
  EXPECT_TRUE(out.right.in_contact);
  EXPECT_DOUBLE_EQ(out.right.L, r);
  EXPECT_DOUBLE_EQ(out.right.s, 0.0);
  EXPECT_EQ(out.domain, Domain::Dsp);
  EXPECT_EQ(out.leading, Side::Right);
  EXPECT_EQ(out.P, st.P);
  EXPECT_EQ(out.Pdot, st.Pdot);
}

TEST(ASlip, ImpactOffTheSwitchingSurfaceIsRejected) {
  const ASlipParams prm;
  ASlipState st = standing_state();
  EXPECT_THROW(impact_map(st, prm), ContractViolation);  // foot above ground
  st.right.foot.z() = 0.0;
  st.right.foot_vel.z() = 0.1;  // moving up
  EXPECT_THROW(impact_map(st, prm), ContractViolation);
  st.right.foot_vel.z() = -0.1;
  st.domain = Domain::Dsp;
  EXPECT_THROW(impact_map(st, prm), ContractViolation);
}

TEST(ASlip, SwingProfileEndsOnTargetMovingDown) {
  const Eigen::Vector3d start(-0.3, -0.1, 0.0), stance(0.0, 0.1, 0.0);
  const Eigen::Vector2d u(0.25, -0.2);
  const double T = 0.35, c = 0.05;
  const SwingPoint s0 = swing_foot_reference(0.0, start, stance, u, T, c);
  const SwingPoint mid = swing_foot_reference(0.5 * T, start, stance, u, T, c);
  const SwingPoint end = swing_foot_reference(T, start, stance, u, T, c);
  EXPECT_LT((s0.pos - start).norm(), 1e-15);
  EXPECT_NEAR(mid.pos.z(), c, 1e-15);
  EXPECT_LT((end.pos.head<2>() - (stance.head<2>() + u)).norm(), 1e-15);
  EXPECT_NEAR(end.pos.z(), 0.0, 1e-15);
  EXPECT_LT(end.vel.z(), 0.0);
  EXPECT_LT(end.vel.head<2>().norm(), 1e-15);
  // Velocity is the time derivative of position.
  const double t = 0.3 * T, h = 1e-6;
  const Eigen::Vector3d fd = (swing_foot_reference(t + h, start, stance, u, T, c).pos -
                              swing_foot_reference(t - h, start, stance, u, T, c).pos) /
                             (2 * h);
  EXPECT_LT((fd - swing_foot_reference(t, start, stance, u, T, c).vel).norm(), 1e-7);
}

TEST(ASlip, StepPlacesFootAndKeepsForcesUnilateral) {
  const ASlipParams prm;
  const GaitTrajectory& gait = default_gait().gait;
  ASlipState st = initial_state(gait, prm, Side::Right, 0);
  const Eigen::Vector2d u(0.1, -0.15);
  const StepResult r = simulate_step(st, u, gait, prm);
  const auto& smp = r.trace.samples;
  ASSERT_GT(smp.size(), 10u);
  for (std::size_t i = 1; i < smp.size(); ++i) EXPECT_GT(smp[i].t, smp[i - 1].t);
  bool saw_dsp = false, saw_ssp = false;
  for (const auto& s : smp) {
    EXPECT_GE(s.F_z[0], 0.0);
    EXPECT_GE(s.F_z[1], 0.0);
    if (s.domain == Domain::Dsp) {
      EXPECT_FALSE(saw_ssp) << "double support after single support";
      EXPECT_TRUE(s.contact[0] && s.contact[1]);
      saw_dsp = true;
    } else {
      saw_ssp = true;
    }
  }
  EXPECT_TRUE(saw_dsp && saw_ssp);
  EXPECT_NEAR(r.trace.T_dsp + r.trace.T_ssp, smp.back().t - smp.front().t, 1e-3);
  EXPECT_EQ(r.next.step_index, 1);

  const Side stance = r.next.leading;
  const Eigen::Vector2d placed =
      (r.next.leg(other(stance)).foot - r.next.leg(stance).foot).head<2>();
  EXPECT_LT((placed - u).norm(), 1e-9);
  EXPECT_NEAR(r.next.leg(other(stance)).foot.z(), 0.0, 1e-6);
}

TEST(ASlip, WalkFailureKeepsCompletedSteps) {
  const ASlipParams prm;
  const GaitTrajectory& gait = default_gait().gait;
  const ASlipState st = initial_state(gait, prm, Side::Right, 0);
  const StepController wild = [](const PreImpactEstimate& e) {
    return e.step_index < 3 ? Eigen::Vector2d(0.0, 0.0) : Eigen::Vector2d(1.5, 0.0);
  };
  try {
    simulate_walk(st, gait, prm, wild, 10);
    FAIL() << "expected a walk failure";
  } catch (const WalkFailure& f) {
    EXPECT_GE(f.completed().size(), 2u);
    EXPECT_LT(f.completed().size(), 10u);
    EXPECT_EQ(f.step_index(), static_cast<int>(f.completed().size()));
  }
}

TEST(ASlip, ParameterValidation) {
  ASlipParams p;
  p.m = 0.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = ASlipParams{};
  p.L_min = 1.5;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = ASlipParams{};
  p.K_s = -1.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
}

}  // namespace
}  // namespace slipwalk
