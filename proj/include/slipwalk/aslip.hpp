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

#include "slipwalk/errors.hpp"

namespace slipwalk {

/**
 * Parameters of the 3D actuated SLIP: a point mass on two massless
 * spring-damper legs whose uncompressed length L is driven by a second-order
 * actuator (L'' = tau).
 *
 * Kp_leg and Kd_leg follow the sign convention of the leg-length law
 * tau = L''_des + Kp (L - L_des) + Kd (L' - L'_des), so they must be negative
 * for the law to be stabilizing.
 */
struct ASlipParams {
  double m = 32.0;
  double K_s = 24000.0;
  double D_s = 700.0;
  double g = 9.81;
  double Kp_leg = -400.0;
  double Kd_leg = -40.0;
  double L_min = 0.5;
  double L_max = 1.3;
  double swing_clearance = 0.05;

  void validate() const;
};

enum class Side { Left = 0, Right = 1 };

inline Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

enum class Domain { SspLeft, SspRight, Dsp };

const char* to_string(Domain d);

struct LegState {
  double L = 1.0;
  double Ldot = 0.0;
  /// Spring deformation L - r (zero when not in contact).
  double s = 0.0;
  double sdot = 0.0;
  Eigen::Vector3d foot = Eigen::Vector3d::Zero();
  /// Foot velocity; only meaningful for a swing leg.
  Eigen::Vector3d foot_vel = Eigen::Vector3d::Zero();
  bool in_contact = false;
};

/**
 * Full hybrid state. `leading` is the leg that touched down most recently:
 * the stance leg during the SSP and the new (front) leg during the DSP.
 * `t_step` counts time since that touchdown.
 */
struct ASlipState {
  Eigen::Vector3d P = Eigen::Vector3d::Zero();
  Eigen::Vector3d Pdot = Eigen::Vector3d::Zero();
  LegState left;
  LegState right;
  Domain domain = Domain::SspLeft;
  Side leading = Side::Left;
  double t_domain = 0.0;
  double t_step = 0.0;
  double t = 0.0;
  int step_index = 0;

  LegState& leg(Side s) { return s == Side::Left ? left : right; }
  const LegState& leg(Side s) const { return s == Side::Left ? left : right; }

  /// Horizontal state [p_x, v_x, p_y, v_y] relative to the leading foot.
  Eigen::Vector4d horizontal() const;
};

/**
 * Periodic leg-length reference. Each leg follows the same Fourier series of
 * period 2 T_step in its own phase (time since its last touchdown); the two
 * legs are half a period apart.
 */
struct GaitTrajectory {
  double T_step = 0.4;
  /// [c0, a1, b1, a2, b2, ...]
  std::vector<double> coef;

  /// Measured on the synthesized periodic gait.
  double T_ssp = 0.32;
  double T_dsp = 0.08;
  double z0_avg = 1.0;

  /// Periodic pre-impact state of stepping in place (feet coincident at the origin).
  double z_pre = 1.0;
  double zdot_pre = 0.0;
  double L_stance_pre = 1.0;
  double Ldot_stance_pre = 0.0;
  double L_swing_pre = 1.0;
  double Ldot_swing_pre = 0.0;

  int n_coef() const { return static_cast<int>(coef.size()); }
  double L_des(double phase) const;
  double Ldot_des(double phase) const;
  double Lddot_des(double phase) const;

  struct Ref {
    double L, Ldot, Lddot;
  };
  /// All three derivatives at once (one sin/cos pair, then recurrences).
  Ref reference(double phase) const;

  /// Throws InvalidParameter when the reference is empty or malformed.
  void validate() const;
};

/// Pre-impact stepping-in-place state with `stance` as the stance leg.
ASlipState initial_state(const GaitTrajectory& gait, const ASlipParams& params,
                         Side stance = Side::Right, int step_index = 0);

struct TraceSample {
  double t = 0.0;
  Eigen::Vector3d P = Eigen::Vector3d::Zero();
  Eigen::Vector3d Pdot = Eigen::Vector3d::Zero();
  double L[2] = {0.0, 0.0};
  double s[2] = {0.0, 0.0};
  double F_z[2] = {0.0, 0.0};
  /// Axial force law K_s s + D_s s' before the unilateral clamp.
  double F[2] = {0.0, 0.0};
  bool contact[2] = {false, false};
  /// Rate of the mass-to-foot distance of contact legs.
  double rdot[2] = {0.0, 0.0};
  Domain domain = Domain::Dsp;
  int step_index = 0;
};

/// Record of one step, from a pre-impact state to the next.
struct StepTrace {
  int step_index = 0;
  std::vector<TraceSample> samples;
  /// Pre-impact horizontal state at the start, relative to the stance foot.
  Eigen::Vector4d x_start = Eigen::Vector4d::Zero();
  /// Pre-impact horizontal state at the end, relative to the new stance foot.
  Eigen::Vector4d x_end = Eigen::Vector4d::Zero();
  /// Realized step size landed at the starting impact.
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  /// Step size commanded for the touchdown that ends this step.
  Eigen::Vector2d u_next = Eigen::Vector2d::Zero();
  /// Global mass position at the start and end pre-impact instants.
  Eigen::Vector3d P_start = Eigen::Vector3d::Zero();
  Eigen::Vector3d P_end = Eigen::Vector3d::Zero();
  Side stance_start = Side::Left;
  double T_dsp = 0.0;
  double T_ssp = 0.0;
  double liftoff_guard = 0.0;
  double touchdown_guard = 0.0;
};

class StepFailure : public RuntimeFailure {
 public:
  StepFailure(const std::string& what, int step_index, StepTrace partial)
      : RuntimeFailure(what), step_index_(step_index), partial_(std::move(partial)) {}
  int step_index() const { return step_index_; }
  const StepTrace& partial() const { return partial_; }

 private:
  int step_index_;
  StepTrace partial_;
};

/// |F| = K_s s + D_s s' (sign kept; negative means tension).
double leg_force(const LegState& leg, const ASlipParams& params);

struct StateDerivative {
  Eigen::Vector3d Pdot = Eigen::Vector3d::Zero();
  Eigen::Vector3d Pddot = Eigen::Vector3d::Zero();
  double Ldot[2] = {0.0, 0.0};
  double Lddot[2] = {0.0, 0.0};
};

/// Derivative of the continuous state with leg-length accelerations tau
/// ([left, right]). Spring deformation of contact legs is taken from the
/// geometry; contact forces are unilateral (clamped at zero).
/// Throws ContractViolation for a contact leg of non-positive length.
StateDerivative continuous_dynamics(const ASlipState& state, const Eigen::Vector2d& tau,
                                    const ASlipParams& params);

/// Leg-length actuation with the PD law around the periodic reference,
/// saturated so that L stays within [L_min, L_max].
double leg_length_control(double phase, const LegState& leg, const GaitTrajectory& gait,
                          const ASlipParams& params);

struct SwingPoint {
  Eigen::Vector3d pos;
  Eigen::Vector3d vel;
};

/**
 * Kinematic swing-foot profile. Horizontal motion is a smoothstep from
 * `start` to stance_foot + u; the height is the quartic bump
 * c (2 s (1 - s) + 8 s^2 (1 - s)^2), s = t / T_ssp, which peaks at the
 * clearance at mid swing and descends at touchdown. Beyond s = 1 the height
 * keeps its polynomial (negative) continuation so the touchdown guard changes
 * sign.
 */
SwingPoint swing_foot_reference(double t, const Eigen::Vector3d& start,
                                const Eigen::Vector3d& stance_foot, const Eigen::Vector2d& u,
                                double T_ssp, double clearance);

/// Touchdown of the swing leg. Throws ContractViolation off the switching surface.
ASlipState impact_map(const ASlipState& state, const ASlipParams& params);

/// Predicted pre-impact instant handed to the step-size controller.
struct PreImpactEstimate {
  /// Horizontal state [p_x, v_x, p_y, v_y] relative to the stance foot.
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  /// Global horizontal position of the stance foot.
  Eigen::Vector2d stance_foot = Eigen::Vector2d::Zero();
  int step_index = 0;
};

/// Returns the step size [u_x, u_y] to land at the impact ending the estimate.
using StepController = std::function<Eigen::Vector2d(const PreImpactEstimate&)>;

struct SimOptions {
  double dt = 1e-4;
  /// Store every n-th integration step in the trace.
  int sample_stride = 10;
  double event_tol = 1e-11;
  /// Fraction of the nominal T_ssp at the end of the SSP during which the
  /// touchdown target is frozen.
  double freeze_fraction = 0.05;
  /// Fall when the mass drops below this fraction of the nominal height.
  double fall_fraction = 0.3;
};

struct StepResult {
  ASlipState next;
  StepTrace trace;
};

/// Evaluates the true step-to-step map: impact, DSP until the trailing leg
/// unloads, SSP with the swing foot steered to the commanded target, up to
/// the next switching surface. Throws StepFailure.
StepResult simulate_step(const ASlipState& pre_impact, const StepController& controller,
                         const GaitTrajectory& gait, const ASlipParams& params,
                         const SimOptions& options = {});

/// Fixed-command convenience overload.
StepResult simulate_step(const ASlipState& pre_impact, const Eigen::Vector2d& u_command,
                         const GaitTrajectory& gait, const ASlipParams& params,
                         const SimOptions& options = {});

struct WalkResult {
  std::vector<StepTrace> traces;
  ASlipState final_state;
};

/// Failure during a walk; carries every completed step and the partial one.
class WalkFailure : public StepFailure {
 public:
  WalkFailure(const StepFailure& cause, std::vector<StepTrace> completed)
      : StepFailure(cause), completed_(std::move(completed)) {}
  const std::vector<StepTrace>& completed() const { return completed_; }

 private:
  std::vector<StepTrace> completed_;
};

WalkResult simulate_walk(const ASlipState& initial, const GaitTrajectory& gait,
                         const ASlipParams& params, const StepController& controller,
                         int n_steps, const SimOptions& options = {});

}  // namespace slipwalk
