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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slipwalk/aslip.hpp"
#include "slipwalk/gait.hpp"
#include "slipwalk/hlip.hpp"
#include "slipwalk/invariant.hpp"
#include "slipwalk/planner.hpp"
#include "slipwalk/stepping.hpp"

namespace slipwalk {

enum class ScenarioKind { Periodic3D, FixedLocation, TrajectoryTracking, SteppingInPlace };
const char* to_string(ScenarioKind k);
/// Throws InvalidParameter for unknown names.
ScenarioKind scenario_kind_from_string(const std::string& s);

/// Tracking gain of one plane.
struct GainConfig {
  enum class Kind { Deadbeat, Lqr, User };
  Kind kind = Kind::Deadbeat;
  /// 2 for [p, v], 3 for the extended [x, p, v]. Planned references need 3.
  int dim = 3;
  /// User gain (size dim).
  std::vector<double> K;
  /// LQR weights: Q diagonal (size dim) and R.
  std::vector<double> Q_diag;
  double R = 1.0;
};
const char* to_string(GainConfig::Kind k);

/// Orbit of one plane for periodic walking.
struct OrbitConfig {
  ReferenceMode mode = ReferenceMode::P1;
  double v_d = 0.0;
  /// P2 only: step size that lands the left foot.
  double u_L = 0.0;
};

/// Desired path sampled at known times; velocities are optional.
struct TrajectorySamples {
  std::vector<double> t;
  std::vector<double> x_d;
  std::vector<double> y_d;
  std::vector<double> vx_d;
  std::vector<double> vy_d;

  /// Throws InvalidParameter unless times strictly increase and sizes agree.
  void validate() const;
  /// Linear interpolation, held constant outside [t_0, t_end]. Missing
  /// velocities come from finite differences of the positions.
  double position(int plane, double t) const;
  double velocity(int plane, double t) const;
  bool has_velocity() const { return !vx_d.empty(); }
};

/// x_d = forward speed ramped up over ramp_time, y_d = amplitude (1 - cos(2 pi t / period)).
/// Both start at rest so the path is consistent with the initial stepping in place.
struct SinusoidConfig {
  double forward_speed = 0.3;
  double amplitude = 0.2;
  double period = 8.0;
  double ramp_time = 2.0;

  double position(int plane, double t) const;
  double velocity(int plane, double t) const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ScenarioKind kind = ScenarioKind::Periodic3D;
  ASlipParams aslip;
  GaitSpec gait_spec;
  GaitSynthesisOptions synthesis;
  int n_steps = 20;
  std::uint64_t seed = 0;
  double u_max = 0.5;
  double min_foot_separation = 0.1;
  /// Clamp realized lateral steps to min_foot_separation on the parity side.
  /// Off by default: the clamp is a nonlinearity the linear gains cannot cancel.
  bool enforce_lateral_separation = false;
  SimOptions sim;

  // periodic-3d
  OrbitConfig x_orbit{ReferenceMode::P1, 0.3, 0.0};
  OrbitConfig y_orbit{ReferenceMode::P2, 0.0, 0.3};

  GainConfig x_gain;
  GainConfig y_gain;
  /// 2-state gain that steers the H-LIP reference onto its orbit.
  GainConfig orbit_gain{GainConfig::Kind::Deadbeat, 2, {}, {}, 1.0};

  // fixed-location and trajectory-tracking
  int horizon = 10;
  Eigen::Matrix3d Q = Eigen::Vector3d(10.0, 1.0, 1.0).asDiagonal();
  double R = 0.1;
  TerminalMode terminal = TerminalMode::CostOnly;
  Eigen::Vector3d x_target = Eigen::Vector3d(1.0, 0.0, 0.0);
  Eigen::Vector3d y_target = Eigen::Vector3d::Zero();
  SinusoidConfig sinusoid;
  /// When set, replaces the sinusoid.
  std::optional<TrajectorySamples> trajectory;

  // stepping-in-place
  bool controller_enabled = false;

  /// Throws InvalidParameter on inconsistent fields.
  void validate() const;
};

/// Per-plane model and gain used by a run.
struct PlaneModel {
  int dim = 2;
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd K;
  std::string gain_kind;
  Eigen::MatrixXd A_cl() const { return A + B * K; }
};

/// One pre-impact instant k of the walk.
struct StepRecord {
  int k = 0;
  Side stance = Side::Left;
  /// aSLIP [p_x, v_x, p_y, v_y] relative to the stance foot.
  Eigen::Vector4d x_rel = Eigen::Vector4d::Zero();
  Eigen::Vector2d stance_foot = Eigen::Vector2d::Zero();
  /// Realized and reference step sizes landed at impact k.
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  Eigen::Vector2d u_hlip = Eigen::Vector2d::Zero();
  /// Per plane, in the plane model's dimension.
  Eigen::VectorXd x_aslip[2];
  Eigen::VectorXd x_hlip[2];
  Eigen::VectorXd e[2];
  /// Open-loop mismatch x_{k+1} - A x_k - B u_k (empty at the last record).
  Eigen::VectorXd w[2];
  /// Effective disturbance of the error recursion, e_{k+1} - A_cl e_k; it
  /// includes the effect of acting on a predicted pre-impact state.
  Eigen::VectorXd w_cl[2];
};

struct ScenarioSummary {
  Eigen::Vector2d mean_velocity = Eigen::Vector2d::Zero();
  double height_mean = 0.0;
  double height_min = 0.0;
  double height_max = 0.0;
  /// Global pre-impact mass position and velocity at the last step.
  Eigen::Vector2d final_position = Eigen::Vector2d::Zero();
  Eigen::Vector2d final_velocity = Eigen::Vector2d::Zero();
  Eigen::Vector2d net_displacement = Eigen::Vector2d::Zero();
  /// max over k >= 10 of |x_{k+1} - x_k| (x plane, one step) and
  /// |y_{k+2} - y_k| (y plane, two steps, for period-two lateral gaits).
  double convergence_x = 0.0;
  double convergence_y = 0.0;
  double min_vertical_force = 0.0;
  int mpc_fallbacks = 0;
  /// Realized lateral steps closer than min_foot_separation or on the wrong side.
  int separation_violations = 0;
  int completed_steps = 0;
  bool failed = false;
  std::string failure;
};

struct ScenarioResult {
  ScenarioConfig config;
  GaitTrajectory gait;
  HlipParams hlip;
  PlaneModel planes[2];
  std::vector<StepTrace> traces;
  std::vector<StepRecord> records;
  ScenarioSummary summary;
};

/// Extended-state targets of fixed-location and tracking scenarios: the fixed
/// target, or [position, p*, v*] of the P1 orbit at the path velocity.
TrajectorySource target_source(const ScenarioConfig& config, const HlipParams& hlip);

/// Measured H-LIP parameters of a gait (height and domain durations).
HlipParams hlip_params_of(const GaitTrajectory& gait, const ASlipParams& params);

/**
 * Runs one scenario. The gait is synthesized from the config unless given.
 * A walk failure does not throw: completed steps are kept and the summary
 * carries the failure. Configuration errors throw ValidationError.
 */
ScenarioResult run_scenario(const ScenarioConfig& config,
                            const GaitTrajectory* gait = nullptr);

/// Step records from traces and the reference schedules (exposed for analysis).
std::vector<StepRecord> build_step_records(const std::vector<StepTrace>& traces,
                                           const PlaneSchedule schedules[2],
                                           const PlaneModel planes[2]);

/// Per-plane set analysis of a walk.
struct PlaneAnalysis {
  int plane = 0;
  int dim = 2;
  std::vector<Eigen::VectorXd> w;
  std::vector<Eigen::VectorXd> w_cl;
  std::vector<Eigen::VectorXd> e;
  Polytope W;
  Polytope E;
  int set_terms = 0;
  /// True when A_cl is nilpotent within the term count, so E is the exact minimal set.
  bool exact = false;
  std::vector<bool> e_in_E;
  bool all_in_E = true;
  InvarianceCertificate certificate;
};

struct AnalysisOptions {
  int n = 6;
  double eps = 1e-4;
  double membership_tol = 1e-9;
  double certificate_tol = 1e-8;
};

/// Builds W from the effective disturbances, then E and the membership verdicts.
PlaneAnalysis analyze_plane(const std::vector<StepRecord>& records, int plane,
                            const PlaneModel& model, const AnalysisOptions& options = {});

}  // namespace slipwalk
