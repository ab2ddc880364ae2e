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

#include "slipwalk/aslip.hpp"
#include "slipwalk/hlip.hpp"

namespace slipwalk {

/// Even step indices have the left foot in stance at their pre-impact instant.
inline Side stance_at(int k) { return k % 2 == 0 ? Side::Left : Side::Right; }

enum class ReferenceMode { P1, P2, Planned };

const char* to_string(ReferenceMode m);

/// Reference state and step size of one plane at step k.
struct PlaneTarget {
  Eigen::VectorXd x;
  double u = 0.0;
};

/**
 * Per-plane H-LIP reference. K is the tracking gain of the aSLIP controller
 * and fixes the plane dimension: 2 for [p, v], 3 for the extended [x, p, v].
 * Planned sequences are always extended. Orbit references also carry the
 * 2-state gain that drives the H-LIP reference itself onto the orbit.
 */
struct PlaneReference {
  ReferenceMode mode = ReferenceMode::P1;
  P1Orbit p1;
  P2Orbit p2;
  /// Planned states x_0..x_M and inputs u_0..u_{M-1}.
  std::vector<Eigen::Vector3d> x_seq;
  std::vector<double> u_seq;
  /// Called for indices past the planned sequence; empty means no replanning.
  std::function<PlaneTarget(int)> replan;
  Eigen::RowVectorXd K;
  GainKind gain_kind = GainKind::User;
  Eigen::RowVector2d K_orbit = Eigen::RowVector2d::Zero();

  int dim() const { return static_cast<int>(K.size()); }
};

/// Throw InvalidParameter unless rho(A + B K) < 1 for both gains. The orbit
/// gain defaults to the 2-state deadbeat gain.
PlaneReference p1_reference(const P1Orbit& orbit, const LinearS2S& s2s, const SteppingGain<2>& K);
PlaneReference p1_reference(const P1Orbit& orbit, const LinearS2S& s2s, const SteppingGain<3>& K,
                            const SteppingGain<2>& K_orbit);
PlaneReference p1_reference(const P1Orbit& orbit, const LinearS2S& s2s, const SteppingGain<3>& K);
PlaneReference p2_reference(const P2Orbit& orbit, const LinearS2S& s2s, const SteppingGain<2>& K);
PlaneReference p2_reference(const P2Orbit& orbit, const LinearS2S& s2s, const SteppingGain<3>& K,
                            const SteppingGain<2>& K_orbit);
PlaneReference p2_reference(const P2Orbit& orbit, const LinearS2S& s2s, const SteppingGain<3>& K);
PlaneReference planned_reference(std::vector<Eigen::Vector3d> x_seq, std::vector<double> u_seq,
                                 const ExtendedS2S& s2s, const SteppingGain<3>& K);

/// P1: constant. P2: x_R, u_R on even k (right foot lands), x_L, u_L on odd k.
/// Orbit targets are 2-state whatever the tracking dimension.
/// Planned: indexed lookup; the last state is paired with the last input.
/// Throws ContractViolation past the plan without a replan hook.
PlaneTarget advance_reference(const PlaneReference& ref, int k);

/// u = u_hlip + K (x_aslip - x_hlip). Throws ContractViolation on a dimension mismatch.
double stepping_controller(const Eigen::VectorXd& x_aslip, const Eigen::VectorXd& x_hlip,
                           double u_hlip, const Eigen::RowVectorXd& K);

enum class CompositionKind { P1P2, P2P2, Planned };

const char* to_string(CompositionKind k);

struct Composition3D {
  PlaneReference x_plane;
  PlaneReference y_plane;
  CompositionKind kind = CompositionKind::P1P2;
  double min_foot_separation = 0.0;
};

/// Rejects P1-P1, a P1 lateral plane, and lateral P2 steps that land closer
/// than min_foot_separation or on the wrong side.
Composition3D compose_3d(const PlaneReference& x_ref, const PlaneReference& y_ref,
                         double min_foot_separation);

/// H-LIP reference realized along a walk: x[k] is the pre-impact reference
/// state, u[k] the step size landed at that impact.
struct PlaneSchedule {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> u;
};

/**
 * Evolves the H-LIP from x0 (the aSLIP's initial pre-impact plane state, in
 * the reference's dimension) with its own closed-form dynamics: u[0] = u0 is
 * the realized first step and u[k] = u_ref_k + K_orbit ([p, v]_k - x_ref_k)
 * for k >= 1, so the reference converges to the orbit, each step saturated at
 * u_max. Extended references carry the global position along. Planned
 * references are looked up as-is and must already start at x0. Holds
 * n_steps + 1 entries.
 */
PlaneSchedule build_schedule(const PlaneReference& ref, const Eigen::VectorXd& x0, double u0,
                             int n_steps, const LinearS2S& s2s, double u_max);

/// Plane state of an estimate or trace in the reference's coordinates.
Eigen::VectorXd plane_state(const Eigen::Vector4d& x_rel, const Eigen::Vector2d& stance_foot,
                            int plane, int dim);

struct WalkReference {
  Composition3D composition;
  PlaneSchedule x_sched;
  PlaneSchedule y_sched;
  double u_max = 0.5;
  /// Lateral steps land on the swing foot's own side at least this far out; 0 disables.
  double min_lateral_step = 0.0;
};

/// Controller callback for simulate_walk. Saturates each component at u_max,
/// then pushes the lateral step out to min_lateral_step on the side given by
/// stance parity.
StepController make_walk_controller(const WalkReference& ref);

}  // namespace slipwalk
