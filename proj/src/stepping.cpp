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

#include "slipwalk/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slipwalk/errors.hpp"

namespace slipwalk {

const char* to_string(ReferenceMode m) {
  switch (m) {
    case ReferenceMode::P1: return "P1";
    case ReferenceMode::P2: return "P2";
    case ReferenceMode::Planned: return "planned";
  }
  return "unknown";
}

const char* to_string(CompositionKind k) {
  switch (k) {
    case CompositionKind::P1P2: return "P1-P2";
    case CompositionKind::P2P2: return "P2-P2";
    case CompositionKind::Planned: return "planned";
  }
  return "unknown";
}

namespace {

template <int N>
void require_stable(const StepToStep<N>& s2s, const GainVec<N>& K) {
  const double rho = closed_loop_radius(s2s, K);
  if (!(rho < 1.0))
    throw InvalidParameter("stepping gain does not stabilize the plane (spectral radius " +
                           std::to_string(rho) + ")");
}

template <int N>
PlaneReference orbit_reference(ReferenceMode mode, const LinearS2S& s2s, const SteppingGain<N>& K,
                               const SteppingGain<2>& K_orbit) {
  if constexpr (N == 2)
    require_stable(s2s, K.K);
  else
    require_stable(extend_s2s(s2s), K.K);
  require_stable(s2s, K_orbit.K);
  PlaneReference ref;
  ref.mode = mode;
  ref.K = K.K;
  ref.gain_kind = K.kind;
  ref.K_orbit = K_orbit.K;
  return ref;
}

}  // namespace

PlaneReference p1_reference(const P1Orbit& orbit, const LinearS2S& s2s,
                            const SteppingGain<2>& K) {
  PlaneReference ref = orbit_reference(ReferenceMode::P1, s2s, K, deadbeat_gain(s2s));
  ref.p1 = orbit;
  return ref;
}

PlaneReference p1_reference(const P1Orbit& orbit, const LinearS2S& s2s, const SteppingGain<3>& K,
                            const SteppingGain<2>& K_orbit) {
  PlaneReference ref = orbit_reference(ReferenceMode::P1, s2s, K, K_orbit);
  ref.p1 = orbit;
  return ref;
}

PlaneReference p1_reference(const P1Orbit& orbit, const LinearS2S& s2s, const SteppingGain<3>& K) {
  return p1_reference(orbit, s2s, K, deadbeat_gain(s2s));
}

PlaneReference p2_reference(const P2Orbit& orbit, const LinearS2S& s2s,
                            const SteppingGain<2>& K) {
  PlaneReference ref = orbit_reference(ReferenceMode::P2, s2s, K, deadbeat_gain(s2s));
  ref.p2 = orbit;
  return ref;
}

PlaneReference p2_reference(const P2Orbit& orbit, const LinearS2S& s2s, const SteppingGain<3>& K,
                            const SteppingGain<2>& K_orbit) {
  PlaneReference ref = orbit_reference(ReferenceMode::P2, s2s, K, K_orbit);
  ref.p2 = orbit;
  return ref;
}

PlaneReference p2_reference(const P2Orbit& orbit, const LinearS2S& s2s, const SteppingGain<3>& K) {
  return p2_reference(orbit, s2s, K, deadbeat_gain(s2s));
}

PlaneReference planned_reference(std::vector<Eigen::Vector3d> x_seq, std::vector<double> u_seq,
                                 const ExtendedS2S& s2s, const SteppingGain<3>& K) {
  require_stable(s2s, K.K);
  if (x_seq.empty()) throw InvalidParameter("planned reference needs at least one state");
  if (u_seq.size() + 1 != x_seq.size())
    throw InvalidParameter("planned reference needs one more state than inputs");
  PlaneReference ref;
  ref.mode = ReferenceMode::Planned;
  ref.x_seq = std::move(x_seq);
  ref.u_seq = std::move(u_seq);
  ref.K = K.K;
  ref.gain_kind = K.kind;
  return ref;
}

PlaneTarget advance_reference(const PlaneReference& ref, int k) {
  if (k < 0) throw ContractViolation("reference index must be non-negative");
  switch (ref.mode) {
    case ReferenceMode::P1:
      return {ref.p1.state(), ref.p1.u_star};
    case ReferenceMode::P2:
      if (stance_at(k) == Side::Left) return {ref.p2.state_right(), ref.p2.u_star_R};
      return {ref.p2.state_left(), ref.p2.u_star_L};
    case ReferenceMode::Planned: {
      const auto n = static_cast<int>(ref.u_seq.size());
      if (k < n) return {ref.x_seq[k], ref.u_seq[k]};
      if (k == n && n > 0) return {ref.x_seq[k], ref.u_seq[n - 1]};
      if (ref.replan) return ref.replan(k);
      throw ContractViolation("planned reference exhausted at step " + std::to_string(k));
    }
  }
  throw ContractViolation("unknown reference mode");
}

double stepping_controller(const Eigen::VectorXd& x_aslip, const Eigen::VectorXd& x_hlip,
                           double u_hlip, const Eigen::RowVectorXd& K) {
  if (x_aslip.size() != x_hlip.size() || x_aslip.size() != K.size())
    throw ContractViolation("stepping controller: state and gain dimensions differ");
  return u_hlip + K.dot(x_aslip - x_hlip);
}

Composition3D compose_3d(const PlaneReference& x_ref, const PlaneReference& y_ref,
                         double min_foot_separation) {
  if (!(min_foot_separation >= 0.0))
    throw InvalidParameter("minimum foot separation must be non-negative");
  Composition3D c;
  c.x_plane = x_ref;
  c.y_plane = y_ref;
  c.min_foot_separation = min_foot_separation;

  if (x_ref.mode == ReferenceMode::P1 && y_ref.mode == ReferenceMode::P1)
    throw InvalidParameter("P1-P1 composition is not realizable: lateral step sizes are zero");
  if (y_ref.mode == ReferenceMode::P1)
    throw InvalidParameter("lateral plane needs a P2 orbit or a plan; a lateral P1 crosses the legs");

  if (y_ref.mode == ReferenceMode::P2) {
    if (y_ref.p2.u_star_L < min_foot_separation || -y_ref.p2.u_star_R < min_foot_separation)
      throw InvalidParameter(
          "lateral P2 step sizes must land each foot on its own side at least " +
          std::to_string(min_foot_separation) + " m from the stance foot (u_L = " +
          std::to_string(y_ref.p2.u_star_L) + ", u_R = " + std::to_string(y_ref.p2.u_star_R) + ")");
  }

  if (x_ref.mode == ReferenceMode::Planned || y_ref.mode == ReferenceMode::Planned)
    c.kind = CompositionKind::Planned;
  else if (x_ref.mode == ReferenceMode::P1)
    c.kind = CompositionKind::P1P2;
  else
    c.kind = CompositionKind::P2P2;
  return c;
}

PlaneSchedule build_schedule(const PlaneReference& ref, const Eigen::VectorXd& x0, double u0,
                             int n_steps, const LinearS2S& s2s, double u_max) {
  if (n_steps < 0) throw InvalidParameter("schedule length must be non-negative");
  if (x0.size() != ref.dim()) throw ContractViolation("schedule: initial state dimension mismatch");
  PlaneSchedule out;
  out.x.reserve(n_steps + 1);
  out.u.reserve(n_steps + 1);

  if (ref.mode == ReferenceMode::Planned) {
    for (int k = 0; k <= n_steps; ++k) {
      const PlaneTarget t = advance_reference(ref, k);
      out.x.push_back(t.x);
      out.u.push_back(t.u);
    }
    return out;
  }

  const bool extended = ref.dim() == 3;
  const ExtendedS2S ext = extend_s2s(s2s);
  Eigen::VectorXd x = x0;
  double u = u0;
  out.x.push_back(x);
  out.u.push_back(u);
  for (int k = 1; k <= n_steps; ++k) {
    if (extended)
      x = hlip_step<3>(Eigen::Vector3d(x), u, ext);
    else
      x = hlip_step<2>(Eigen::Vector2d(x), u, s2s);
    const PlaneTarget t = advance_reference(ref, k);
    u = std::clamp(stepping_controller(x.tail<2>(), t.x, t.u, ref.K_orbit), -u_max, u_max);
    out.x.push_back(x);
    out.u.push_back(u);
  }
  return out;
}

Eigen::VectorXd plane_state(const Eigen::Vector4d& x_rel, const Eigen::Vector2d& stance_foot,
                            int plane, int dim) {
  const double p = x_rel(2 * plane);
  const double v = x_rel(2 * plane + 1);
  if (dim == 2) return Eigen::Vector2d(p, v);
  return Eigen::Vector3d(stance_foot(plane) + p, p, v);
}

StepController make_walk_controller(const WalkReference& ref) {
  return [ref](const PreImpactEstimate& est) -> Eigen::Vector2d {
    const int k = est.step_index;
    const PlaneReference* planes[2] = {&ref.composition.x_plane, &ref.composition.y_plane};
    const PlaneSchedule* sched[2] = {&ref.x_sched, &ref.y_sched};
    Eigen::Vector2d u;
    for (int i = 0; i < 2; ++i) {
      if (k < 0 || k >= static_cast<int>(sched[i]->u.size()))
        throw ContractViolation("walk reference has no entry for step " + std::to_string(k));
      const Eigen::VectorXd x = plane_state(est.x, est.stance_foot, i, planes[i]->dim());
      u(i) = std::clamp(stepping_controller(x, sched[i]->x[k], sched[i]->u[k], planes[i]->K),
                        -ref.u_max, ref.u_max);
    }
    if (ref.min_lateral_step > 0.0) {
      // Left stance at impact k lands the right foot, which must stay on the right.
      if (stance_at(k) == Side::Left)
        u(1) = std::min(u(1), -ref.min_lateral_step);
      else
        u(1) = std::max(u(1), ref.min_lateral_step);
    }
    return u;
  };
}

}  // namespace slipwalk
