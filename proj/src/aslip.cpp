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

#include "slipwalk/aslip.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slipwalk/hlip.hpp"

namespace slipwalk {

namespace {

constexpr int kLeft = 0;
constexpr int kRight = 1;

int idx(Side s) { return s == Side::Left ? kLeft : kRight; }

// Continuous state [P, Pdot, L_l, Ldot_l, L_r, Ldot_r].
using Flat = Eigen::Matrix<double, 10, 1>;

Flat pack(const ASlipState& st) {
  Flat y;
  y.segment<3>(0) = st.P;
  y.segment<3>(3) = st.Pdot;
  y(6) = st.left.L;
  y(7) = st.left.Ldot;
  y(8) = st.right.L;
  y(9) = st.right.Ldot;
  return y;
}

void update_springs(ASlipState& st) {
  for (LegState* leg : {&st.left, &st.right}) {
    if (!leg->in_contact) {
      leg->s = 0.0;
      leg->sdot = 0.0;
      continue;
    }
    const Eigen::Vector3d d = st.P - leg->foot;
    const double r = d.norm();
    const double rdot = r > 0.0 ? d.dot(st.Pdot) / r : 0.0;
    leg->s = leg->L - r;
    leg->sdot = leg->Ldot - rdot;
  }
}

void unpack(const Flat& y, ASlipState& st) {
  st.P = y.segment<3>(0);
  st.Pdot = y.segment<3>(3);
  st.left.L = y(6);
  st.left.Ldot = y(7);
  st.right.L = y(8);
  st.right.Ldot = y(9);
  update_springs(st);
}

// Phase of each leg's reference: the leading leg is half a gait period
// ahead of the trailing one.
double leg_phase(const ASlipState& st, Side s, const GaitTrajectory& gait) {
  return st.t_step + (s == st.leading ? 0.0 : gait.T_step);
}

struct Integrator {
  const GaitTrajectory& gait;
  const ASlipParams& params;
  ASlipState scratch;

  Flat derivative(double t_step, const Flat& y) {
    scratch.t_step = t_step;
    unpack(y, scratch);
    Eigen::Vector2d tau;
    tau(kLeft) = leg_length_control(leg_phase(scratch, Side::Left, gait), scratch.left, gait, params);
    tau(kRight) = leg_length_control(leg_phase(scratch, Side::Right, gait), scratch.right, gait, params);
    const StateDerivative d = continuous_dynamics(scratch, tau, params);
    Flat out;
    out.segment<3>(0) = d.Pdot;
    out.segment<3>(3) = d.Pddot;
    out(6) = d.Ldot[kLeft];
    out(7) = d.Lddot[kLeft];
    out(8) = d.Ldot[kRight];
    out(9) = d.Lddot[kRight];
    return out;
  }

  Flat rk4(double t_step, const Flat& y, double h) {
    const Flat k1 = derivative(t_step, y);
    const Flat k2 = derivative(t_step + 0.5 * h, y + 0.5 * h * k1);
    const Flat k3 = derivative(t_step + 0.5 * h, y + 0.5 * h * k2);
    const Flat k4 = derivative(t_step + h, y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

TraceSample make_sample(const ASlipState& st, const ASlipParams& params) {
  TraceSample s;
  s.t = st.t;
  s.P = st.P;
  s.Pdot = st.Pdot;
  s.domain = st.domain;
  s.step_index = st.step_index;
  for (Side side : {Side::Left, Side::Right}) {
    const int i = idx(side);
    const LegState& leg = st.leg(side);
    s.L[i] = leg.L;
    s.s[i] = leg.s;
    if (leg.in_contact) {
      const Eigen::Vector3d d = st.P - leg.foot;
      const double r = d.norm();
      const double f = leg_force(leg, params);
      s.contact[i] = true;
      s.F[i] = f;
      s.F_z[i] = std::max(0.0, f) * d.z() / r;
      s.rdot[i] = d.dot(st.Pdot) / r;
    }
  }
  return s;
}

Eigen::Vector4d predict_pre_impact(const ASlipState& st, double remaining, double lambda) {
  const Eigen::Vector4d x = st.horizontal();
  const Eigen::Vector2d px = ssp_flow(x.segment<2>(0), remaining, lambda);
  const Eigen::Vector2d py = ssp_flow(x.segment<2>(2), remaining, lambda);
  return {px(0), px(1), py(0), py(1)};
}

}  // namespace

void ASlipParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(m > 0.0) || !finite(m)) throw InvalidParameter("aSLIP mass must be positive");
  if (!(K_s > 0.0) || !finite(K_s)) throw InvalidParameter("aSLIP stiffness must be positive");
  if (!(D_s >= 0.0) || !finite(D_s)) throw InvalidParameter("aSLIP damping must be non-negative");
  if (!(g > 0.0) || !finite(g)) throw InvalidParameter("aSLIP gravity must be positive");
  if (!(Kp_leg < 0.0) || !(Kd_leg <= 0.0))
    throw InvalidParameter("leg-length gains must be negative (negative feedback)");
  if (!(L_min < L_max) || !(L_min > 0.0))
    throw InvalidParameter("leg-length bounds must satisfy 0 < L_min < L_max");
  if (!(swing_clearance > 0.0)) throw InvalidParameter("swing clearance must be positive");
}

const char* to_string(Domain d) {
  switch (d) {
    case Domain::SspLeft:
      return "SSP_left";
    case Domain::SspRight:
      return "SSP_right";
    case Domain::Dsp:
      return "DSP";
  }
  return "unknown";
}

Eigen::Vector4d ASlipState::horizontal() const {
  const Eigen::Vector3d rel = P - leg(leading).foot;
  return {rel.x(), Pdot.x(), rel.y(), Pdot.y()};
}

double GaitTrajectory::L_des(double phase) const {
  const double w = std::numbers::pi / T_step;
  double v = coef.empty() ? 0.0 : coef[0];
  for (int j = 1; 2 * j - 1 < n_coef(); ++j) {
    const double a = coef[2 * j - 1];
    const double b = 2 * j < n_coef() ? coef[2 * j] : 0.0;
    v += a * std::cos(j * w * phase) + b * std::sin(j * w * phase);
  }
  return v;
}

double GaitTrajectory::Ldot_des(double phase) const {
  const double w = std::numbers::pi / T_step;
  double v = 0.0;
  for (int j = 1; 2 * j - 1 < n_coef(); ++j) {
    const double a = coef[2 * j - 1];
    const double b = 2 * j < n_coef() ? coef[2 * j] : 0.0;
    v += j * w * (-a * std::sin(j * w * phase) + b * std::cos(j * w * phase));
  }
  return v;
}

double GaitTrajectory::Lddot_des(double phase) const {
  const double w = std::numbers::pi / T_step;
  double v = 0.0;
  for (int j = 1; 2 * j - 1 < n_coef(); ++j) {
    const double a = coef[2 * j - 1];
    const double b = 2 * j < n_coef() ? coef[2 * j] : 0.0;
    v -= (j * w) * (j * w) * (a * std::cos(j * w * phase) + b * std::sin(j * w * phase));
  }
  return v;
}

GaitTrajectory::Ref GaitTrajectory::reference(double phase) const {
  const double w = std::numbers::pi / T_step;
  const double c1 = std::cos(w * phase);
  const double s1 = std::sin(w * phase);
  Ref r{coef.empty() ? 0.0 : coef[0], 0.0, 0.0};
  double cj = 1.0, sj = 0.0;
  for (int j = 1; 2 * j - 1 < n_coef(); ++j) {
    const double cn = cj * c1 - sj * s1;
    sj = sj * c1 + cj * s1;
    cj = cn;
    const double a = coef[2 * j - 1];
    const double b = 2 * j < n_coef() ? coef[2 * j] : 0.0;
    const double jw = j * w;
    r.L += a * cj + b * sj;
    r.Ldot += jw * (-a * sj + b * cj);
    r.Lddot -= jw * jw * (a * cj + b * sj);
  }
  return r;
}

void GaitTrajectory::validate() const {
  if (coef.empty()) throw InvalidParameter("gait has no leg-length coefficients");
  if (!(T_step > 0.0)) throw InvalidParameter("gait step period must be positive");
  if (!(T_ssp > 0.0) || !(T_dsp >= 0.0) || !(z0_avg > 0.0))
    throw InvalidParameter("gait measured durations/height are invalid");
  for (double c : coef)
    if (!std::isfinite(c)) throw InvalidParameter("gait coefficient is not finite");
}

ASlipState initial_state(const GaitTrajectory& gait, const ASlipParams& params, Side stance,
                         int step_index) {
  gait.validate();
  ASlipState st;
  st.P = {0.0, 0.0, gait.z_pre};
  st.Pdot = {0.0, 0.0, gait.zdot_pre};
  st.leading = stance;
  st.domain = stance == Side::Left ? Domain::SspLeft : Domain::SspRight;
  st.t_step = gait.T_step;
  st.t_domain = gait.T_ssp;
  st.step_index = step_index;

  LegState& st_leg = st.leg(stance);
  st_leg.in_contact = true;
  st_leg.L = gait.L_stance_pre;
  st_leg.Ldot = gait.Ldot_stance_pre;

  LegState& sw = st.leg(other(stance));
  sw.in_contact = false;
  sw.L = gait.L_swing_pre;
  sw.Ldot = gait.Ldot_swing_pre;
  sw.foot_vel = {0.0, 0.0, -2.0 * params.swing_clearance / gait.T_ssp};
  update_springs(st);
  return st;
}

double leg_force(const LegState& leg, const ASlipParams& params) {
  return params.K_s * leg.s + params.D_s * leg.sdot;
}

StateDerivative continuous_dynamics(const ASlipState& state, const Eigen::Vector2d& tau,
                                    const ASlipParams& params) {
  StateDerivative out;
  out.Pdot = state.Pdot;
  Eigen::Vector3d force = Eigen::Vector3d(0.0, 0.0, -params.m * params.g);
  for (Side side : {Side::Left, Side::Right}) {
    const LegState& leg = state.leg(side);
    const int i = idx(side);
    out.Ldot[i] = leg.Ldot;
    out.Lddot[i] = tau(i);
    if (!leg.in_contact) continue;
    const Eigen::Vector3d d = state.P - leg.foot;
    const double r = d.norm();
    if (!(r > 1e-9)) throw ContractViolation("contact leg has non-positive length");
    const double rdot = d.dot(state.Pdot) / r;
    const double s = leg.L - r;
    const double sdot = leg.Ldot - rdot;
    const double f = std::max(0.0, params.K_s * s + params.D_s * sdot);
    force += f * d / r;
  }
  out.Pddot = force / params.m;
  return out;
}

double leg_length_control(double phase, const LegState& leg, const GaitTrajectory& gait,
                          const ASlipParams& params) {
  const GaitTrajectory::Ref ref = gait.reference(phase);
  const double e = leg.L - ref.L;
  const double edot = leg.Ldot - ref.Ldot;
  double tau = ref.Lddot + params.Kp_leg * e + params.Kd_leg * edot;
  if (leg.L > params.L_max)
    tau = std::min(tau, params.Kp_leg * (leg.L - params.L_max) + params.Kd_leg * leg.Ldot);
  if (leg.L < params.L_min)
    tau = std::max(tau, params.Kp_leg * (leg.L - params.L_min) + params.Kd_leg * leg.Ldot);
  return tau;
}

SwingPoint swing_foot_reference(double t, const Eigen::Vector3d& start,
                                const Eigen::Vector3d& stance_foot, const Eigen::Vector2d& u,
                                double T_ssp, double clearance) {
  const double s = t / T_ssp;
  const double sc = std::clamp(s, 0.0, 1.0);
  const Eigen::Vector2d target = stance_foot.head<2>() + u;
  const Eigen::Vector2d delta = target - start.head<2>();
  const double blend = sc * sc * (3.0 - 2.0 * sc);
  const double dblend = (s > 0.0 && s < 1.0) ? 6.0 * sc * (1.0 - sc) / T_ssp : 0.0;

  const double q = s * (1.0 - s);
  const double h = clearance * (2.0 * q + 8.0 * q * q);
  const double dq = (1.0 - 2.0 * s) / T_ssp;
  const double dh = clearance * (2.0 * dq + 16.0 * q * dq);

  SwingPoint out;
  out.pos << start.head<2>() + blend * delta, h;
  out.vel << dblend * delta, dh;
  return out;
}

ASlipState impact_map(const ASlipState& state, const ASlipParams& params) {
  if (state.domain == Domain::Dsp)
    throw ContractViolation("impact map called during double support");
  const Side swing = other(state.leading);
  const LegState& sw = state.leg(swing);
  if (sw.in_contact || std::abs(sw.foot.z()) > 1e-6 || !(sw.foot_vel.z() < 0.0))
    throw ContractViolation("impact map called off the switching surface");

  ASlipState out = state;
  LegState& leg = out.leg(swing);
  leg.foot.z() = 0.0;
  leg.foot_vel.setZero();
  leg.in_contact = true;
  const Eigen::Vector3d d = out.P - leg.foot;
  const double r = d.norm();
  if (!(r > 1e-9)) throw ContractViolation("touchdown with zero leg length");
  // The massless swing leg lands unloaded: s+ = 0. L' is continuous, so
  // the jump is carried entirely by s'.
  leg.L = r;
  leg.s = 0.0;
  leg.sdot = leg.Ldot - d.dot(out.Pdot) / r;

  out.leading = swing;
  out.domain = Domain::Dsp;
  out.t_domain = 0.0;
  out.t_step = 0.0;
  (void)params;
  return out;
}

namespace {

// Illinois regula falsi on the step length h in (0, h_max] for a guard that
// is positive at h = 0 and non-positive at h_max.
template <typename Guard>
std::pair<double, double> locate_event(Guard&& guard, double g0, double h_max, double g_max,
                                       double tol) {
  double a = 0.0, ga = g0;
  double b = h_max, gb = g_max;
  double c = b, gc = gb;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    c = b - gb * (b - a) / (gb - ga);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    gc = guard(c);
    if (std::abs(gc) <= tol || b - a <= 1e-15) break;
    if (gc > 0.0) {
      a = c;
      ga = gc;
      if (side == -1) gb *= 0.5;
      side = -1;
    } else {
      b = c;
      gb = gc;
      if (side == 1) ga *= 0.5;
      side = 1;
    }
  }
  return {c, gc};
}

}  // namespace

StepResult simulate_step(const ASlipState& pre_impact, const StepController& controller,
                         const GaitTrajectory& gait, const ASlipParams& params,
                         const SimOptions& options) {
  params.validate();
  gait.validate();

  const Side old_stance = pre_impact.leading;
  const Side new_stance = other(old_stance);
  const int k = pre_impact.step_index;

  StepResult result;
  StepTrace& trace = result.trace;
  trace.step_index = k;
  trace.x_start = pre_impact.horizontal();
  trace.P_start = pre_impact.P;
  trace.stance_start = old_stance;
  trace.u = (pre_impact.leg(new_stance).foot - pre_impact.leg(old_stance).foot).head<2>();

  auto fail = [&](const std::string& why) -> StepFailure {
    return StepFailure("step " + std::to_string(k) + ": " + why, k, trace);
  };

  ASlipState st;
  try {
    st = impact_map(pre_impact, params);
  } catch (const ContractViolation& e) {
    throw fail(e.what());
  }

  Integrator integ{gait, params, st};
  const double z_fall = options.fall_fraction * gait.z0_avg;
  const double t_timeout = 3.0 * gait.T_step;
  const double dt = options.dt;
  int count = 0;

  auto record = [&](bool force) {
    if (force || count % options.sample_stride == 0) trace.samples.push_back(make_sample(st, params));
  };
  auto check = [&]() {
    if (!st.P.allFinite()) throw fail("state became non-finite");
    if (st.P.z() < z_fall) throw fail("fall detected (mass height below threshold)");
    if (st.t_step > t_timeout) throw fail("no touchdown within 3 step periods");
  };
  auto advance_to = [&](const Flat& y, double h) {
    st.t += h;
    st.t_step += h;
    st.t_domain += h;
    unpack(y, st);
    integ.scratch = st;
    ++count;
  };

  st.step_index = k;
  integ.scratch = st;
  record(true);

  // Double support: the trailing leg lifts off when its force crosses zero.
  LegState* trailing = &st.leg(old_stance);
  double g_lo = leg_force(*trailing, params);
  try {
    while (g_lo > 0.0) {
      const Flat y0 = pack(st);
      const Flat y1 = integ.rk4(st.t_step, y0, dt);
      ASlipState probe = st;
      unpack(y1, probe);
      const double g1 = leg_force(probe.leg(old_stance), params);
      if (g1 <= 0.0) {
        const double t0 = st.t_step;
        auto guard = [&](double h) {
          ASlipState p = st;
          unpack(integ.rk4(t0, y0, h), p);
          return leg_force(p.leg(old_stance), params);
        };
        auto [h, gh] = locate_event(guard, g_lo, dt, g1, options.event_tol);
        advance_to(integ.rk4(t0, y0, h), h);
        trace.liftoff_guard = gh;
        break;
      }
      advance_to(y1, dt);
      g_lo = g1;
      check();
      record(false);
    }
  } catch (const ContractViolation& e) {
    throw fail(e.what());
  }

  trace.T_dsp = st.t_step;
  trailing = &st.leg(old_stance);
  trailing->in_contact = false;
  trailing->s = 0.0;
  trailing->sdot = 0.0;
  st.domain = new_stance == Side::Left ? Domain::SspLeft : Domain::SspRight;
  st.t_domain = 0.0;
  integ.scratch = st;
  record(true);

  // Single support: steer the swing foot and stop at touchdown.
  const double t_swing = std::max(gait.T_step - st.t_step, 0.5 * gait.T_ssp);
  const Eigen::Vector3d swing_start = trailing->foot;
  const Eigen::Vector3d stance_foot = st.leg(new_stance).foot;
  const double lambda = std::sqrt(params.g / gait.z0_avg);
  const double freeze_time = t_swing - options.freeze_fraction * gait.T_ssp;

  Eigen::Vector2d target_u = Eigen::Vector2d::Zero();
  auto update_command = [&]() {
    if (st.t_domain > freeze_time) return;
    const PreImpactEstimate est{predict_pre_impact(st, t_swing - st.t_domain, lambda),
                                stance_foot.head<2>(), k + 1};
    const Eigen::Vector2d u = controller(est);
    if (!u.allFinite()) throw fail("controller returned a non-finite step size");
    target_u = u;
  };
  auto swing_height = [&](double t_dom) {
    return swing_foot_reference(t_dom, swing_start, stance_foot, target_u, t_swing,
                                params.swing_clearance)
        .pos.z();
  };

  update_command();
  try {
    for (;;) {
      const Flat y0 = pack(st);
      const double t0 = st.t_domain;
      const double h0 = swing_height(t0);
      const Flat y1 = integ.rk4(st.t_step, y0, dt);
      const double h1 = swing_height(t0 + dt);
      if (t0 + dt > 0.5 * t_swing && h1 <= 0.0 && h0 > 0.0) {
        auto guard = [&](double h) { return swing_height(t0 + h); };
        auto [h, gh] = locate_event(guard, h0, dt, h1, options.event_tol);
        advance_to(integ.rk4(st.t_step, y0, h), h);
        trace.touchdown_guard = gh;
        break;
      }
      advance_to(y1, dt);
      check();
      update_command();
      record(false);
    }
  } catch (const ContractViolation& e) {
    throw fail(e.what());
  }

  trace.T_ssp = st.t_domain;
  const SwingPoint sp = swing_foot_reference(st.t_domain, swing_start, stance_foot, target_u,
                                             t_swing, params.swing_clearance);
  LegState& sw = st.leg(old_stance);
  sw.foot = sp.pos;
  sw.foot_vel = sp.vel;
  if ((st.P - Eigen::Vector3d(sw.foot.x(), sw.foot.y(), 0.0)).norm() > params.L_max)
    throw fail("step size beyond kinematic reach");

  st.step_index = k + 1;
  record(true);
  trace.x_end = st.horizontal();
  trace.P_end = st.P;
  trace.u_next = target_u;
  result.next = st;
  return result;
}

StepResult simulate_step(const ASlipState& pre_impact, const Eigen::Vector2d& u_command,
                         const GaitTrajectory& gait, const ASlipParams& params,
                         const SimOptions& options) {
  const StepController fixed = [u_command](const PreImpactEstimate&) { return u_command; };
  return simulate_step(pre_impact, fixed, gait, params, options);
}

WalkResult simulate_walk(const ASlipState& initial, const GaitTrajectory& gait,
                         const ASlipParams& params, const StepController& controller,
                         int n_steps, const SimOptions& options) {
  if (n_steps < 0) throw InvalidParameter("n_steps must be non-negative");
  WalkResult out;
  out.traces.reserve(n_steps);
  ASlipState st = initial;
  for (int i = 0; i < n_steps; ++i) {
    try {
      StepResult r = simulate_step(st, controller, gait, params, options);
      st = r.next;
      out.traces.push_back(std::move(r.trace));
    } catch (const StepFailure& e) {
      throw WalkFailure(e, std::move(out.traces));
    }
  }
  out.final_state = st;
  return out;
}

}  // namespace slipwalk
