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

#include "slipwalk/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slipwalk/errors.hpp"

namespace slipwalk {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Periodic3D:
      return "periodic-3d";
    case ScenarioKind::FixedLocation:
      return "fixed-location";
    case ScenarioKind::TrajectoryTracking:
      return "trajectory-tracking";
    case ScenarioKind::SteppingInPlace:
      return "stepping-in-place";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  for (ScenarioKind k : {ScenarioKind::Periodic3D, ScenarioKind::FixedLocation,
                         ScenarioKind::TrajectoryTracking, ScenarioKind::SteppingInPlace})
    if (s == to_string(k)) return k;
  throw InvalidParameter("unknown scenario kind '" + s + "'");
}

const char* to_string(GainConfig::Kind k) {
  switch (k) {
    case GainConfig::Kind::Deadbeat:
      return "deadbeat";
    case GainConfig::Kind::Lqr:
      return "lqr";
    case GainConfig::Kind::User:
      return "user";
  }
  return "?";
}

void TrajectorySamples::validate() const {
  if (t.size() < 2) throw InvalidParameter("desired trajectory needs at least two samples");
  if (x_d.size() != t.size() || y_d.size() != t.size())
    throw InvalidParameter("desired trajectory columns have different lengths");
  if (vx_d.size() != vy_d.size() || (!vx_d.empty() && vx_d.size() != t.size()))
    throw InvalidParameter("desired trajectory velocity columns must both be given for every sample");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(x_d[i]) || !std::isfinite(y_d[i]))
      throw InvalidParameter("desired trajectory has a non-finite sample at row " + std::to_string(i));
    if (i > 0 && !(t[i] > t[i - 1]))
      throw InvalidParameter("desired trajectory times must strictly increase (row " +
                             std::to_string(i) + ")");
  }
}

namespace {

double interp(const std::vector<double>& t, const std::vector<double>& y, double tq) {
  if (tq <= t.front()) return y.front();
  if (tq >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), tq);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const double a = (tq - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - a) * y[i - 1] + a * y[i];
}

}  // namespace

double TrajectorySamples::position(int plane, double tq) const {
  return interp(t, plane == 0 ? x_d : y_d, tq);
}

double TrajectorySamples::velocity(int plane, double tq) const {
  if (has_velocity()) return interp(t, plane == 0 ? vx_d : vy_d, tq);
  // Held constant outside the samples, so the velocity vanishes there.
  if (tq < t.front() || tq > t.back()) return 0.0;
  const std::vector<double>& y = plane == 0 ? x_d : y_d;
  auto it = std::upper_bound(t.begin(), t.end(), tq);
  std::size_t i = static_cast<std::size_t>(it - t.begin());
  i = std::clamp<std::size_t>(i, 1, t.size() - 1);
  return (y[i] - y[i - 1]) / (t[i] - t[i - 1]);
}

double SinusoidConfig::position(int plane, double t) const {
  t = std::max(t, 0.0);
  if (plane == 1) return amplitude * (1.0 - std::cos(2.0 * M_PI * t / period));
  if (ramp_time <= 0.0) return forward_speed * t;
  if (t < ramp_time) return 0.5 * forward_speed * t * t / ramp_time;
  return forward_speed * (t - 0.5 * ramp_time);
}

double SinusoidConfig::velocity(int plane, double t) const {
  t = std::max(t, 0.0);
  const double w = 2.0 * M_PI / period;
  if (plane == 1) return amplitude * w * std::sin(w * t);
  if (ramp_time <= 0.0) return forward_speed;
  return forward_speed * std::min(1.0, t / ramp_time);
}

void ScenarioConfig::validate() const {
  aslip.validate();
  gait_spec.validate();
  if (n_steps < 2) throw InvalidParameter("scenario n_steps must be at least 2");
  if (!(u_max > 0.0)) throw InvalidParameter("scenario u_max must be positive");
  if (!(min_foot_separation >= 0.0 && min_foot_separation < u_max))
    throw InvalidParameter("scenario min_foot_separation must lie in [0, u_max)");
  if (orbit_gain.dim != 2) throw InvalidParameter("orbit gain must be 2-state");
  for (const GainConfig* g : {&x_gain, &y_gain, &orbit_gain}) {
    if (g->dim != 2 && g->dim != 3) throw InvalidParameter("gain dim must be 2 or 3");
    if (g->kind == GainConfig::Kind::User && static_cast<int>(g->K.size()) != g->dim)
      throw InvalidParameter("user gain needs exactly dim entries");
    if (g->kind == GainConfig::Kind::Lqr) {
      if (!g->Q_diag.empty() && static_cast<int>(g->Q_diag.size()) != g->dim)
        throw InvalidParameter("LQR Q_diag needs exactly dim entries");
      if (!(g->R > 0.0)) throw InvalidParameter("LQR R must be positive");
    }
    if ((kind == ScenarioKind::FixedLocation || kind == ScenarioKind::TrajectoryTracking) &&
        g != &orbit_gain && g->dim != 3)
      throw InvalidParameter("planned references need extended (dim 3) gains");
  }
  if (kind == ScenarioKind::FixedLocation || kind == ScenarioKind::TrajectoryTracking) {
    if (horizon < 1) throw InvalidParameter("scenario horizon must be at least 1");
    if (!(R > 0.0)) throw InvalidParameter("scenario R must be positive");
  }
  if (kind == ScenarioKind::TrajectoryTracking) {
    if (trajectory) {
      trajectory->validate();
    } else if (!(sinusoid.period > 0.0) || !(sinusoid.ramp_time >= 0.0)) {
      throw InvalidParameter("sinusoid period must be positive and ramp_time non-negative");
    }
  }
}

HlipParams hlip_params_of(const GaitTrajectory& gait, const ASlipParams& params) {
  HlipParams hp;
  hp.g = params.g;
  hp.z0 = gait.z0_avg;
  hp.T_ssp = gait.T_ssp;
  hp.T_dsp = gait.T_dsp;
  hp.validate();
  return hp;
}

namespace {

PlaneModel make_model(const GainConfig& g, const LinearS2S& s2s) {
  PlaneModel m;
  m.dim = g.dim;
  m.gain_kind = to_string(g.kind);
  if (g.dim == 2) {
    m.A = s2s.A;
    m.B = s2s.B;
    SteppingGain<2> K;
    if (g.kind == GainConfig::Kind::Deadbeat) {
      K = deadbeat_gain<2>(s2s);
    } else if (g.kind == GainConfig::Kind::Lqr) {
      LqrWeights<2> w;
      if (!g.Q_diag.empty()) w.Q = Eigen::Vector2d(g.Q_diag[0], g.Q_diag[1]).asDiagonal();
      w.R = g.R;
      K = lqr_gain<2>(s2s, w);
    } else {
      K.K << g.K[0], g.K[1];
    }
    m.K = K.K;
  } else {
    const ExtendedS2S ext = extend_s2s(s2s);
    m.A = ext.A;
    m.B = ext.B;
    SteppingGain<3> K;
    if (g.kind == GainConfig::Kind::Deadbeat) {
      K = deadbeat_gain<3>(ext);
    } else if (g.kind == GainConfig::Kind::Lqr) {
      LqrWeights<3> w;
      if (!g.Q_diag.empty())
        w.Q = Eigen::Vector3d(g.Q_diag[0], g.Q_diag[1], g.Q_diag[2]).asDiagonal();
      w.R = g.R;
      K = lqr_gain<3>(ext, w);
    } else {
      K.K << g.K[0], g.K[1], g.K[2];
    }
    m.K = K.K;
  }
  if (!(spectral_radius(m.A_cl()) < 1.0))
    throw InvalidParameter("tracking gain does not stabilize the plane (rho = " +
                           std::to_string(spectral_radius(m.A_cl())) + ")");
  return m;
}

PlaneReference orbit_reference(const OrbitConfig& o, const PlaneModel& m, const PlaneModel& orbit,
                               const HlipParams& hp, const LinearS2S& s2s) {
  if (o.mode == ReferenceMode::Planned)
    throw InvalidParameter("periodic walking needs P1 or P2 orbits");
  SteppingGain<2> Ko;
  Ko.K = orbit.K;
  PlaneReference ref;
  if (m.dim == 2) {
    SteppingGain<2> K;
    K.K = m.K;
    ref = o.mode == ReferenceMode::P1 ? p1_reference(p1_orbit(hp, o.v_d), s2s, K)
                                      : p2_reference(p2_orbit(hp, o.v_d, o.u_L), s2s, K);
    ref.K_orbit = Ko.K;
    return ref;
  }
  SteppingGain<3> K;
  K.K = m.K;
  return o.mode == ReferenceMode::P1 ? p1_reference(p1_orbit(hp, o.v_d), s2s, K, Ko)
                                     : p2_reference(p2_orbit(hp, o.v_d, o.u_L), s2s, K, Ko);
}

}  // namespace

TrajectorySource target_source(const ScenarioConfig& c, const HlipParams& hp) {
  if (c.kind == ScenarioKind::FixedLocation) {
    const Eigen::Vector3d tx = c.x_target, ty = c.y_target;
    return [tx, ty](int plane, double) -> Eigen::Vector3d { return plane == 0 ? tx : ty; };
  }
  // Pre-impact targets follow the P1 relation of the local path velocity.
  auto target = [hp](double pos, double vel) -> Eigen::Vector3d {
    const P1Orbit o = p1_orbit(hp, vel);
    return {pos, o.p_star, o.v_star};
  };
  if (c.trajectory) {
    const TrajectorySamples tr = *c.trajectory;
    return [tr, target](int plane, double t) {
      return target(tr.position(plane, t), tr.velocity(plane, t));
    };
  }
  const SinusoidConfig s = c.sinusoid;
  return [s, target](int plane, double t) {
    return target(s.position(plane, t), s.velocity(plane, t));
  };
}

std::vector<StepRecord> build_step_records(const std::vector<StepTrace>& traces,
                                           const PlaneSchedule schedules[2],
                                           const PlaneModel planes[2]) {
  const std::vector<S2SRecord> raw = s2s_records(traces);
  std::vector<StepRecord> out;
  out.reserve(raw.size());
  for (const auto& r : raw) {
    StepRecord s;
    s.k = r.step_index;
    s.stance = stance_at(r.step_index);
    s.x_rel = r.x;
    s.stance_foot = r.stance_foot;
    s.u = r.u;
    for (int i = 0; i < 2; ++i) {
      if (r.step_index >= static_cast<int>(schedules[i].x.size()))
        throw ContractViolation("reference schedule shorter than the walk");
      s.x_aslip[i] = record_state(r, i, planes[i].dim);
      s.x_hlip[i] = schedules[i].x[r.step_index];
      s.u_hlip(i) = schedules[i].u[r.step_index];
      s.e[i] = s.x_aslip[i] - s.x_hlip[i];
    }
    out.push_back(std::move(s));
  }
  for (std::size_t k = 0; k + 1 < out.size(); ++k) {
    for (int i = 0; i < 2; ++i) {
      const PlaneModel& m = planes[i];
      out[k].w[i] = out[k + 1].x_aslip[i] - m.A * out[k].x_aslip[i] - m.B * out[k].u(i);
      out[k].w_cl[i] = out[k + 1].e[i] - m.A_cl() * out[k].e[i];
    }
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const GaitTrajectory* gait) {
  config.validate();
  ScenarioResult res;
  res.config = config;
  if (gait) {
    gait->validate();
    res.gait = *gait;
  } else {
    GaitSpec spec = config.gait_spec;
    if (spec.seed == 0) spec.seed = config.seed;
    res.gait = synthesize_gait(spec, config.aslip, config.synthesis).gait;
  }
  res.hlip = hlip_params_of(res.gait, config.aslip);
  const LinearS2S s2s = s2s_matrices(res.hlip);
  const int n = config.n_steps;

  const ASlipState start = initial_state(res.gait, config.aslip, Side::Left, 0);
  const Eigen::Vector4d h0 = start.horizontal();
  const Eigen::Vector2d foot0 = start.leg(start.leading).foot.head<2>();

  PlaneSchedule sched[2];
  StepController controller;
  if (config.kind == ScenarioKind::SteppingInPlace) {
    GainConfig g;
    g.dim = 2;
    for (int i = 0; i < 2; ++i) res.planes[i] = make_model(g, s2s);
    SteppingGain<2> K;
    K.K = res.planes[0].K;
    const PlaneReference ref = p1_reference(p1_orbit(res.hlip, 0.0), s2s, K);
    for (int i = 0; i < 2; ++i)
      sched[i] = build_schedule(ref, plane_state(h0, foot0, i, 2), 0.0, n, s2s, config.u_max);
    if (config.controller_enabled) {
      WalkReference wr;
      wr.composition.x_plane = ref;
      wr.composition.y_plane = ref;
      wr.x_sched = sched[0];
      wr.y_sched = sched[1];
      wr.u_max = config.u_max;
      controller = make_walk_controller(wr);
    } else {
      controller = [](const PreImpactEstimate&) { return Eigen::Vector2d(0.0, 0.0); };
    }
  } else {
    res.planes[0] = make_model(config.x_gain, s2s);
    res.planes[1] = make_model(config.y_gain, s2s);
    PlaneReference refs[2];
    if (config.kind == ScenarioKind::Periodic3D) {
      const PlaneModel orbit = make_model(config.orbit_gain, s2s);
      refs[0] = orbit_reference(config.x_orbit, res.planes[0], orbit, res.hlip, s2s);
      refs[1] = orbit_reference(config.y_orbit, res.planes[1], orbit, res.hlip, s2s);
    } else {
      const ExtendedS2S ext = extend_s2s(s2s);
      PlanProblem tmpl;
      tmpl.N = config.horizon;
      tmpl.u_max = config.u_max;
      tmpl.Q = config.Q;
      tmpl.R = config.R;
      tmpl.terminal = config.terminal;
      tmpl.first_step = 0;
      std::vector<Eigen::Vector3d> x0;
      for (int i = 0; i < 2; ++i) {
        PlanePlan pl;
        pl.s2s = ext;
        pl.target.assign(config.horizon, Eigen::Vector3d::Zero());
        pl.min_step = i == 1 ? config.min_foot_separation : 0.0;
        tmpl.planes.push_back(pl);
        x0.push_back(plane_state(h0, foot0, i, 3));
      }
      const TrajectorySource source = target_source(config, res.hlip);
      // One extra entry so the step ending the walk has its own planned input.
      const std::vector<MpcStep> mpc =
          mpc_track(tmpl, source, x0, {0.0, 0.0}, n + 1, res.hlip.period());
      for (const auto& s : mpc) res.summary.mpc_fallbacks += s.fallback ? 1 : 0;
      for (int i = 0; i < 2; ++i) {
        std::vector<Eigen::Vector3d> xs;
        std::vector<double> us;
        for (int k = 0; k <= n + 1; ++k) {
          xs.push_back(mpc[k].x[i]);
          if (k <= n) us.push_back(mpc[k].u[i]);
        }
        SteppingGain<3> K;
        K.K = res.planes[i].K;
        refs[i] = planned_reference(std::move(xs), std::move(us), ext, K);
      }
    }
    WalkReference wr;
    wr.composition = compose_3d(refs[0], refs[1], config.min_foot_separation);
    wr.u_max = config.u_max;
    if (config.enforce_lateral_separation) wr.min_lateral_step = config.min_foot_separation;
    for (int i = 0; i < 2; ++i)
      sched[i] = build_schedule(refs[i], plane_state(h0, foot0, i, res.planes[i].dim), 0.0, n,
                                s2s, config.u_max);
    wr.x_sched = sched[0];
    wr.y_sched = sched[1];
    controller = make_walk_controller(wr);
  }

  try {
    WalkResult walk = simulate_walk(start, res.gait, config.aslip, controller, n, config.sim);
    res.traces = std::move(walk.traces);
  } catch (const WalkFailure& e) {
    res.traces = e.completed();
    res.summary.failed = true;
    res.summary.failure = e.what();
  }
  res.summary.completed_steps = static_cast<int>(res.traces.size());
  if (res.traces.empty()) return res;

  res.records = build_step_records(res.traces, sched, res.planes);

  ScenarioSummary& sm = res.summary;
  const TraceSample& first = res.traces.front().samples.front();
  const TraceSample& last = res.traces.back().samples.back();
  const double span = last.t - first.t;
  const Eigen::Vector3d P0 = res.traces.front().P_start;
  const Eigen::Vector3d P1 = res.traces.back().P_end;
  if (span > 0.0) sm.mean_velocity = (P1 - P0).head<2>() / span;
  sm.net_displacement = (P1 - P0).head<2>();
  double area = 0.0, zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
  double fmin = std::numeric_limits<double>::infinity();
  const TraceSample* prev = nullptr;
  for (const auto& tr : res.traces) {
    for (const auto& s : tr.samples) {
      zmin = std::min(zmin, s.P.z());
      zmax = std::max(zmax, s.P.z());
      for (int l = 0; l < 2; ++l)
        if (s.contact[l]) fmin = std::min(fmin, s.F_z[l]);
      if (prev && s.t > prev->t) area += 0.5 * (s.t - prev->t) * (s.P.z() + prev->P.z());
      prev = &s;
    }
  }
  sm.height_min = zmin;
  sm.height_max = zmax;
  sm.height_mean = span > 0.0 ? area / span : first.P.z();
  sm.min_vertical_force = std::isfinite(fmin) ? fmin : 0.0;

  const StepRecord& rl = res.records.back();
  sm.final_position = rl.stance_foot + Eigen::Vector2d(rl.x_rel(0), rl.x_rel(2));
  sm.final_velocity = Eigen::Vector2d(rl.x_rel(1), rl.x_rel(3));
  // Stepping in place keeps both point feet on the same spot by construction.
  if (config.kind != ScenarioKind::SteppingInPlace) {
    for (std::size_t k = 1; k < res.records.size(); ++k) {
      const double uy = res.records[k].u(1);
      const double outward = stance_at(static_cast<int>(k)) == Side::Left ? -uy : uy;
      if (outward < config.min_foot_separation - 1e-12) ++sm.separation_violations;
    }
  }
  for (std::size_t k = 10; k < res.records.size(); ++k) {
    const Eigen::Vector4d xk = res.records[k].x_rel;
    if (k + 1 < res.records.size()) {
      const Eigen::Vector4d xn = res.records[k + 1].x_rel;
      sm.convergence_x = std::max(sm.convergence_x, (xn.head<2>() - xk.head<2>()).norm());
    }
    if (k + 2 < res.records.size()) {
      const Eigen::Vector4d xn = res.records[k + 2].x_rel;
      sm.convergence_y = std::max(sm.convergence_y, (xn.tail<2>() - xk.tail<2>()).norm());
    }
  }
  return res;
}

PlaneAnalysis analyze_plane(const std::vector<StepRecord>& records, int plane,
                            const PlaneModel& model, const AnalysisOptions& options) {
  if (plane != 0 && plane != 1) throw InvalidParameter("plane index must be 0 (x) or 1 (y)");
  if (records.size() < 2)
    throw InvalidParameter("set analysis needs at least two consecutive pre-impact states");
  if (options.n < 1) throw InvalidParameter("set analysis needs n >= 1");
  PlaneAnalysis a;
  a.plane = plane;
  a.dim = model.dim;
  for (const auto& r : records) {
    if (r.e[plane].size() != model.dim)
      throw InvalidParameter("step record dimension does not match the plane model");
    a.e.push_back(r.e[plane]);
    if (r.w[plane].size() == model.dim) {
      a.w.push_back(r.w[plane]);
      a.w_cl.push_back(r.w_cl[plane]);
    }
  }
  if (a.w_cl.empty()) throw InvalidParameter("set analysis found no disturbance samples");

  const Eigen::MatrixXd A_cl = model.A_cl();
  const int nil = nilpotency_index(A_cl);
  a.exact = nil > 0 && nil <= options.n;
  a.set_terms = a.exact ? nil : options.n;
  a.W = hull(a.w_cl, options.eps);
  a.E = invariant_set(A_cl, a.W, options.n);
  for (const auto& e : a.e) {
    const bool in = contains(a.E, e, options.membership_tol);
    a.e_in_E.push_back(in);
    a.all_in_E = a.all_in_E && in;
  }
  a.certificate = check_invariance(A_cl, a.E, a.W, options.certificate_tol);
  return a;
}

}  // namespace slipwalk
