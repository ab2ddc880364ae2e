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

#include "slipwalk/gait.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace slipwalk {

namespace {

constexpr double kPi = std::numbers::pi;

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

// Vertical-leg force-sharing template over one full leg period [0, 2T).
struct Template {
  GaitSpec spec;
  ASlipParams params;

  double z(double t) const {
    return spec.z0_target - 0.5 * spec.osc_amp * std::cos(2.0 * kPi * t / spec.T_step);
  }
  double load(double t) const {
    const double w = 2.0 * kPi / spec.T_step;
    return params.m * (params.g + 0.5 * spec.osc_amp * w * w * std::cos(w * t));
  }
  double share(double t) const { return smoothstep(t / (spec.dsp_fraction * spec.T_step)); }

  double contact(double tau) const {
    const double T = spec.T_step;
    const double Td = spec.dsp_fraction * T;
    if (tau < T) return z(tau) + share(tau) * load(tau) / params.K_s;
    const double t = tau - T;
    const double unload = 0.01 * (t / Td) * (t / Td);
    return z(t) + (1.0 - share(t)) * load(t) / params.K_s - unload;
  }

  double operator()(double tau) const {
    const double T = spec.T_step;
    const double t1 = T + spec.dsp_fraction * T;
    if (tau < t1) return contact(tau);
    // Cubic Hermite through the swing back to the touchdown length.
    const double h = 1e-6;
    const double y0 = contact(t1);
    const double d0 = (contact(t1) - contact(t1 - h)) / h;
    const double y1 = contact(0.0);
    const double d1 = (contact(h) - contact(0.0)) / h;
    const double len = 2.0 * T - t1;
    const double s = (tau - t1) / len;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * len * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * len * d1;
  }
};

struct Evaluation {
  GaitTrajectory gait;
  GaitMetrics metrics;
  Eigen::VectorXd residual;
  double cost = std::numeric_limits<double>::infinity();
  bool ok = false;
};

constexpr double kHeightScale = 2e-3;
constexpr double kOscScale = 1e-3;
constexpr double kPeriodScale = 1e-4;

}  // namespace

void GaitSpec::validate() const {
  if (!(z0_target > 0.0)) throw InvalidParameter("gait z0_target must be positive");
  if (!(osc_amp >= 0.0)) throw InvalidParameter("gait osc_amp must be non-negative");
  if (!(osc_amp < 0.25 * z0_target))
    throw InvalidParameter("gait osc_amp must be small relative to z0_target");
  if (!(T_step > 0.0)) throw InvalidParameter("gait T_step must be positive");
  if (n_coef < 3) throw InvalidParameter("gait n_coef must be at least 3");
  if (!(dsp_fraction > 0.0 && dsp_fraction < 0.5))
    throw InvalidParameter("gait dsp_fraction must lie in (0, 0.5)");
}

std::vector<double> template_coefficients(const GaitSpec& spec, const ASlipParams& params) {
  spec.validate();
  const Template tmpl{spec, params};
  const int n = spec.n_coef;
  const int samples = 4000;
  const double w = kPi / spec.T_step;
  Eigen::MatrixXd basis(samples, n);
  Eigen::VectorXd target(samples);
  for (int i = 0; i < samples; ++i) {
    const double tau = 2.0 * spec.T_step * i / samples;
    basis(i, 0) = 1.0;
    for (int j = 1; 2 * j - 1 < n; ++j) {
      basis(i, 2 * j - 1) = std::cos(j * w * tau);
      if (2 * j < n) basis(i, 2 * j) = std::sin(j * w * tau);
    }
    target(i) = tmpl(tau);
  }
  const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(target);
  return {c.data(), c.data() + c.size()};
}

GaitMetrics settle_gait(GaitTrajectory& gait, const ASlipParams& params, int settle_steps,
                        const SimOptions& sim) {
  ASlipState st = initial_state(gait, params, Side::Right, 0);
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  for (int i = 0; i < settle_steps; ++i) st = simulate_step(st, zero, gait, params, sim).next;

  auto store = [&gait](const ASlipState& s) {
    const LegState& stance = s.leg(s.leading);
    const LegState& swing = s.leg(other(s.leading));
    gait.z_pre = s.P.z();
    gait.zdot_pre = s.Pdot.z();
    gait.L_stance_pre = stance.L;
    gait.Ldot_stance_pre = stance.Ldot;
    gait.L_swing_pre = swing.L;
    gait.Ldot_swing_pre = swing.Ldot;
  };
  store(st);
  st = initial_state(gait, params, Side::Right, 0);
  const StepResult r = simulate_step(st, zero, gait, params, sim);

  GaitMetrics m;
  const auto& smp = r.trace.samples;
  double area = 0.0, span = 0.0;
  double zmin = smp.front().P.z(), zmax = zmin;
  m.min_vertical_force = std::numeric_limits<double>::infinity();
  m.L_min = std::numeric_limits<double>::infinity();
  m.L_max = -m.L_min;
  for (std::size_t i = 0; i < smp.size(); ++i) {
    const TraceSample& s = smp[i];
    zmin = std::min(zmin, s.P.z());
    zmax = std::max(zmax, s.P.z());
    if (i > 0) {
      const double dt = s.t - smp[i - 1].t;
      area += 0.5 * dt * (s.P.z() + smp[i - 1].P.z());
      span += dt;
    }
    for (int leg = 0; leg < 2; ++leg) {
      m.L_min = std::min(m.L_min, s.L[leg]);
      m.L_max = std::max(m.L_max, s.L[leg]);
      if (s.contact[leg]) m.min_vertical_force = std::min(m.min_vertical_force, s.F[leg]);
    }
  }
  m.mean_height = area / span;
  m.oscillation = zmax - zmin;
  m.T_dsp = r.trace.T_dsp;
  m.T_ssp = r.trace.T_ssp;

  const ASlipState& n = r.next;
  const LegState& stance = n.leg(n.leading);
  const Eigen::Vector4d a(gait.z_pre, gait.zdot_pre, gait.L_stance_pre, gait.Ldot_stance_pre);
  const Eigen::Vector4d b(n.P.z(), n.Pdot.z(), stance.L, stance.Ldot);
  m.periodicity = (b - a).norm();
  return m;
}

HlipParams measure_hlip_params(const GaitTrajectory& gait, const ASlipParams& params,
                               const SimOptions& sim) {
  ASlipState st = initial_state(gait, params, Side::Right, 0);
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  double area = 0.0, span = 0.0, t_dsp = 0.0, t_ssp = 0.0;
  for (int i = 0; i < 2; ++i) {
    StepResult r = simulate_step(st, zero, gait, params, sim);
    const auto& smp = r.trace.samples;
    for (std::size_t j = 1; j < smp.size(); ++j) {
      const double dt = smp[j].t - smp[j - 1].t;
      area += 0.5 * dt * (smp[j].P.z() + smp[j - 1].P.z());
      span += dt;
    }
    t_dsp += r.trace.T_dsp;
    t_ssp += r.trace.T_ssp;
    st = r.next;
  }
  HlipParams hp;
  hp.g = params.g;
  hp.z0 = area / span;
  hp.T_dsp = 0.5 * t_dsp;
  hp.T_ssp = 0.5 * t_ssp;
  hp.validate();
  return hp;
}

GaitSearchResult synthesize_gait(const GaitSpec& spec, const ASlipParams& params,
                                 const GaitSynthesisOptions& options) {
  spec.validate();
  params.validate();

  const std::vector<double> c_init = [&] {
    std::vector<double> c = template_coefficients(spec, params);
    if (spec.seed != 0) {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> noise(0.0, 1e-3);
      for (std::size_t j = 1; j < c.size(); ++j) c[j] += noise(rng) / static_cast<double>(j);
    }
    return c;
  }();
  const int n = static_cast<int>(c_init.size());

  // Curvature weight of each coefficient: harmonic order squared.
  Eigen::VectorXd reg_weight(n);
  reg_weight(0) = 0.1;
  for (int i = 1; i < n; ++i) {
    const double j = (i + 1) / 2;
    reg_weight(i) = j * j;
  }
  const double reg = std::sqrt(options.regularization);

  GaitTrajectory seed_gait;
  seed_gait.T_step = spec.T_step;
  seed_gait.coef = c_init;
  seed_gait.T_dsp = spec.dsp_fraction * spec.T_step;
  seed_gait.T_ssp = spec.T_step - seed_gait.T_dsp;
  seed_gait.z0_avg = spec.z0_target;
  {
    const Template tmpl{spec, params};
    seed_gait.z_pre = tmpl.z(spec.T_step);
    seed_gait.zdot_pre = 0.0;
    seed_gait.L_stance_pre = seed_gait.L_des(spec.T_step);
    seed_gait.Ldot_stance_pre = seed_gait.Ldot_des(spec.T_step);
    seed_gait.L_swing_pre = seed_gait.L_des(2.0 * spec.T_step);
    seed_gait.Ldot_swing_pre = seed_gait.Ldot_des(2.0 * spec.T_step);
  }

  auto evaluate = [&](const GaitTrajectory& start, const Eigen::VectorXd& c, int settle) {
    Evaluation ev;
    ev.gait = start;
    ev.gait.coef.assign(c.data(), c.data() + n);
    try {
      ev.metrics = settle_gait(ev.gait, params, settle, options.sim);
    } catch (const RuntimeFailure&) {
      return ev;
    }
    ev.residual.resize(3 + n);
    ev.residual(0) = (ev.metrics.mean_height - spec.z0_target) / kHeightScale;
    ev.residual(1) = (ev.metrics.oscillation - spec.osc_amp) / kOscScale;
    ev.residual(2) = ev.metrics.periodicity / kPeriodScale;
    for (int i = 0; i < n; ++i)
      ev.residual(3 + i) = reg * reg_weight(i) * (c(i) - c_init[i]) / kHeightScale;
    ev.cost = ev.residual.squaredNorm();
    ev.ok = true;
    return ev;
  };

  auto converged = [&](const GaitMetrics& m) {
    return std::abs(m.mean_height - spec.z0_target) < 0.1 * options.height_tol &&
           std::abs(m.oscillation - spec.osc_amp) < 0.1 * options.oscillation_tol &&
           m.periodicity < 0.1 * options.periodicity_tol;
  };
  auto acceptable = [&](const GaitMetrics& m) {
    return std::abs(m.mean_height - spec.z0_target) < options.height_tol &&
           std::abs(m.oscillation - spec.osc_amp) < options.oscillation_tol &&
           m.periodicity < options.periodicity_tol && m.min_vertical_force >= -1e-6 &&
           m.L_min >= params.L_min && m.L_max <= params.L_max;
  };

  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(c_init.data(), n);
  Evaluation best = evaluate(seed_gait, c, 3 * options.settle_steps);
  if (!best.ok)
    throw GaitSynthesisError("initial gait guess fails to step in place", {best.gait, best.metrics, 0.0, 0});

  double mu = 1e-2;
  int it = 0;
  for (; it < options.max_iterations && !converged(best.metrics); ++it) {
    // Finite-difference Jacobian, each column re-settled from the current periodic state.
    Eigen::MatrixXd J(best.residual.size(), n);
    bool jac_ok = true;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd cp = c;
      const double h = 1e-5;
      cp(i) += h;
      const Evaluation ev = evaluate(best.gait, cp, options.settle_steps);
      if (!ev.ok) {
        jac_ok = false;
        break;
      }
      J.col(i) = (ev.residual - best.residual) / h;
    }
    if (!jac_ok) break;

    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * best.residual;
    bool improved = false;
    for (int tries = 0; tries < 8 && !improved; ++tries) {
      Eigen::MatrixXd lhs = JtJ;
      lhs.diagonal() += mu * (JtJ.diagonal().array() + 1.0).matrix();
      const Eigen::VectorXd step = lhs.ldlt().solve(-g);
      const Evaluation trial = evaluate(best.gait, c + step, options.settle_steps);
      if (trial.ok && trial.cost < best.cost) {
        c += step;
        best = trial;
        mu = std::max(mu / 3.0, 1e-9);
        improved = true;
      } else {
        mu *= 4.0;
      }
    }
    if (!improved) break;
  }

  // Final polish of the periodic state and measured H-LIP durations.
  best.metrics = settle_gait(best.gait, params, options.settle_steps, options.sim);
  const HlipParams hp = measure_hlip_params(best.gait, params, options.sim);
  best.gait.z0_avg = hp.z0;
  best.gait.T_dsp = hp.T_dsp;
  best.gait.T_ssp = hp.T_ssp;

  GaitSearchResult out{best.gait, best.metrics, std::sqrt(best.cost), it};
  if (!acceptable(best.metrics))
    throw GaitSynthesisError("gait search stalled above the acceptance threshold", out);
  return out;
}

}  // namespace slipwalk
