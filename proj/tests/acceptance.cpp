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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "slipwalk/errors.hpp"
#include "slipwalk/io.hpp"
#include "slipwalk/scenario.hpp"

using namespace slipwalk;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

HlipParams random_hlip(std::mt19937_64& rng) {
  HlipParams p;
  p.z0 = uniform(rng, 0.5, 1.2);
  p.T_ssp = uniform(rng, 0.2, 0.5);
  p.T_dsp = uniform(rng, 0.0, 0.15);
  return p;
}

const GaitSearchResult& gait() {
  static const GaitSearchResult g = synthesize_gait(GaitSpec{}, ASlipParams{});
  return g;
}

// 1. Orbit closure and characteristic lines.
Verdict orbits() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double closure = 0.0, line = 0.0;
  for (int i = 0; i < 100; ++i) {
    const HlipParams hp = random_hlip(rng);
    const LinearS2S s = s2s_matrices(hp);
    const double lam = hp.lambda(), T = hp.period();
    const double vd = uniform(rng, -1.0, 1.0), vd2 = uniform(rng, -0.5, 0.5);
    const double uL = uniform(rng, -0.4, 0.4);

    const P1Orbit o1 = p1_orbit(hp, vd);
    closure = std::max(closure, (s.A * o1.state() + s.B * o1.u_star - o1.state()).norm());
    const double sigma1 = lam / std::tanh(0.5 * lam * hp.T_ssp);
    line = std::max(line, std::abs(o1.v_star - sigma1 * o1.p_star));

    const P2Orbit o2 = p2_orbit(hp, vd2, uL);
    closure = std::max(closure, (s.A * o2.state_left() + s.B * o2.u_star_L - o2.state_right()).norm());
    closure = std::max(closure, (s.A * o2.state_right() + s.B * o2.u_star_R - o2.state_left()).norm());
    const double sigma2 = lam * std::tanh(0.5 * lam * hp.T_ssp);
    const double sech = 1.0 / std::cosh(0.5 * lam * hp.T_ssp);
    const double d2 = lam * lam * sech * sech * vd2 * T / (lam * lam * hp.T_dsp + 2.0 * sigma2);
    line = std::max(line, std::abs(o2.v_star_L - (sigma2 * o2.p_star_L + d2)));
    line = std::max(line, std::abs(o2.v_star_R - (sigma2 * o2.p_star_R + d2)));
  }
  const double dt = seconds_since(t0);
  return {closure < 1e-10 && line < 1e-10 && dt < 1.0,
          fmt("100 sets: max closure %.2e, max line residual %.2e, %.3f s", closure, line, dt)};
}

// 2. Deadbeat: (A+BK)^2 = 0 and the error vanishes within two steps.
Verdict deadbeat() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(102);
  double nil = 0.0, err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const LinearS2S s = s2s_matrices(random_hlip(rng));
    const Eigen::Matrix2d Acl = s.A + s.B * deadbeat_gain(s).K;
    nil = std::max(nil, (Acl * Acl).norm());
    Eigen::Vector2d e(uniform(rng, -0.1, 0.1), uniform(rng, -0.3, 0.3));
    for (int k = 0; k < 2; ++k) e = Acl * e;
    err = std::max(err, e.norm());
  }
  const double dt = seconds_since(t0);
  return {nil < 1e-10 && err < 1e-10 && dt < 1.0,
          fmt("100 sets: max ||(A+BK)^2||_F %.2e, max |e_2| %.2e, %.3f s", nil, err, dt)};
}

// 3. LQR: DARE residual and stability; tuned gains stabilize the measured model.
Verdict lqr() {
  std::mt19937_64 rng(103);
  double residual = 0.0, rho = 0.0;
  for (int i = 0; i < 100; ++i) {
    const LinearS2S s = s2s_matrices(random_hlip(rng));
    LqrWeights<2> w;
    Eigen::Matrix2d M;
    M << uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1);
    w.Q = M * M.transpose() + 1e-3 * Eigen::Matrix2d::Identity();
    w.R = uniform(rng, 0.05, 5.0);
    const Eigen::Matrix2d P = solve_dare(s, w);
    residual = std::max(residual, (P - riccati_map(s, w, P)).norm());
    rho = std::max(rho, closed_loop_radius(s, lqr_gain(s, w).K));
  }
  const HlipParams hp = measure_hlip_params(gait().gait, ASlipParams{});
  const ExtendedS2S ext = extend_s2s(s2s_matrices(hp));
  const double rx = closed_loop_radius(ext, GainVec<3>(0.21, 0.96, 0.52));
  const double ry = closed_loop_radius(ext, GainVec<3>(0.31, 0.67, 0.43));
  return {residual < 1e-8 && rho < 1.0 && rx < 1.0 && ry < 1.0,
          fmt("max DARE residual %.2e, max rho %.4f; tuned gains rho %.4f / %.4f", residual,
              rho, rx, ry)};
}

// 4. Plan QP against an exhaustive grid (step 1e-3). The last input of each
// grid prefix is minimized exactly over its grid points: the objective is a
// convex quadratic in it, so the best grid point neighbours the clipped minimizer.
struct GridResult {
  std::vector<double> u;
  double J = 1e300;
};

// Multiples of h inside [lo, hi] plus both endpoints, so active bounds are representable.
std::vector<double> grid_axis(double lo, double hi, double h) {
  std::vector<double> v{lo};
  for (long i = std::lround(std::ceil(lo / h)); i * h < hi; ++i)
    if (i * h > lo) v.push_back(i * h);
  v.push_back(hi);
  return v;
}

// Feasible interval of input k of plane pi.
std::pair<double, double> input_range(const PlanProblem& p, int pi, int k) {
  const double m = p.planes[pi].min_step;
  if (!(m > 0.0)) return {-p.u_max, p.u_max};
  return (p.first_step + k) % 2 == 0 ? std::make_pair(-p.u_max, -m) : std::make_pair(m, p.u_max);
}

GridResult grid_search(const PlanProblem& p) {
  const int P = static_cast<int>(p.planes.size());
  const int n = P * p.N;
  const double h = 1e-3;
  std::vector<std::vector<double>> axes;
  for (int j = 0; j < n; ++j) {
    const auto [lo, hi] = input_range(p, j / p.N, j % p.N);
    axes.push_back(grid_axis(lo, hi, h));
  }
  std::vector<std::vector<double>> u(P, std::vector<double>(p.N));
  auto assign = [&](int j, double v) { u[j / p.N][j % p.N] = v; };
  GridResult best;
  std::vector<std::size_t> idx(n - 1, 0);
  while (true) {
    for (int j = 0; j + 1 < n; ++j) assign(j, axes[j][idx[j]]);
    // J(t) = a t^2 + b t + c in the last input.
    assign(n - 1, 0.0);
    const double J0 = plan_objective(p, u);
    assign(n - 1, 1.0);
    const double J1 = plan_objective(p, u);
    assign(n - 1, -1.0);
    const double Jm = plan_objective(p, u);
    const double a = 0.5 * (J1 + Jm) - J0, b = 0.5 * (J1 - Jm);
    const auto& ax = axes[n - 1];
    const double t = std::clamp(-b / (2 * a), ax.front(), ax.back());
    const auto pos = static_cast<std::size_t>(std::lower_bound(ax.begin(), ax.end(), t) - ax.begin());
    for (std::size_t c = pos < 2 ? 0 : pos - 2; c <= std::min(pos + 1, ax.size() - 1); ++c) {
      assign(n - 1, ax[c]);
      const double J = plan_objective(p, u);
      if (J < best.J) {
        best.J = J;
        best.u.clear();
        for (int j = 0; j < n; ++j) best.u.push_back(u[j / p.N][j % p.N]);
      }
    }
    int j = n - 2;
    while (j >= 0 && ++idx[j] == axes[j].size()) idx[j--] = 0;
    if (j < 0) break;
  }
  return best;
}

Verdict qp_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(104);
  double worst = 0.0, kkt = 0.0, grid_gain = -1e300;
  int solved = 0, within = 0;
  for (int i = 0; i < 50; ++i) {
    PlanProblem p;
    const bool two = i % 5 == 4;
    p.N = two ? 1 : 1 + i % 3;
    p.u_max = uniform(rng, 0.2, 0.5);
    // Planner default weights; random horizon, box, model, states and targets.
    p.first_step = static_cast<int>(rng() % 2);
    const ExtendedS2S s2s = extend_s2s(s2s_matrices(random_hlip(rng)));
    for (int pi = 0; pi < (two ? 2 : 1); ++pi) {
      PlanePlan pl;
      pl.s2s = s2s;
      pl.x0 = Eigen::Vector3d(uniform(rng, -0.2, 0.2), uniform(rng, -0.1, 0.1),
                              uniform(rng, -0.4, 0.4));
      for (int k = 0; k < p.N; ++k)
        pl.target.push_back(Eigen::Vector3d(uniform(rng, -0.6, 0.6), uniform(rng, -0.1, 0.1),
                                            uniform(rng, -0.4, 0.4)));
      if (i % 3 == 1) pl.min_step = 0.05;
      p.planes.push_back(pl);
    }
    const PlanSolution s = solve_plan(p);
    ++solved;
    kkt = std::max(kkt, s.kkt_residual);
    const GridResult g = grid_search(p);
    double dev = 0.0;
    for (int j = 0; j < static_cast<int>(g.u.size()); ++j)
      dev = std::max(dev, std::abs(s.u_seq[j / p.N][j % p.N] - g.u[j]));
    within += dev <= 2e-3;
    // Positive when the best grid point beats the solver.
    grid_gain = std::max(grid_gain, s.objective - g.J);
    worst = std::max(worst, dev);
  }
  const double dt = seconds_since(t0);
  return {worst <= 2e-3 && kkt < 1e-8 && dt < 30.0,
          fmt("%.0f problems, %.0f within 2e-3: max |u_qp - u_grid| %.2e, max KKT %.2e", solved,
              within, worst, kkt) +
              fmt(", max (J_qp - J_grid) %.2e, %.2f s", grid_gain, dt)};
}

// 5. Synthesized gait replayed for 20 steps.
Verdict periodic_gait() {
  const ASlipParams prm;
  const GaitTrajectory& g = gait().gait;
  ASlipState st = initial_state(g, prm, Side::Right, 0);
  double zmin = 1e9, zmax = -1e9, fmin = 1e9, periodicity = 0.0;
  auto pre_impact = [](const ASlipState& s) {
    Eigen::Matrix<double, 6, 1> v;
    v << s.P.z(), s.Pdot.z(), s.horizontal();
    return v;
  };
  Eigen::Matrix<double, 6, 1> last = pre_impact(st);
  for (int i = 0; i < 20; ++i) {
    const StepResult r = simulate_step(st, Eigen::Vector2d(0.0, 0.0), g, prm);
    for (const auto& s : r.trace.samples) {
      zmin = std::min(zmin, s.P.z());
      zmax = std::max(zmax, s.P.z());
      fmin = std::min({fmin, s.F_z[0], s.F_z[1]});
    }
    st = r.next;
    const auto now = pre_impact(st);
    periodicity = std::max(periodicity, (now - last).cwiseAbs().maxCoeff());
    last = now;
  }
  const double osc = zmax - zmin;
  return {std::abs(osc - 0.05) <= 0.01 && fmin >= 0.0 && periodicity < 1e-3,
          fmt("oscillation %.4f m, min F_z %.3f N, periodicity residual %.2e", osc, fmin,
              periodicity)};
}

// 6. Forward P1-P2 walk.
Verdict forward_walk() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig c;
  c.aslip.K_s = 24000.0;
  c.aslip.D_s = 700.0;
  c.x_orbit = {ReferenceMode::P1, 0.3, 0.0};
  c.n_steps = 20;
  const ScenarioResult r = run_scenario(c);
  const double dt = seconds_since(t0);
  if (r.summary.failed) return {false, "walk failed: " + r.summary.failure};
  const auto& rec = r.records;
  double cx = 0.0, cy = 0.0;
  for (std::size_t k = 10; k + 1 < rec.size(); ++k)
    cx = std::max(cx, (rec[k + 1].x_rel.head<2>() - rec[k].x_rel.head<2>()).norm());
  // The lateral plane is period two.
  for (std::size_t k = 10; k + 2 < rec.size(); ++k)
    cy = std::max(cy, (rec[k + 2].x_rel.tail<2>() - rec[k].x_rel.tail<2>()).norm());
  const double v = r.summary.mean_velocity(0);
  return {std::abs(v - 0.3) <= 0.03 && cx < 5e-3 && cy < 5e-3 && dt < 60.0,
          fmt("mean v_x %.4f m/s, convergence x %.2e / y %.2e after step 10, %.2f s", v, cx, cy,
              dt)};
}

// 7. Fixed location target.
Verdict fixed_location() {
  ScenarioConfig c;
  c.kind = ScenarioKind::FixedLocation;
  c.n_steps = 30;
  c.x_target = Eigen::Vector3d(1.0, 0.0, 0.0);
  const ScenarioResult r = run_scenario(c, &gait().gait);
  if (r.summary.failed) return {false, "walk failed: " + r.summary.failure};
  double pos = 0.0, vel = 0.0;
  for (std::size_t k = r.records.size() - 5; k < r.records.size(); ++k) {
    const auto& x = r.records[k].x_aslip[0];
    pos = std::max(pos, std::abs(x(0) - 1.0));
    vel = std::max(vel, std::abs(x(2)));
  }
  return {pos <= 0.05 && vel < 0.02,
          fmt("last 5 steps: max |x - 1| %.2e m, max |v_x| %.2e m/s", pos, vel)};
}

// 8. Sinusoid tracking with invariant sets.
Verdict tracking_sets() {
  std::string detail;
  bool pass = true;
  auto run = [&](const char* label, GainConfig::Kind kind, std::vector<double> kx,
                 std::vector<double> ky, bool need_exact) {
    ScenarioConfig c;
    c.kind = ScenarioKind::TrajectoryTracking;
    c.n_steps = 40;
    c.x_gain.kind = c.y_gain.kind = kind;
    c.x_gain.K = std::move(kx);
    c.y_gain.K = std::move(ky);
    const ScenarioResult r = run_scenario(c, &gait().gait);
    detail += std::string(detail.empty() ? "" : "; ") + label + ":";
    if (r.summary.failed) {
      pass = false;
      detail += " walk failed (" + r.summary.failure + ")";
      return;
    }
    for (int i = 0; i < 2; ++i) {
      const PlaneAnalysis a = analyze_plane(r.records, i, r.planes[i]);
      int in = 0;
      for (bool b : a.e_in_E) in += b;
      const bool ok = a.all_in_E && (!need_exact || (a.exact && a.certificate.holds));
      pass = pass && ok;
      detail += std::string(i == 0 ? " x" : ", y") +
                fmt(" e in E %.0f/%.0f", in, static_cast<double>(a.e.size()));
      if (need_exact)
        detail += fmt(" exact %.0f, certificate %.0f/%.0f vertices", a.exact,
                      a.certificate.checked - a.certificate.failures, a.certificate.checked);
      else
        detail += fmt(" (E_%.0f)", a.set_terms);
    }
  };
  run("deadbeat", GainConfig::Kind::Deadbeat, {}, {}, true);
  run("lqr", GainConfig::Kind::Lqr, {}, {}, false);
  run("tuned", GainConfig::Kind::User, {0.21, 0.96, 0.52}, {0.31, 0.67, 0.43}, false);
  return {pass, detail};
}

// 9. Force band on the stepping-in-place trace.
Verdict force_band() {
  ScenarioConfig c;
  c.kind = ScenarioKind::SteppingInPlace;
  c.n_steps = 20;
  const ScenarioResult r = run_scenario(c, &gait().gait);
  if (r.summary.failed) return {false, "walk failed: " + r.summary.failure};
  const io::ForceSeries ref =
      io::read_force_series(io::parse_csv(io::trace_csv(r.traces), "trace.csv"));
  io::ForceSeries scaled = ref;
  for (double& f : scaled.Fz_left) f *= 1.3;
  for (double& f : scaled.Fz_right) f *= 1.3;
  const io::ForceBandReport self = io::force_band(ref, ref, 0.2);
  const io::ForceBandReport big = io::force_band(scaled, ref, 0.2);
  const bool ok = self.pass && !big.pass && big.first_violation >= 0;
  return {ok, "self " + std::string(self.pass ? "passes" : "fails") + "; 1.3x " +
                  (big.pass ? std::string("passes")
                            : "fails at sample " + std::to_string(big.first_violation) + " (" +
                                  big.leg + fmt(" leg, t %.4f s, F_z %.2f N outside [%.2f, %.2f])",
                                                big.t, big.value, big.lower, big.upper))};
}

// 10. Determinism of the written CSVs, gait synthesis included.
Verdict determinism() {
  bool same = true;
  int compared = 0;
  for (ScenarioKind kind : {ScenarioKind::Periodic3D, ScenarioKind::FixedLocation,
                            ScenarioKind::TrajectoryTracking, ScenarioKind::SteppingInPlace}) {
    ScenarioConfig c;
    c.kind = kind;
    c.n_steps = 12;
    c.seed = 7;
    const bool synth = kind == ScenarioKind::Periodic3D;
    const ScenarioResult a = run_scenario(c, synth ? nullptr : &gait().gait);
    const ScenarioResult b = run_scenario(c, synth ? nullptr : &gait().gait);
    same = same && io::trace_csv(a.traces) == io::trace_csv(b.traces) &&
           io::steps_csv(a.records, a.planes) == io::steps_csv(b.records, b.planes) &&
           !a.traces.empty();
    compared += 2;
  }
  return {same, std::to_string(compared) + " CSV pairs over 4 scenario kinds " +
                    (same ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"orbit closed forms", orbits},
      {"deadbeat property", deadbeat},
      {"lqr", lqr},
      {"qp oracle equivalence", qp_oracle},
      {"periodic gait", periodic_gait},
      {"forward P1-P2 walk", forward_walk},
      {"fixed location", fixed_location},
      {"trajectory tracking and invariance", tracking_sets},
      {"force band", force_band},
      {"determinism", determinism},
  };
  int failures = 0, i = 0;
  for (const auto& [name, check] : criteria) {
    ++i;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %2d %s  %s: %s\n", i, v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", i - failures, i);
  return failures == 0 ? 0 : 1;
}
