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
#include <vector>

namespace slipwalk {

/**
 * Constant-height hybrid linear inverted pendulum (H-LIP).
 *
 * The walking alternates a single support phase (p'' = lambda^2 p) of fixed
 * duration T_ssp and a double support phase (p'' = 0) of fixed duration T_dsp.
 * p is the mass position relative to the stance foot. At the end of the DSP
 * the new stance foot takes over and p jumps by -u, u being the step size.
 */
struct HlipParams {
  double z0 = 1.0;
  double g = 9.81;
  double T_ssp = 0.4;
  double T_dsp = 0.1;

  /// Throws InvalidParameter if any field is out of range.
  void validate() const;

  double lambda() const;
  double period() const { return T_ssp + T_dsp; }
};

/// Discrete step-to-step dynamics x_{k+1} = A x_k + B u_k.
///
/// N = 2: state [p, v] at the end of the SSP (local to the stance foot).
/// N = 3: extended state [x, p, v] where x is the global mass position.
template <int N>
struct StepToStep {
  Eigen::Matrix<double, N, N> A;
  Eigen::Matrix<double, N, 1> B;
};

using LinearS2S = StepToStep<2>;
using ExtendedS2S = StepToStep<3>;

template <int N>
using StateVec = Eigen::Matrix<double, N, 1>;
template <int N>
using GainVec = Eigen::Matrix<double, 1, N>;

struct P1Orbit {
  double v_d = 0.0;
  double p_star = 0.0;
  double v_star = 0.0;
  double u_star = 0.0;
  double sigma1 = 0.0;

  Eigen::Vector2d state() const { return {p_star, v_star}; }
};

/// Period-two orbit. u_star_L is the step size that lands the left foot (taken
/// from right stance) and x_L = state_left() is the pre-impact state it is
/// applied at; A x_L + B u_L = x_R and A x_R + B u_R = x_L.
struct P2Orbit {
  double v_d = 0.0;
  double u_star_L = 0.0;
  double u_star_R = 0.0;
  double p_star_L = 0.0;
  double v_star_L = 0.0;
  double p_star_R = 0.0;
  double v_star_R = 0.0;
  double sigma2 = 0.0;
  double d2 = 0.0;

  Eigen::Vector2d state_left() const { return {p_star_L, v_star_L}; }
  Eigen::Vector2d state_right() const { return {p_star_R, v_star_R}; }
};

enum class GainKind { Deadbeat, Lqr, User };

/// Step-size feedback u = u_ref + K (x - x_ref).
template <int N>
struct SteppingGain {
  GainVec<N> K = GainVec<N>::Zero();
  GainKind kind = GainKind::User;
};

/// Weights of J = sum x'Qx + R u^2 + 2 x'N u.
template <int N>
struct LqrWeights {
  Eigen::Matrix<double, N, N> Q = Eigen::Matrix<double, N, N>::Identity();
  double R = 1.0;
  StateVec<N> N_cross = StateVec<N>::Zero();

  void validate() const;
};

/// Closed-form S2S matrices. Throws InvalidParameter on non-finite entries.
LinearS2S s2s_matrices(const HlipParams& params);

/// Augments the local S2S with the global mass position.
ExtendedS2S extend_s2s(const LinearS2S& s2s);

P1Orbit p1_orbit(const HlipParams& params, double v_d);
P2Orbit p2_orbit(const HlipParams& params, double v_d, double u_star_L);

/// Places every closed-loop eigenvalue of A + B K at the origin
/// (Ackermann's formula with characteristic polynomial z^N).
/// Throws UncontrollableError if the pair is not controllable.
template <int N>
SteppingGain<N> deadbeat_gain(const StepToStep<N>& s2s);

struct LqrOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

/// Infinite-horizon discrete LQR by fixed-point iteration of the Riccati
/// difference equation starting from P = Q. Throws ConvergenceError when the
/// iteration cap is hit or when the converged gain is not stabilizing.
template <int N>
SteppingGain<N> lqr_gain(const StepToStep<N>& s2s, const LqrWeights<N>& weights,
                         const LqrOptions& options = {});

/// Cost-to-go matrix used by lqr_gain; exposed for residual checks.
template <int N>
Eigen::Matrix<double, N, N> solve_dare(const StepToStep<N>& s2s,
                                       const LqrWeights<N>& weights,
                                       const LqrOptions& options = {});

/// One application of the Riccati map, P -> Q + A'PA - (A'PB + N)(R + B'PB)^-1 (B'PA + N').
template <int N>
Eigen::Matrix<double, N, N> riccati_map(const StepToStep<N>& s2s,
                                        const LqrWeights<N>& weights,
                                        const Eigen::Matrix<double, N, N>& P);

template <int N>
StateVec<N> hlip_step(const StateVec<N>& x, double u, const StepToStep<N>& s2s) {
  return s2s.A * x + s2s.B * u;
}

double spectral_radius(const Eigen::MatrixXd& M);

template <int N>
double closed_loop_radius(const StepToStep<N>& s2s, const GainVec<N>& K) {
  return spectral_radius(s2s.A + s2s.B * K);
}

enum class HlipDomain { SSP, DSP };

struct FlowSample {
  double t;
  double p;
  double v;
};

/// Closed-form flow of one H-LIP domain, sampled at n_samples equally spaced
/// times in [0, duration] (both ends included).
std::vector<FlowSample> hlip_flow(const Eigen::Vector2d& x0, double duration,
                                  const HlipParams& params, HlipDomain domain,
                                  int n_samples = 2);

/// State of the passive LIP after t seconds.
Eigen::Vector2d ssp_flow(const Eigen::Vector2d& x0, double t, double lambda);

}  // namespace slipwalk
