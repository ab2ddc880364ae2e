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

#include "slipwalk/hlip.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "slipwalk/errors.hpp"

namespace slipwalk {

void HlipParams::validate() const {
  if (!(z0 > 0.0) || !std::isfinite(z0)) throw InvalidParameter("H-LIP z0 must be positive");
  if (!(g > 0.0) || !std::isfinite(g)) throw InvalidParameter("H-LIP g must be positive");
  if (!(T_ssp > 0.0) || !std::isfinite(T_ssp))
    throw InvalidParameter("H-LIP T_ssp must be positive");
  if (!(T_dsp >= 0.0) || !std::isfinite(T_dsp))
    throw InvalidParameter("H-LIP T_dsp must be non-negative");
}

double HlipParams::lambda() const { return std::sqrt(g / z0); }

template <int N>
void LqrWeights<N>::validate() const {
  if (!Q.allFinite() || !N_cross.allFinite() || !std::isfinite(R))
    throw InvalidParameter("LQR weights must be finite");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw InvalidParameter("LQR Q must be symmetric");
  if (!(R > 0.0)) throw InvalidParameter("LQR R must be positive");
  Eigen::Matrix<double, N + 1, N + 1> composite;
  composite.template topLeftCorner<N, N>() = Q;
  composite.template topRightCorner<N, 1>() = N_cross;
  composite.template bottomLeftCorner<1, N>() = N_cross.transpose();
  composite(N, N) = R;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N + 1, N + 1>> eig(composite);
  const double tol = 1e-10 * (1.0 + composite.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -tol)
    throw InvalidParameter("LQR weights [Q N; N' R] must be positive semidefinite");
}

LinearS2S s2s_matrices(const HlipParams& params) {
  params.validate();
  const double lam = params.lambda();
  const double c = std::cosh(params.T_ssp * lam);
  const double s = std::sinh(params.T_ssp * lam);
  const double td = params.T_dsp;

  LinearS2S out;
  out.A << c, td * c + s / lam,
           lam * s, c + td * lam * s;
  out.B << -c, -lam * s;
  if (!out.A.allFinite() || !out.B.allFinite())
    throw InvalidParameter("S2S matrices overflow; T_ssp * lambda too large");
  return out;
}

ExtendedS2S extend_s2s(const LinearS2S& s2s) {
  const auto& A = s2s.A;
  const auto& B = s2s.B;
  ExtendedS2S out;
  out.A << 1.0, A(0, 0) - 1.0, A(0, 1),
           0.0, A(0, 0), A(0, 1),
           0.0, A(1, 0), A(1, 1);
  out.B << B(0) + 1.0, B(0), B(1);
  return out;
}

P1Orbit p1_orbit(const HlipParams& params, double v_d) {
  params.validate();
  const double lam = params.lambda();
  P1Orbit orbit;
  orbit.v_d = v_d;
  orbit.sigma1 = lam / std::tanh(0.5 * params.T_ssp * lam);
  orbit.p_star = v_d * params.period() / (2.0 + params.T_dsp * orbit.sigma1);
  orbit.v_star = orbit.sigma1 * orbit.p_star;
  orbit.u_star = v_d * params.period();
  return orbit;
}

P2Orbit p2_orbit(const HlipParams& params, double v_d, double u_star_L) {
  params.validate();
  const double lam = params.lambda();
  const double half = 0.5 * lam * params.T_ssp;
  const double sech = 1.0 / std::cosh(half);

  P2Orbit orbit;
  orbit.v_d = v_d;
  orbit.sigma2 = lam * std::tanh(half);
  orbit.d2 = lam * lam * sech * sech * v_d * params.period() /
             (lam * lam * params.T_dsp + 2.0 * orbit.sigma2);
  orbit.u_star_L = u_star_L;
  orbit.u_star_R = 2.0 * v_d * params.period() - u_star_L;

  const double denom = 2.0 + params.T_dsp * orbit.sigma2;
  orbit.p_star_L = (orbit.u_star_L - params.T_dsp * orbit.d2) / denom;
  orbit.p_star_R = (orbit.u_star_R - params.T_dsp * orbit.d2) / denom;
  orbit.v_star_L = orbit.sigma2 * orbit.p_star_L + orbit.d2;
  orbit.v_star_R = orbit.sigma2 * orbit.p_star_R + orbit.d2;
  return orbit;
}

template <int N>
SteppingGain<N> deadbeat_gain(const StepToStep<N>& s2s) {
  Eigen::Matrix<double, N, N> ctrb;
  Eigen::Matrix<double, N, 1> col = s2s.B;
  for (int i = 0; i < N; ++i) {
    ctrb.col(i) = col;
    col = s2s.A * col;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, N, N>> lu(ctrb);
  lu.setThreshold(1e-10);
  if (lu.rank() < N)
    throw UncontrollableError("deadbeat gain: (A, B) is not controllable");

  // Ackermann: K_ack = e_N' C^-1 phi(A) with phi(z) = z^N, and u = -K_ack x.
  Eigen::Matrix<double, N, N> phi = Eigen::Matrix<double, N, N>::Identity();
  for (int i = 0; i < N; ++i) phi = phi * s2s.A;
  Eigen::Matrix<double, 1, N> last = Eigen::Matrix<double, 1, N>::Zero();
  last(N - 1) = 1.0;
  const Eigen::Matrix<double, 1, N> k_ack = last * lu.inverse() * phi;

  SteppingGain<N> out;
  out.K = -k_ack;
  out.kind = GainKind::Deadbeat;
  return out;
}

template <int N>
Eigen::Matrix<double, N, N> riccati_map(const StepToStep<N>& s2s,
                                        const LqrWeights<N>& w,
                                        const Eigen::Matrix<double, N, N>& P) {
  const auto& A = s2s.A;
  const auto& B = s2s.B;
  const double r = w.R + B.dot(P * B);
  const StateVec<N> cross = A.transpose() * P * B + w.N_cross;
  Eigen::Matrix<double, N, N> next = w.Q + A.transpose() * P * A - cross * cross.transpose() / r;
  return 0.5 * (next + next.transpose());
}

template <int N>
Eigen::Matrix<double, N, N> solve_dare(const StepToStep<N>& s2s, const LqrWeights<N>& w,
                                       const LqrOptions& options) {
  w.validate();
  Eigen::Matrix<double, N, N> P = w.Q;
  double change = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::Matrix<double, N, N> next = riccati_map(s2s, w, P);
    if (!next.allFinite())
      throw ConvergenceError("Riccati iteration diverged", std::numeric_limits<double>::infinity());
    change = (next - P).cwiseAbs().maxCoeff();
    P = next;
    if (change <= options.tolerance * (1.0 + P.cwiseAbs().maxCoeff())) return P;
  }
  throw ConvergenceError("Riccati iteration hit the iteration cap (last change " +
                             std::to_string(change) + ")",
                         change);
}

template <int N>
SteppingGain<N> lqr_gain(const StepToStep<N>& s2s, const LqrWeights<N>& w,
                         const LqrOptions& options) {
  const Eigen::Matrix<double, N, N> P = solve_dare(s2s, w, options);
  const double r = w.R + s2s.B.dot(P * s2s.B);
  SteppingGain<N> out;
  out.K = -(s2s.B.transpose() * P * s2s.A + w.N_cross.transpose()) / r;
  out.kind = GainKind::Lqr;

  const double rho = closed_loop_radius(s2s, out.K);
  if (!(rho < 1.0)) {
    const double residual = (P - riccati_map(s2s, w, P)).norm();
    throw ConvergenceError("Riccati solution is not stabilizing (spectral radius " +
                               std::to_string(rho) + ")",
                           residual);
  }
  return out;
}

double spectral_radius(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(M, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::Vector2d ssp_flow(const Eigen::Vector2d& x0, double t, double lambda) {
  const double c = std::cosh(lambda * t);
  const double s = std::sinh(lambda * t);
  return {c * x0(0) + s / lambda * x0(1), lambda * s * x0(0) + c * x0(1)};
}

std::vector<FlowSample> hlip_flow(const Eigen::Vector2d& x0, double duration,
                                  const HlipParams& params, HlipDomain domain, int n_samples) {
  params.validate();
  if (!(duration >= 0.0)) throw InvalidParameter("flow duration must be non-negative");
  if (n_samples < 2) n_samples = 2;
  const double lam = params.lambda();
  std::vector<FlowSample> out;
  out.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double t = duration * i / (n_samples - 1);
    if (domain == HlipDomain::SSP) {
      const Eigen::Vector2d x = ssp_flow(x0, t, lam);
      out.push_back({t, x(0), x(1)});
    } else {
      out.push_back({t, x0(0) + x0(1) * t, x0(1)});
    }
  }
  return out;
}

template struct LqrWeights<2>;
template struct LqrWeights<3>;
template SteppingGain<2> deadbeat_gain<2>(const StepToStep<2>&);
template SteppingGain<3> deadbeat_gain<3>(const StepToStep<3>&);
template SteppingGain<2> lqr_gain<2>(const StepToStep<2>&, const LqrWeights<2>&, const LqrOptions&);
template SteppingGain<3> lqr_gain<3>(const StepToStep<3>&, const LqrWeights<3>&, const LqrOptions&);
template Eigen::Matrix<double, 2, 2> solve_dare<2>(const StepToStep<2>&, const LqrWeights<2>&,
                                                   const LqrOptions&);
template Eigen::Matrix<double, 3, 3> solve_dare<3>(const StepToStep<3>&, const LqrWeights<3>&,
                                                   const LqrOptions&);
template Eigen::Matrix<double, 2, 2> riccati_map<2>(const StepToStep<2>&, const LqrWeights<2>&,
                                                    const Eigen::Matrix<double, 2, 2>&);
template Eigen::Matrix<double, 3, 3> riccati_map<3>(const StepToStep<3>&, const LqrWeights<3>&,
                                                    const Eigen::Matrix<double, 3, 3>&);

}  // namespace slipwalk
