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

#include <cstdint>
#include <vector>

#include "slipwalk/aslip.hpp"
#include "slipwalk/hlip.hpp"

namespace slipwalk {

/// Behavior targets of the stepping-in-place gait.
struct GaitSpec {
  double z0_target = 1.0;
  /// Peak-to-peak vertical oscillation of the mass.
  double osc_amp = 0.05;
  double T_step = 0.4;
  /// Fourier coefficients of the leg-length reference (odd: c0 plus pairs).
  int n_coef = 21;
  /// Fraction of the step spent in double support by the initial template.
  double dsp_fraction = 0.2;
  /// 0 keeps the template initial guess; other values perturb it reproducibly.
  std::uint64_t seed = 0;

  void validate() const;
};

/// Quantities measured on one simulated period of a stepping-in-place gait.
struct GaitMetrics {
  double mean_height = 0.0;
  double oscillation = 0.0;
  double min_vertical_force = 0.0;
  double T_dsp = 0.0;
  double T_ssp = 0.0;
  /// |x_pre(k+1) - x_pre(k)| over [z, z', L_stance, L'_stance] after settling.
  double periodicity = 0.0;
  double L_min = 0.0;
  double L_max = 0.0;
};

struct GaitSearchResult {
  GaitTrajectory gait;
  GaitMetrics metrics;
  double residual = 0.0;
  int iterations = 0;
};

class GaitSynthesisError : public RuntimeFailure {
 public:
  GaitSynthesisError(const std::string& what, GaitSearchResult best)
      : RuntimeFailure(what), best_(std::move(best)) {}
  const GaitSearchResult& best() const { return best_; }

 private:
  GaitSearchResult best_;
};

struct GaitSynthesisOptions {
  int max_iterations = 40;
  /// Steps simulated from the previous periodic state before measuring.
  int settle_steps = 12;
  double height_tol = 0.02;
  double oscillation_tol = 0.01;
  double periodicity_tol = 1e-3;
  /// Weight of the curvature-weighted Tikhonov term on coefficient changes.
  double regularization = 1e-3;
  SimOptions sim;
};

/// Force-sharing template of the leg-length reference projected onto the
/// Fourier basis; used as the initial guess of the search.
std::vector<double> template_coefficients(const GaitSpec& spec, const ASlipParams& params);

/// Simulates stepping in place from the gait's stored periodic state for
/// `settle_steps`, then stores the settled pre-impact state back into `gait`
/// and measures one more step.
GaitMetrics settle_gait(GaitTrajectory& gait, const ASlipParams& params, int settle_steps,
                        const SimOptions& sim = {});

/// Shooting search over the Fourier coefficients with Levenberg-Marquardt on
/// [height error, oscillation error, periodicity, regularization].
/// Throws GaitSynthesisError (carrying the best iterate) on stall.
GaitSearchResult synthesize_gait(const GaitSpec& spec, const ASlipParams& params,
                                 const GaitSynthesisOptions& options = {});

/// H-LIP parameters of a gait: average height and average domain durations
/// over one full period (two steps).
HlipParams measure_hlip_params(const GaitTrajectory& gait, const ASlipParams& params,
                               const SimOptions& sim = {});

}  // namespace slipwalk
