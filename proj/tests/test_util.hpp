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
#include <filesystem>
#include <random>
#include <string>

#include "slipwalk/gait.hpp"
#include "slipwalk/hlip.hpp"

namespace slipwalk::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline HlipParams random_hlip(std::mt19937_64& rng) {
  HlipParams p;
  p.z0 = uniform(rng, 0.5, 1.2);
  p.T_ssp = uniform(rng, 0.2, 0.5);
  p.T_dsp = uniform(rng, 0.0, 0.15);
  return p;
}

/// Classic RK4 on pddot = lambda^2 p; independent of the closed-form flow.
inline Eigen::Vector2d rk4_lip(Eigen::Vector2d x, double T, double lambda, int n = 4000) {
  const double h = T / n;
  const double l2 = lambda * lambda;
  auto f = [&](const Eigen::Vector2d& s) { return Eigen::Vector2d(s(1), l2 * s(0)); };
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d k1 = f(x);
    const Eigen::Vector2d k2 = f(x + 0.5 * h * k1);
    const Eigen::Vector2d k3 = f(x + 0.5 * h * k2);
    const Eigen::Vector2d k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

/// One synthesized default gait per test process (synthesis takes about a second).
inline const GaitSearchResult& default_gait() {
  static const GaitSearchResult g = synthesize_gait(GaitSpec{}, ASlipParams{});
  return g;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("slipwalk_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace slipwalk::testing
