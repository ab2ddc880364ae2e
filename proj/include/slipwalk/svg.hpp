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

#include <string>
#include <vector>

#include "slipwalk/aslip.hpp"
#include "slipwalk/scenario.hpp"

namespace slipwalk::svg {

struct Series {
  enum class Kind { Line, Points, Polygon };
  Kind kind = Kind::Line;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
};

struct Panel {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
};

/// Panels laid out in a row. Output is a standalone SVG document; identical
/// input gives identical bytes.
std::string render(const std::vector<Panel>& panels, const std::string& title,
                   int panel_width = 420, int panel_height = 320);

/// Global (x, xdot) and (y, ydot) of the mass over the whole walk.
std::string phase_portraits(const std::vector<StepTrace>& traces, const std::string& title);

/// Mass height and per-leg vertical forces against time.
std::string time_series(const std::vector<StepTrace>& traces, const std::string& title);

/// Projections of E, W and the logged errors onto each coordinate pair of a plane.
std::string hull_plot(const PlaneAnalysis& a, const std::string& title);

}  // namespace slipwalk::svg
