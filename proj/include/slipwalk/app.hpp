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

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slipwalk/io.hpp"
#include "slipwalk/scenario.hpp"

namespace slipwalk::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

/// 2 for ValidationError, 3 for anything else.
int exit_code_for(const std::exception& e);

io::GaitFile load_gait(const std::filesystem::path& path);

struct SimulateOptions {
  bool plots = true;
  bool trace_json = false;
};

struct RunOutcome {
  std::string name;
  std::filesystem::path dir;
  int exit_code = kExitOk;
  std::string message;
  ScenarioSummary summary;
};

/**
 * Runs one scenario and writes trace.csv, steps.csv, gait.json,
 * summary.json and (optionally) SVG plots into `dir`. A walk failure still
 * writes the partial outputs and returns exit code 3. Never throws.
 */
RunOutcome simulate_to_dir(const io::ScenarioFile& scenario, const std::filesystem::path& dir,
                           const SimulateOptions& options = {});

/// Runs scenarios on `jobs` worker threads; outcomes keep the input order.
/// Throws InvalidParameter when two scenarios share an output directory.
std::vector<RunOutcome> simulate_batch(const std::vector<io::ScenarioFile>& scenarios,
                                       const std::vector<std::filesystem::path>& dirs, int jobs,
                                       const SimulateOptions& options = {});

struct AnalyzeOptions {
  AnalysisOptions sets;
  /// Reference trace (a trace.csv or a directory holding one) for the force band.
  std::optional<std::filesystem::path> force_ref;
  double force_c = 0.2;
  bool plots = true;
};

/// Reads a simulate output directory and writes analysis.json (plus hull
/// plots) into `out_dir`. Throws SchemaError for missing files or columns.
io::Json analyze_dir(const std::filesystem::path& dir, const std::filesystem::path& out_dir,
                     const AnalyzeOptions& options = {});

}  // namespace slipwalk::app
