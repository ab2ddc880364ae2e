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

#include "slipwalk/app.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "slipwalk/errors.hpp"
#include "slipwalk/svg.hpp"

namespace slipwalk::app {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  return dynamic_cast<const ValidationError*>(&e) ? kExitValidation : kExitRuntime;
}

io::GaitFile load_gait(const fs::path& path) { return io::gait_from_json(io::read_json_file(path)); }

RunOutcome simulate_to_dir(const io::ScenarioFile& scenario, const fs::path& dir,
                           const SimulateOptions& options) {
  RunOutcome out;
  out.name = scenario.config.name;
  out.dir = dir;
  try {
    std::optional<io::GaitFile> gait;
    if (!scenario.gait_file.empty()) gait = load_gait(scenario.resolve(scenario.gait_file));
    const ScenarioResult r = run_scenario(scenario.config, gait ? &gait->gait : nullptr);

    io::GaitFile used;
    if (gait) {
      used = *gait;
    } else {
      used.gait = r.gait;
      used.hlip = r.hlip;
      used.spec = scenario.config.gait_spec;
      used.aslip = scenario.config.aslip;
    }
    std::vector<std::string> files = {"gait.json", "trace.csv", "steps.csv"};
    io::write_text_file(dir / "gait.json", io::dump_json(io::gait_to_json(used)));
    io::write_text_file(dir / "trace.csv", io::trace_csv(r.traces));
    io::write_text_file(dir / "steps.csv", io::steps_csv(r.records, r.planes));
    if (options.trace_json) {
      io::write_text_file(dir / "trace.json",
                          io::dump_json(io::trace_json(r.traces, r.config.name,
                                                       to_string(r.config.kind), r.config.seed)));
      files.push_back("trace.json");
    }
    if (options.plots && !r.traces.empty()) {
      io::write_text_file(dir / "phase.svg", svg::phase_portraits(r.traces, r.config.name));
      io::write_text_file(dir / "timeseries.svg", svg::time_series(r.traces, r.config.name));
      files.push_back("phase.svg");
      files.push_back("timeseries.svg");
    }
    files.push_back("summary.json");
    io::write_text_file(dir / "summary.json", io::dump_json(io::summary_json(r, scenario, files)));
    out.summary = r.summary;
    if (r.summary.failed) {
      out.exit_code = kExitRuntime;
      out.message = r.summary.failure;
    }
  } catch (const std::exception& e) {
    out.exit_code = exit_code_for(e);
    out.message = e.what();
  }
  return out;
}

std::vector<RunOutcome> simulate_batch(const std::vector<io::ScenarioFile>& scenarios,
                                       const std::vector<fs::path>& dirs, int jobs,
                                       const SimulateOptions& options) {
  if (scenarios.size() != dirs.size())
    throw InvalidParameter("batch needs one output directory per scenario");
  std::set<std::string> seen;
  for (const auto& d : dirs)
    if (!seen.insert(fs::weakly_canonical(d).string()).second)
      throw InvalidParameter("two scenarios write to the same directory: " + d.string());

  std::vector<RunOutcome> out(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < scenarios.size(); i = next++)
      out[i] = simulate_to_dir(scenarios[i], dirs[i], options);
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, scenarios.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

namespace {

fs::path trace_path(const fs::path& p) {
  std::error_code ec;
  return fs::is_directory(p, ec) ? p / "trace.csv" : p;
}

}  // namespace

io::Json analyze_dir(const fs::path& dir, const fs::path& out_dir, const AnalyzeOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw InvalidParameter("not a directory: " + dir.string());
  const fs::path summary_path = dir / "summary.json";
  if (!fs::exists(summary_path, ec))
    throw SchemaError(dir.string() + ": missing summary.json (not a simulate output directory)");
  const io::Json summary = io::read_json_file(summary_path);
  PlaneModel planes[2];
  io::planes_from_summary(summary, planes);
  const fs::path steps_path = dir / "steps.csv";
  if (!fs::exists(steps_path, ec)) throw SchemaError(dir.string() + ": missing steps.csv");
  const std::vector<StepRecord> records = io::read_steps(io::read_csv(steps_path), planes);

  PlaneAnalysis analyses[2];
  for (int i = 0; i < 2; ++i) analyses[i] = analyze_plane(records, i, planes[i], options.sets);

  io::ForceBandReport force;
  if (options.force_ref) {
    const io::ForceSeries mine = io::read_force_series(io::read_csv(trace_path(dir)));
    const io::ForceSeries ref = io::read_force_series(io::read_csv(trace_path(*options.force_ref)));
    force = io::force_band(mine, ref, options.force_c);
  }

  const io::Json a = io::analysis_json(summary.value("name", std::string()),
                                       summary.value("scenario", std::string()), options.sets,
                                       records, analyses, planes, force);
  io::write_text_file(out_dir / "analysis.json", io::dump_json(a));
  if (options.plots) {
    io::write_text_file(out_dir / "hull_x.svg", svg::hull_plot(analyses[0], "x plane"));
    io::write_text_file(out_dir / "hull_y.svg", svg::hull_plot(analyses[1], "y plane"));
  }
  return a;
}

}  // namespace slipwalk::app
