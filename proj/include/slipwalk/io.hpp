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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipwalk/gait.hpp"
#include "slipwalk/invariant.hpp"
#include "slipwalk/planner.hpp"
#include "slipwalk/scenario.hpp"

namespace slipwalk::io {

/// Insertion-ordered, so serialized key order is fixed by the writer.
using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr int kSchemaMajor = 1;

/// Throws SchemaError unless `j` is an object with a supported schema_version
/// and, when `kind` is non-empty, a matching "kind" field.
void check_schema(const Json& j, const std::string& kind, const std::string& where);

/// Parses a JSON file. Missing files are InvalidParameter, malformed ones SchemaError.
Json read_json_file(const std::filesystem::path& path);

/// Two-space indent and a trailing newline.
std::string dump_json(const Json& j);

/// Creates parent directories. Throws RuntimeFailure on I/O errors.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest round-trip form with '.' decimals regardless of locale; "nan", "inf", "-inf".
std::string format_number(double v);

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool has_column(const std::string& name) const;
  /// Throws SchemaError naming the column when it is absent.
  int column_index(const std::string& name) const;
  /// Numeric column; empty cells become NaN. Throws SchemaError on bad numbers.
  std::vector<double> column(const std::string& name) const;
};

/// Comma-separated with a header row. Throws SchemaError on ragged rows or an empty file.
CsvTable parse_csv(const std::string& text, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

/// Builds CSV text row by row with fixed number formatting.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& num(double v);
  CsvWriter& integer(long long v);
  CsvWriter& text(const std::string& v);
  CsvWriter& empty();
  /// Throws ContractViolation when the row width differs from the header.
  void end_row();
  const std::string& str() const { return out_; }

 private:
  std::size_t width_;
  std::size_t cells_ = 0;
  std::string out_;
};

/// Columns: t, step_index, domain, P_{x,y,z}, Pdot_{x,y,z}, then per leg
/// (left, right) L, s, Fz, contact.
std::string trace_csv(const std::vector<StepTrace>& traces);

/// Same samples as trace_csv, column-wise, with run metadata and per-step records.
Json trace_json(const std::vector<StepTrace>& traces, const std::string& name,
                const std::string& scenario_kind, std::uint64_t seed);

struct ForceSeries {
  std::vector<double> t;
  std::vector<double> Fz_left;
  std::vector<double> Fz_right;
};
ForceSeries read_force_series(const CsvTable& trace);

/// Per-plane component names: {"p", "v"} or {"pos", "p", "v"}.
std::vector<std::string> plane_components(int dim);

/// One row per pre-impact instant. Per-plane columns depend on the plane
/// models' dimensions; w and wcl are empty on the last row.
std::string steps_csv(const std::vector<StepRecord>& records, const PlaneModel planes[2]);

/// Inverse of steps_csv for the given plane models.
std::vector<StepRecord> read_steps(const CsvTable& table, const PlaneModel planes[2]);

/// Desired path: columns t, x_d, y_d, optionally vx_d and vy_d (both or neither).
TrajectorySamples read_trajectory_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Gait files

struct GaitFile {
  GaitTrajectory gait;
  HlipParams hlip;
  GaitSpec spec;
  ASlipParams aslip;
};

Json gait_to_json(const GaitFile& g);
GaitFile gait_from_json(const Json& j);

/// Synthesis report; `best` is the final iterate (converged or not).
Json gait_report_json(const GaitSpec& spec, const GaitSearchResult& best, const HlipParams& hlip,
                      bool converged, const std::string& message);

// ---------------------------------------------------------------------------
// Scenario configuration

/// Scenario plus the file references of its JSON form. Input paths are
/// resolved against the config file's directory when read.
struct ScenarioFile {
  ScenarioConfig config;
  /// Paths as written in the config (echoed verbatim in outputs).
  std::string gait_file;
  std::string trajectory_file;
  std::string output_dir;
  /// Directory of the config file; not serialized.
  std::filesystem::path base_dir;

  /// Input path resolved against base_dir (absolute paths are kept).
  std::filesystem::path resolve(const std::string& p) const;
};

/// Strict reader: unknown keys and wrong types are SchemaError. Every field
/// is optional and defaults to ScenarioConfig's value.
ScenarioFile scenario_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json scenario_to_json(const ScenarioFile& s);

/// Applies "a.b.c=value" to a config object. The value is parsed as JSON when
/// possible and taken as a string otherwise. Throws InvalidParameter on a
/// malformed assignment.
void apply_override(Json& config, const std::string& assignment);

/// Loads a scenario config file, applies overrides, and reads the referenced
/// trajectory file.
ScenarioFile load_scenario(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});

// ---------------------------------------------------------------------------
// Simulation outputs

/// Run manifest: config echo, plane models, summary metrics and file names.
/// Carries the schema version of the CSV files written next to it.
Json summary_json(const ScenarioResult& result, const ScenarioFile& scenario,
                  const std::vector<std::string>& files);

/// Plane models of a summary (for analysis from files).
void planes_from_summary(const Json& summary, PlaneModel planes[2]);

Json plane_model_json(const PlaneModel& m);

// ---------------------------------------------------------------------------
// Plans

/// Plan problem with either per-plane "s2s" matrices or a shared "hlip" block.
/// An optional "trajectory" block fills the targets from a desired path.
PlanProblem plan_problem_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json plan_problem_to_json(const PlanProblem& p);
Json plan_solution_to_json(const PlanSolution& s);

// ---------------------------------------------------------------------------
// Orbits

Json orbit_json(const HlipParams& hp, double v_d_x, double v_d_y, double u_L);

// ---------------------------------------------------------------------------
// Analysis

struct ForceBandReport {
  bool requested = false;
  double c = 0.2;
  bool pass = true;
  std::string leg;
  long first_violation = -1;
  double t = 0.0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Compares both legs sample-wise; the earliest violation over the legs is reported.
ForceBandReport force_band(const ForceSeries& trace, const ForceSeries& reference, double c);

Json analysis_json(const std::string& scenario_name, const std::string& scenario_kind,
                   const AnalysisOptions& options, const std::vector<StepRecord>& records,
                   const PlaneAnalysis planes[2], const PlaneModel models[2],
                   const ForceBandReport& force);

Json polytope_json(const Polytope& p);
Json vectors_json(const std::vector<Eigen::VectorXd>& v);

}  // namespace slipwalk::io
