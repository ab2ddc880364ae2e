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

#include <gtest/gtest.h>

#include <clocale>
#include <cstring>
#include <functional>
#include <cmath>
#include <limits>
#include <random>

#include "slipwalk/errors.hpp"
#include "slipwalk/io.hpp"
#include "test_util.hpp"

namespace slipwalk {
namespace {

namespace fs = std::filesystem;
using io::Json;
using testing::temp_dir;

std::string schema_error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "<no SchemaError>";
}

TEST(Io, NumbersRoundTripExactly) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 2000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    EXPECT_EQ(std::stod(io::format_number(v)), v);
    ++checked;
  }
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(io::format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Io, NumbersIgnoreLocale) {
  // Only meaningful where a comma-decimal locale is installed.
  if (!std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) GTEST_SKIP() << "de_DE locale not installed";
  EXPECT_EQ(io::format_number(1.5), "1.5");
  std::setlocale(LC_NUMERIC, "C");
}

TEST(Io, CsvParsingAndErrors) {
  const io::CsvTable t = io::parse_csv("a,b\n1,2.5\n3,\n", "mem");
  EXPECT_EQ(t.column("b")[0], 2.5);
  EXPECT_TRUE(std::isnan(t.column("b")[1]));
  EXPECT_NE(schema_error_of([&] { (void)t.column("zeta"); }).find("missing column 'zeta'"),
            std::string::npos);
  EXPECT_THROW(io::parse_csv("", "mem"), SchemaError);
  EXPECT_THROW(io::parse_csv("a,b\n1\n", "mem"), SchemaError);
  EXPECT_THROW(io::parse_csv("a\nx1\n", "mem").column("a"), SchemaError);

  io::CsvWriter w({"x", "y"});
  w.num(1.0);
  EXPECT_THROW(w.end_row(), ContractViolation);
}

TEST(Io, SchemaVersionAndKind) {
  Json j = {{"schema_version", "1.4"}, {"kind", "gait"}};
  EXPECT_NO_THROW(io::check_schema(j, "gait", "x"));
  EXPECT_THROW(io::check_schema(j, "orbit", "x"), SchemaError);
  j["schema_version"] = "2.0";
  EXPECT_THROW(io::check_schema(j, "gait", "x"), SchemaError);
  j.erase("schema_version");
  EXPECT_THROW(io::check_schema(j, "gait", "x"), SchemaError);
}

TEST(Io, FileErrors) {
  const fs::path dir = temp_dir("io_files");
  EXPECT_THROW(io::read_json_file(dir / "absent.json"), InvalidParameter);
  io::write_text_file(dir / "bad.json", "{ not json");
  EXPECT_THROW(io::read_json_file(dir / "bad.json"), SchemaError);
  io::write_text_file(dir / "nested" / "deep" / "x.txt", "ok");
  EXPECT_EQ(io::read_text_file(dir / "nested" / "deep" / "x.txt"), "ok");
}

TEST(Io, GaitFileRoundTripIsByteIdentical) {
  io::GaitFile g;
  g.gait.coef = {0.95, 0.01, -0.02, 1.0 / 3.0, 1e-17};
  g.gait.T_ssp = 0.3685;
  g.gait.T_dsp = 0.0315;
  g.gait.z_pre = 0.9752;
  g.hlip.T_ssp = 0.3685;
  g.spec.seed = 7;
  const std::string first = io::dump_json(io::gait_to_json(g));
  const io::GaitFile back = io::gait_from_json(Json::parse(first));
  EXPECT_EQ(back.gait.coef, g.gait.coef);
  EXPECT_EQ(io::dump_json(io::gait_to_json(back)), first);
}

TEST(Io, ScenarioRoundTripAndStrictness) {
  io::ScenarioFile s;
  s.config.name = "rt";
  s.config.kind = ScenarioKind::FixedLocation;
  s.config.n_steps = 17;
  s.config.x_target = Eigen::Vector3d(0.8, 0.0, 0.0);
  const std::string first = io::dump_json(io::scenario_to_json(s));
  const io::ScenarioFile back = io::scenario_from_json(Json::parse(first));
  EXPECT_EQ(back.config.n_steps, 17);
  EXPECT_EQ(back.config.kind, ScenarioKind::FixedLocation);
  EXPECT_EQ(io::dump_json(io::scenario_to_json(back)), first);

  Json j = {{"schema_version", "1.0"}, {"kind", "periodic-3d"}, {"bogus", 1}};
  EXPECT_NE(schema_error_of([&] { io::scenario_from_json(j); }).find("bogus"), std::string::npos);
  j = {{"schema_version", "1.0"}, {"aslip", {{"K_z", 1.0}}}};
  EXPECT_THROW(io::scenario_from_json(j), SchemaError);
  j = {{"schema_version", "1.0"}, {"n_steps", "many"}};
  EXPECT_THROW(io::scenario_from_json(j), SchemaError);
  j = {{"schema_version", "1.0"}, {"kind", "moonwalk"}};
  EXPECT_THROW(io::scenario_from_json(j), ValidationError);
}

TEST(Io, OverridesParseValues) {
  Json j = Json::object();
  io::apply_override(j, "n_steps=30");
  io::apply_override(j, "aslip.K_s=1.5e4");
  io::apply_override(j, "name=walk one");
  io::apply_override(j, "plan.x_target=[1,0,0]");
  EXPECT_EQ(j["n_steps"], 30);
  EXPECT_EQ(j["aslip"]["K_s"], 15000.0);
  EXPECT_EQ(j["name"], "walk one");
  EXPECT_EQ(j["plan"]["x_target"].size(), 3u);
  EXPECT_THROW(io::apply_override(j, "no_equals_sign"), InvalidParameter);
  EXPECT_THROW(io::apply_override(j, "=3"), InvalidParameter);
}

TEST(Io, ConfigFilePrecedenceAndRelativePaths) {
  const fs::path dir = temp_dir("io_config");
  io::write_text_file(dir / "data" / "path.csv", "t,x_d,y_d\n0,0,0\n1,0.3,0.1\n");
  io::write_text_file(dir / "cfg.json",
                      R"({"schema_version": "1.0", "kind": "trajectory-tracking",
                          "n_steps": 12, "trajectory_file": "data/path.csv"})");
  const io::ScenarioFile plain = io::load_scenario(dir / "cfg.json");
  EXPECT_EQ(plain.config.n_steps, 12);
  ASSERT_TRUE(plain.config.trajectory.has_value());
  EXPECT_EQ(plain.config.trajectory->x_d[1], 0.3);

  const io::ScenarioFile over = io::load_scenario(dir / "cfg.json", {"n_steps=14", "seed=3"});
  EXPECT_EQ(over.config.n_steps, 14);
  EXPECT_EQ(over.config.seed, 3u);
}

TEST(Io, TrajectoryCsvValidation) {
  const fs::path dir = temp_dir("io_traj");
  io::write_text_file(dir / "half.csv", "t,x_d,y_d,vx_d\n0,0,0,0\n1,1,0,1\n");
  EXPECT_NE(schema_error_of([&] { io::read_trajectory_csv(dir / "half.csv"); }).find("vy_d"),
            std::string::npos);
  io::write_text_file(dir / "back.csv", "t,x_d,y_d\n0,0,0\n0,1,0\n");
  EXPECT_THROW(io::read_trajectory_csv(dir / "back.csv"), InvalidParameter);
  io::write_text_file(dir / "nox.csv", "t,y_d\n0,0\n1,0\n");
  EXPECT_THROW(io::read_trajectory_csv(dir / "nox.csv"), SchemaError);
}

TEST(Io, PlanProblemRoundTrip) {
  PlanProblem p;
  p.N = 3;
  p.R = 0.2;
  p.first_step = 1;
  PlanePlan pl;
  pl.s2s = extend_s2s(s2s_matrices(HlipParams{}));
  pl.x0 = Eigen::Vector3d(0.1, 0.02, 0.3);
  pl.target.assign(3, Eigen::Vector3d(1.0, 0.0, 0.0));
  pl.min_step = 0.05;
  p.planes.push_back(pl);
  const Json j = io::plan_problem_to_json(p);
  const PlanProblem back = io::plan_problem_from_json(j);
  ASSERT_EQ(back.planes.size(), 1u);
  EXPECT_EQ(back.N, 3);
  EXPECT_EQ(back.first_step, 1);
  EXPECT_EQ(back.planes[0].s2s.A, pl.s2s.A);
  EXPECT_EQ(back.planes[0].s2s.B, pl.s2s.B);
  EXPECT_EQ(back.planes[0].x0, pl.x0);
  EXPECT_EQ(back.planes[0].min_step, 0.05);
  EXPECT_EQ(io::dump_json(io::plan_problem_to_json(back)), io::dump_json(j));

  const Json sol = io::plan_solution_to_json(solve_plan(p));
  EXPECT_EQ(sol["kind"], "plan-solution");
  EXPECT_EQ(sol["schema_version"], io::kSchemaVersion);
}

TEST(Io, ForceBandOverTraces) {
  io::ForceSeries a;
  a.t = {0.0, 0.1, 0.2};
  a.Fz_left = {300.0, 200.0, 0.0};
  a.Fz_right = {0.0, 100.0, 300.0};
  EXPECT_TRUE(io::force_band(a, a, 0.2).pass);
  io::ForceSeries b = a;
  b.Fz_right[1] *= 1.3;
  b.Fz_left[2] = 50.0;
  const io::ForceBandReport r = io::force_band(b, a, 0.2);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.first_violation, 1);
  EXPECT_EQ(r.leg, "right");
  b.t.pop_back();
  b.Fz_left.pop_back();
  b.Fz_right.pop_back();
  EXPECT_THROW(io::force_band(b, a, 0.2), InvalidParameter);
}

}  // namespace
}  // namespace slipwalk
