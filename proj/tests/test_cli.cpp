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

// Runs the built command-line tool and checks exit codes and outputs.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>

#include "slipwalk/io.hpp"
#include "test_util.hpp"

namespace slipwalk {
namespace {

namespace fs = std::filesystem;
using testing::temp_dir;

const fs::path kScenarios = SLIPWALK_SCENARIO_DIR;

int run(const std::string& args, const fs::path& log = "/dev/null") {
  const std::string cmd =
      std::string("\"") + SLIPWALK_CLI_PATH + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// One synthesized gait file for the whole binary.
const fs::path& gait_file() {
  static const fs::path path = [] {
    const fs::path dir = temp_dir("cli_gait");
    EXPECT_EQ(run("gait -o " + q(dir / "gait.json")), 0);
    return dir / "gait.json";
  }();
  return path;
}

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("orbit --v-d"), 2);
  EXPECT_EQ(run("simulate"), 2);
}

TEST(Cli, GaitRoundTripAndReport) {
  const fs::path dir = temp_dir("cli_gait_rt");
  ASSERT_TRUE(fs::exists(gait_file()));
  EXPECT_TRUE(fs::exists(gait_file().parent_path() / "gait.report.json"));
  ASSERT_EQ(run("gait --from " + q(gait_file()) + " -o " + q(dir / "copy.json")), 0);
  EXPECT_EQ(io::read_text_file(dir / "copy.json"), io::read_text_file(gait_file()));
  EXPECT_EQ(run("gait --osc-amp 0.5 -o " + q(dir / "bad.json")), 2);
}

TEST(Cli, OrbitJson) {
  const fs::path dir = temp_dir("cli_orbit");
  ASSERT_EQ(run("orbit --gait " + q(gait_file()) + " --json", dir / "orbit.json"), 0);
  const io::Json j = io::read_json_file(dir / "orbit.json");
  EXPECT_EQ(j["kind"], "orbit");
  EXPECT_EQ(run("orbit --z0 -1"), 2);
}

TEST(Cli, SimulateIsDeterministic) {
  const fs::path dir = temp_dir("cli_det");
  const std::string base = "simulate " + q(kScenarios / "periodic_3d.json") + " --gait " +
                           q(gait_file()) + " --n-steps 6 --seed 5 --no-plots -o ";
  ASSERT_EQ(run(base + q(dir / "one")), 0);
  ASSERT_EQ(run(base + q(dir / "two")), 0);
  for (const char* f : {"trace.csv", "steps.csv", "summary.json", "gait.json"})
    EXPECT_EQ(io::read_text_file(dir / "one" / f), io::read_text_file(dir / "two" / f)) << f;
}

TEST(Cli, SimulateValidationAndRuntimeFailures) {
  const fs::path dir = temp_dir("cli_fail");
  io::write_text_file(dir / "unknown.json", R"({"schema_version": "1.0", "n_stepz": 4})");
  EXPECT_EQ(run("simulate " + q(dir / "unknown.json") + " -o " + q(dir / "u")), 2);
  io::write_text_file(dir / "future.json", R"({"schema_version": "2.0"})");
  EXPECT_EQ(run("simulate " + q(dir / "future.json") + " -o " + q(dir / "f")), 2);
  EXPECT_EQ(run("simulate " + q(kScenarios / "periodic_3d.json") + " --set n_steps=1 -o " +
                q(dir / "n")),
            2);
  EXPECT_EQ(run("simulate " + q(dir / "absent.json") + " -o " + q(dir / "a")), 2);
  // Far beyond what the walker can sustain: the walk fails at run time.
  EXPECT_EQ(run("simulate " + q(kScenarios / "periodic_3d.json") + " --gait " + q(gait_file()) +
                " --v-d 3 --set u_max=2 --no-plots -o " + q(dir / "fast")),
            3);
  EXPECT_TRUE(fs::exists(dir / "fast" / "summary.json"));
}

TEST(Cli, BatchAnalyzeAndPlan) {
  const fs::path dir = temp_dir("cli_batch");
  ASSERT_EQ(run("simulate --batch " + q(kScenarios / "periodic_3d.json") + " " +
                q(kScenarios / "stepping_in_place.json") + " --gait " + q(gait_file()) +
                " --n-steps 8 -j 2 -o " + q(dir)),
            0);
  EXPECT_TRUE(fs::exists(dir / "periodic_3d" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir / "stepping_in_place" / "trace.csv"));

  EXPECT_EQ(run("analyze " + q(dir / "stepping_in_place") + " --force-ref " +
                q(dir / "stepping_in_place")),
            0);
  const io::Json a = io::read_json_file(dir / "stepping_in_place" / "analysis.json");
  EXPECT_TRUE(a["force_band"]["pass"].get<bool>());
  EXPECT_EQ(run("analyze " + q(dir / "periodic_3d") + " --n 4 --no-plots"), 0);
  // Traces of different lengths cannot be compared.
  std::string text = io::read_text_file(dir / "stepping_in_place" / "trace.csv");
  text.erase(text.rfind('\n', text.size() - 2) + 1);
  io::write_text_file(dir / "short.csv", text);
  EXPECT_EQ(run("analyze " + q(dir / "stepping_in_place") + " --force-ref " + q(dir / "short.csv")),
            2);
  EXPECT_EQ(run("analyze " + q(temp_dir("cli_empty"))), 2);

  ASSERT_EQ(run("plan " + q(kScenarios / "plan_problem.json") + " -o " + q(dir / "plan.json")), 0);
  const io::Json p = io::read_json_file(dir / "plan.json");
  EXPECT_EQ(p["kind"], "plan-solution");
  EXPECT_LT(p["kkt_residual"].get<double>(), 1e-8);
}

}  // namespace
}  // namespace slipwalk
