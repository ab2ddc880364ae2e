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

// Command-line front end. Precedence of settings, lowest first:
// built-in defaults, config file, --set assignments, named flags.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "slipwalk/app.hpp"
#include "slipwalk/errors.hpp"
#include "slipwalk/gait.hpp"
#include "slipwalk/hlip.hpp"
#include "slipwalk/io.hpp"
#include "slipwalk/planner.hpp"

namespace fs = std::filesystem;
using namespace slipwalk;

namespace {

/// Six significant digits for console text; files keep full precision.
std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Config JSON from an optional file plus assignments, in order.
io::Json config_json(const std::string& file, const std::vector<std::string>& assignments) {
  io::Json j;
  if (file.empty()) {
    j["schema_version"] = io::kSchemaVersion;
  } else {
    j = io::read_json_file(file);
  }
  for (const auto& a : assignments) io::apply_override(j, a);
  return j;
}

io::ScenarioFile scenario_of(const std::string& file, const std::vector<std::string>& assignments) {
  const io::Json j = config_json(file, assignments);
  io::ScenarioFile s =
      io::scenario_from_json(j, file.empty() ? fs::path() : fs::path(file).parent_path());
  if (!s.trajectory_file.empty())
    s.config.trajectory = io::read_trajectory_csv(s.resolve(s.trajectory_file));
  s.config.validate();
  return s;
}

template <class T>
void flag_set(std::vector<std::string>& out, const std::optional<T>& v, const std::string& key) {
  if (v) out.push_back(key + "=" + io::Json(*v).dump());
}

// ---------------------------------------------------------------------------

struct GaitArgs {
  std::string config;
  std::vector<std::string> sets;
  std::optional<double> osc_amp, z0, T_step;
  std::optional<int> n_coef;
  std::optional<std::uint64_t> seed;
  std::string from;
  std::string out = "gait.json";
  std::string report;
};

int cmd_gait(const GaitArgs& a) {
  if (!a.from.empty()) {
    // Load and re-serialize; the bytes match the input when it was written by this tool.
    const io::GaitFile g = app::load_gait(a.from);
    io::write_text_file(a.out, io::dump_json(io::gait_to_json(g)));
    std::cout << "gait: " << a.out << "\n";
    return app::kExitOk;
  }
  std::vector<std::string> sets = a.sets;
  flag_set(sets, a.osc_amp, "gait.osc_amp");
  flag_set(sets, a.z0, "gait.z0_target");
  flag_set(sets, a.T_step, "gait.T_step");
  flag_set(sets, a.n_coef, "gait.n_coef");
  flag_set(sets, a.seed, "seed");
  const io::ScenarioFile s = scenario_of(a.config, sets);
  GaitSpec spec = s.config.gait_spec;
  if (spec.seed == 0) spec.seed = s.config.seed;
  spec.validate();
  const std::string report =
      a.report.empty() ? (fs::path(a.out).replace_extension("").string() + ".report.json")
                       : a.report;
  try {
    const GaitSearchResult r = synthesize_gait(spec, s.config.aslip, s.config.synthesis);
    io::GaitFile g{r.gait, hlip_params_of(r.gait, s.config.aslip), spec, s.config.aslip};
    io::write_text_file(a.out, io::dump_json(io::gait_to_json(g)));
    io::write_text_file(report, io::dump_json(io::gait_report_json(spec, r, g.hlip, true, "")));
    std::cout << "gait: " << a.out << "\nreport: " << report << "\n"
              << "oscillation " << brief(r.metrics.oscillation) << " m, mean height "
              << brief(r.metrics.mean_height) << " m, T_ssp " << brief(g.hlip.T_ssp)
              << " s, T_dsp " << brief(g.hlip.T_dsp) << " s\n";
    return app::kExitOk;
  } catch (const GaitSynthesisError& e) {
    const GaitSearchResult& b = e.best();
    HlipParams hp;
    hp.z0 = b.gait.z0_avg;
    hp.T_ssp = b.gait.T_ssp;
    hp.T_dsp = b.gait.T_dsp;
    io::write_text_file(report,
                        io::dump_json(io::gait_report_json(spec, b, hp, false, e.what())));
    std::cerr << "error: " << e.what() << " (report: " << report << ")\n";
    return app::kExitRuntime;
  }
}

// ---------------------------------------------------------------------------

struct OrbitArgs {
  std::string gait;
  std::optional<double> z0, T_ssp, T_dsp, g;
  double v_d = 0.3;
  double v_d_y = 0.0;
  double u_L = 0.3;
  bool json = false;
};

int cmd_orbit(const OrbitArgs& a) {
  HlipParams hp;
  if (!a.gait.empty()) hp = app::load_gait(a.gait).hlip;
  if (a.z0) hp.z0 = *a.z0;
  if (a.T_ssp) hp.T_ssp = *a.T_ssp;
  if (a.T_dsp) hp.T_dsp = *a.T_dsp;
  if (a.g) hp.g = *a.g;
  const io::Json j = io::orbit_json(hp, a.v_d, a.v_d_y, a.u_L);
  if (a.json) {
    std::cout << io::dump_json(j);
    return app::kExitOk;
  }
  const auto& p1 = j["P1"];
  const auto& p2 = j["P2"];
  std::cout << "H-LIP z0 " << brief(hp.z0) << " m, T_ssp " << brief(hp.T_ssp) << " s, T_dsp "
            << brief(hp.T_dsp) << " s, lambda " << brief(hp.lambda()) << " 1/s\n"
            << "P1 v_d " << brief(p1["v_d"]) << ": p* " << brief(p1["p_star"]) << ", v* "
            << brief(p1["v_star"]) << ", u* " << brief(p1["u_star"]) << ", sigma1 "
            << brief(p1["sigma1"]) << "\n"
            << "P2 v_d " << brief(p2["v_d"]) << ": u*_L " << brief(p2["u_star_L"]) << ", u*_R "
            << brief(p2["u_star_R"]) << ", x*_L [" << brief(p2["x_star_L"][0]) << ", "
            << brief(p2["x_star_L"][1]) << "], x*_R [" << brief(p2["x_star_R"][0]) << ", "
            << brief(p2["x_star_R"][1]) << "], sigma2 " << brief(p2["sigma2"]) << ", d2 "
            << brief(p2["d2"]) << "\n";
  return app::kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::vector<std::string> configs;
  std::vector<std::string> sets;
  std::optional<std::string> kind, gait, trajectory, gain;
  std::optional<int> n_steps;
  std::optional<std::uint64_t> seed;
  std::optional<double> v_d, K_s, D_s;
  std::string out;
  bool batch = false;
  int jobs = 0;
  bool no_plots = false;
  bool trace_json = false;
};

std::vector<std::string> simulate_sets(const SimulateArgs& a) {
  std::vector<std::string> sets = a.sets;
  flag_set(sets, a.kind, "kind");
  // Paths given on the command line are relative to the working directory.
  auto absolute = [](const std::optional<std::string>& p) -> std::optional<std::string> {
    if (!p) return std::nullopt;
    return fs::absolute(*p).string();
  };
  flag_set(sets, absolute(a.gait), "gait_file");
  flag_set(sets, absolute(a.trajectory), "trajectory_file");
  flag_set(sets, a.n_steps, "n_steps");
  flag_set(sets, a.seed, "seed");
  flag_set(sets, a.v_d, "orbit.x.v_d");
  flag_set(sets, a.K_s, "aslip.K_s");
  flag_set(sets, a.D_s, "aslip.D_s");
  if (a.gain) {
    if (*a.gain == "tuned") {
      // Fixed LQR-style gains for the extended x and y planes (stable for T_step 0.4 s).
      sets.push_back(R"(gains.x={"kind":"user","dim":3,"K":[0.21,0.96,0.52]})");
      sets.push_back(R"(gains.y={"kind":"user","dim":3,"K":[0.31,0.67,0.43]})");
    } else if (*a.gain == "deadbeat" || *a.gain == "lqr") {
      sets.push_back("gains.x.kind=\"" + *a.gain + "\"");
      sets.push_back("gains.y.kind=\"" + *a.gain + "\"");
    } else {
      throw InvalidParameter("--gain must be deadbeat, lqr or tuned");
    }
  }
  return sets;
}

void print_outcome(const app::RunOutcome& o) {
  const ScenarioSummary& s = o.summary;
  std::cout << o.name << ": " << o.dir.string() << " steps " << s.completed_steps
            << " mean velocity [" << brief(s.mean_velocity(0)) << ", " << brief(s.mean_velocity(1))
            << "] final position [" << brief(s.final_position(0)) << ", "
            << brief(s.final_position(1)) << "]";
  if (o.exit_code != app::kExitOk)
    std::cout << " FAILED (exit " << o.exit_code << "): " << o.message;
  std::cout << "\n";
}

int cmd_simulate(const SimulateArgs& a) {
  if (a.configs.empty()) throw InvalidParameter("simulate needs a scenario config file");
  if (a.configs.size() > 1 && !a.batch)
    throw InvalidParameter("several config files need --batch");
  const std::vector<std::string> sets = simulate_sets(a);
  std::vector<io::ScenarioFile> scenarios;
  std::vector<fs::path> dirs;
  for (const auto& c : a.configs) {
    io::ScenarioFile s = scenario_of(c, sets);
    fs::path dir;
    if (!a.batch && !a.out.empty())
      dir = a.out;
    else if (a.batch && !a.out.empty())
      dir = fs::path(a.out) / s.config.name;
    else if (!s.output_dir.empty())
      dir = s.output_dir;
    else
      dir = fs::path("out") / s.config.name;
    scenarios.push_back(std::move(s));
    dirs.push_back(dir);
  }
  app::SimulateOptions opts;
  opts.plots = !a.no_plots;
  opts.trace_json = a.trace_json;
  const int jobs =
      a.jobs > 0 ? a.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<app::RunOutcome> out;
  if (a.batch)
    out = app::simulate_batch(scenarios, dirs, jobs, opts);
  else
    out.push_back(app::simulate_to_dir(scenarios[0], dirs[0], opts));
  int code = app::kExitOk;
  for (const auto& o : out) {
    print_outcome(o);
    code = std::max(code, o.exit_code);
  }
  return code;
}

// ---------------------------------------------------------------------------

struct PlanArgs {
  std::string problem;
  std::string out;
};

int cmd_plan(const PlanArgs& a) {
  const fs::path p(a.problem);
  const PlanProblem problem = io::plan_problem_from_json(io::read_json_file(p), p.parent_path());
  const PlanSolution sol = solve_plan(problem);
  const std::string text = io::dump_json(io::plan_solution_to_json(sol));
  if (a.out.empty()) {
    std::cout << text;
  } else {
    io::write_text_file(a.out, text);
    std::cout << "plan: " << a.out << " objective " << brief(sol.objective) << "\n";
  }
  return app::kExitOk;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string dir;
  std::string out;
  int n = 6;
  double eps = 1e-4;
  std::string force_ref;
  double force_c = 0.2;
  bool no_plots = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
  app::AnalyzeOptions opts;
  opts.sets.n = a.n;
  opts.sets.eps = a.eps;
  if (!a.force_ref.empty()) opts.force_ref = a.force_ref;
  opts.force_c = a.force_c;
  opts.plots = !a.no_plots;
  const fs::path out = a.out.empty() ? fs::path(a.dir) : fs::path(a.out);
  const io::Json j = app::analyze_dir(a.dir, out, opts);
  for (const auto& p : j["planes"]) {
    std::cout << "plane " << p["plane"].get<std::string>() << " (dim " << p["dim"].get<int>()
              << ", " << p["gain"].get<std::string>() << "): |W| "
              << p["W"]["vertex_count"].get<int>() << ", |E| " << p["E"]["vertex_count"].get<int>()
              << (p["exact"].get<bool>() ? " exact" : " inner approximation")
              << ", all e_k in E: " << (p["all_in_E"].get<bool>() ? "yes" : "no")
              << ", certificate: " << (p["certificate"]["holds"].get<bool>() ? "holds" : "fails")
              << "\n";
  }
  const auto& f = j["force_band"];
  if (f["requested"].get<bool>()) {
    if (f["pass"].get<bool>()) {
      std::cout << "force band c=" << brief(f["c"]) << ": pass\n";
    } else {
      const auto& v = f["first_violation"];
      std::cout << "force band c=" << brief(f["c"]) << ": FAIL at sample "
                << v["sample"].get<long>() << " (t " << brief(v["t"]) << " s, "
                << v["leg"].get<std::string>() << " leg, Fz " << brief(v["value"]) << " outside ["
                << brief(v["lower"]) << ", " << brief(v["upper"]) << "])\n";
    }
  }
  std::cout << "analysis: " << (out / "analysis.json").string() << "\n";
  return app::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"3D actuated SLIP walking stabilized by H-LIP step-size control"};
  cli.require_subcommand(1);

  GaitArgs ga;
  auto* gait = cli.add_subcommand("gait", "synthesize the stepping-in-place gait");
  gait->add_option("-c,--config", ga.config, "scenario config file (aslip, gait, synthesis, sim)");
  gait->add_option("--set", ga.sets, "override a config field: key.path=value");
  gait->add_option("--osc-amp", ga.osc_amp, "peak-to-peak vertical oscillation [m]");
  gait->add_option("--z0", ga.z0, "target mean height [m]");
  gait->add_option("--T-step", ga.T_step, "step period [s]");
  gait->add_option("--n-coef", ga.n_coef, "Fourier coefficient count (odd)");
  gait->add_option("--seed", ga.seed, "seed of the initial-guess perturbation (0 = none)");
  gait->add_option("--from", ga.from, "load an existing gait file and re-serialize it");
  gait->add_option("-o,--out", ga.out, "gait file to write");
  gait->add_option("--report", ga.report, "synthesis report (default <out stem>.report.json)");

  OrbitArgs oa;
  auto* orbit = cli.add_subcommand("orbit", "print the P1 and P2 closed-form orbits");
  orbit->add_option("--gait", oa.gait, "take H-LIP parameters from a gait file");
  orbit->add_option("--z0", oa.z0, "H-LIP height [m]");
  orbit->add_option("--T-ssp", oa.T_ssp, "single support duration [s]");
  orbit->add_option("--T-dsp", oa.T_dsp, "double support duration [s]");
  orbit->add_option("--g", oa.g, "gravity [m/s^2]");
  orbit->add_option("--v-d", oa.v_d, "P1 desired velocity [m/s]");
  orbit->add_option("--v-d-y", oa.v_d_y, "P2 desired velocity [m/s]");
  orbit->add_option("--u-L", oa.u_L, "P2 step size landing the left foot [m]");
  orbit->add_flag("--json", oa.json, "print JSON");

  SimulateArgs sa;
  auto* sim = cli.add_subcommand("simulate", "run scenarios and write traces and a summary");
  sim->add_option("config", sa.configs, "scenario config file(s)")->required();
  sim->add_option("--set", sa.sets, "override a config field: key.path=value");
  sim->add_option("--kind", sa.kind,
                  "periodic-3d | fixed-location | trajectory-tracking | stepping-in-place");
  sim->add_option("--gait", sa.gait, "gait file (skips synthesis)");
  sim->add_option("--trajectory", sa.trajectory, "desired trajectory CSV (t, x_d, y_d)");
  sim->add_option("--gain", sa.gain, "tracking gains: deadbeat | lqr | tuned");
  sim->add_option("--n-steps", sa.n_steps, "number of steps");
  sim->add_option("--seed", sa.seed, "seed");
  sim->add_option("--v-d", sa.v_d, "forward orbit velocity [m/s]");
  sim->add_option("--Ks", sa.K_s, "leg stiffness [N/m]");
  sim->add_option("--Ds", sa.D_s, "leg damping [N s/m]");
  sim->add_option("-o,--out", sa.out, "output directory (batch: root of per-scenario dirs)");
  sim->add_flag("--batch", sa.batch, "run several scenarios on a worker pool");
  sim->add_option("-j,--jobs", sa.jobs, "worker threads for --batch (default: hardware)");
  sim->add_flag("--no-plots", sa.no_plots, "skip SVG output");
  sim->add_flag("--trace-json", sa.trace_json, "also write trace.json");

  PlanArgs pa;
  auto* plan = cli.add_subcommand("plan", "solve a step-size plan problem");
  plan->add_option("problem", pa.problem, "plan problem JSON")->required();
  plan->add_option("-o,--out", pa.out, "solution file (default: stdout)");

  AnalyzeArgs aa;
  auto* analyze = cli.add_subcommand("analyze", "disturbance and invariant-set analysis");
  analyze->add_option("dir", aa.dir, "simulate output directory")->required();
  analyze->add_option("-o,--out", aa.out, "output directory (default: the input directory)");
  analyze->add_option("--n", aa.n, "Minkowski terms of E_n")->check(CLI::PositiveNumber);
  analyze->add_option("--eps", aa.eps, "inflation of W")->check(CLI::NonNegativeNumber);
  analyze->add_option("--force-ref", aa.force_ref, "reference trace.csv (or its directory)");
  analyze->add_option("--force-c", aa.force_c, "force band half-width ratio");
  analyze->add_flag("--no-plots", aa.no_plots, "skip SVG output");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? app::kExitOk : app::kExitValidation;
  }

  try {
    if (*gait) return cmd_gait(ga);
    if (*orbit) return cmd_orbit(oa);
    if (*sim) return cmd_simulate(sa);
    if (*plan) return cmd_plan(pa);
    if (*analyze) return cmd_analyze(aa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::exit_code_for(e);
  }
  return app::kExitValidation;
}
