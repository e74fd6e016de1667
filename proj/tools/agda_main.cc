// Copyright 2026 The Anchored GDA Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every subcommand builds a configuration and hands
// it to the matching harness function.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agda/harness.h"
#include "parse_util.h"

namespace {

using agda::ExperimentConfig;

struct ExperimentFlags {
  std::string config;
  std::string problem;
  std::string schedule;
  std::string z0;
  std::string steps;
  std::string record_every;
  std::string seed;
  std::string out;
  std::string report;
  std::string checks;
};

void AddExperimentFlags(CLI::App* cmd, ExperimentFlags& f,
                        bool with_schedule = true) {
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--problem", f.problem,
                  "problem, e.g. bilinear:n=1,m=1,a=1 or a .json file");
  if (with_schedule) {
    cmd->add_option("--schedule", f.schedule,
                    "schedule, e.g. anchored-new:gamma=2");
  }
  cmd->add_option("--z0", f.z0, "ones, e1, saddle or comma-separated values");
  cmd->add_option("--steps", f.steps, "iteration count T");
  cmd->add_option("--record-every", f.record_every, "trace stride");
  cmd->add_option("--seed", f.seed, "seed recorded in the trace");
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  for (const char c : text) {
    if (c == ',') {
      items.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  items.push_back(item);
  return items;
}

// Loads the config file (if any) and applies flag overrides.
ExperimentConfig BuildConfig(const ExperimentFlags& f) {
  ExperimentConfig config;
  if (!f.config.empty()) config = agda::LoadExperimentConfig(f.config);
  if (!f.problem.empty()) config.problem = agda::LoadProblem(f.problem);
  if (!f.schedule.empty()) config.schedule = f.schedule;
  if (!f.z0.empty()) config.z0 = agda::ParseZ0(f.z0);
  if (!f.steps.empty()) {
    config.steps = agda::internal::ParseInt(f.steps, "steps");
  }
  if (!f.record_every.empty()) {
    config.record_every =
        agda::internal::ParseInt(f.record_every, "record-every");
  }
  if (!f.seed.empty()) config.seed = agda::internal::ParseSeed(f.seed, "seed");
  if (!f.out.empty()) config.out = f.out;
  if (!f.report.empty()) config.report = f.report;
  if (!f.checks.empty()) config.checks = SplitList(f.checks);
  return config;
}

std::vector<double> ParseDoubles(const std::string& text, const char* what) {
  std::vector<double> values;
  if (text.empty()) return values;
  for (const std::string& item : SplitList(text)) {
    values.push_back(agda::internal::ParseDouble(item, what));
  }
  return values;
}

std::vector<int64_t> ParseInts(const std::string& text, const char* what) {
  std::vector<int64_t> values;
  if (text.empty()) return values;
  for (const std::string& item : SplitList(text)) {
    values.push_back(agda::internal::ParseInt(item, what));
  }
  return values;
}

int Main(int argc, char** argv) {
  CLI::App app{"Anchored gradient descent-ascent experiments"};
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run the solver, write a trace");
  AddExperimentFlags(run, run_flags);
  run->add_option("--out", run_flags.out, "trace CSV path");

  ExperimentFlags verify_flags;
  std::string trace_path;
  CLI::App* verify =
      app.add_subcommand("verify", "check a trace, write a JSON report");
  AddExperimentFlags(verify, verify_flags);
  verify->add_option("--trace", trace_path, "trace CSV to check")->required();
  verify->add_option("--report", verify_flags.report, "report JSON path");
  verify->add_option("--checks", verify_flags.checks,
                     "comma-separated check names or 'all'");

  ExperimentFlags sweep_flags;
  std::string gammas;
  std::string ps;
  std::string steps_axis;
  int parallel = 1;
  std::string cap;
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
  AddExperimentFlags(sweep, sweep_flags);
  sweep->add_option("--gamma", gammas, "gamma axis, e.g. 2,4,8");
  sweep->add_option("--p", ps, "p axis, e.g. 0.6,0.75,0.9");
  sweep->add_option("--steps-axis", steps_axis, "T axis, e.g. 1e3,1e4");
  sweep->add_option("--parallel", parallel, "concurrent runs");
  sweep->add_option("--cap", cap, "maximum number of cells");
  sweep->add_option("--out", sweep_out, "summary CSV path");
  sweep->add_option("--checks", sweep_flags.checks,
                    "comma-separated check names or 'all'");

  ExperimentFlags compare_flags;
  std::vector<std::string> compare_configs;
  std::vector<std::string> compare_schedules;
  std::string compare_out = "compare.csv";
  CLI::App* compare =
      app.add_subcommand("compare", "side-by-side gradient norms");
  AddExperimentFlags(compare, compare_flags, /*with_schedule=*/false);
  compare->remove_option(compare->get_option("--config"));
  compare->add_option("--config", compare_configs,
                      "experiment config (repeatable)");
  compare->add_option("--schedule", compare_schedules, "schedule (repeatable)");
  compare->add_option("--out", compare_out, "comparison CSV path");

  agda::AuditConfig audit;
  std::string audit_gammas;
  std::string t_max;
  CLI::App* audit_cmd = app.add_subcommand(
      "schedule-audit", "scan the anchored-new coefficient bounds");
  audit_cmd->add_option("--schedule", audit.schedule,
                        "anchored-new or anchored-new:gamma=G");
  audit_cmd->add_option("--gamma", audit_gammas, "gamma list, e.g. 2,4,8");
  audit_cmd->add_option("--t-max", t_max, "last t scanned");
  audit_cmd->add_flag("--margins", audit.print_margins,
                      "print one margin line per t");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? agda::kExitOk : agda::kExitUsage;
  }

  try {
    if (*run) return agda::CmdRun(BuildConfig(run_flags), std::cout, std::cerr);
    if (*verify) {
      return agda::CmdVerify(trace_path, BuildConfig(verify_flags), std::cout,
                             std::cerr);
    }
    if (*sweep) {
      agda::SweepConfig config;
      config.base = BuildConfig(sweep_flags);
      config.gammas = ParseDoubles(gammas, "gamma");
      config.ps = ParseDoubles(ps, "p");
      config.steps = ParseInts(steps_axis, "steps-axis");
      config.parallelism = parallel;
      if (!cap.empty()) config.max_runs = agda::internal::ParseInt(cap, "cap");
      if (!sweep_out.empty()) config.out = sweep_out;
      return agda::CmdSweep(config, std::cout, std::cerr);
    }
    if (*compare) {
      std::vector<ExperimentConfig> configs;
      if (!compare_configs.empty() && !compare_schedules.empty()) {
        throw agda::Error(agda::ErrorKind::kUsage,
                          "give either --config or --schedule lists");
      }
      for (const std::string& path : compare_configs) {
        ExperimentFlags f = compare_flags;
        f.config = path;
        configs.push_back(BuildConfig(f));
      }
      for (const std::string& schedule : compare_schedules) {
        ExperimentFlags f = compare_flags;
        f.schedule = schedule;
        configs.push_back(BuildConfig(f));
      }
      return agda::CmdCompare(configs, compare_out, std::cout, std::cerr);
    }
    if (*audit_cmd) {
      if (!audit_gammas.empty()) {
        audit.gammas = ParseDoubles(audit_gammas, "gamma");
      }
      if (!t_max.empty()) {
        audit.t_max = agda::internal::ParseInt(t_max, "t-max");
      }
      return agda::CmdScheduleAudit(audit, std::cout, std::cerr);
    }
  } catch (const agda::Error& e) {
    std::cerr << "error: " << agda::ErrorKindName(e.kind()) << ": " << e.what()
              << '\n';
    return agda::ExitCodeFor(e.kind());
  }
  return agda::kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return Main(argc, argv); }
