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

#ifndef AGDA_HARNESS_H_
#define AGDA_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agda/errors.h"
#include "agda/problems.h"
#include "agda/schedules.h"

namespace agda {

// Process exit codes. No other values are returned.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitDivergence = 3,
  kExitIo = 4,
};

int ExitCodeFor(ErrorKind kind);

// Environment variable naming the directory for relative output paths.
inline constexpr char kOutputDirEnv[] = "AGDA_OUTPUT_DIR";

// Resolves a relative output path against $AGDA_OUTPUT_DIR when set,
// creating that directory if needed.
std::string ResolveOutputPath(const std::string& path);

struct ExperimentConfig {
  std::optional<ProblemSpec> problem;
  std::string schedule = "anchored-new:gamma=2";
  // Preset name ("ones", "e1", "saddle") or explicit coordinates.
  std::variant<std::string, std::vector<double>> z0 = std::string("ones");
  int64_t steps = 1000;
  int64_t record_every = 1;
  // Empty or {"all"} selects every check.
  std::vector<std::string> checks;
  std::string out = "trace.csv";
  std::string report = "report.json";
  uint64_t seed = 0;
};

// Problem definition as JSON text. Keys: kind, n, m, A, P, Q (row-major
// nested arrays), or seed (+ pq_scale) for a random instance; optional id,
// lipschitz_K (must not undercut the operator norm) and saddle (an array, or
// null when unknown).
ProblemSpec ProblemFromJson(const std::string& json_text);
// Accepts the compact form (`bilinear:n=1,m=1,a=1`) or a path to a JSON
// problem file (anything ending in .json).
ProblemSpec LoadProblem(const std::string& text_or_path,
                        const std::string& base_dir = "");

// Flat JSON document with keys problem, schedule, z0, steps, record_every,
// checks, out, report, seed. Unknown keys are rejected.
ExperimentConfig LoadExperimentConfig(const std::string& path);
ExperimentConfig ExperimentConfigFromJson(const std::string& json_text,
                                          const std::string& base_dir = "");

// Comma-separated coordinates or a preset name.
std::variant<std::string, std::vector<double>> ParseZ0(const std::string& text);
Point ResolveZ0(const ExperimentConfig& config);
Schedule ResolveSchedule(const ExperimentConfig& config);

int CmdRun(const ExperimentConfig& config, std::ostream& out,
           std::ostream& err);

// Checks a trace file against the configuration that should have produced
// it and writes the verification report to config.report.
int CmdVerify(const std::string& trace_path, const ExperimentConfig& config,
              std::ostream& out, std::ostream& err);

struct SweepConfig {
  ExperimentConfig base;
  std::vector<double> gammas;
  std::vector<double> ps;
  std::vector<int64_t> steps;
  int parallelism = 1;
  int64_t max_runs = 10000;
  std::string out = "sweep.csv";
};

// One summary row per grid cell, sorted by (gamma, p, T).
int CmdSweep(const SweepConfig& sweep, std::ostream& out, std::ostream& err);

// Side-by-side grad_norm_sq columns (with log10 columns) for runs sharing a
// problem and z0, plus fitted slopes as metadata lines.
int CmdCompare(const std::vector<ExperimentConfig>& configs,
               const std::string& out_path, std::ostream& out,
               std::ostream& err);

struct AuditConfig {
  std::string schedule = "anchored-new";
  std::vector<double> gammas = {2.0, 4.0, 8.0};
  int64_t t_max = 1000000;
  // Print one margin line per t; implied when t_max <= 100.
  bool print_margins = false;
};

// Trace-free scan of the contraction and error-coefficient bounds and the
// asymptotic residuals, for each gamma.
int CmdScheduleAudit(const AuditConfig& audit, std::ostream& out,
                     std::ostream& err);

}  // namespace agda

#endif  // AGDA_HARNESS_H_
