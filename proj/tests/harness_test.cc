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

#include "agda/harness.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "agda/solver.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace agda {
namespace {

namespace fs = std::filesystem;
using testing::CommandResult;
using testing::ConfigPath;
using testing::RunCli;
using testing::ScratchDir;
using testing::Slurp;

std::string Quote(const fs::path& path) { return "'" + path.string() + "'"; }

ExperimentConfig Acceptance(int64_t steps) {
  ExperimentConfig config = LoadExperimentConfig(ConfigPath("acceptance.json"));
  config.steps = steps;
  return config;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

TEST(RunTest, CliMatchesLibraryByteForByte) {
  const fs::path dir = ScratchDir("run_bytes");
  ExperimentConfig config = Acceptance(2000);
  config.out = (dir / "lib.csv").string();
  std::ostringstream out, err;
  ASSERT_EQ(CmdRun(config, out, err), kExitOk) << err.str();

  const CommandResult cli =
      RunCli("run --config " + Quote(ConfigPath("acceptance.json")) +
                 " --steps 2e3 --out cli.csv",
             dir);
  ASSERT_EQ(cli.exit_code, 0) << cli.err;
  EXPECT_EQ(Slurp(dir / "cli.csv"), Slurp(dir / "lib.csv"));
  const auto without_time = [](const std::string& text) {
    return text.substr(0, text.find(" wall_time_s="));
  };
  EXPECT_EQ(without_time(cli.out), without_time(out.str()));
}

TEST(RunTest, TraceRoundTripsThroughReader) {
  const fs::path dir = ScratchDir("run_roundtrip");
  ExperimentConfig config = Acceptance(500);
  config.out = (dir / "trace.csv").string();
  std::ostringstream out, err;
  ASSERT_EQ(CmdRun(config, out, err), kExitOk);
  const Trace read = ReadTraceFile(config.out);
  const RunResult direct = agda::Run(
      testing::UnitBilinear(), ResolveSchedule(config), ResolveZ0(config), 500);
  ASSERT_EQ(read.rows.size(), direct.trace.rows.size());
  for (size_t i = 0; i < read.rows.size(); ++i) {
    ASSERT_EQ(read.rows[i].grad_norm_sq, direct.trace.rows[i].grad_norm_sq);
    ASSERT_EQ(read.rows[i].dist_opt_sq, direct.trace.rows[i].dist_opt_sq);
  }
}

TEST(RunTest, ExitCodes) {
  const fs::path dir = ScratchDir("run_exit");
  EXPECT_EQ(RunCli("run --config " + Quote(ConfigPath("plain_gda.json")), dir)
                .exit_code,
            kExitDivergence);
  const CommandResult zero = RunCli(
      "run --config " + Quote(ConfigPath("acceptance.json")) + " --steps 0",
      dir);
  EXPECT_EQ(zero.exit_code, kExitUsage);
  EXPECT_FALSE(zero.err.empty());
  EXPECT_EQ(RunCli("run --config " + Quote(ConfigPath("acceptance.json")) +
                       " --steps 10 --out /proc/agda/trace.csv",
                   dir)
                .exit_code,
            kExitIo);
  EXPECT_EQ(RunCli("run --problem nope:n=1", dir).exit_code, kExitUsage);
  EXPECT_EQ(RunCli("run --config missing.json", dir).exit_code, kExitIo);
  EXPECT_EQ(RunCli("", dir).exit_code, kExitUsage);
  EXPECT_EQ(RunCli("--help", dir).exit_code, kExitOk);
  EXPECT_EQ(RunCli("run --bogus-flag", dir).exit_code, kExitUsage);
}

TEST(RunTest, DivergenceStillWritesPartialTrace) {
  const fs::path dir = ScratchDir("run_divergence");
  const CommandResult r = RunCli(
      "run --config " + Quote(ConfigPath("plain_gda.json")) + " --out d.csv",
      dir);
  ASSERT_EQ(r.exit_code, kExitDivergence);
  EXPECT_NE(r.err.find("69353"), std::string::npos) << r.err;
}

TEST(VerifyCommandTest, CliMatchesLibraryAndPasses) {
  const fs::path dir = ScratchDir("verify_bytes");
  ExperimentConfig config = Acceptance(5000);
  config.out = (dir / "trace.csv").string();
  config.report = (dir / "lib.json").string();
  std::ostringstream out, err;
  ASSERT_EQ(CmdRun(config, out, err), kExitOk);
  std::ostringstream vout, verr;
  ASSERT_EQ(CmdVerify(config.out, config, vout, verr), kExitOk) << verr.str();

  const CommandResult cli =
      RunCli("verify --config " + Quote(ConfigPath("acceptance.json")) +
                 " --steps 5000 --trace trace.csv --report cli.json",
             dir);
  ASSERT_EQ(cli.exit_code, kExitOk) << cli.err;
  EXPECT_EQ(Slurp(dir / "cli.json"), Slurp(dir / "lib.json"));
  EXPECT_EQ(cli.out, vout.str());
}

TEST(VerifyCommandTest, FailingCheckExitsOne) {
  const fs::path dir = ScratchDir("verify_fail");
  const std::string base = "--config " + Quote(ConfigPath("plain_gda.json")) +
                           " --steps 20000 --record-every 10";
  ASSERT_EQ(RunCli("run " + base, dir).exit_code, kExitOk);
  const CommandResult r =
      RunCli("verify " + base + " --trace trace_gda.csv", dir);
  EXPECT_EQ(r.exit_code, kExitCheckFailed) << r.err;
  EXPECT_NE(r.out.find("check bounded_iterates: fail"), std::string::npos);
  EXPECT_NE(r.out.find("check last_iterate_rate: inapplicable"),
            std::string::npos);
}

TEST(VerifyCommandTest, MismatchedConfigIsUsageError) {
  const fs::path dir = ScratchDir("verify_mismatch");
  const std::string config = "--config " + Quote(ConfigPath("acceptance.json"));
  ASSERT_EQ(RunCli("run " + config + " --steps 100", dir).exit_code, 0);
  const CommandResult r =
      RunCli("verify " + config +
                 " --steps 100 --schedule anchored-new:gamma=4"
                 " --trace trace.csv",
             dir);
  EXPECT_EQ(r.exit_code, kExitUsage);
  EXPECT_NE(r.err.find("gamma=4"), std::string::npos) << r.err;
}

TEST(VerifyCommandTest, TruncatedTraceReportsLine) {
  const fs::path dir = ScratchDir("verify_truncated");
  const std::string config = "--config " + Quote(ConfigPath("acceptance.json"));
  ASSERT_EQ(RunCli("run " + config + " --steps 100", dir).exit_code, 0);
  std::string text = Slurp(dir / "trace.csv");
  text.resize(text.size() - 20);
  {
    std::ofstream f(dir / "trace.csv", std::ios::binary | std::ios::trunc);
    f << text;
  }
  const CommandResult r =
      RunCli("verify " + config + " --steps 100 --trace trace.csv", dir);
  EXPECT_EQ(r.exit_code, kExitUsage);
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST(VerifyCommandTest, SelectedChecksOnly) {
  const fs::path dir = ScratchDir("verify_select");
  const std::string config = "--config " + Quote(ConfigPath("acceptance.json"));
  ASSERT_EQ(RunCli("run " + config + " --steps 1000", dir).exit_code, 0);
  const CommandResult r = RunCli("verify " + config +
                                     " --steps 1000 --trace trace.csv"
                                     " --checks one_step,bounded_iterates",
                                 dir);
  ASSERT_EQ(r.exit_code, kExitOk) << r.err;
  int checks = 0;
  for (const std::string& line : Lines(r.out)) {
    if (line.rfind("check ", 0) == 0) ++checks;
  }
  EXPECT_EQ(checks, 2);
  EXPECT_EQ(RunCli("verify " + config +
                       " --steps 1000 --trace trace.csv --checks nope",
                   dir)
                .exit_code,
            kExitUsage);
}

SweepConfig GammaSweep(const fs::path& out, int parallelism) {
  SweepConfig sweep;
  sweep.base = Acceptance(3000);
  sweep.gammas = {8, 2, 4};
  sweep.parallelism = parallelism;
  sweep.out = out.string();
  return sweep;
}

TEST(SweepTest, ParallelismDoesNotChangeOutput) {
  const fs::path dir = ScratchDir("sweep_parallel");
  std::ostringstream out1, out3, err;
  ASSERT_EQ(CmdSweep(GammaSweep(dir / "p1.csv", 1), out1, err), kExitOk)
      << err.str();
  ASSERT_EQ(CmdSweep(GammaSweep(dir / "p3.csv", 3), out3, err), kExitOk);
  EXPECT_EQ(Slurp(dir / "p1.csv"), Slurp(dir / "p3.csv"));
  const std::vector<std::string> lines = Lines(Slurp(dir / "p1.csv"));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1].rfind("\"anchored-new:gamma=2\",2,", 0) == 0 ||
                lines[1].rfind("anchored-new:gamma=2,2,", 0) == 0,
            true)
      << lines[1];
  for (size_t i = 1; i < lines.size(); ++i) {
    EXPECT_NE(lines[i].find(",6,0,0"), std::string::npos) << lines[i];
  }

  const CommandResult cli =
      RunCli("sweep --config " + Quote(ConfigPath("acceptance.json")) +
                 " --steps 3000 --gamma 8,2,4 --parallel 2 --out cli.csv",
             dir);
  ASSERT_EQ(cli.exit_code, kExitOk) << cli.err;
  EXPECT_EQ(Slurp(dir / "cli.csv"), Slurp(dir / "p1.csv"));
}

TEST(SweepTest, EmptyAxesEqualsSingleRun) {
  const fs::path dir = ScratchDir("sweep_single");
  SweepConfig sweep;
  sweep.base = Acceptance(1500);
  sweep.out = (dir / "s.csv").string();
  std::ostringstream out, err;
  ASSERT_EQ(CmdSweep(sweep, out, err), kExitOk);
  const std::vector<std::string> lines = Lines(Slurp(dir / "s.csv"));
  ASSERT_EQ(lines.size(), 2u);
  const RunResult run =
      agda::Run(testing::UnitBilinear(), ResolveSchedule(sweep.base),
                ResolveZ0(sweep.base), 1500);
  std::ostringstream expected;
  expected.precision(17);
  expected << run.trace.rows.back().grad_norm_sq;
  EXPECT_NE(lines[1].find(",completed,," + expected.str() + ","),
            std::string::npos)
      << lines[1] << " vs " << expected.str();
}

TEST(SweepTest, Rejections) {
  const fs::path dir = ScratchDir("sweep_reject");
  const std::string config = "--config " + Quote(ConfigPath("acceptance.json"));
  EXPECT_EQ(RunCli("sweep " + config +
                       " --gamma 2,4,8 --steps-axis 1e2,1e3"
                       " --cap 5",
                   dir)
                .exit_code,
            kExitUsage);
  EXPECT_EQ(RunCli("sweep " + config + " --p 0.5", dir).exit_code, kExitUsage);
  EXPECT_EQ(
      RunCli("sweep " + config + " --gamma 1.5 --steps 10", dir).exit_code,
      kExitUsage);
  EXPECT_EQ(
      RunCli("sweep " + config + " --parallel 0 --steps 10", dir).exit_code,
      kExitUsage);
  EXPECT_FALSE(fs::exists(dir / "sweep.csv"));
}

TEST(SweepTest, RyuPAxisSlopes) {
  const fs::path dir = ScratchDir("sweep_ryu");
  const CommandResult r =
      RunCli("sweep --config " + Quote(ConfigPath("ryu.json")) +
                 " --p 0.6,0.75,0.9 --steps 1e5 --record-every 10",
             dir);
  ASSERT_EQ(r.exit_code, kExitOk) << r.err;
  const std::vector<std::string> lines = Lines(Slurp(dir / "sweep.csv"));
  ASSERT_EQ(lines.size(), 4u);
  const double ps[] = {0.6, 0.75, 0.9};
  for (size_t i = 1; i < lines.size(); ++i) {
    // Slope is the 8th unquoted field from the right-hand numeric columns.
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (const char c : lines[i]) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        fields.push_back(field);
        field.clear();
      } else {
        field += c;
      }
    }
    fields.push_back(field);
    ASSERT_EQ(fields.size(), 12u) << lines[i];
    const double slope = std::stod(fields[7]);
    EXPECT_LE(slope, -(2.0 - 2.0 * ps[i - 1]) + 0.15) << lines[i];
  }
}

ExperimentConfig WithSchedule(const std::string& schedule, int64_t steps) {
  ExperimentConfig config = Acceptance(steps);
  config.schedule = schedule;
  return config;
}

TEST(CompareTest, CliMatchesLibraryAndOrders) {
  const fs::path dir = ScratchDir("compare_bytes");
  const std::vector<ExperimentConfig> configs = {
      WithSchedule("anchored-new:gamma=2", 20000),
      WithSchedule("anchored-ryu:p=0.75,gamma=2", 20000),
      WithSchedule("plain-gda:alpha=0.01", 20000)};
  std::ostringstream out, err;
  ASSERT_EQ(CmdCompare(configs, (dir / "lib.csv").string(), out, err), kExitOk)
      << err.str();
  const CommandResult cli =
      RunCli("compare --config " + Quote(ConfigPath("acceptance.json")) +
                 " --steps 20000 --out cli.csv"
                 " --schedule anchored-new:gamma=2"
                 " --schedule anchored-ryu:p=0.75,gamma=2"
                 " --schedule plain-gda:alpha=0.01",
             dir);
  // --config and --schedule lists are exclusive.
  EXPECT_EQ(cli.exit_code, kExitUsage);

  const CommandResult by_schedule = RunCli(
      "compare --problem " + Quote(ConfigPath("problems/bilinear_2d.json")) +
          " --steps 20000 --out cli.csv"
          " --schedule anchored-new:gamma=2"
          " --schedule anchored-ryu:p=0.75,gamma=2"
          " --schedule plain-gda:alpha=0.01",
      dir);
  ASSERT_EQ(by_schedule.exit_code, kExitOk) << by_schedule.err;
  EXPECT_EQ(Slurp(dir / "cli.csv"), Slurp(dir / "lib.csv"));

  const auto slope_of = [&](const std::string& label) {
    for (const std::string& line : Lines(Slurp(dir / "lib.csv"))) {
      const std::string key = "# slope[" + label + "]=";
      if (line.rfind(key, 0) == 0) return std::stod(line.substr(key.size()));
    }
    ADD_FAILURE() << "no slope for " << label;
    return 0.0;
  };
  const double s_new = slope_of("anchored-new:gamma=2");
  const double s_ryu = slope_of("anchored-ryu:p=0.75,gamma=2");
  const double s_gda = slope_of("plain-gda:alpha=0.01");
  EXPECT_LT(s_new, s_ryu);
  EXPECT_LT(s_ryu, s_gda);
}

TEST(CompareTest, IdenticalConfigsGiveIdenticalColumns) {
  const fs::path dir = ScratchDir("compare_same");
  const std::vector<ExperimentConfig> configs = {
      WithSchedule("anchored-new:gamma=2", 3000),
      WithSchedule("anchored-new:gamma=2", 3000)};
  std::ostringstream out, err;
  ASSERT_EQ(CmdCompare(configs, (dir / "c.csv").string(), out, err), kExitOk);
  bool header_seen = false;
  for (const std::string& line : Lines(Slurp(dir / "c.csv"))) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      EXPECT_NE(line.find("anchored-new:gamma=2#2"), std::string::npos);
      continue;
    }
    const size_t a = line.find(',', line.find(',') + 1);
    const std::string rest = line.substr(a + 1);
    const size_t mid = rest.find(',', rest.find(',') + 1);
    EXPECT_EQ(rest.substr(0, mid), rest.substr(mid + 1)) << line;
  }
  EXPECT_TRUE(header_seen);
}

TEST(CompareTest, Rejections) {
  const fs::path dir = ScratchDir("compare_reject");
  std::ostringstream out, err;
  ExperimentConfig a = WithSchedule("anchored-new:gamma=2", 100);
  ExperimentConfig b = WithSchedule("anchored-new:gamma=4", 100);
  b.z0 = std::vector<double>{1.0, 2.0};
  EXPECT_EQ(CmdCompare({a, b}, (dir / "c.csv").string(), out, err), kExitUsage);
  EXPECT_EQ(CmdCompare({a}, (dir / "c.csv").string(), out, err), kExitUsage);
  b = WithSchedule("anchored-new:gamma=4", 100);
  b.problem = ParseProblem("bilinear:n=2,m=2,seed=3");
  EXPECT_EQ(CmdCompare({a, b}, (dir / "c.csv").string(), out, err), kExitUsage);
  EXPECT_FALSE(fs::exists(dir / "c.csv"));
}

TEST(ScheduleAuditTest, PassesForAdmissibleGammas) {
  AuditConfig audit;
  audit.t_max = 100000;
  std::ostringstream out, err;
  EXPECT_EQ(CmdScheduleAudit(audit, out, err), kExitOk) << err.str();
  EXPECT_NE(out.str().find("schedule-audit: pass"), std::string::npos);
}

TEST(ScheduleAuditTest, Rejections) {
  std::ostringstream out, err;
  AuditConfig audit;
  audit.t_max = 100;
  audit.gammas = {1.5};
  EXPECT_EQ(CmdScheduleAudit(audit, out, err), kExitUsage);
  audit.gammas = {2.0};
  audit.schedule = "anchored-ryu:p=0.75";
  EXPECT_EQ(CmdScheduleAudit(audit, out, err), kExitUsage);
}

TEST(ScheduleAuditTest, MarginsPrintOneLinePerStep) {
  const fs::path dir = ScratchDir("audit_margins");
  const CommandResult r =
      RunCli("schedule-audit --gamma 2 --t-max 10 --margins", dir);
  ASSERT_EQ(r.exit_code, kExitOk) << r.err;
  int lines = 0;
  for (const std::string& line : Lines(r.out)) {
    if (line.rfind("  t=", 0) == 0) ++lines;
  }
  EXPECT_GE(lines, 10);
  EXPECT_LE(lines, 11);
}

TEST(ConfigTest, ShippedConfigsLoad) {
  for (const char* name : {"acceptance.json", "ryu.json", "plain_gda.json",
                           "quadratic_saddle.json"}) {
    const ExperimentConfig config = LoadExperimentConfig(ConfigPath(name));
    ASSERT_TRUE(config.problem.has_value()) << name;
    EXPECT_NO_THROW(ResolveSchedule(config)) << name;
    EXPECT_NO_THROW(ResolveZ0(config)) << name;
  }
  const ExperimentConfig acceptance =
      LoadExperimentConfig(ConfigPath("acceptance.json"));
  EXPECT_EQ(acceptance.steps, 100000);
  EXPECT_EQ(acceptance.problem->lipschitz_k, 1.0);
}

TEST(ConfigTest, UnknownKeyIsUsageError) {
  try {
    ExperimentConfigFromJson(R"({"steps": 10, "stepz": 3})");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
    EXPECT_NE(std::string(e.what()).find("stepz"), std::string::npos);
  }
  EXPECT_THROW(ExperimentConfigFromJson("{not json"), Error);
  EXPECT_THROW(ExperimentConfigFromJson(R"({"steps": "many"})"), Error);
}

TEST(ConfigTest, FlagsOverrideConfig) {
  const fs::path dir = ScratchDir("config_override");
  const CommandResult r =
      RunCli("run --config " + Quote(ConfigPath("acceptance.json")) +
                 " --steps 50 --schedule anchored-new:gamma=4 --out o.csv",
             dir);
  ASSERT_EQ(r.exit_code, kExitOk) << r.err;
  const Trace trace = ReadTraceFile((dir / "o.csv").string());
  EXPECT_EQ(trace.rows.back().t, 50);
  EXPECT_EQ(trace.metadata.schedule, "anchored-new:gamma=4");
}

TEST(OutputDirTest, RelativePathsGoUnderEnvDirectory) {
  const fs::path dir = ScratchDir("output_dir");
  ::setenv(kOutputDirEnv, (dir / "outputs").c_str(), 1);
  const CommandResult r = RunCli(
      "run --config " + Quote(ConfigPath("acceptance.json")) + " --steps 20",
      dir);
  EXPECT_EQ(ResolveOutputPath("x.csv"), (dir / "outputs" / "x.csv").string());
  EXPECT_EQ(ResolveOutputPath("/abs/x.csv"), "/abs/x.csv");
  ::unsetenv(kOutputDirEnv);
  ASSERT_EQ(r.exit_code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "outputs" / "trace.csv"));
  EXPECT_FALSE(fs::exists(dir / "trace.csv"));
  EXPECT_EQ(ResolveOutputPath("x.csv"), "x.csv");
}

}  // namespace
}  // namespace agda
