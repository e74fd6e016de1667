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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>

#include "agda/solver.h"
#include "agda/verify.h"
#include "json.hpp"
#include "parse_util.h"

namespace agda {

namespace {

namespace fs = std::filesystem;
using ::Eigen::MatrixXd;
using ::Eigen::VectorXd;
using internal::FormatDouble;
using internal::FormatDouble17;
using nlohmann::json;

json ParseJson(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kUsage, what + ": " + e.what());
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

MatrixXd MatrixFromJson(const json& value, const char* name) {
  if (!value.is_array() || value.empty()) {
    throw Error(ErrorKind::kUsage,
                std::string(name) + " must be a non-empty nested array");
  }
  const size_t rows = value.size();
  const size_t cols = value.front().is_array() ? value.front().size() : 0;
  if (cols == 0) {
    throw Error(ErrorKind::kUsage,
                std::string(name) + " must be given row-major as arrays");
  }
  MatrixXd matrix(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (!value[i].is_array() || value[i].size() != cols) {
      throw Error(ErrorKind::kUsage, std::string(name) + " has ragged rows");
    }
    for (size_t j = 0; j < cols; ++j) {
      if (!value[i][j].is_number()) {
        throw Error(ErrorKind::kUsage,
                    std::string(name) + " has a non-numeric entry");
      }
      matrix(i, j) = value[i][j].get<double>();
    }
  }
  return matrix;
}

template <typename T>
T Get(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kUsage,
                std::string("bad value for '") + key + "': " + e.what());
  }
}

void RejectUnknownKeys(const json& doc, const std::set<std::string>& allowed,
                       const char* what) {
  for (const auto& item : doc.items()) {
    if (allowed.count(item.key()) == 0) {
      throw Error(ErrorKind::kUsage,
                  std::string("unknown key '") + item.key() + "' in " + what);
    }
  }
}

ProblemSpec ProblemFromJsonDoc(const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorKind::kUsage, "problem must be a JSON object");
  }
  RejectUnknownKeys(doc,
                    {"id", "kind", "n", "m", "A", "P", "Q", "seed", "pq_scale",
                     "lipschitz_K", "saddle"},
                    "problem");
  const std::string kind = Get<std::string>(doc, "kind");
  ProblemSpec problem;
  if (doc.contains("A")) {
    if (doc.contains("seed")) {
      throw Error(ErrorKind::kUsage, "give either A or seed, not both");
    }
    MatrixXd a = MatrixFromJson(doc["A"], "A");
    if (kind == "bilinear") {
      problem = MakeBilinear(std::move(a));
    } else if (kind == "quadratic-saddle") {
      problem =
          MakeQuadraticSaddle(MatrixFromJson(doc.at("P"), "P"),
                              MatrixFromJson(doc.at("Q"), "Q"), std::move(a));
    } else {
      throw Error(ErrorKind::kUsage, "unknown problem kind '" + kind + "'");
    }
  } else if (doc.contains("seed")) {
    const int64_t n = Get<int64_t>(doc, "n");
    const int64_t m = Get<int64_t>(doc, "m");
    const uint64_t seed = Get<uint64_t>(doc, "seed");
    if (kind == "bilinear") {
      problem = RandomBilinear(n, m, seed);
    } else if (kind == "quadratic-saddle") {
      problem = RandomQuadraticSaddle(n, m, Get<double>(doc, "pq_scale"), seed);
    } else {
      throw Error(ErrorKind::kUsage, "unknown problem kind '" + kind + "'");
    }
  } else {
    throw Error(ErrorKind::kUsage, "problem needs A or seed");
  }
  if (doc.contains("n") && Get<int64_t>(doc, "n") != problem.n) {
    throw Error(ErrorKind::kUsage, "n does not match the matrix shape");
  }
  if (doc.contains("m") && Get<int64_t>(doc, "m") != problem.m) {
    throw Error(ErrorKind::kUsage, "m does not match the matrix shape");
  }
  if (doc.contains("id")) problem.id = Get<std::string>(doc, "id");
  if (doc.contains("lipschitz_K")) {
    problem.lipschitz_k = Get<double>(doc, "lipschitz_K");
  }
  if (doc.contains("saddle")) {
    if (doc["saddle"].is_null()) {
      problem.saddle_known = false;
    } else {
      const auto coords = Get<std::vector<double>>(doc, "saddle");
      problem.saddle = Point(
          Eigen::Map<const VectorXd>(coords.data(), coords.size()), problem.n);
    }
  }
  ValidateProblem(problem);
  return problem;
}

bool IsJsonPath(const std::string& text) {
  return text.size() > 5 && text.substr(text.size() - 5) == ".json";
}

std::string JoinBase(const std::string& base_dir, const std::string& path) {
  if (base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).string();
}

std::string FormatOptionalDouble(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble(*v) : std::string();
}

// Quotes a CSV field that contains a comma or quote.
std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"") == std::string::npos) return text;
  std::string quoted = "\"";
  for (const char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

bool SameNumber(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Extends selected checks: {"all"} or empty means every check.
std::vector<std::string> NormalizeChecks(const std::vector<std::string>& in) {
  if (in.empty() || (in.size() == 1 && in.front() == "all")) return {};
  return in;
}

int ReportError(const Error& e, std::ostream& err) {
  err << "error: " << ErrorKindName(e.kind()) << ": " << e.what() << '\n';
  return ExitCodeFor(e.kind());
}

struct ResolvedExperiment {
  ProblemSpec problem;
  Schedule schedule;
  Point z0;
};

ResolvedExperiment Resolve(const ExperimentConfig& config) {
  if (!config.problem.has_value()) {
    throw Error(ErrorKind::kUsage, "no problem given");
  }
  if (config.steps < 1) {
    throw Error(ErrorKind::kUsage,
                "steps must be >= 1, got " + std::to_string(config.steps));
  }
  if (config.record_every < 1) {
    throw Error(ErrorKind::kUsage, "record_every must be >= 1");
  }
  Schedule schedule = ResolveSchedule(config);
  return {*config.problem, schedule, ResolveZ0(config)};
}

void PrintWarnings(const Schedule& schedule, std::ostream& err) {
  for (const std::string& w : schedule.Warnings()) {
    err << "warning: " << w << '\n';
  }
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

double LastGradNormSq(const Trace& trace) {
  return trace.rows.empty() ? 0.0 : trace.rows.back().grad_norm_sq;
}

std::optional<RateFit> TryFit(const Trace& trace, int64_t t_from,
                              std::string* note) {
  const int64_t last = trace.rows.empty() ? 0 : trace.rows.back().t;
  try {
    return FitRate(trace, t_from, last);
  } catch (const Error& e) {
    if (note != nullptr) *note = e.what();
    return std::nullopt;
  }
}

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNumeric:
    case ErrorKind::kDivergence:
      return kExitDivergence;
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kUsage:
    case ErrorKind::kDomain:
    case ErrorKind::kData:
    case ErrorKind::kInapplicable:
    case ErrorKind::kUnsupported:
      return kExitUsage;
  }
  return kExitUsage;
}

std::string ResolveOutputPath(const std::string& path) {
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir == nullptr || *dir == '\0' || fs::path(path).is_absolute()) {
    return path;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                std::string("cannot create output directory '") + dir +
                    "': " + ec.message());
  }
  return (fs::path(dir) / path).string();
}

ProblemSpec ProblemFromJson(const std::string& json_text) {
  return ProblemFromJsonDoc(ParseJson(json_text, "problem JSON"));
}

ProblemSpec LoadProblem(const std::string& text_or_path,
                        const std::string& base_dir) {
  if (IsJsonPath(text_or_path)) {
    return ProblemFromJson(ReadFile(JoinBase(base_dir, text_or_path)));
  }
  return ParseProblem(text_or_path);
}

ExperimentConfig ExperimentConfigFromJson(const std::string& json_text,
                                          const std::string& base_dir) {
  const json doc = ParseJson(json_text, "config JSON");
  if (!doc.is_object()) {
    throw Error(ErrorKind::kUsage, "config must be a JSON object");
  }
  RejectUnknownKeys(doc,
                    {"problem", "schedule", "z0", "steps", "record_every",
                     "checks", "out", "report", "seed"},
                    "config");
  ExperimentConfig config;
  if (doc.contains("problem")) {
    const json& p = doc["problem"];
    config.problem = p.is_string() ? LoadProblem(p.get<std::string>(), base_dir)
                                   : ProblemFromJsonDoc(p);
  }
  if (doc.contains("schedule")) {
    config.schedule = Get<std::string>(doc, "schedule");
  }
  if (doc.contains("z0")) {
    if (doc["z0"].is_string()) {
      config.z0 = ParseZ0(doc["z0"].get<std::string>());
    } else {
      config.z0 = Get<std::vector<double>>(doc, "z0");
    }
  }
  if (doc.contains("steps")) config.steps = Get<int64_t>(doc, "steps");
  if (doc.contains("record_every")) {
    config.record_every = Get<int64_t>(doc, "record_every");
  }
  if (doc.contains("checks")) {
    if (doc["checks"].is_string()) {
      config.checks = {doc["checks"].get<std::string>()};
    } else {
      config.checks = Get<std::vector<std::string>>(doc, "checks");
    }
  }
  if (doc.contains("out")) config.out = Get<std::string>(doc, "out");
  if (doc.contains("report")) config.report = Get<std::string>(doc, "report");
  if (doc.contains("seed")) config.seed = Get<uint64_t>(doc, "seed");
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  return ExperimentConfigFromJson(ReadFile(path),
                                  fs::path(path).parent_path().string());
}

std::variant<std::string, std::vector<double>> ParseZ0(
    const std::string& text) {
  if (text == "ones" || text == "e1" || text == "saddle") return text;
  std::vector<double> coords;
  std::string_view rest(text);
  while (true) {
    const size_t comma = rest.find(',');
    coords.push_back(internal::ParseDouble(rest.substr(0, comma), "z0"));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return coords;
}

Point ResolveZ0(const ExperimentConfig& config) {
  if (!config.problem.has_value()) {
    throw Error(ErrorKind::kUsage, "no problem given");
  }
  const ProblemSpec& problem = *config.problem;
  const int64_t dim = problem.n + problem.m;
  if (const auto* preset = std::get_if<std::string>(&config.z0)) {
    if (*preset == "ones") return Point(VectorXd::Ones(dim), problem.n);
    if (*preset == "e1") return Point(VectorXd::Unit(dim, 0), problem.n);
    if (*preset == "saddle") {
      if (!problem.saddle_known) {
        throw Error(ErrorKind::kUsage, "z0 'saddle' needs a known saddle");
      }
      return problem.saddle;
    }
    throw Error(ErrorKind::kUsage, "unknown z0 preset '" + *preset + "'");
  }
  const auto& coords = std::get<std::vector<double>>(config.z0);
  if (static_cast<int64_t>(coords.size()) != dim) {
    throw Error(ErrorKind::kUsage, "z0 has " + std::to_string(coords.size()) +
                                       " coordinates, problem expects " +
                                       std::to_string(dim));
  }
  return Point(Eigen::Map<const VectorXd>(coords.data(), dim), problem.n);
}

Schedule ResolveSchedule(const ExperimentConfig& config) {
  if (!config.problem.has_value()) {
    throw Error(ErrorKind::kUsage, "no problem given");
  }
  return ParseSchedule(config.schedule, config.problem->lipschitz_k);
}

int CmdRun(const ExperimentConfig& config, std::ostream& out,
           std::ostream& err) {
  try {
    const ResolvedExperiment x = Resolve(config);
    PrintWarnings(x.schedule, err);
    const auto start = std::chrono::steady_clock::now();
    const RunResult result = Run(x.problem, x.schedule, x.z0, config.steps,
                                 config.record_every, config.seed);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    WriteTraceFile(result.trace, ResolveOutputPath(config.out));
    if (result.failure.has_value()) {
      err << "error: " << ErrorKindName(result.failure->kind) << ": "
          << result.failure->message << " (halted at t=" << result.failure->t
          << ")\n";
      return kExitDivergence;
    }
    out << "run: problem=" << x.problem.id
        << " schedule=" << x.schedule.Descriptor() << " T=" << config.steps
        << " final_grad_norm_sq="
        << FormatDouble17(LastGradNormSq(result.trace))
        << " wall_time_s=" << wall << '\n';
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int CmdVerify(const std::string& trace_path, const ExperimentConfig& config,
              std::ostream& out, std::ostream& err) {
  try {
    const ResolvedExperiment x = Resolve(config);
    const Trace trace = ReadTraceFile(trace_path);

    std::vector<std::string> mismatches;
    const TraceMetadata& meta = trace.metadata;
    auto mismatch = [&](const char* field, const std::string& in_trace,
                        const std::string& in_config) {
      mismatches.push_back(std::string(field) + ": trace=" + in_trace +
                           " config=" + in_config);
    };
    if (meta.problem_id != x.problem.id) {
      mismatch("problem", meta.problem_id, x.problem.id);
    }
    if (meta.schedule != x.schedule.Descriptor()) {
      mismatch("schedule", meta.schedule, x.schedule.Descriptor());
    }
    if (!SameNumber(meta.lipschitz_k, x.problem.lipschitz_k)) {
      mismatch("K", FormatDouble(meta.lipschitz_k),
               FormatDouble(x.problem.lipschitz_k));
    }
    const std::optional<double> gamma =
        x.schedule.anchored() ? std::optional<double>(x.schedule.gamma())
                              : std::nullopt;
    if (meta.gamma.has_value() != gamma.has_value() ||
        (gamma.has_value() && !SameNumber(*meta.gamma, *gamma))) {
      mismatch("gamma", FormatOptionalDouble(meta.gamma),
               FormatOptionalDouble(gamma));
    }
    const TraceRow* row0 = trace.Find(0);
    if (row0 != nullptr && row0->dist_opt_sq.has_value() &&
        x.problem.saddle_known) {
      const double expected =
          (x.z0.coords() - x.problem.saddle.coords()).squaredNorm();
      if (!SameNumber(*row0->dist_opt_sq, expected)) {
        mismatch("z0 (||z0-z*||^2)", FormatDouble(*row0->dist_opt_sq),
                 FormatDouble(expected));
      }
    }
    if (!mismatches.empty()) {
      err << "error: trace does not match the configuration\n";
      for (const std::string& m : mismatches) err << "  " << m << '\n';
      return kExitUsage;
    }

    VerifyOptions options;
    options.checks = NormalizeChecks(config.checks);
    const VerificationReport report =
        VerifyTrace(x.problem, x.schedule, x.z0, trace, options);
    WriteTextFile(ResolveOutputPath(config.report), ReportToJson(report));
    for (const CheckResult& check : report.checks) {
      out << "check " << check.name << ": " << CheckStatusName(check.status);
      if (check.status != CheckStatus::kInapplicable) {
        out << " worst_margin=" << FormatDouble(check.worst_margin)
            << " worst_t=" << check.worst_t;
      }
      out << " (" << check.detail << ")\n";
    }
    if (report.rate_fit.has_value()) {
      out << "rate_fit: slope=" << FormatDouble(report.rate_fit->slope)
          << " r_squared=" << FormatDouble(report.rate_fit->r_squared) << '\n';
    }
    return report.AllApplicablePass() ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

namespace {

struct SweepCell {
  double gamma = 0.0;
  double p = 0.0;
  int64_t steps = 0;
  std::string schedule;
};

struct SweepRow {
  std::string status;
  std::optional<int64_t> halted_at;
  double final_grad_norm_sq = 0.0;
  std::optional<RateFit> fit;
  int passed = 0;
  int failed = 0;
  int inapplicable = 0;
};

std::string CellSchedule(const Schedule& base, double gamma, double p) {
  switch (base.variant()) {
    case ScheduleVariant::kAnchoredNew:
      return "anchored-new:gamma=" + FormatDouble(gamma);
    case ScheduleVariant::kAnchoredRyu:
      return "anchored-ryu:p=" + FormatDouble(p) +
             ",gamma=" + FormatDouble(gamma);
    case ScheduleVariant::kPlainGda:
      return base.Descriptor();
  }
  return base.Descriptor();
}

SweepRow RunCell(const ExperimentConfig& base, const SweepCell& cell) {
  SweepRow row;
  try {
    ExperimentConfig config = base;
    config.schedule = cell.schedule;
    config.steps = cell.steps;
    const ResolvedExperiment x = Resolve(config);
    const RunResult result = Run(x.problem, x.schedule, x.z0, config.steps,
                                 config.record_every, config.seed);
    row.final_grad_norm_sq = LastGradNormSq(result.trace);
    row.status = "completed";
    if (result.failure.has_value()) {
      row.status = result.failure->kind == ErrorKind::kDivergence
                       ? "diverged"
                       : "numeric_error";
      row.halted_at = result.failure->t;
    }
    VerifyOptions options;
    options.checks = NormalizeChecks(config.checks);
    const VerificationReport report =
        VerifyTrace(x.problem, x.schedule, x.z0, result.trace, options);
    row.fit = report.rate_fit;
    for (const CheckResult& check : report.checks) {
      switch (check.status) {
        case CheckStatus::kPass:
          ++row.passed;
          break;
        case CheckStatus::kFail:
          ++row.failed;
          break;
        case CheckStatus::kInapplicable:
          ++row.inapplicable;
          break;
      }
    }
  } catch (const Error& e) {
    row.status = std::string("error: ") + ErrorKindName(e.kind());
  }
  return row;
}

template <typename T>
std::vector<T> SortedUnique(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace

int CmdSweep(const SweepConfig& sweep, std::ostream& out, std::ostream& err) {
  try {
    const ResolvedExperiment base = Resolve(sweep.base);
    const Schedule& schedule = base.schedule;
    if (!sweep.gammas.empty() && !schedule.anchored()) {
      throw Error(ErrorKind::kUsage, "gamma axis needs an anchored schedule");
    }
    if (!sweep.ps.empty() &&
        schedule.variant() != ScheduleVariant::kAnchoredRyu) {
      throw Error(ErrorKind::kUsage, "p axis needs an anchored-ryu schedule");
    }
    if (sweep.parallelism < 1) {
      throw Error(ErrorKind::kUsage, "parallelism must be >= 1");
    }
    const auto gammas = sweep.gammas.empty()
                            ? std::vector<double>{schedule.gamma()}
                            : SortedUnique(sweep.gammas);
    const auto ps = sweep.ps.empty() ? std::vector<double>{schedule.p()}
                                     : SortedUnique(sweep.ps);
    const auto steps = sweep.steps.empty()
                           ? std::vector<int64_t>{sweep.base.steps}
                           : SortedUnique(sweep.steps);
    const double cell_count = static_cast<double>(gammas.size()) *
                              static_cast<double>(ps.size()) *
                              static_cast<double>(steps.size());
    if (cell_count > static_cast<double>(sweep.max_runs)) {
      throw Error(ErrorKind::kUsage, "sweep has " + FormatDouble(cell_count) +
                                         " cells, above the cap of " +
                                         std::to_string(sweep.max_runs));
    }
    std::vector<SweepCell> cells;
    for (const double gamma : gammas) {
      for (const double p : ps) {
        for (const int64_t t : steps) {
          SweepCell cell{gamma, p, t, CellSchedule(schedule, gamma, p)};
          // Validates every cell before any run starts.
          ParseSchedule(cell.schedule, base.problem.lipschitz_k);
          if (t < 1) throw Error(ErrorKind::kUsage, "T axis needs T >= 1");
          cells.push_back(std::move(cell));
        }
      }
    }
    PrintWarnings(schedule, err);

    std::vector<SweepRow> rows(cells.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next++; i < cells.size(); i = next++) {
        rows[i] = RunCell(sweep.base, cells[i]);
      }
    };
    const size_t workers =
        std::min<size_t>(static_cast<size_t>(sweep.parallelism), cells.size());
    std::vector<std::thread> threads;
    for (size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
    worker();
    for (std::thread& thread : threads) thread.join();

    std::ostringstream csv;
    csv << "schedule,gamma,p,T,status,halted_at,final_grad_norm_sq,slope,"
           "r_squared,checks_pass,checks_fail,checks_inapplicable\n";
    const bool ryu = schedule.variant() == ScheduleVariant::kAnchoredRyu;
    for (size_t i = 0; i < cells.size(); ++i) {
      const SweepCell& cell = cells[i];
      const SweepRow& row = rows[i];
      csv << CsvField(cell.schedule) << ','
          << (schedule.anchored() ? FormatDouble(cell.gamma) : "") << ','
          << (ryu ? FormatDouble(cell.p) : "") << ',' << cell.steps << ','
          << row.status << ','
          << (row.halted_at ? std::to_string(*row.halted_at) : "") << ','
          << FormatDouble17(row.final_grad_norm_sq) << ','
          << (row.fit ? FormatDouble17(row.fit->slope) : "") << ','
          << (row.fit ? FormatDouble17(row.fit->r_squared) : "") << ','
          << row.passed << ',' << row.failed << ',' << row.inapplicable << '\n';
    }
    WriteTextFile(ResolveOutputPath(sweep.out), csv.str());
    out << csv.str();
    for (const SweepRow& row : rows) {
      if (row.status.rfind("error", 0) == 0) {
        err << "error: a sweep cell failed to run\n";
        return kExitUsage;
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int CmdCompare(const std::vector<ExperimentConfig>& configs,
               const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  try {
    if (configs.size() < 2) {
      throw Error(ErrorKind::kUsage, "compare needs at least two configs");
    }
    std::vector<ResolvedExperiment> resolved;
    for (const ExperimentConfig& config : configs) {
      resolved.push_back(Resolve(config));
    }
    const ResolvedExperiment& first = resolved.front();
    for (size_t i = 1; i < resolved.size(); ++i) {
      if (resolved[i].problem.id != first.problem.id ||
          resolved[i].problem.lipschitz_k != first.problem.lipschitz_k) {
        throw Error(ErrorKind::kUsage, "configs use different problems: '" +
                                           first.problem.id + "' vs '" +
                                           resolved[i].problem.id + "'");
      }
      if (!(resolved[i].z0 == first.z0)) {
        throw Error(ErrorKind::kUsage, "configs use different z0");
      }
    }

    std::vector<std::string> labels;
    std::vector<Trace> traces;
    std::vector<std::optional<RateFit>> fits;
    std::vector<std::string> notes;
    std::map<std::string, int> seen;
    for (size_t i = 0; i < resolved.size(); ++i) {
      const ResolvedExperiment& x = resolved[i];
      PrintWarnings(x.schedule, err);
      RunResult result = Run(x.problem, x.schedule, x.z0, configs[i].steps,
                             configs[i].record_every, configs[i].seed);
      std::string label = x.schedule.Descriptor();
      const int count = ++seen[label];
      if (count > 1) label += "#" + std::to_string(count);
      std::string note;
      if (result.failure.has_value()) {
        note = "halted at t=" + std::to_string(result.failure->t);
      }
      std::string fit_note;
      fits.push_back(TryFit(result.trace, 1000, &fit_note));
      if (!fits.back().has_value()) {
        note += (note.empty() ? "" : "; ") + fit_note;
      }
      notes.push_back(note);
      labels.push_back(std::move(label));
      traces.push_back(std::move(result.trace));
    }

    std::set<int64_t> all_t;
    for (const Trace& trace : traces) {
      for (const TraceRow& row : trace.rows) all_t.insert(row.t);
    }
    std::ostringstream csv;
    csv << "# problem=" << first.problem.id << '\n';
    for (size_t i = 0; i < labels.size(); ++i) {
      csv << "# slope[" << labels[i]
          << "]=" << (fits[i] ? FormatDouble17(fits[i]->slope) : "") << '\n';
      if (!notes[i].empty()) {
        csv << "# note[" << labels[i] << "]=" << notes[i] << '\n';
      }
    }
    csv << "t,log10_t";
    for (const std::string& label : labels) {
      csv << ',' << CsvField(label) << ',' << CsvField("log10:" + label);
    }
    csv << '\n';
    for (const int64_t t : all_t) {
      csv << t << ','
          << (t > 0 ? FormatDouble17(std::log10(static_cast<double>(t)))
                    : std::string());
      for (const Trace& trace : traces) {
        const TraceRow* row = trace.Find(t);
        if (row == nullptr) {
          csv << ",,";
          continue;
        }
        csv << ',' << FormatDouble17(row->grad_norm_sq) << ','
            << (row->grad_norm_sq > 0.0
                    ? FormatDouble17(std::log10(row->grad_norm_sq))
                    : std::string());
      }
      csv << '\n';
    }
    WriteTextFile(ResolveOutputPath(out_path), csv.str());
    for (size_t i = 0; i < labels.size(); ++i) {
      out << "compare: " << labels[i]
          << " slope=" << (fits[i] ? FormatDouble(fits[i]->slope) : "n/a");
      if (!notes[i].empty()) out << " (" << notes[i] << ")";
      out << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int CmdScheduleAudit(const AuditConfig& audit, std::ostream& out,
                     std::ostream& err) {
  try {
    const auto [family, params] = internal::SplitFamily(audit.schedule);
    if (family != "anchored-new") {
      throw Error(ErrorKind::kUsage,
                  "schedule audit applies to anchored-new schedules");
    }
    std::vector<double> gammas = audit.gammas;
    if (!params.empty()) {
      // A gamma in the schedule string joins the list.
      const Schedule parsed = ParseSchedule(audit.schedule, 1.0);
      gammas.push_back(parsed.gamma());
    }
    if (gammas.empty()) throw Error(ErrorKind::kUsage, "no gamma given");
    if (audit.t_max < 1) throw Error(ErrorKind::kUsage, "t_max must be >= 1");
    std::vector<Schedule> schedules;
    for (const double gamma : SortedUnique(gammas)) {
      schedules.push_back(Schedule::AnchoredNew(gamma, 1.0));
    }
    bool all_pass = true;
    const bool margins = audit.print_margins || audit.t_max <= 100;
    for (const Schedule& schedule : schedules) {
      const ScalarScanReport contraction =
          CheckContractionBound(schedule, audit.t_max);
      const ScalarScanReport error =
          CheckErrorCoefficientBound(schedule, audit.t_max);
      const AsymptoticAudit asymptotic =
          AuditAsymptotics(schedule, audit.t_max);
      const std::string g = FormatDouble(schedule.gamma());
      out << "gamma=" << g
          << " contraction_bound: " << (contraction.pass ? "pass" : "fail")
          << " min_margin=" << FormatDouble(contraction.min_margin)
          << " at t=" << contraction.argmin_t << '\n';
      out << "gamma=" << g
          << " error_coefficient_bound: " << (error.pass ? "pass" : "fail")
          << " min_margin=" << FormatDouble(error.min_margin)
          << " at t=" << error.argmin_t << '\n';
      out << "gamma=" << g
          << " asymptotic_residuals: " << (asymptotic.pass ? "pass" : "fail")
          << " max s^2*r1="
          << FormatDouble(
                 *std::max_element(asymptotic.scaled_contraction.begin(),
                                   asymptotic.scaled_contraction.end()))
          << " (cap " << FormatDouble(asymptotic.contraction_cap)
          << ") max s^4*r2="
          << FormatDouble(*std::max_element(asymptotic.scaled_error.begin(),
                                            asymptotic.scaled_error.end()))
          << " (cap " << FormatDouble(asymptotic.error_cap) << ") over "
          << asymptotic.grid.size() << " dyadic points\n";
      if (margins) {
        for (int64_t t = 1; t <= audit.t_max; ++t) {
          const auto c = ComputeDifferenceCoefficients<double>(schedule, t);
          const double s = static_cast<double>(t) + schedule.gamma();
          out << "  t=" << t << " A=" << FormatDouble(c.a)
              << " E_err=" << FormatDouble(c.e_err)
              << " contraction=" << FormatDouble(c.contraction)
              << " contraction_margin="
              << FormatDouble(1.0 - 1.15 / (s + 1.0) - c.contraction)
              << " error_margin="
              << FormatDouble(schedule.gamma() / (s * s) - std::abs(c.e_err))
              << '\n';
        }
      }
      all_pass = all_pass && contraction.pass && error.pass && asymptotic.pass;
    }
    out << "schedule-audit: " << (all_pass ? "pass" : "fail") << '\n';
    return all_pass ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

}  // namespace agda
