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

#include "agda/solver.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "parse_util.h"

namespace agda {

namespace {

using ::Eigen::VectorXd;
using internal::FormatDouble17;

constexpr char kCsvHeader[] =
    "t,grad_norm_sq,dist_opt_sq,diff_norm,dist_anchor";

bool IsPinned(int64_t t, int64_t steps) { return t <= 2 || t >= steps - 1; }

void CheckRunArguments(const ProblemSpec& problem, const Schedule& schedule,
                       const Point& z0, int64_t steps, int64_t record_every) {
  if (steps < 1) {
    throw Error(ErrorKind::kUsage,
                "steps must be >= 1, got " + std::to_string(steps));
  }
  if (record_every < 1) {
    throw Error(ErrorKind::kUsage, "record_every must be >= 1");
  }
  if (z0.n() != problem.n || z0.m() != problem.m) {
    throw Error(ErrorKind::kUsage, "z0 has split " + std::to_string(z0.n()) +
                                       "+" + std::to_string(z0.m()) +
                                       ", problem expects " +
                                       std::to_string(problem.n) + "+" +
                                       std::to_string(problem.m));
  }
  if (schedule.variant() == ScheduleVariant::kAnchoredNew &&
      schedule.lipschitz_k() != problem.lipschitz_k) {
    throw Error(ErrorKind::kUsage,
                "schedule K does not match the problem's Lipschitz constant");
  }
}

std::string FormatOptional(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble17(*v) : std::string();
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

IterateState InitialState(const Point& z0) {
  IterateState state;
  state.z = z0.coords();
  state.anchor = z0.coords();
  return state;
}

void AdvanceIterate(const VectorXd& gradient, const VectorXd& anchor,
                    double alpha, double beta, int64_t t, VectorXd& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double next =
        (z[i] - alpha * gradient[i]) + beta * (anchor[i] - z[i]);
    if (!std::isfinite(next)) {
      throw NumericError(ErrorKind::kNumeric,
                         "non-finite coordinate " + std::to_string(i) +
                             " at t=" + std::to_string(t + 1),
                         t + 1, i);
    }
    if (std::abs(next) > kDivergenceThreshold) {
      throw NumericError(ErrorKind::kDivergence,
                         "iterate diverged at t=" + std::to_string(t + 1) +
                             " (coordinate " + std::to_string(i) + ")",
                         t + 1, i);
    }
    z[i] = next;
  }
}

IterateState Step(const IterateState& state, const ProblemSpec& problem,
                  const Schedule& schedule) {
  VectorXd gradient;
  ApplyOperator(problem, state.z, gradient);
  IterateState next;
  next.t = state.t + 1;
  next.anchor = state.anchor;
  next.z = state.z;
  AdvanceIterate(gradient, state.anchor, schedule.Alpha(state.t),
                 schedule.Beta(state.t), state.t, next.z);
  next.previous = state.z;
  return next;
}

const TraceRow* Trace::Find(int64_t t) const {
  auto it = std::lower_bound(
      rows.begin(), rows.end(), t,
      [](const TraceRow& row, int64_t value) { return row.t < value; });
  if (it == rows.end() || it->t != t) return nullptr;
  return &*it;
}

bool Trace::IsDense() const {
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].t != static_cast<int64_t>(i)) return false;
  }
  return !rows.empty();
}

RunResult Run(const ProblemSpec& problem, const Schedule& schedule,
              const Point& z0, int64_t steps, int64_t record_every,
              uint64_t seed) {
  CheckRunArguments(problem, schedule, z0, steps, record_every);
  RunResult result;
  Trace& trace = result.trace;
  trace.metadata.problem_id = problem.id;
  trace.metadata.schedule = schedule.Descriptor();
  trace.metadata.steps = steps;
  trace.metadata.lipschitz_k = problem.lipschitz_k;
  if (schedule.anchored()) trace.metadata.gamma = schedule.gamma();
  trace.metadata.seed = seed;
  trace.metadata.record_every = record_every;

  const VectorXd& anchor = z0.coords();
  const VectorXd& saddle = problem.saddle.coords();
  VectorXd z = anchor;
  VectorXd next(z.size());
  VectorXd gradient(z.size());
  for (int64_t t = 0;; ++t) {
    ApplyOperator(problem, z, gradient);
    TraceRow row;
    row.t = t;
    row.grad_norm_sq = gradient.squaredNorm();
    if (problem.saddle_known) row.dist_opt_sq = (z - saddle).squaredNorm();
    row.dist_anchor = (z - anchor).norm();
    const bool pinned = IsPinned(t, steps);
    if (pinned) trace.snapshots.emplace(t, z);
    if (t == steps) {
      trace.rows.push_back(row);
      break;
    }
    next = z;
    try {
      AdvanceIterate(gradient, anchor, schedule.Alpha(t), schedule.Beta(t), t,
                     next);
    } catch (const NumericError& e) {
      trace.rows.push_back(row);
      trace.metadata.halted_at = e.t();
      result.failure = RunFailure{e.kind(), e.t(), e.coordinate(), e.what()};
      break;
    }
    row.diff_norm = (next - z).norm();
    if (pinned || t % record_every == 0) trace.rows.push_back(row);
    z.swap(next);
  }
  return result;
}

double ReconstructGradientNorm(const TraceRow& row, const Schedule& schedule) {
  if (!row.diff_norm.has_value()) {
    throw Error(ErrorKind::kData,
                "row t=" + std::to_string(row.t) + " has no diff_norm");
  }
  const double alpha = schedule.Alpha(row.t);
  const double beta = schedule.Beta(row.t);
  return *row.diff_norm / alpha + (beta / alpha) * row.dist_anchor;
}

void WriteTraceCsv(const Trace& trace, std::ostream& out) {
  const TraceMetadata& meta = trace.metadata;
  out << "# problem=" << meta.problem_id << '\n';
  out << "# schedule=" << meta.schedule << '\n';
  out << "# T=" << meta.steps << '\n';
  out << "# K=" << FormatDouble17(meta.lipschitz_k) << '\n';
  out << "# gamma=" << FormatOptional(meta.gamma) << '\n';
  out << "# seed=" << meta.seed << '\n';
  out << "# record_every=" << meta.record_every << '\n';
  if (meta.halted_at.has_value()) {
    out << "# halted_at=" << *meta.halted_at << '\n';
  }
  out << kCsvHeader << '\n';
  for (const TraceRow& row : trace.rows) {
    out << row.t << ',' << FormatDouble17(row.grad_norm_sq) << ','
        << FormatOptional(row.dist_opt_sq) << ','
        << FormatOptional(row.diff_norm) << ','
        << FormatDouble17(row.dist_anchor) << '\n';
  }
}

Trace ReadTraceCsv(std::istream& in) {
  Trace trace;
  TraceMetadata& meta = trace.metadata;
  bool have_header = false;
  bool have_steps = false;
  std::string line;
  int64_t line_no = 0;
  auto number = [&](std::string_view field, const char* what) {
    try {
      return internal::ParseDouble(field, what);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  };
  auto integer = [&](std::string_view field, const char* what) {
    try {
      return internal::ParseInt(field, what);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (in.eof()) {
      throw ParseError("truncated line (missing newline)", line_no);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (!line.empty() && line[0] == '#') {
        std::string_view body(line);
        body.remove_prefix(1);
        while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        const size_t eq = body.find('=');
        if (eq == std::string_view::npos) continue;
        const std::string key(body.substr(0, eq));
        const std::string_view value = body.substr(eq + 1);
        if (key == "problem") {
          meta.problem_id = std::string(value);
        } else if (key == "schedule") {
          meta.schedule = std::string(value);
        } else if (key == "T") {
          meta.steps = integer(value, "T");
          have_steps = true;
        } else if (key == "K") {
          meta.lipschitz_k = number(value, "K");
        } else if (key == "gamma") {
          if (!value.empty()) meta.gamma = number(value, "gamma");
        } else if (key == "seed") {
          try {
            meta.seed = internal::ParseSeed(value, "seed");
          } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
          }
        } else if (key == "record_every") {
          meta.record_every = integer(value, "record_every");
        } else if (key == "halted_at") {
          meta.halted_at = integer(value, "halted_at");
        }
        continue;
      }
      if (line != kCsvHeader) {
        throw ParseError("expected header '" + std::string(kCsvHeader) + "'",
                         line_no);
      }
      have_header = true;
      continue;
    }
    const auto fields = SplitCsv(line);
    if (fields.size() != 5) {
      throw ParseError(
          "expected 5 fields, got " + std::to_string(fields.size()), line_no);
    }
    TraceRow row;
    row.t = integer(fields[0], "t");
    row.grad_norm_sq = number(fields[1], "grad_norm_sq");
    if (!fields[2].empty()) row.dist_opt_sq = number(fields[2], "dist_opt_sq");
    if (!fields[3].empty()) row.diff_norm = number(fields[3], "diff_norm");
    row.dist_anchor = number(fields[4], "dist_anchor");
    if (!trace.rows.empty() && row.t <= trace.rows.back().t) {
      throw ParseError("t is not strictly increasing", line_no);
    }
    if (row.grad_norm_sq < 0 || row.dist_anchor < 0 ||
        row.dist_opt_sq.value_or(0.0) < 0 || row.diff_norm.value_or(0.0) < 0) {
      throw ParseError("negative norm", line_no);
    }
    trace.rows.push_back(row);
  }
  if (!have_header) throw ParseError("missing CSV header", line_no + 1);
  if (!have_steps) throw ParseError("missing '# T=' metadata", line_no + 1);
  const int64_t expected_last =
      meta.halted_at.has_value() ? *meta.halted_at - 1 : meta.steps;
  if (trace.rows.empty() || trace.rows.back().t != expected_last) {
    throw ParseError(
        "trace ends at t=" +
            (trace.rows.empty() ? std::string("<none>")
                                : std::to_string(trace.rows.back().t)) +
            ", expected t=" + std::to_string(expected_last),
        line_no + 1);
  }
  return trace;
}

void WriteTraceFile(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  WriteTraceCsv(trace, out);
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

Trace ReadTraceFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  return ReadTraceCsv(in);
}

}  // namespace agda
