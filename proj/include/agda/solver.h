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

#ifndef AGDA_SOLVER_H_
#define AGDA_SOLVER_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "agda/errors.h"
#include "agda/problems.h"
#include "agda/schedules.h"

namespace agda {

// Iterates whose magnitude exceeds this are reported as divergence.
inline constexpr double kDivergenceThreshold = 1e150;

struct IterateState {
  int64_t t = 0;
  Eigen::VectorXd z;
  Eigen::VectorXd anchor;
  std::optional<Eigen::VectorXd> previous;
};

IterateState InitialState(const Point& z0);

// One anchored update
//   z_{t+1} = z_t - alpha_t G(z_t) + beta_t (z_0 - z_t),
// evaluated per coordinate as (z - alpha * g) + beta * (anchor - z).
// Throws NumericError(kNumeric) on a non-finite result and
// NumericError(kDivergence) once a coordinate exceeds kDivergenceThreshold.
IterateState Step(const IterateState& state, const ProblemSpec& problem,
                  const Schedule& schedule);

// In-place form used by the run loop. `gradient` must hold G(z).
void AdvanceIterate(const Eigen::VectorXd& gradient,
                    const Eigen::VectorXd& anchor, double alpha, double beta,
                    int64_t t, Eigen::VectorXd& z);

struct TraceRow {
  int64_t t = 0;
  double grad_norm_sq = 0.0;
  std::optional<double> dist_opt_sq;
  std::optional<double> diff_norm;
  double dist_anchor = 0.0;
};

struct TraceMetadata {
  std::string problem_id;
  std::string schedule;
  int64_t steps = 0;
  double lipschitz_k = 0.0;
  std::optional<double> gamma;
  uint64_t seed = 0;
  int64_t record_every = 1;
  // Set when the run stopped early.
  std::optional<int64_t> halted_at;
};

struct Trace {
  TraceMetadata metadata;
  std::vector<TraceRow> rows;
  // Full iterates, kept for t in {0, 1, 2, T-1, T}.
  std::map<int64_t, Eigen::VectorXd> snapshots;

  const TraceRow* Find(int64_t t) const;
  // True when rows cover t = 0, 1, ..., last with no gaps.
  bool IsDense() const;
};

struct RunFailure {
  ErrorKind kind = ErrorKind::kNumeric;
  int64_t t = 0;
  std::optional<int64_t> coordinate;
  std::string message;
};

struct RunResult {
  Trace trace;
  // Present if the run stopped early; `trace` then holds every row recorded
  // before the failure.
  std::optional<RunFailure> failure;
};

// Runs `steps` updates from z0. Rows are recorded at multiples of
// `record_every` and always at t in {0, 1, 2, T-1, T}. Throws Error(kUsage)
// on invalid arguments, including an anchored-new schedule whose K differs
// from the problem's.
RunResult Run(const ProblemSpec& problem, const Schedule& schedule,
              const Point& z0, int64_t steps, int64_t record_every = 1,
              uint64_t seed = 0);

// Upper bound on ||G(z_t)|| from the update rule:
//   (1/alpha_t) diff_norm + (beta_t/alpha_t) dist_anchor.
// Throws Error(kData) if either column is absent.
double ReconstructGradientNorm(const TraceRow& row, const Schedule& schedule);

// CSV with `#key=value` metadata lines, then the header
// `t,grad_norm_sq,dist_opt_sq,diff_norm,dist_anchor`; numbers carry 17
// significant digits; absent values are empty fields.
void WriteTraceCsv(const Trace& trace, std::ostream& out);
// Throws ParseError with the line number of malformed or truncated input.
Trace ReadTraceCsv(std::istream& in);

void WriteTraceFile(const Trace& trace, const std::string& path);
Trace ReadTraceFile(const std::string& path);

}  // namespace agda

#endif  // AGDA_SOLVER_H_
