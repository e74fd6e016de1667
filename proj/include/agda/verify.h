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

#ifndef AGDA_VERIFY_H_
#define AGDA_VERIFY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agda/problems.h"
#include "agda/schedules.h"
#include "agda/solver.h"

namespace agda {

// Relative slack absorbed by inequality checks (rounding only).
inline constexpr double kInequalityTolerance = 1e-10;
// Relative residual allowed for the exact difference identity.
inline constexpr double kIdentityTolerance = 1e-12;

// Check names, in report order.
inline constexpr char kCheckBoundedIterates[] = "bounded_iterates";
inline constexpr char kCheckDiffContraction[] = "diff_contraction";
inline constexpr char kCheckDifferenceIdentity[] = "difference_identity";
inline constexpr char kCheckGradientReconstruction[] =
    "gradient_reconstruction";
inline constexpr char kCheckLastIterateRate[] = "last_iterate_rate";
inline constexpr char kCheckOneStep[] = "one_step";

const std::vector<std::string>& AllCheckNames();

struct Constants {
  double d = 0.0;
  double e = 0.0;
  double c = 0.0;
  double gamma = 0.0;
  double k = 0.0;
  double d1_norm = 0.0;  // ||z_2 - z_1||
  double z0_dist = 0.0;  // ||z_0 - z*||
};

// D = (sqrt(12) + 1) z0_dist, E = max(d1 (1 + gamma), 20 gamma D),
// C = K^2 (E + gamma D)^2.
Constants MakeConstants(double z0_dist, double d1_norm, double gamma, double k);

// Reads z0_dist from the t=0 row and d1 from the t=1, t=2 snapshots when
// present, otherwise from the t=1 diff_norm. Throws Error(kInapplicable)
// unless the schedule is anchored-new and Error(kData) if rows are missing.
Constants ComputeConstants(const Trace& trace, const Schedule& schedule);

enum class CheckStatus { kPass, kFail, kInapplicable };

const char* CheckStatusName(CheckStatus status);

// For inequality checks worst_margin is the smallest relative margin
// (rhs - lhs) / max(|rhs|, |lhs|) over the checked t (0 when both sides are
// 0); the check passes iff worst_margin >= -tolerance. For the identity check
// it is the negated largest relative residual.
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kInapplicable;
  double worst_margin = 0.0;
  int64_t worst_t = 0;
  std::string detail;

  bool pass() const { return status == CheckStatus::kPass; }
};

CheckResult Inapplicable(const std::string& name, const std::string& why);

// Coefficients of the one-step distance bound
//   ||z_{t+1} - z*||^2 <= (1 - beta + g alpha^2 K^2) ||z_t - z*||^2
//                         + (l beta + q beta^2) ||z_0 - z*||^2
// with defaults g = 1.5, l = 1, q = 2.
struct OneStepCoefficients {
  double gradient = 1.5;
  double anchor_linear = 1.0;
  double anchor_quadratic = 2.0;
};

// Needs a dense (stride 1) trace with dist_opt_sq; Error(kData) otherwise.
CheckResult CheckOneStep(const Trace& trace, const Schedule& schedule,
                         const OneStepCoefficients& coefficients = {});

// ||z_t - z*||^2 <= 12 ||z_0 - z*||^2 and ||z_t - z_0|| <= D at every row.
// Throws Error(kInapplicable) if dist_opt_sq is absent.
CheckResult CheckBoundedIterates(const Trace& trace);

// Computes z_{t+2} - z_{t+1} by stepping and by the two-step recursion for
// every t in t_list; fails if any residual exceeds
// 1e-12 * max(1, ||z_{t+2} - z_{t+1}||).
CheckResult CheckDifferenceIdentity(const ProblemSpec& problem,
                                    const Schedule& schedule, const Point& z0,
                                    const std::vector<int64_t>& t_list);

// ||z_{t+1} - z_t|| <= E / (t + gamma) at every recorded t >= 1.
CheckResult CheckDiffContraction(const Trace& trace,
                                 const Constants& constants);

// ||G(z_t)||^2 <= C / (t + gamma) (the proof's bound, reported) and
// ||G(z_t)||^2 <= C / t (the stated bound, also required) for t >= 1.
CheckResult CheckLastIterateRate(const Trace& trace,
                                 const Constants& constants);

// The update-rule reconstruction bounds ||G(z_t)|| from above at every row
// carrying diff_norm.
CheckResult CheckGradientReconstruction(const Trace& trace,
                                        const Schedule& schedule);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int64_t t_from = 0;
  int64_t t_to = 0;
  int64_t points = 0;
};

// Least squares of log(grad_norm_sq) against log(t) over rows with
// t_from <= t <= t_to. Needs at least 10 rows; throws Error(kData) if fewer
// and Error(kNumeric) if any grad_norm_sq in the window is 0.
RateFit FitRate(const Trace& trace, int64_t t_from, int64_t t_to);

struct VerifyOptions {
  // Empty means every check.
  std::vector<std::string> checks;
  int64_t identity_t_max = 100;
  // Horizon of the stride-1 pass used by the one-step check when the trace
  // is not dense.
  int64_t dense_steps = 1000;
  int64_t rate_t_from = 1000;
};

struct VerificationReport {
  std::string problem;
  std::string schedule;
  std::optional<Constants> constants;
  std::vector<CheckResult> checks;  // sorted by name
  std::optional<RateFit> rate_fit;
  std::string rate_fit_note;

  bool AllApplicablePass() const;
};

// Runs the selected checks for a trace produced from (problem, schedule, z0).
// Checks needing an anchored-new schedule or a known saddle are reported as
// inapplicable rather than thrown.
VerificationReport VerifyTrace(const ProblemSpec& problem,
                               const Schedule& schedule, const Point& z0,
                               const Trace& trace,
                               const VerifyOptions& options = {});

// JSON document with fields problem, schedule, constants, checks, rate_fit.
std::string ReportToJson(const VerificationReport& report);

}  // namespace agda

#endif  // AGDA_VERIFY_H_
