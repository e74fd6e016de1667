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

#include "agda/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "json.hpp"
#include "parse_util.h"

namespace agda {

namespace {

using ::Eigen::VectorXd;
using internal::FormatDouble;

const double kSqrt12PlusOne = std::sqrt(12.0) + 1.0;

double RelativeMargin(double rhs, double lhs) {
  const double scale = std::max(std::abs(rhs), std::abs(lhs));
  if (scale == 0.0) return 0.0;
  return (rhs - lhs) / scale;
}

// Tracks the smallest margin seen and where.
class WorstMargin {
 public:
  void Add(double margin, int64_t t, double absolute) {
    if (count_ == 0 || margin < margin_) {
      margin_ = margin;
      t_ = t;
      absolute_ = absolute;
    }
    ++count_;
  }
  double margin() const { return count_ == 0 ? 0.0 : margin_; }
  int64_t t() const { return t_; }
  double absolute() const { return absolute_; }
  int64_t count() const { return count_; }

 private:
  double margin_ = 0.0;
  int64_t t_ = 0;
  double absolute_ = 0.0;
  int64_t count_ = 0;
};

CheckResult FromWorst(const std::string& name, const WorstMargin& worst,
                      double tolerance, std::string detail) {
  CheckResult result;
  result.name = name;
  result.worst_margin = worst.margin();
  result.worst_t = worst.t();
  result.status =
      worst.margin() >= -tolerance ? CheckStatus::kPass : CheckStatus::kFail;
  result.detail = std::move(detail);
  return result;
}

double InitialDistanceSq(const Trace& trace) {
  const TraceRow* row0 = trace.Find(0);
  if (row0 == nullptr) {
    throw Error(ErrorKind::kData, "trace has no t=0 row");
  }
  if (!row0->dist_opt_sq.has_value()) {
    throw Error(ErrorKind::kInapplicable,
                "saddle point unknown: dist_opt_sq is absent");
  }
  return *row0->dist_opt_sq;
}

bool NeedsCheck(const VerifyOptions& options, const std::string& name) {
  return options.checks.empty() ||
         std::find(options.checks.begin(), options.checks.end(), name) !=
             options.checks.end();
}

}  // namespace

const std::vector<std::string>& AllCheckNames() {
  static const std::vector<std::string> kNames = {
      kCheckBoundedIterates,    kCheckDiffContraction,
      kCheckDifferenceIdentity, kCheckGradientReconstruction,
      kCheckLastIterateRate,    kCheckOneStep,
  };
  return kNames;
}

const char* CheckStatusName(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "fail";
    case CheckStatus::kInapplicable:
      return "inapplicable";
  }
  return "unknown";
}

CheckResult Inapplicable(const std::string& name, const std::string& why) {
  CheckResult result;
  result.name = name;
  result.status = CheckStatus::kInapplicable;
  result.detail = why;
  return result;
}

Constants MakeConstants(double z0_dist, double d1_norm, double gamma,
                        double k) {
  Constants c;
  c.z0_dist = z0_dist;
  c.d1_norm = d1_norm;
  c.gamma = gamma;
  c.k = k;
  c.d = kSqrt12PlusOne * z0_dist;
  c.e = std::max(d1_norm * (1.0 + gamma), 20.0 * gamma * c.d);
  const double sum = c.e + gamma * c.d;
  c.c = k * k * sum * sum;
  return c;
}

Constants ComputeConstants(const Trace& trace, const Schedule& schedule) {
  if (schedule.variant() != ScheduleVariant::kAnchoredNew) {
    throw Error(ErrorKind::kInapplicable,
                "constants D, E, C are defined for anchored-new only");
  }
  const double z0_dist = std::sqrt(InitialDistanceSq(trace));
  double d1 = 0.0;
  const auto z1 = trace.snapshots.find(1);
  const auto z2 = trace.snapshots.find(2);
  if (z1 != trace.snapshots.end() && z2 != trace.snapshots.end()) {
    d1 = (z2->second - z1->second).norm();
  } else if (const TraceRow* row1 = trace.Find(1);
             row1 != nullptr && row1->diff_norm.has_value()) {
    d1 = *row1->diff_norm;
  } else {
    throw Error(ErrorKind::kData,
                "trace lacks z_1 and z_2 (needs T >= 2 and the t=1 row)");
  }
  return MakeConstants(z0_dist, d1, schedule.gamma(), *schedule.lipschitz_k());
}

CheckResult CheckOneStep(const Trace& trace, const Schedule& schedule,
                         const OneStepCoefficients& coefficients) {
  if (!trace.IsDense()) {
    throw Error(ErrorKind::kData, "one-step check needs a stride-1 trace");
  }
  const double dist0 = InitialDistanceSq(trace);
  const double k = schedule.lipschitz_k().value_or(trace.metadata.lipschitz_k);
  WorstMargin worst;
  for (size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const TraceRow& row = trace.rows[i];
    const int64_t t = row.t;
    const double alpha = schedule.Alpha(t);
    const double beta = schedule.Beta(t);
    const double rhs =
        (1.0 - beta + coefficients.gradient * alpha * alpha * k * k) *
            *row.dist_opt_sq +
        (coefficients.anchor_linear * beta +
         coefficients.anchor_quadratic * beta * beta) *
            dist0;
    const double lhs = *trace.rows[i + 1].dist_opt_sq;
    worst.Add(RelativeMargin(rhs, lhs), t, rhs - lhs);
  }
  return FromWorst(kCheckOneStep, worst, kInequalityTolerance,
                   "steps checked " + std::to_string(worst.count()) +
                       ", absolute margin at worst t " +
                       FormatDouble(worst.absolute()));
}

CheckResult CheckBoundedIterates(const Trace& trace) {
  const double dist0 = InitialDistanceSq(trace);
  const double d = kSqrt12PlusOne * std::sqrt(dist0);
  WorstMargin worst;
  double max_ratio = 0.0;
  double max_anchor = 0.0;
  for (const TraceRow& row : trace.rows) {
    const double dist = row.dist_opt_sq.value_or(0.0);
    worst.Add(RelativeMargin(12.0 * dist0, dist), row.t, 12.0 * dist0 - dist);
    worst.Add(RelativeMargin(d, row.dist_anchor), row.t, d - row.dist_anchor);
    if (dist0 > 0.0) max_ratio = std::max(max_ratio, dist / dist0);
    max_anchor = std::max(max_anchor, row.dist_anchor);
  }
  return FromWorst(
      kCheckBoundedIterates, worst, kInequalityTolerance,
      "max ||z_t-z*||^2/||z_0-z*||^2 = " + FormatDouble(max_ratio) +
          " (bound 12), max ||z_t-z_0|| = " + FormatDouble(max_anchor) +
          " (D = " + FormatDouble(d) + ")");
}

CheckResult CheckDifferenceIdentity(const ProblemSpec& problem,
                                    const Schedule& schedule, const Point& z0,
                                    const std::vector<int64_t>& t_list) {
  if (!schedule.anchored()) {
    return Inapplicable(kCheckDifferenceIdentity,
                        "the difference recursion needs an anchored schedule");
  }
  if (t_list.empty()) {
    return Inapplicable(kCheckDifferenceIdentity, "no t values requested");
  }
  const int64_t t_max = *std::max_element(t_list.begin(), t_list.end());
  if (*std::min_element(t_list.begin(), t_list.end()) < 0) {
    throw Error(ErrorKind::kUsage, "identity check needs t >= 0");
  }
  // Iterates z_0 .. z_{t_max + 2} and their operator values.
  std::vector<VectorXd> iterates;
  std::vector<VectorXd> gradients;
  iterates.reserve(t_max + 3);
  IterateState state = InitialState(z0);
  iterates.push_back(state.z);
  for (int64_t t = 0; t <= t_max + 1; ++t) {
    state = Step(state, problem, schedule);
    iterates.push_back(state.z);
  }
  gradients.resize(iterates.size());
  for (size_t i = 0; i < iterates.size(); ++i) {
    ApplyOperator(problem, iterates[i], gradients[i]);
  }
  const VectorXd& anchor = iterates.front();
  WorstMargin worst;
  double max_residual = 0.0;
  for (const int64_t t : t_list) {
    const auto coeff =
        ComputeDifferenceCoefficients<double>(schedule, t, problem.lipschitz_k);
    const VectorXd stepped = iterates[t + 2] - iterates[t + 1];
    const VectorXd recursion =
        coeff.a * (iterates[t + 1] - iterates[t]) -
        schedule.Alpha(t + 1) * (gradients[t + 1] - gradients[t]) +
        coeff.e_err * (anchor - iterates[t]);
    const double residual = (stepped - recursion).norm();
    const double scale = std::max(1.0, stepped.norm());
    max_residual = std::max(max_residual, residual);
    worst.Add(-residual / scale, t, residual);
  }
  return FromWorst(kCheckDifferenceIdentity, worst, kIdentityTolerance,
                   "t values " + std::to_string(t_list.size()) +
                       ", max absolute residual " + FormatDouble(max_residual));
}

CheckResult CheckDiffContraction(const Trace& trace,
                                 const Constants& constants) {
  WorstMargin worst;
  for (const TraceRow& row : trace.rows) {
    if (row.t < 1 || !row.diff_norm.has_value()) continue;
    const double bound =
        constants.e / (static_cast<double>(row.t) + constants.gamma);
    worst.Add(RelativeMargin(bound, *row.diff_norm), row.t,
              bound - *row.diff_norm);
  }
  if (worst.count() == 0) {
    return Inapplicable(kCheckDiffContraction,
                        "no recorded t >= 1 with diff_norm");
  }
  return FromWorst(kCheckDiffContraction, worst, kInequalityTolerance,
                   "rows checked " + std::to_string(worst.count()) +
                       ", E = " + FormatDouble(constants.e));
}

CheckResult CheckLastIterateRate(const Trace& trace,
                                 const Constants& constants) {
  WorstMargin tight;
  WorstMargin stated;
  for (const TraceRow& row : trace.rows) {
    if (row.t < 1) continue;
    const double t = static_cast<double>(row.t);
    const double proof_bound = constants.c / (t + constants.gamma);
    const double stated_bound = constants.c / t;
    tight.Add(RelativeMargin(proof_bound, row.grad_norm_sq), row.t,
              proof_bound - row.grad_norm_sq);
    stated.Add(RelativeMargin(stated_bound, row.grad_norm_sq), row.t,
               stated_bound - row.grad_norm_sq);
  }
  if (tight.count() == 0) {
    return Inapplicable(kCheckLastIterateRate, "no recorded t >= 1");
  }
  CheckResult result =
      FromWorst(kCheckLastIterateRate, tight, kInequalityTolerance,
                "bound C/(t+gamma); C/t worst relative margin " +
                    FormatDouble(stated.margin()) +
                    " at t=" + std::to_string(stated.t()) +
                    ", C = " + FormatDouble(constants.c));
  if (stated.margin() < -kInequalityTolerance) {
    result.status = CheckStatus::kFail;
  }
  return result;
}

CheckResult CheckGradientReconstruction(const Trace& trace,
                                        const Schedule& schedule) {
  WorstMargin worst;
  for (const TraceRow& row : trace.rows) {
    if (!row.diff_norm.has_value()) continue;
    const double bound = ReconstructGradientNorm(row, schedule);
    const double grad_norm = std::sqrt(row.grad_norm_sq);
    worst.Add(RelativeMargin(bound, grad_norm), row.t, bound - grad_norm);
  }
  if (worst.count() == 0) {
    return Inapplicable(kCheckGradientReconstruction, "no rows with diff_norm");
  }
  return FromWorst(kCheckGradientReconstruction, worst, kInequalityTolerance,
                   "rows checked " + std::to_string(worst.count()));
}

RateFit FitRate(const Trace& trace, int64_t t_from, int64_t t_to) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const TraceRow& row : trace.rows) {
    if (row.t < t_from || row.t > t_to || row.t < 1) continue;
    if (row.grad_norm_sq == 0.0) {
      throw Error(
          ErrorKind::kNumeric,
          "degenerate fit: grad_norm_sq = 0 at t=" + std::to_string(row.t));
    }
    xs.push_back(std::log(static_cast<double>(row.t)));
    ys.push_back(std::log(row.grad_norm_sq));
  }
  if (xs.size() < 10) {
    throw Error(ErrorKind::kData, "rate fit needs at least 10 rows in [" +
                                      std::to_string(t_from) + ", " +
                                      std::to_string(t_to) + "], found " +
                                      std::to_string(xs.size()));
  }
  const double count = static_cast<double>(xs.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.t_from = t_from;
  fit.t_to = t_to;
  fit.points = static_cast<int64_t>(xs.size());
  return fit;
}

bool VerificationReport::AllApplicablePass() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.status == CheckStatus::kFail;
  });
}

VerificationReport VerifyTrace(const ProblemSpec& problem,
                               const Schedule& schedule, const Point& z0,
                               const Trace& trace,
                               const VerifyOptions& options) {
  for (const std::string& name : options.checks) {
    const auto& all = AllCheckNames();
    if (std::find(all.begin(), all.end(), name) == all.end()) {
      throw Error(ErrorKind::kUsage, "unknown check '" + name + "'");
    }
  }
  VerificationReport report;
  report.problem = problem.id;
  report.schedule = schedule.Descriptor();
  const bool is_new = schedule.variant() == ScheduleVariant::kAnchoredNew;

  std::string no_constants =
      is_new ? "saddle point unknown" : "constants need anchored-new";
  if (is_new && problem.saddle_known) {
    try {
      report.constants = ComputeConstants(trace, schedule);
    } catch (const Error& e) {
      no_constants = e.what();
    }
  }

  if (NeedsCheck(options, kCheckBoundedIterates)) {
    report.checks.push_back(
        problem.saddle_known
            ? CheckBoundedIterates(trace)
            : Inapplicable(kCheckBoundedIterates, "saddle point unknown"));
  }
  if (NeedsCheck(options, kCheckDiffContraction)) {
    report.checks.push_back(
        report.constants ? CheckDiffContraction(trace, *report.constants)
                         : Inapplicable(kCheckDiffContraction, no_constants));
  }
  if (NeedsCheck(options, kCheckDifferenceIdentity)) {
    std::vector<int64_t> t_list;
    for (int64_t t = 0; t <= options.identity_t_max; ++t) t_list.push_back(t);
    report.checks.push_back(
        CheckDifferenceIdentity(problem, schedule, z0, t_list));
  }
  if (NeedsCheck(options, kCheckGradientReconstruction)) {
    report.checks.push_back(CheckGradientReconstruction(trace, schedule));
  }
  if (NeedsCheck(options, kCheckLastIterateRate)) {
    report.checks.push_back(
        report.constants ? CheckLastIterateRate(trace, *report.constants)
                         : Inapplicable(kCheckLastIterateRate, no_constants));
  }
  if (NeedsCheck(options, kCheckOneStep)) {
    if (!is_new || !problem.saddle_known) {
      report.checks.push_back(Inapplicable(
          kCheckOneStep, is_new
                             ? "saddle point unknown"
                             : "one-step bound is checked for anchored-new"));
    } else if (trace.IsDense()) {
      report.checks.push_back(CheckOneStep(trace, schedule));
    } else {
      const int64_t steps = std::min(options.dense_steps, trace.metadata.steps);
      const RunResult dense = Run(problem, schedule, z0, steps, 1);
      CheckResult result = CheckOneStep(dense.trace, schedule);
      result.detail += ", dedicated stride-1 pass T=" + std::to_string(steps);
      report.checks.push_back(std::move(result));
    }
  }
  std::sort(report.checks.begin(), report.checks.end(),
            [](const CheckResult& a, const CheckResult& b) {
              return a.name < b.name;
            });

  const int64_t last_t = trace.rows.empty() ? 0 : trace.rows.back().t;
  try {
    report.rate_fit = FitRate(trace, options.rate_t_from, last_t);
  } catch (const Error& e) {
    report.rate_fit_note = e.what();
  }
  return report;
}

std::string ReportToJson(const VerificationReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["problem"] = report.problem;
  doc["schedule"] = report.schedule;
  if (report.constants.has_value()) {
    const Constants& c = *report.constants;
    doc["constants"] = {{"D", c.d},
                        {"E", c.e},
                        {"C", c.c},
                        {"gamma", c.gamma},
                        {"K", c.k},
                        {"d1_norm", c.d1_norm},
                        {"z0_dist", c.z0_dist}};
  } else {
    doc["constants"] = nullptr;
  }
  ordered_json checks = ordered_json::array();
  for (const CheckResult& check : report.checks) {
    checks.push_back({{"name", check.name},
                      {"pass", check.pass()},
                      {"status", CheckStatusName(check.status)},
                      {"worst_margin", check.worst_margin},
                      {"worst_t", check.worst_t},
                      {"detail", check.detail}});
  }
  doc["checks"] = std::move(checks);
  if (report.rate_fit.has_value()) {
    const RateFit& f = *report.rate_fit;
    doc["rate_fit"] = {{"slope", f.slope},
                       {"intercept", f.intercept},
                       {"r_squared", f.r_squared},
                       {"window", {f.t_from, f.t_to}},
                       {"points", f.points}};
  } else {
    doc["rate_fit"] = nullptr;
    if (!report.rate_fit_note.empty()) {
      doc["rate_fit_note"] = report.rate_fit_note;
    }
  }
  return doc.dump(2) + "\n";
}

}  // namespace agda
