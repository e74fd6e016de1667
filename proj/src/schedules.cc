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

#include "agda/schedules.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parse_util.h"

namespace agda {

namespace {

using internal::FormatDouble;

void RequireGamma(double gamma) {
  if (!(gamma >= 2.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::kUsage,
                "gamma must be >= 2, got " + FormatDouble(gamma));
  }
}

void RequirePositiveK(std::optional<double> k) {
  if (k.has_value() && (!(*k > 0.0) || !std::isfinite(*k))) {
    throw Error(ErrorKind::kUsage, "Lipschitz constant must be positive");
  }
}

void RequireScanRange(const Schedule& schedule, int64_t t_max) {
  if (schedule.variant() != ScheduleVariant::kAnchoredNew) {
    throw Error(ErrorKind::kUnsupported,
                "coefficient bound scans apply to anchored-new only");
  }
  if (t_max < 1) throw Error(ErrorKind::kUsage, "t_max must be >= 1");
}

}  // namespace

const char* ScheduleVariantName(ScheduleVariant variant) {
  switch (variant) {
    case ScheduleVariant::kAnchoredNew:
      return "anchored-new";
    case ScheduleVariant::kAnchoredRyu:
      return "anchored-ryu";
    case ScheduleVariant::kPlainGda:
      return "plain-gda";
  }
  return "unknown";
}

Schedule Schedule::AnchoredNew(double gamma, double lipschitz_k) {
  RequireGamma(gamma);
  RequirePositiveK(lipschitz_k);
  Schedule s;
  s.variant_ = ScheduleVariant::kAnchoredNew;
  s.gamma_ = gamma;
  s.lipschitz_k_ = lipschitz_k;
  return s;
}

Schedule Schedule::AnchoredRyu(double p, double gamma,
                               std::optional<double> lipschitz_k) {
  RequireGamma(gamma);
  RequirePositiveK(lipschitz_k);
  if (!(p > 0.5 && p < 1.0)) {
    throw Error(ErrorKind::kUsage,
                "p must lie in (1/2, 1), got " + FormatDouble(p));
  }
  Schedule s;
  s.variant_ = ScheduleVariant::kAnchoredRyu;
  s.gamma_ = gamma;
  s.p_ = p;
  s.lipschitz_k_ = lipschitz_k;
  return s;
}

Schedule Schedule::PlainGda(double alpha, std::optional<double> lipschitz_k) {
  RequirePositiveK(lipschitz_k);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::kUsage, "alpha must be positive");
  }
  Schedule s;
  s.variant_ = ScheduleVariant::kPlainGda;
  s.const_alpha_ = alpha;
  s.lipschitz_k_ = lipschitz_k;
  return s;
}

Schedule Schedule::WithLipschitz(double lipschitz_k) const {
  RequirePositiveK(lipschitz_k);
  Schedule s = *this;
  s.lipschitz_k_ = lipschitz_k;
  return s;
}

std::string Schedule::Descriptor() const {
  switch (variant_) {
    case ScheduleVariant::kAnchoredNew:
      return "anchored-new:gamma=" + FormatDouble(gamma_);
    case ScheduleVariant::kAnchoredRyu:
      return "anchored-ryu:p=" + FormatDouble(p_) +
             ",gamma=" + FormatDouble(gamma_);
    case ScheduleVariant::kPlainGda:
      return "plain-gda:alpha=" + FormatDouble(const_alpha_);
  }
  return "";
}

std::vector<std::string> Schedule::Warnings() const {
  std::vector<std::string> warnings;
  if (variant_ == ScheduleVariant::kAnchoredRyu && Beta(0) > 1.0) {
    warnings.push_back("beta_0 = (1-p)*gamma = " + FormatDouble(Beta(0)) +
                       " exceeds 1; the first step overshoots the anchor");
  }
  return warnings;
}

Schedule ParseSchedule(std::string_view text,
                       std::optional<double> lipschitz_k) {
  const auto [family, params] = internal::SplitFamily(text);
  std::optional<double> gamma;
  std::optional<double> p;
  std::optional<double> alpha;
  for (const auto& [key, value] : params) {
    if (key == "gamma") {
      gamma = internal::ParseDouble(value, "gamma");
    } else if (key == "p") {
      p = internal::ParseDouble(value, "p");
    } else if (key == "alpha") {
      alpha = internal::ParseDouble(value, "alpha");
    } else if (key == "K" || key == "k") {
      throw Error(ErrorKind::kUsage,
                  "K is taken from the problem, not the schedule string");
    } else {
      throw Error(ErrorKind::kUsage,
                  "unknown schedule parameter '" + key + "'");
    }
  }
  auto reject = [&](const std::optional<double>& v, const char* name) {
    if (v.has_value()) {
      throw Error(ErrorKind::kUsage,
                  family + " takes no parameter '" + name + "'");
    }
  };
  if (family == "anchored-new") {
    reject(p, "p");
    reject(alpha, "alpha");
    if (!gamma) throw Error(ErrorKind::kUsage, "anchored-new needs gamma");
    if (!lipschitz_k) {
      throw Error(ErrorKind::kUsage,
                  "anchored-new needs the problem's Lipschitz constant");
    }
    return Schedule::AnchoredNew(*gamma, *lipschitz_k);
  }
  if (family == "anchored-ryu") {
    reject(alpha, "alpha");
    if (!gamma || !p) {
      throw Error(ErrorKind::kUsage, "anchored-ryu needs p and gamma");
    }
    return Schedule::AnchoredRyu(*p, *gamma, lipschitz_k);
  }
  if (family == "plain-gda") {
    reject(gamma, "gamma");
    reject(p, "p");
    if (!alpha) throw Error(ErrorKind::kUsage, "plain-gda needs alpha");
    return Schedule::PlainGda(*alpha, lipschitz_k);
  }
  throw Error(ErrorKind::kUsage, "unknown schedule family '" + family + "'");
}

ScalarScanReport CheckContractionBound(const Schedule& schedule, int64_t t_max,
                                       double bound_constant) {
  RequireScanRange(schedule, t_max);
  const double gamma = schedule.gamma();
  ScalarScanReport report;
  report.t_max = t_max;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int64_t t = 1; t <= t_max; ++t) {
    const double bound =
        1.0 - bound_constant / (static_cast<double>(t) + 1.0 + gamma);
    const double margin =
        bound - ComputeDifferenceCoefficients<double>(schedule, t).contraction;
    if (margin < report.min_margin) {
      report.min_margin = margin;
      report.argmin_t = t;
    }
  }
  report.pass = report.min_margin >= 0.0;
  return report;
}

ScalarScanReport CheckErrorCoefficientBound(const Schedule& schedule,
                                            int64_t t_max) {
  RequireScanRange(schedule, t_max);
  const double gamma = schedule.gamma();
  ScalarScanReport report;
  report.t_max = t_max;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int64_t t = 1; t <= t_max; ++t) {
    const double s = static_cast<double>(t) + gamma;
    const double margin =
        gamma / (s * s) -
        std::abs(ComputeDifferenceCoefficients<double>(schedule, t).e_err);
    if (margin < report.min_margin) {
      report.min_margin = margin;
      report.argmin_t = t;
    }
  }
  report.pass = report.min_margin >= 0.0;
  return report;
}

int64_t FirstNonNegativeErrorCoefficient(const Schedule& schedule,
                                         int64_t t_max) {
  RequireScanRange(schedule, t_max);
  for (int64_t t = 1; t <= t_max; ++t) {
    if (ComputeDifferenceCoefficients<double>(schedule, t).e_err >= 0.0) {
      return t;
    }
  }
  return 0;
}

AsymptoticResiduals ComputeAsymptoticResiduals(const Schedule& schedule,
                                               int64_t t) {
  if (schedule.variant() != ScheduleVariant::kAnchoredNew) {
    throw Error(ErrorKind::kUnsupported,
                "asymptotic expansions apply to anchored-new only");
  }
  if (t < 1) throw Error(ErrorKind::kUsage, "t must be >= 1");
  using Real = long double;
  const auto c = ComputeDifferenceCoefficients<Real>(schedule, t);
  const Real gamma = schedule.gamma();
  const Real s = static_cast<Real>(t) + gamma;
  AsymptoticResiduals out;
  out.contraction =
      static_cast<double>(std::abs(c.contraction - (1 - gamma / s)));
  out.error_coefficient = static_cast<double>(
      std::abs(c.e_err + gamma / (2 * s * s) - 5 * gamma / (8 * s * s * s)));
  return out;
}

// sqrt(A^2 + 1/(s+1)) = 1 - gamma/s + (3 gamma / 2) / s^2 + O(1/s^3).
double ContractionResidualLimit(double gamma) { return 1.5 * gamma; }

// e_err = -gamma/(2 s^2) + 5 gamma/(8 s^3) - (11 gamma / 16) / s^4 + ...
double ErrorResidualLimit(double gamma) { return 11.0 * gamma / 16.0; }

AsymptoticAudit AuditAsymptotics(const Schedule& schedule, int64_t t_max) {
  if (schedule.variant() != ScheduleVariant::kAnchoredNew) {
    throw Error(ErrorKind::kUnsupported,
                "asymptotic expansions apply to anchored-new only");
  }
  if (t_max < 1) throw Error(ErrorKind::kUsage, "t_max must be >= 1");
  const double gamma = schedule.gamma();
  AsymptoticAudit audit;
  for (int64_t t = 1; t <= t_max; t *= 2) {
    const AsymptoticResiduals r = ComputeAsymptoticResiduals(schedule, t);
    const double s = static_cast<double>(t) + gamma;
    audit.grid.push_back(t);
    audit.scaled_contraction.push_back(r.contraction * s * s);
    audit.scaled_error.push_back(r.error_coefficient * s * s * s * s);
    if (t > t_max / 2) break;
  }
  audit.contraction_cap = 2.0 * std::max(ContractionResidualLimit(gamma),
                                         audit.scaled_contraction.front());
  audit.error_cap =
      2.0 * std::max(ErrorResidualLimit(gamma), audit.scaled_error.front());
  audit.pass = true;
  for (size_t i = 0; i < audit.grid.size(); ++i) {
    if (!(audit.scaled_contraction[i] <= audit.contraction_cap) ||
        !(audit.scaled_error[i] <= audit.error_cap)) {
      audit.pass = false;
    }
  }
  return audit;
}

}  // namespace agda
