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

#ifndef AGDA_SCHEDULES_H_
#define AGDA_SCHEDULES_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agda/errors.h"

namespace agda {

enum class ScheduleVariant {
  // alpha_t = 1 / (K sqrt(t + gamma)), beta_t = gamma / (t + gamma).
  kAnchoredNew,
  // alpha_t = (1 - p) / (t + 1)^p, beta_t = (1 - p) gamma / (t + 1).
  kAnchoredRyu,
  // alpha_t = const, beta_t = 0.
  kPlainGda,
};

const char* ScheduleVariantName(ScheduleVariant variant);

// Immutable step-size and anchoring schedule. K is injected from the problem;
// it is required for anchored-new and optional otherwise (the anchored-ryu
// contraction factor needs it).
class Schedule {
 public:
  static Schedule AnchoredNew(double gamma, double lipschitz_k);
  static Schedule AnchoredRyu(double p, double gamma,
                              std::optional<double> lipschitz_k = {});
  static Schedule PlainGda(double alpha,
                           std::optional<double> lipschitz_k = {});

  ScheduleVariant variant() const { return variant_; }
  bool anchored() const { return variant_ != ScheduleVariant::kPlainGda; }
  double gamma() const { return gamma_; }
  double p() const { return p_; }
  double const_alpha() const { return const_alpha_; }
  std::optional<double> lipschitz_k() const { return lipschitz_k_; }

  // Same schedule with K replaced.
  Schedule WithLipschitz(double lipschitz_k) const;

  template <typename Real = double>
  Real Alpha(int64_t t) const;
  template <typename Real = double>
  Real Beta(int64_t t) const;

  // CLI form, e.g. `anchored-new:gamma=2`. K is never part of it.
  std::string Descriptor() const;

  // Non-fatal oddities, e.g. anchored-ryu with beta_0 > 1.
  std::vector<std::string> Warnings() const;

 private:
  Schedule() = default;

  ScheduleVariant variant_ = ScheduleVariant::kPlainGda;
  double gamma_ = 0.0;
  double p_ = 0.0;
  double const_alpha_ = 0.0;
  std::optional<double> lipschitz_k_;
};

// Parses `anchored-new:gamma=2`, `anchored-ryu:p=0.75,gamma=2`,
// `plain-gda:alpha=0.1`. Throws Error(kUsage) on bad grammar or parameters,
// including a `K=` key, which must come from the problem.
Schedule ParseSchedule(std::string_view text,
                       std::optional<double> lipschitz_k = {});

// Coefficients of the exact two-step difference recursion
//   z_{t+2} - z_{t+1} = A (z_{t+1} - z_t) - alpha_{t+1} (G(z_{t+1}) - G(z_t))
//                       + e_err (z_0 - z_t).
template <typename Real = double>
struct DifferenceCoefficients {
  int64_t t = 0;
  Real a = 0;
  Real e_err = 0;
  // sqrt(A^2 + alpha_{t+1}^2 K^2).
  Real contraction = 0;
  // (alpha_t - alpha_{t+1}) / alpha_t.
  Real alpha_decrement = 0;
};

// Direct evaluation of the recursion coefficients from four schedule values.
template <typename Real>
DifferenceCoefficients<Real> DifferenceCoefficientsFromValues(
    Real alpha_t, Real alpha_next, Real beta_t, Real beta_next, Real k) {
  DifferenceCoefficients<Real> out;
  out.alpha_decrement = (alpha_t - alpha_next) / alpha_t;
  out.a = 1 - beta_next - out.alpha_decrement;
  out.e_err = out.alpha_decrement * beta_t + beta_next - beta_t;
  const Real step = alpha_next * k;
  using std::sqrt;
  out.contraction = sqrt(out.a * out.a + step * step);
  return out;
}

// Recursion coefficients at step t for an anchored schedule. The alpha
// decrement and beta difference are evaluated in cancellation-free closed
// form, so the result stays accurate for t up to 1e9 and beyond.
// Throws Error(kUnsupported) for plain-gda and Error(kUsage) if K is unknown.
template <typename Real = double>
DifferenceCoefficients<Real> ComputeDifferenceCoefficients(
    const Schedule& schedule, int64_t t);

// Overload for schedules without an injected K (anchored-ryu).
template <typename Real = double>
DifferenceCoefficients<Real> ComputeDifferenceCoefficients(
    const Schedule& schedule, int64_t t, double lipschitz_k);

struct ScalarScanReport {
  double min_margin = 0.0;
  int64_t argmin_t = 0;
  int64_t t_max = 0;
  bool pass = false;
};

// margin(t) = (1 - bound_constant / (t + 1 + gamma)) - contraction(t) for
// 1 <= t <= t_max. Passes iff every margin is non-negative.
ScalarScanReport CheckContractionBound(const Schedule& schedule, int64_t t_max,
                                       double bound_constant = 1.15);

// margin(t) = gamma / (t + gamma)^2 - |e_err(t)| for 1 <= t <= t_max.
ScalarScanReport CheckErrorCoefficientBound(const Schedule& schedule,
                                            int64_t t_max);

// Largest t in [1, t_max] with e_err(t) >= 0, or 0 if e_err < 0 throughout.
int64_t FirstNonNegativeErrorCoefficient(const Schedule& schedule,
                                         int64_t t_max);

struct AsymptoticResiduals {
  // |contraction(t) - (1 - gamma/s)|, s = t + gamma.
  double contraction = 0.0;
  // |e_err(t) + gamma/(2 s^2) - 5 gamma/(8 s^3)|.
  double error_coefficient = 0.0;
};

// Evaluated in extended precision.
AsymptoticResiduals ComputeAsymptoticResiduals(const Schedule& schedule,
                                               int64_t t);

// Limits of s^2 * contraction residual and s^4 * error residual as t grows,
// from the next term of each expansion.
double ContractionResidualLimit(double gamma);
double ErrorResidualLimit(double gamma);

struct AsymptoticAudit {
  std::vector<int64_t> grid;
  std::vector<double> scaled_contraction;  // residual * s^2
  std::vector<double> scaled_error;        // residual * s^4
  double contraction_cap = 0.0;
  double error_cap = 0.0;
  bool pass = false;
};

// Scaled residuals on the dyadic grid t = 1, 2, 4, ..., <= t_max. Passes iff
// each scaled sequence stays below twice the larger of its limit and its
// first grid value; a residual of lower order than claimed grows without
// bound on this grid and fails.
AsymptoticAudit AuditAsymptotics(const Schedule& schedule, int64_t t_max);

// ---------------------------------------------------------------------------
// Template definitions.

template <typename Real>
Real Schedule::Alpha(int64_t t) const {
  using std::pow;
  using std::sqrt;
  const Real tt = static_cast<Real>(t);
  switch (variant_) {
    case ScheduleVariant::kAnchoredNew:
      return 1 / (static_cast<Real>(*lipschitz_k_) *
                  sqrt(tt + static_cast<Real>(gamma_)));
    case ScheduleVariant::kAnchoredRyu:
      return (1 - static_cast<Real>(p_)) / pow(tt + 1, static_cast<Real>(p_));
    case ScheduleVariant::kPlainGda:
      return static_cast<Real>(const_alpha_);
  }
  return 0;
}

template <typename Real>
Real Schedule::Beta(int64_t t) const {
  const Real tt = static_cast<Real>(t);
  const Real gamma = static_cast<Real>(gamma_);
  switch (variant_) {
    case ScheduleVariant::kAnchoredNew:
      return gamma / (tt + gamma);
    case ScheduleVariant::kAnchoredRyu:
      return (1 - static_cast<Real>(p_)) * gamma / (tt + 1);
    case ScheduleVariant::kPlainGda:
      return 0;
  }
  return 0;
}

template <typename Real>
DifferenceCoefficients<Real> ComputeDifferenceCoefficients(
    const Schedule& schedule, int64_t t, double lipschitz_k) {
  using std::expm1;
  using std::log1p;
  using std::sqrt;
  if (!schedule.anchored()) {
    throw Error(ErrorKind::kUnsupported,
                "difference coefficients need an anchored schedule");
  }
  if (t < 0) throw Error(ErrorKind::kUsage, "t must be >= 0");
  const Real k = static_cast<Real>(lipschitz_k);
  const Real gamma = static_cast<Real>(schedule.gamma());
  const Real tt = static_cast<Real>(t);
  DifferenceCoefficients<Real> out;
  out.t = t;
  Real beta_t;
  Real beta_next;
  Real beta_diff;
  if (schedule.variant() == ScheduleVariant::kAnchoredNew) {
    // 1 - sqrt(s/(s+1)) = 1 / ((s+1) (1 + sqrt(s/(s+1)))).
    const Real s = tt + gamma;
    const Real ratio = sqrt(s / (s + 1));
    out.alpha_decrement = 1 / ((s + 1) * (1 + ratio));
    beta_t = gamma / s;
    beta_next = gamma / (s + 1);
    beta_diff = -gamma / (s * (s + 1));
  } else {
    // 1 - ((t+1)/(t+2))^p = -expm1(p log1p(-1/(t+2))).
    const Real p = static_cast<Real>(schedule.p());
    out.alpha_decrement = -expm1(p * log1p(-1 / (tt + 2)));
    const Real scale = (1 - p) * gamma;
    beta_t = scale / (tt + 1);
    beta_next = scale / (tt + 2);
    beta_diff = -scale / ((tt + 1) * (tt + 2));
  }
  out.a = 1 - beta_next - out.alpha_decrement;
  out.e_err = out.alpha_decrement * beta_t + beta_diff;
  const Real step = schedule.Alpha<Real>(t + 1) * k;
  out.contraction = sqrt(out.a * out.a + step * step);
  return out;
}

template <typename Real>
DifferenceCoefficients<Real> ComputeDifferenceCoefficients(
    const Schedule& schedule, int64_t t) {
  if (!schedule.anchored()) {
    throw Error(ErrorKind::kUnsupported,
                "difference coefficients need an anchored schedule");
  }
  if (!schedule.lipschitz_k().has_value()) {
    throw Error(ErrorKind::kUsage,
                "schedule has no Lipschitz constant; pass K explicitly");
  }
  return ComputeDifferenceCoefficients<Real>(schedule, t,
                                             *schedule.lipschitz_k());
}

}  // namespace agda

#endif  // AGDA_SCHEDULES_H_
