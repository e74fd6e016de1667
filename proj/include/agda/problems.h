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

#ifndef AGDA_PROBLEMS_H_
#define AGDA_PROBLEMS_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "Eigen/Core"
#include "agda/point.h"

namespace agda {

enum class ProblemKind {
  // L(x, y) = x'Ay, G(z) = (Ay, -A'x).
  kBilinear,
  // L(x, y) = x'Px/2 + x'Ay - y'Qy/2, G(z) = (Px + Ay, Qy - A'x).
  kQuadraticSaddle,
};

const char* ProblemKindName(ProblemKind kind);

// A convex-concave saddle problem with a linear gradient operator G.
// Built-in families have no linear terms, so the saddle point is the origin.
struct ProblemSpec {
  std::string id;
  ProblemKind kind = ProblemKind::kBilinear;
  int64_t n = 0;
  int64_t m = 0;
  Eigen::MatrixXd coupling;  // n x m
  Eigen::MatrixXd p_block;   // n x n, empty for bilinear
  Eigen::MatrixXd q_block;   // m x m, empty for bilinear
  double lipschitz_k = 0.0;
  Point saddle = Point::Zeros(1, 1);
  // False when no saddle point is known; distance-to-optimum columns and the
  // checks that need them are then unavailable.
  bool saddle_known = true;
  // Seed used to draw the matrices, when they were drawn.
  uint64_t seed = 0;
};

// Builders compute the tight K with ExactLipschitz and validate the result.
ProblemSpec MakeBilinear(Eigen::MatrixXd coupling, std::string id = "");
ProblemSpec MakeQuadraticSaddle(Eigen::MatrixXd p_block,
                                Eigen::MatrixXd q_block,
                                Eigen::MatrixXd coupling, std::string id = "");

// Seeded random instances. The bilinear coupling is an orthogonal factor of a
// Gaussian matrix perturbed by Gaussian noise of relative size 0.25, so its
// singular values are spread around 1. The quadratic-saddle instance uses
// P = pq_scale * I, Q = pq_scale * I with the same coupling construction.
ProblemSpec RandomBilinear(int64_t n, int64_t m, uint64_t seed);
ProblemSpec RandomQuadraticSaddle(int64_t n, int64_t m, double pq_scale,
                                  uint64_t seed);

// Parses the compact CLI form, e.g. `bilinear:n=1,m=1,a=1`,
// `bilinear:n=5,m=5,seed=7`, `quadratic-saddle:n=1,m=1,p=1,q=1,a=1`.
// `a`, `p`, `q` scale identity blocks; `seed` draws a random coupling.
ProblemSpec ParseProblem(std::string_view text);

// Throws Error(kUsage) if any ProblemSpec invariant is violated: block
// shapes, PSD blocks, K >= sigma_max within 1e-9 relative, G(saddle) ~ 0.
void ValidateProblem(const ProblemSpec& problem);

// The dense matrix M with G(z) = M z.
Eigen::MatrixXd OperatorMatrix(const ProblemSpec& problem);

// G evaluated block-wise. `out` is resized as needed.
void ApplyOperator(const ProblemSpec& problem, const Eigen::VectorXd& z,
                   Eigen::VectorXd& out);
Point EvalOperator(const ProblemSpec& problem, const Point& z);

struct PowerIterationOptions {
  int64_t max_iterations = 100000;
  // Stop when ||M'M v - lambda v|| <= relative_tolerance * lambda.
  double relative_tolerance = 1e-12;
  uint64_t seed = 0x5eed;
};

// Largest singular value of M via power iteration on M'M.
// Throws NumericError(kNumeric) carrying the iteration count on failure.
double ExactLipschitz(const ProblemSpec& problem,
                      const PowerIterationOptions& options = {});
double SpectralNorm(const Eigen::MatrixXd& matrix,
                    const PowerIterationOptions& options = {});

struct AssumptionTolerances {
  double monotone = 1e-10;
  double lipschitz = 1e-9;
};

struct AssumptionReport {
  double min_monotone_inner_product = 0.0;
  double max_lipschitz_ratio = 0.0;
  int64_t samples_used = 0;
  bool pass = false;
};

// Samples pairs (z, w) uniformly in the ball of `radius` about the origin and
// records min <G(z)-G(w), z-w> and max ||G(z)-G(w)|| / (K ||z-w||). Pairs
// closer than 1e-14 are skipped. Deterministic for a fixed seed.
AssumptionReport ValidateAssumptions(const ProblemSpec& problem,
                                     int64_t sample_count, double radius,
                                     uint64_t seed,
                                     const AssumptionTolerances& tol = {});

}  // namespace agda

#endif  // AGDA_PROBLEMS_H_
