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

#include "agda/problems.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "Eigen/Eigenvalues"
#include "Eigen/QR"
#include "agda/errors.h"
#include "parse_util.h"

namespace agda {

namespace {

using ::Eigen::MatrixXd;
using ::Eigen::VectorXd;

constexpr double kSaddleTolerance = 1e-12;
constexpr double kLipschitzTolerance = 1e-9;
constexpr double kPsdTolerance = 1e-10;
constexpr double kSkipPairDistance = 1e-14;

void CheckSymmetricPsd(const MatrixXd& block, const char* name) {
  const double scale = std::max(1.0, block.norm());
  if ((block - block.transpose()).norm() > 1e-12 * scale) {
    throw Error(ErrorKind::kUsage, std::string(name) + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(block, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPsdTolerance) {
    throw Error(ErrorKind::kUsage,
                std::string(name) + " is not positive semidefinite");
  }
}

void CheckFinite(const MatrixXd& matrix, const char* name) {
  if (!matrix.allFinite()) {
    throw Error(ErrorKind::kDomain,
                std::string(name) + " has non-finite entries");
  }
}

std::string DefaultId(const ProblemSpec& problem) {
  return std::string(ProblemKindName(problem.kind)) +
         ":n=" + std::to_string(problem.n) + ",m=" + std::to_string(problem.m);
}

// Orthogonal factor of a Gaussian matrix plus relative noise.
MatrixXd RandomCoupling(int64_t n, int64_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int64_t k = std::max(n, m);
  MatrixXd gaussian(k, k);
  for (int64_t j = 0; j < k; ++j) {
    for (int64_t i = 0; i < k; ++i) gaussian(i, j) = normal(rng);
  }
  const MatrixXd q = gaussian.householderQr().householderQ();
  MatrixXd noise(n, m);
  for (int64_t j = 0; j < m; ++j) {
    for (int64_t i = 0; i < n; ++i) noise(i, j) = normal(rng);
  }
  return q.topLeftCorner(n, m) +
         (0.25 / std::sqrt(static_cast<double>(k))) * noise;
}

MatrixXd ScaledIdentity(int64_t rows, int64_t cols, double scale) {
  return scale * MatrixXd::Identity(rows, cols);
}

}  // namespace

const char* ProblemKindName(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kBilinear:
      return "bilinear";
    case ProblemKind::kQuadraticSaddle:
      return "quadratic-saddle";
  }
  return "unknown";
}

ProblemSpec MakeBilinear(MatrixXd coupling, std::string id) {
  CheckFinite(coupling, "A");
  ProblemSpec problem;
  problem.kind = ProblemKind::kBilinear;
  problem.n = coupling.rows();
  problem.m = coupling.cols();
  if (problem.n < 1 || problem.m < 1) {
    throw Error(ErrorKind::kUsage, "coupling matrix must be non-empty");
  }
  problem.coupling = std::move(coupling);
  problem.saddle = Point::Zeros(problem.n, problem.m);
  problem.id = id.empty() ? DefaultId(problem) : std::move(id);
  problem.lipschitz_k = ExactLipschitz(problem);
  ValidateProblem(problem);
  return problem;
}

ProblemSpec MakeQuadraticSaddle(MatrixXd p_block, MatrixXd q_block,
                                MatrixXd coupling, std::string id) {
  CheckFinite(p_block, "P");
  CheckFinite(q_block, "Q");
  CheckFinite(coupling, "A");
  ProblemSpec problem;
  problem.kind = ProblemKind::kQuadraticSaddle;
  problem.n = coupling.rows();
  problem.m = coupling.cols();
  if (problem.n < 1 || problem.m < 1) {
    throw Error(ErrorKind::kUsage, "coupling matrix must be non-empty");
  }
  problem.coupling = std::move(coupling);
  problem.p_block = std::move(p_block);
  problem.q_block = std::move(q_block);
  problem.saddle = Point::Zeros(problem.n, problem.m);
  problem.id = id.empty() ? DefaultId(problem) : std::move(id);
  if (problem.p_block.rows() != problem.n ||
      problem.p_block.cols() != problem.n ||
      problem.q_block.rows() != problem.m ||
      problem.q_block.cols() != problem.m) {
    throw Error(ErrorKind::kUsage, "P must be n x n and Q must be m x m");
  }
  problem.lipschitz_k = ExactLipschitz(problem);
  ValidateProblem(problem);
  return problem;
}

ProblemSpec RandomBilinear(int64_t n, int64_t m, uint64_t seed) {
  if (n < 1 || m < 1) throw Error(ErrorKind::kUsage, "n, m must be >= 1");
  std::mt19937_64 rng(seed);
  ProblemSpec problem = MakeBilinear(RandomCoupling(n, m, rng),
                                     "bilinear:n=" + std::to_string(n) +
                                         ",m=" + std::to_string(m) +
                                         ",seed=" + std::to_string(seed));
  problem.seed = seed;
  return problem;
}

ProblemSpec RandomQuadraticSaddle(int64_t n, int64_t m, double pq_scale,
                                  uint64_t seed) {
  if (n < 1 || m < 1) throw Error(ErrorKind::kUsage, "n, m must be >= 1");
  std::mt19937_64 rng(seed);
  MatrixXd coupling = RandomCoupling(n, m, rng);
  ProblemSpec problem = MakeQuadraticSaddle(
      ScaledIdentity(n, n, pq_scale), ScaledIdentity(m, m, pq_scale),
      std::move(coupling),
      "quadratic-saddle:n=" + std::to_string(n) + ",m=" + std::to_string(m) +
          ",p=" + internal::FormatDouble(pq_scale) + ",q=" +
          internal::FormatDouble(pq_scale) + ",seed=" + std::to_string(seed));
  problem.seed = seed;
  return problem;
}

ProblemSpec ParseProblem(std::string_view text) {
  const auto [family, params] = internal::SplitFamily(text);
  int64_t n = 1;
  int64_t m = 1;
  double a = 1.0;
  double p = 0.0;
  double q = 0.0;
  bool has_p = false;
  bool has_q = false;
  bool has_a = false;
  std::optional<uint64_t> seed;
  for (const auto& [key, value] : params) {
    if (key == "n") {
      n = internal::ParseInt(value, "n");
    } else if (key == "m") {
      m = internal::ParseInt(value, "m");
    } else if (key == "a") {
      a = internal::ParseDouble(value, "a");
      has_a = true;
    } else if (key == "p") {
      p = internal::ParseDouble(value, "p");
      has_p = true;
    } else if (key == "q") {
      q = internal::ParseDouble(value, "q");
      has_q = true;
    } else if (key == "seed") {
      seed = internal::ParseSeed(value, "seed");
    } else {
      throw Error(ErrorKind::kUsage, "unknown problem parameter '" + key + "'");
    }
  }
  if (n < 1 || m < 1) throw Error(ErrorKind::kUsage, "n, m must be >= 1");
  if (seed.has_value() && has_a) {
    throw Error(ErrorKind::kUsage, "give either a or seed, not both");
  }
  const std::string id(text);
  if (family == "bilinear") {
    if (has_p || has_q) {
      throw Error(ErrorKind::kUsage, "bilinear problems take no p or q");
    }
    if (seed.has_value()) {
      ProblemSpec problem = RandomBilinear(n, m, *seed);
      problem.id = id;
      return problem;
    }
    return MakeBilinear(ScaledIdentity(n, m, a), id);
  }
  if (family == "quadratic-saddle") {
    if (seed.has_value()) {
      if (p != q) {
        throw Error(ErrorKind::kUsage,
                    "seeded quadratic-saddle problems need p == q");
      }
      ProblemSpec problem = RandomQuadraticSaddle(n, m, p, *seed);
      problem.id = id;
      return problem;
    }
    return MakeQuadraticSaddle(ScaledIdentity(n, n, p), ScaledIdentity(m, m, q),
                               ScaledIdentity(n, m, a), id);
  }
  throw Error(ErrorKind::kUsage, "unknown problem family '" + family + "'");
}

void ValidateProblem(const ProblemSpec& problem) {
  if (problem.coupling.rows() != problem.n ||
      problem.coupling.cols() != problem.m || problem.n < 1 || problem.m < 1) {
    throw Error(ErrorKind::kUsage, "coupling matrix must be n x m");
  }
  if (problem.kind == ProblemKind::kQuadraticSaddle) {
    CheckSymmetricPsd(problem.p_block, "P");
    CheckSymmetricPsd(problem.q_block, "Q");
  }
  if (!(problem.lipschitz_k > 0.0) || !std::isfinite(problem.lipschitz_k)) {
    throw Error(ErrorKind::kUsage, "Lipschitz constant must be positive");
  }
  const double sigma = SpectralNorm(OperatorMatrix(problem));
  if (problem.lipschitz_k < sigma * (1.0 - kLipschitzTolerance)) {
    throw Error(ErrorKind::kUsage,
                "declared K = " + internal::FormatDouble(problem.lipschitz_k) +
                    " is below the operator norm " +
                    internal::FormatDouble(sigma));
  }
  if (!problem.saddle_known) return;
  if (problem.saddle.n() != problem.n || problem.saddle.m() != problem.m) {
    throw Error(ErrorKind::kUsage, "saddle point has the wrong dimensions");
  }
  const Point g = EvalOperator(problem, problem.saddle);
  const double limit =
      kSaddleTolerance *
      std::max(1.0, problem.lipschitz_k * problem.saddle.coords().norm());
  if (g.coords().norm() > limit) {
    throw Error(ErrorKind::kUsage, "declared saddle point has G(z*) != 0");
  }
}

MatrixXd OperatorMatrix(const ProblemSpec& problem) {
  const int64_t n = problem.n;
  const int64_t m = problem.m;
  MatrixXd op = MatrixXd::Zero(n + m, n + m);
  op.topRightCorner(n, m) = problem.coupling;
  op.bottomLeftCorner(m, n) = -problem.coupling.transpose();
  if (problem.kind == ProblemKind::kQuadraticSaddle) {
    op.topLeftCorner(n, n) = problem.p_block;
    op.bottomRightCorner(m, m) = problem.q_block;
  }
  return op;
}

void ApplyOperator(const ProblemSpec& problem, const VectorXd& z,
                   VectorXd& out) {
  const int64_t n = problem.n;
  const int64_t m = problem.m;
  if (z.size() != n + m) {
    throw Error(ErrorKind::kUsage,
                "point has dimension " + std::to_string(z.size()) +
                    ", problem expects " + std::to_string(n + m));
  }
  out.resize(n + m);
  const auto x = z.head(n);
  const auto y = z.tail(m);
  out.head(n).noalias() = problem.coupling * y;
  out.tail(m).noalias() = -(problem.coupling.transpose() * x);
  if (problem.kind == ProblemKind::kQuadraticSaddle) {
    out.head(n).noalias() += problem.p_block * x;
    out.tail(m).noalias() += problem.q_block * y;
  }
}

Point EvalOperator(const ProblemSpec& problem, const Point& z) {
  if (z.n() != problem.n || z.m() != problem.m) {
    throw Error(ErrorKind::kUsage, "point split does not match the problem");
  }
  VectorXd out;
  ApplyOperator(problem, z.coords(), out);
  if (!out.allFinite()) {
    throw Error(ErrorKind::kDomain, "operator value is not finite");
  }
  return Point(std::move(out), problem.n);
}

double SpectralNorm(const MatrixXd& matrix,
                    const PowerIterationOptions& options) {
  if (!matrix.allFinite()) {
    throw Error(ErrorKind::kDomain, "matrix has non-finite entries");
  }
  const int64_t dim = matrix.cols();
  if (dim == 0) return 0.0;
  const MatrixXd gram = matrix.transpose() * matrix;
  if (gram.norm() == 0.0) return 0.0;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v(dim);
  for (int64_t i = 0; i < dim; ++i) v[i] = normal(rng);
  v.normalize();

  VectorXd w(dim);
  for (int64_t iter = 1; iter <= options.max_iterations; ++iter) {
    w.noalias() = gram * v;
    // Rayleigh quotient; dividing by v'v keeps exact unit norms exact.
    const double lambda = v.dot(w) / v.squaredNorm();
    const double residual = (w - lambda * v).norm();
    if (lambda > 0.0 && residual <= options.relative_tolerance * lambda) {
      return std::sqrt(lambda);
    }
    const double norm = w.norm();
    if (norm == 0.0) {
      // Start vector landed in the null space; restart from a fresh draw.
      for (int64_t i = 0; i < dim; ++i) v[i] = normal(rng);
      v.normalize();
      continue;
    }
    v = w / norm;
  }
  throw NumericError(ErrorKind::kNumeric,
                     "power iteration did not converge in " +
                         std::to_string(options.max_iterations) + " iterations",
                     options.max_iterations);
}

double ExactLipschitz(const ProblemSpec& problem,
                      const PowerIterationOptions& options) {
  return SpectralNorm(OperatorMatrix(problem), options);
}

AssumptionReport ValidateAssumptions(const ProblemSpec& problem,
                                     int64_t sample_count, double radius,
                                     uint64_t seed,
                                     const AssumptionTolerances& tol) {
  if (sample_count < 1) {
    throw Error(ErrorKind::kUsage, "sample_count must be >= 1");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::kUsage, "radius must be positive");
  }
  const int64_t dim = problem.n + problem.m;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto draw = [&] {
    VectorXd v(dim);
    for (int64_t i = 0; i < dim; ++i) v[i] = normal(rng);
    const double r =
        radius * std::pow(uniform(rng), 1.0 / static_cast<double>(dim));
    return VectorXd(v * (r / v.norm()));
  };

  AssumptionReport report;
  report.min_monotone_inner_product = std::numeric_limits<double>::infinity();
  report.max_lipschitz_ratio = 0.0;
  VectorXd gz;
  VectorXd gw;
  for (int64_t s = 0; s < sample_count; ++s) {
    const VectorXd z = draw();
    const VectorXd w = draw();
    const VectorXd dz = z - w;
    const double dist = dz.norm();
    if (dist < kSkipPairDistance) continue;
    ApplyOperator(problem, z, gz);
    ApplyOperator(problem, w, gw);
    const VectorXd dg = gz - gw;
    report.min_monotone_inner_product =
        std::min(report.min_monotone_inner_product, dg.dot(dz));
    report.max_lipschitz_ratio = std::max(
        report.max_lipschitz_ratio, dg.norm() / (problem.lipschitz_k * dist));
    ++report.samples_used;
  }
  report.pass = report.samples_used > 0 &&
                report.min_monotone_inner_product >= -tol.monotone &&
                report.max_lipschitz_ratio <= 1.0 + tol.lipschitz;
  return report;
}

}  // namespace agda
