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

#include <cmath>
#include <random>

#include "Eigen/Dense"
#include "agda/errors.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace agda {
namespace {

using ::Eigen::MatrixXd;
using ::Eigen::VectorXd;
using testing::Coords;
using testing::IdentityQuadraticSaddle;
using testing::UnitBilinear;

MatrixXd GaussianMatrix(int rows, int cols, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

TEST(EvalOperatorTest, VanishesAtSaddle) {
  const Point g = EvalOperator(UnitBilinear(), Coords({0.0, 0.0}, 1));
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
}

TEST(EvalOperatorTest, BilinearSwapsAndNegates) {
  const Point g = EvalOperator(UnitBilinear(), Coords({1.0, 1.0}, 1));
  EXPECT_EQ(g[0], 1.0);
  EXPECT_EQ(g[1], -1.0);
}

TEST(EvalOperatorTest, QuadraticSaddleHandValue) {
  const Point g =
      EvalOperator(IdentityQuadraticSaddle(), Coords({1.0, 2.0}, 1));
  EXPECT_EQ(g[0], 3.0);
  EXPECT_EQ(g[1], 1.0);
}

TEST(EvalOperatorTest, DimensionMismatchIsUsageError) {
  try {
    EvalOperator(UnitBilinear(), Coords({1.0, 2.0, 3.0}, 1));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
  }
}

TEST(PointTest, NonFiniteEntryIsDomainError) {
  try {
    Coords({1.0, std::nan("")}, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDomain);
  }
}

TEST(PointTest, SplitsBlocks) {
  const Point z = Coords({1.0, 2.0, 3.0}, 2);
  EXPECT_EQ(z.n(), 2);
  EXPECT_EQ(z.m(), 1);
  EXPECT_EQ(z.x()[1], 2.0);
  EXPECT_EQ(z.y()[0], 3.0);
}

TEST(EvalOperatorTest, MatchesDenseOperatorMatrix) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const ProblemSpec problem = RandomQuadraticSaddle(3, 4, 0.3, seed);
    const VectorXd z = GaussianMatrix(7, 1, seed + 100);
    VectorXd g;
    ApplyOperator(problem, z, g);
    const VectorXd dense = OperatorMatrix(problem) * z;
    EXPECT_LE((g - dense).norm(), 1e-14 * std::max(1.0, dense.norm()));
  }
}

TEST(EvalOperatorTest, IsLinear) {
  const ProblemSpec problem = RandomBilinear(4, 3, 11);
  const VectorXd z = GaussianMatrix(7, 1, 1);
  const VectorXd w = GaussianMatrix(7, 1, 2);
  const double a = 0.7;
  const double b = -2.5;
  VectorXd gz;
  VectorXd gw;
  VectorXd gzw;
  ApplyOperator(problem, z, gz);
  ApplyOperator(problem, w, gw);
  ApplyOperator(problem, a * z + b * w, gzw);
  EXPECT_LE((gzw - (a * gz + b * gw)).norm(), 1e-13);
}

TEST(ExactLipschitzTest, UnitBilinearIsOne) {
  EXPECT_EQ(ExactLipschitz(UnitBilinear()), 1.0);
  EXPECT_EQ(UnitBilinear().lipschitz_k, 1.0);
}

TEST(ExactLipschitzTest, ScaledIdentityCoupling) {
  const ProblemSpec problem = MakeBilinear(3.0 * MatrixXd::Identity(2, 2));
  EXPECT_NEAR(ExactLipschitz(problem), 3.0, 1e-14);
}

TEST(ExactLipschitzTest, QuadraticSaddleWithZeroBlocksReducesToBilinear) {
  const ProblemSpec problem =
      MakeQuadraticSaddle(MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1),
                          2.0 * MatrixXd::Identity(1, 1));
  EXPECT_NEAR(ExactLipschitz(problem), 2.0, 1e-14);
}

// Independent oracle: the largest singular value from a Jacobi SVD.
TEST(ExactLipschitzTest, AgreesWithSvdOracle) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 1 + static_cast<int>(seed % 5);
    const int m = 1 + static_cast<int>((seed * 7) % 6);
    const ProblemSpec problem =
        seed % 2 == 0 ? RandomBilinear(n, m, seed)
                      : RandomQuadraticSaddle(n, m, 0.1 * seed, seed);
    const Eigen::JacobiSVD<MatrixXd> svd(OperatorMatrix(problem));
    const double oracle = svd.singularValues()(0);
    EXPECT_NEAR(ExactLipschitz(problem), oracle, 1e-10 * oracle)
        << "seed " << seed;
    EXPECT_NEAR(problem.lipschitz_k, oracle, 1e-10 * oracle);
  }
}

TEST(ExactLipschitzTest, NonConvergenceReportsIterationCount) {
  PowerIterationOptions options;
  options.max_iterations = 2;
  const MatrixXd matrix = GaussianMatrix(12, 12, 3);
  try {
    SpectralNorm(matrix, options);
    FAIL() << "expected an error";
  } catch (const NumericError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
    EXPECT_EQ(e.t(), 2);
    EXPECT_NE(std::string(e.what()).find("2 iterations"), std::string::npos);
  }
}

TEST(ValidateAssumptionsTest, SkewOperatorHasZeroInnerProduct) {
  for (uint64_t seed : {1u, 2u, 99u}) {
    const AssumptionReport report =
        ValidateAssumptions(UnitBilinear(), 1000, 10.0, seed);
    EXPECT_NEAR(report.min_monotone_inner_product, 0.0, 1e-12);
    EXPECT_TRUE(report.pass);
    EXPECT_LE(report.max_lipschitz_ratio, 1.0 + 1e-12);
  }
}

TEST(ValidateAssumptionsTest, StronglyMonotoneFamilyPasses) {
  const AssumptionReport report =
      ValidateAssumptions(IdentityQuadraticSaddle(), 1000, 1.0, 5);
  EXPECT_GE(report.min_monotone_inner_product, 0.0);
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.samples_used, 1000);
}

TEST(ValidateAssumptionsTest, HalvedLipschitzConstantFails) {
  for (ProblemSpec problem :
       {UnitBilinear(), IdentityQuadraticSaddle(), RandomBilinear(5, 5, 3)}) {
    problem.lipschitz_k = 0.5 * ExactLipschitz(problem);
    const AssumptionReport report = ValidateAssumptions(problem, 1000, 1.0, 8);
    EXPECT_GT(report.max_lipschitz_ratio, 1.0);
    EXPECT_FALSE(report.pass);
  }
}

TEST(ValidateAssumptionsTest, DeterministicForSeed) {
  const ProblemSpec problem = RandomQuadraticSaddle(5, 5, 0.1, 4);
  const AssumptionReport a = ValidateAssumptions(problem, 200, 1.0, 17);
  const AssumptionReport b = ValidateAssumptions(problem, 200, 1.0, 17);
  EXPECT_EQ(a.min_monotone_inner_product, b.min_monotone_inner_product);
  EXPECT_EQ(a.max_lipschitz_ratio, b.max_lipschitz_ratio);
}

TEST(ValidateAssumptionsTest, RejectsZeroSamples) {
  EXPECT_THROW(ValidateAssumptions(UnitBilinear(), 0, 1.0, 1), Error);
}

TEST(ParseProblemTest, CompactForms) {
  const ProblemSpec unit = ParseProblem("bilinear:n=1,m=1,a=1");
  EXPECT_EQ(unit.kind, ProblemKind::kBilinear);
  EXPECT_EQ(unit.lipschitz_k, 1.0);
  EXPECT_EQ(unit.id, "bilinear:n=1,m=1,a=1");

  const ProblemSpec qs = ParseProblem("quadratic-saddle:n=1,m=1,p=1,q=1,a=1");
  EXPECT_EQ(qs.kind, ProblemKind::kQuadraticSaddle);
  const Point g = EvalOperator(qs, Coords({1.0, 2.0}, 1));
  EXPECT_EQ(g[0], 3.0);
  EXPECT_EQ(g[1], 1.0);

  EXPECT_EQ(ParseProblem("bilinear").coupling, unit.coupling);

  const ProblemSpec random = ParseProblem("bilinear:n=5,m=5,seed=7");
  EXPECT_EQ(random.seed, 7u);
  EXPECT_EQ(random.coupling, RandomBilinear(5, 5, 7).coupling);
}

TEST(ParseProblemTest, RejectsMalformedInput) {
  for (const char* text : {"", "saddle:n=1,m=1", "bilinear:n=1,n=1,m=1,a=1",
                           "bilinear:n=0,m=1,a=1", "bilinear:n=1,m=1,a=x",
                           "bilinear:n=1,m=1,a=1,bogus=2"}) {
    try {
      ParseProblem(text);
      ADD_FAILURE() << "accepted '" << text << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kUsage) << text;
    }
  }
}

TEST(ValidateProblemTest, RejectsAsymmetricBlock) {
  MatrixXd p(2, 2);
  p << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(
      MakeQuadraticSaddle(p, MatrixXd::Identity(1, 1), MatrixXd::Ones(2, 1)),
      Error);
}

TEST(ValidateProblemTest, RejectsIndefiniteBlock) {
  EXPECT_THROW(
      MakeQuadraticSaddle(-MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
                          MatrixXd::Ones(1, 1)),
      Error);
}

TEST(ValidateProblemTest, RejectsUnderstatedLipschitzConstant) {
  ProblemSpec problem = UnitBilinear();
  problem.lipschitz_k = 0.9;
  EXPECT_THROW(ValidateProblem(problem), Error);
  problem.lipschitz_k = 1.5;  // Loose upper bounds are allowed.
  EXPECT_NO_THROW(ValidateProblem(problem));
}

TEST(ValidateProblemTest, RejectsWrongSaddle) {
  ProblemSpec problem = UnitBilinear();
  problem.saddle = Coords({1.0, 0.0}, 1);
  EXPECT_THROW(ValidateProblem(problem), Error);
}

TEST(RandomProblemTest, SeedDeterminesInstance) {
  EXPECT_EQ(RandomBilinear(5, 5, 1).coupling, RandomBilinear(5, 5, 1).coupling);
  EXPECT_NE(RandomBilinear(5, 5, 1).coupling, RandomBilinear(5, 5, 2).coupling);
  const ProblemSpec qs = RandomQuadraticSaddle(5, 5, 0.1, 9);
  EXPECT_EQ(qs.p_block, 0.1 * MatrixXd::Identity(5, 5));
  EXPECT_EQ(qs.q_block, 0.1 * MatrixXd::Identity(5, 5));
  EXPECT_EQ(qs.coupling, RandomBilinear(5, 5, 9).coupling);
}

TEST(RandomProblemTest, SingularValuesAreSpreadAroundOne) {
  const ProblemSpec problem = RandomBilinear(5, 5, 20260118);
  const Eigen::JacobiSVD<MatrixXd> svd(problem.coupling);
  EXPECT_GT(svd.singularValues()(4), 0.3);
  EXPECT_LT(svd.singularValues()(0), 2.0);
}

}  // namespace
}  // namespace agda
