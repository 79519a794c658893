#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "jamgraph/basis.hpp"
#include "jamgraph/path.hpp"
#include "jamgraph/solver.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace jamgraph;
using testing_support::code_of;

namespace {

CoefficientSet random_coefficients(Eigen::Index d, int r, std::uint64_t seed) {
  CoefficientSet beta(d, r);
  Rng rng(seed);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      if (j != k)
        for (int t = 0; t < r; ++t) beta.block(j, k)(t) = 0.3 * rng.normal();
  return beta;
}

// Largest drop violation along every trace of a fit.
double worst_increase(const FitResult& fit) {
  double worst = 0.0;
  for (const auto& trace : fit.objective_traces)
    for (std::size_t s = 1; s < trace.size(); ++s) worst = std::max(worst, trace[s] - trace[s - 1]);
  return worst;
}

}  // namespace

TEST(Objective, ZeroCoefficientsGiveHalfD) {
  const DataMatrix x = testing_support::cubic_data(40, 5, 4, 1);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  EXPECT_NEAR(objective(design, x, CoefficientSet(5, 3), 0.7), 2.5, 1e-12);
}

TEST(Objective, TermByTermRecomputation) {
  const DataMatrix x = testing_support::cubic_data(25, 4, 3, 2);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2}});
  const CoefficientSet beta = random_coefficients(4, 2, 11);
  const double lambda = 0.13;

  double loss = 0.0;
  std::vector<std::vector<double>> fnorm2(4, std::vector<double>(4, 0.0));
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 25; ++i) {
      double fit = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (k == j) continue;
        double f = 0.0;
        for (int t = 0; t < 2; ++t) f += design.psi(j, k)(i, t) * beta.block(j, k)(t);
        fit += f;
        fnorm2[j][k] += f * f;
      }
      loss += (x.values(i, j) - fit) * (x.values(i, j) - fit);
    }
  }
  double penalty = 0.0;
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k) penalty += std::sqrt(fnorm2[j][k] + fnorm2[k][j]);
  const double expected = loss / 50.0 + lambda * penalty;

  EXPECT_NEAR(objective(design, x, beta, lambda), expected, 1e-12);
  EXPECT_NEAR(objective(design, x, beta, 0.0), loss / 50.0, 1e-12);
}

TEST(Objective, ShapeMismatch) {
  const DataMatrix x = testing_support::cubic_data(25, 4, 3, 2);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2}});
  EXPECT_EQ(code_of([&] { objective(design, x, CoefficientSet(3, 2), 0.1); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([&] { objective(design, x, CoefficientSet(4, 3), 0.1); }), ErrorCode::kShapeMismatch);
}

// d = 2, r = 1: one pair; the joint update is the exact minimizer, worked out
// by hand as rho (1 - lambda sqrt(n) / (sqrt(2) |rho|))_+ for both blocks.
TEST(Fit, TwoVariableClosedForm) {
  Eigen::MatrixXd v = testing_support::gaussian(80, 2, 5);
  v.col(1) += 0.8 * v.col(0);
  const DataMatrix x = standardize(make_data(v));
  const ExpandedDesign design = expand(x, BasisSpec{{1}});
  const double n = 80.0;
  const double rho = x.values.col(0).dot(x.values.col(1)) / n;

  for (double lambda : {0.01, 0.05, 0.2}) {
    const double shrink = std::max(0.0, 1.0 - lambda * std::sqrt(n) / (std::sqrt(2.0) * std::abs(rho)));
    const FitResult fit = jamgraph::fit(design, x, lambda);
    EXPECT_NEAR(fit.coefficients.block(0, 1)(0), rho * shrink, 1e-8) << lambda;
    EXPECT_NEAR(fit.coefficients.block(1, 0)(0), rho * shrink, 1e-8) << lambda;
  }
}

TEST(Fit, MatchesProximalGradientOracle) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const DataMatrix x = testing_support::cubic_data(30, 3, 2, seed);
    const ExpandedDesign design = expand(x, BasisSpec{{1, 2}});
    const double lmax = lambda_max(design, x);
    for (double lambda : {0.2, 0.6 * lmax, 0.15 * lmax}) {
      const FitResult fit = jamgraph::fit(design, x, lambda);
      const oracle::JointFit ref = oracle::joint_objective(x.values, {1, 2}, lambda);
      EXPECT_NEAR(fit.objective, ref.objective, 1e-8) << "seed " << seed << " lambda " << lambda;
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          if (j == k) continue;
          const Eigen::VectorXd projected = design.psi(j, k).transpose() * ref.functions[j].col(k) / 30.0;
          EXPECT_LT((projected - fit.coefficients.block(j, k)).cwiseAbs().maxCoeff(), 1e-5)
              << "seed " << seed << " pair " << j << "," << k;
        }
      }
    }
  }
}

TEST(Fit, AboveLambdaMaxIsExactlyEmpty) {
  const DataMatrix x = testing_support::cubic_data(60, 6, 6, 4);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const FitResult fit = jamgraph::fit(design, x, lambda_max(design, x));
  for (double v : fit.coefficients.values()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(edge_set(fit.coefficients).empty());
}

TEST(BlockUpdate, OrthogonalResidualsGiveZeroBlocks) {
  Eigen::MatrixXd v(8, 2);
  v << 1, 1, -1, 1, 1, -1, -1, -1, 1, 1, -1, 1, 1, -1, -1, -1;
  const DataMatrix x = standardize(make_data(v));
  const ExpandedDesign design = expand(x, BasisSpec{{1}});
  BlockCoordinateState state(design, x, 1e-12, CoefficientSet(2, 1));
  state.block_update(0, 1);
  EXPECT_EQ(state.coefficients().block(0, 1)(0), 0.0);
  EXPECT_EQ(state.coefficients().block(1, 0)(0), 0.0);
  EXPECT_FALSE(state.pair_active(0, 1));
}

TEST(EdgeSet, CountsNonzeroPairs) {
  CoefficientSet beta(4, 2);
  EXPECT_TRUE(edge_set(beta).empty());
  beta.block(2, 1)(1) = 0.5;
  const Graph g = edge_set(beta);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_TRUE(g.has_edge(1, 2));
  const Graph dg = directed_edge_set(beta);
  ASSERT_EQ(dg.size(), 1u);
  EXPECT_TRUE(dg.has_edge(1, 2));  // regressor 1 -> response 2
}

TEST(Kkt, ZeroAtLambdaMax) {
  const DataMatrix x = testing_support::cubic_data(50, 5, 4, 6);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const FitResult fit = jamgraph::fit(design, x, lambda_max(design, x));
  EXPECT_LE(kkt_residual(design, x, fit), 1e-12);
}

TEST(Kkt, ConvergedFitAndPerturbation) {
  const DataMatrix x = testing_support::cubic_data(100, 8, 8, 7);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  SolverOptions options;
  options.tolerance = 1e-10;
  const double lambda = 0.3 * lambda_max(design, x);
  FitResult fit = jamgraph::fit(design, x, lambda, options);
  ASSERT_TRUE(fit.converged);
  EXPECT_LT(kkt_residual(design, x, fit), 1e-6);

  // Push one active block off the optimum.
  const Graph g = edge_set(fit.coefficients);
  ASSERT_FALSE(g.empty());
  const auto [a, b] = g.edges().front();
  fit.coefficients.block(a, b)(0) += 0.1;
  fit.fitted = fitted_values(design, fit.coefficients);
  fit.residuals = x.values - fit.fitted;
  EXPECT_GT(kkt_residual(design, x, fit), 0.01);
}

TEST(Fit, ObjectiveTracesNeverIncrease) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const DataMatrix x = testing_support::cubic_data(50, 12, 10, seed);
    const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
    for (double frac : {0.6, 0.2, 0.05}) {
      const FitResult fit = jamgraph::fit(design, x, frac * lambda_max(design, x));
      ASSERT_FALSE(fit.objective_traces.empty());
      EXPECT_LE(worst_increase(fit), 1e-12) << seed << " " << frac;
    }
  }
}

TEST(Fit, RelabellingVariablesReachesSameOptimum) {
  const DataMatrix x = testing_support::cubic_data(60, 7, 7, 12);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const double lambda = 0.25 * lambda_max(design, x);
  const FitResult base = jamgraph::fit(design, x, lambda);

  // Reversing the columns changes the fixed sweep order over pairs.
  const std::vector<int> perm{6, 5, 4, 3, 2, 1, 0};
  Eigen::MatrixXd v(x.n(), x.d());
  for (int j = 0; j < 7; ++j) v.col(j) = x.values.col(perm[j]);
  DataMatrix xp = make_data(v);
  xp.standardized = true;
  const ExpandedDesign dp = expand(xp, BasisSpec{{1, 2, 3}});
  const FitResult other = jamgraph::fit(dp, xp, lambda);
  EXPECT_NEAR(base.objective, other.objective, 1e-8);

  const Graph g = edge_set(base.coefficients);
  const Graph h = edge_set(other.coefficients);
  Graph mapped(7, false);
  for (const auto& [a, b] : h.edges()) mapped.add_edge(perm[a], perm[b]);
  EXPECT_EQ(g, mapped);
}

TEST(Fit, SingleGroupIdenticalToFullFit) {
  const DataMatrix x = testing_support::cubic_data(40, 6, 5, 13);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const double lambda = 0.3 * lambda_max(design, x);
  std::vector<int> all(6);
  std::iota(all.begin(), all.end(), 0);
  const FitResult a = jamgraph::fit(design, x, lambda);
  const FitResult b = fit_groups(design, x, lambda, {all});
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(Fit, GroupsKeepCrossGroupPairsAtZero) {
  const DataMatrix x = testing_support::cubic_data(40, 6, 8, 14);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2}});
  const FitResult fit = fit_groups(design, x, 0.1 * lambda_max(design, x), {{0, 2, 4}, {1, 3, 5}});
  for (const auto& [a, b] : edge_set(fit.coefficients, 0.0).edges()) EXPECT_EQ(a % 2, b % 2);
  EXPECT_EQ(code_of([&] { fit_groups(design, x, 0.1, {{0, 1}, {1, 2}}); }), ErrorCode::kInvalidArgument);
}

TEST(Fit, WarmStartReachesColdOptimum) {
  const DataMatrix x = testing_support::cubic_data(50, 8, 8, 15);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const double lmax = lambda_max(design, x);
  const FitResult previous = jamgraph::fit(design, x, 0.5 * lmax);
  const FitResult warm = jamgraph::fit(design, x, 0.2 * lmax, {}, &previous.coefficients);
  const FitResult cold = jamgraph::fit(design, x, 0.2 * lmax);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-8);
  EXPECT_EQ(edge_set(warm.coefficients), edge_set(cold.coefficients));
}

TEST(Fit, SequentialThresholdVariantRuns) {
  const DataMatrix x = testing_support::cubic_data(50, 6, 6, 16);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const double lambda = 0.3 * lambda_max(design, x);
  SolverOptions options;
  options.coupled_threshold = false;
  const FitResult seq = jamgraph::fit(design, x, lambda, options);
  const FitResult joint = jamgraph::fit(design, x, lambda);
  EXPECT_TRUE(seq.coefficients.all_finite());
  // The joint update minimizes the objective; the sequential reading cannot beat it.
  EXPECT_GE(seq.objective, joint.objective - 1e-10);
}

TEST(Fit, RejectsBadArguments) {
  const DataMatrix x = testing_support::cubic_data(30, 3, 2, 1);
  const ExpandedDesign design = expand(x, BasisSpec{{1}});
  EXPECT_EQ(code_of([&] { jamgraph::fit(design, x, 0.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { jamgraph::fit(design, x, std::nan("")); }), ErrorCode::kInvalidArgument);
  CoefficientSet bad(3, 1);
  bad.block(0, 1)(0) = std::nan("");
  EXPECT_EQ(code_of([&] { jamgraph::fit(design, x, 0.1, {}, &bad); }), ErrorCode::kNonFinite);
}
