#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "jamgraph/basis.hpp"
#include "jamgraph/path.hpp"
#include "jamgraph/solver.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace jamgraph;
using testing_support::code_of;

TEST(LambdaGrid, TwoPointsAndSpacing) {
  const std::vector<double> two = lambda_grid(2.0, 2, 0.01);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], 2.0);
  EXPECT_EQ(two[1], 0.02);

  const std::vector<double> grid = lambda_grid(1.5, 11, 0.001);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_LT(grid[i], grid[i - 1]);
    EXPECT_NEAR(std::log(grid[i - 1] / grid[i]), std::log(1000.0) / 10.0, 1e-12);
  }
  EXPECT_EQ(code_of([] { lambda_grid(1.0, 1, 0.1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { lambda_grid(1.0, 5, 1.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { lambda_grid(0.0, 5, 0.1); }), ErrorCode::kInvalidArgument);
}

TEST(LambdaGrid, Validation) {
  EXPECT_NO_THROW(validate_grid({0.5}));
  EXPECT_EQ(code_of([] { validate_grid({}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { validate_grid({0.5, 0.5}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { validate_grid({0.1, 0.5}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { validate_grid({0.5, -0.1}); }), ErrorCode::kInvalidArgument);
}

// x1 = x2 and r = 1: b12 = b21 = psi^T x / n = 1, so lambda_max = sqrt(2 / n)
// and at half of it both coefficients are 1 - 1/2.
TEST(LambdaMax, CollinearPair) {
  const Eigen::VectorXd c = testing_support::gaussian(40, 1, 3).col(0);
  Eigen::MatrixXd v(40, 2);
  v << c, c;
  const DataMatrix x = standardize(make_data(v));
  const ExpandedDesign design = expand(x, BasisSpec{{1}});
  const double lmax = lambda_max(design, x);
  EXPECT_NEAR(lmax, std::sqrt(2.0 / 40.0), 1e-14);

  EXPECT_TRUE(edge_set(fit(design, x, lmax).coefficients).empty());
  const FitResult half = fit(design, x, 0.5 * lmax);
  EXPECT_NEAR(half.coefficients.block(0, 1)(0), 0.5, 1e-10);
  EXPECT_NEAR(half.coefficients.block(1, 0)(0), 0.5, 1e-10);
}

TEST(LambdaMax, IndependentColumnsBoundary) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DataMatrix x = standardize(make_data(testing_support::gaussian(400, 6, seed)));
    const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
    const double lmax = lambda_max(design, x);
    // Of order sqrt(r / n) for independent columns.
    EXPECT_LT(lmax, 5.0 * std::sqrt(3.0 / 400.0));
    EXPECT_TRUE(edge_set(fit(design, x, lmax).coefficients).empty());
    EXPECT_FALSE(edge_set(fit(design, x, 0.999 * lmax).coefficients).empty());
  }
}

TEST(Bic, EmptyModel) {
  const DataMatrix x = testing_support::cubic_data(50, 4, 3, 1);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const FitResult f = fit(design, x, lambda_max(design, x));
  const BicValues b = bic(design, f, f.lambda);
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(b.df(j), 0.0);
    EXPECT_NEAR(b.rss(j), 50.0, 1e-10);
    EXPECT_NEAR(b.per_node(j), 50.0 * std::log(50.0), 1e-9);
  }
  EXPECT_NEAR(b.total, 200.0 * std::log(50.0), 1e-8);
}

TEST(Bic, LinearBasisCountsActiveRegressors) {
  const DataMatrix x = testing_support::cubic_data(60, 6, 7, 2);
  const ExpandedDesign design = expand(x, BasisSpec{{1}});
  const FitResult f = fit(design, x, 0.2 * lambda_max(design, x));
  const BicValues b = bic(design, f, f.lambda);
  for (int j = 0; j < 6; ++j) {
    int active = 0;
    for (int k = 0; k < 6; ++k)
      if (k != j && f.coefficients.squared_norm(j, k) > 0.0) ++active;
    EXPECT_EQ(b.df(j), active) << j;
  }
}

TEST(Bic, DegreesOfFreedomFormula) {
  const DataMatrix x = testing_support::cubic_data(60, 5, 6, 3);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const FitResult f = fit(design, x, 0.3 * lambda_max(design, x));
  const double lambda = f.lambda;
  const BicValues b = bic(design, f, lambda);
  const BicValues scaled = bic(design, f, lambda, true);
  for (int j = 0; j < 5; ++j) {
    double df = 0.0, df_scaled = 0.0;
    for (int k = 0; k < 5; ++k) {
      if (k == j) continue;
      const double norm2 = (design.psi(j, k) * f.coefficients.block(j, k)).squaredNorm();
      if (norm2 == 0.0) continue;
      df += 1.0 + 2.0 * norm2 / (norm2 + lambda);
      df_scaled += 1.0 + 2.0 * norm2 / (norm2 + 60.0 * lambda);
    }
    EXPECT_NEAR(b.df(j), df, 1e-9);
    EXPECT_NEAR(scaled.df(j), df_scaled, 1e-9);
    const double rss = (x.values.col(j) - f.fitted.col(j)).squaredNorm();
    EXPECT_NEAR(b.per_node(j), 60.0 * std::log(rss) + std::log(60.0) * df, 1e-8);
  }
}

TEST(Bic, ZeroResidual) {
  const DataMatrix x = testing_support::cubic_data(30, 3, 2, 4);
  const ExpandedDesign design = expand(x, BasisSpec{{1}});
  FitResult f = fit(design, x, lambda_max(design, x));
  f.residuals.col(1).setZero();
  EXPECT_EQ(code_of([&] { bic(design, f, f.lambda); }), ErrorCode::kZeroResidual);

  PathResult path;
  path.lambdas = {f.lambda, 0.5 * f.lambda};
  path.fits = {f, fit(design, x, 0.5 * f.lambda)};
  score_path(design, path, 1e-8);
  EXPECT_EQ(path.bic_total[0], std::numeric_limits<double>::infinity());
  EXPECT_EQ(path.selected_index, 1u);
}

TEST(Select, TiesGoToLargerLambda) {
  EXPECT_EQ(select_index({3.0}), 0u);
  EXPECT_EQ(select_index({1.0, 1.0, 1.0}), 0u);
  EXPECT_EQ(select_index({5.0, 2.0, 2.0, 3.0}), 1u);
  EXPECT_EQ(code_of([] { select_index({}); }), ErrorCode::kInvalidArgument);
}

TEST(FitPath, WarmStartedPath) {
  const DataMatrix x = testing_support::cubic_data(50, 10, 9, 5);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const std::vector<double> grid = lambda_grid(design, x, 12, 0.05);
  const PathResult path = fit_path(design, x, grid);
  ASSERT_EQ(path.size(), 12u);
  EXPECT_TRUE(path.graphs.front().empty());
  for (std::size_t i = 0; i < path.size(); ++i) {
    EXPECT_TRUE(path.fits[i].converged) << i;
    EXPECT_LT(path.kkt[i], 1e-6) << i;
    EXPECT_EQ(path.fits[i].lambda, grid[i]);
  }
  EXPECT_LT(path.selected_index, path.size());
  EXPECT_EQ(&select(path).fit, &path.fits[path.selected_index]);

  const FitResult cold = fit(design, x, grid.back());
  EXPECT_NEAR(path.fits.back().objective, cold.objective, 1e-8);

  const PathResult single = fit_path(design, x, {grid[3]});
  EXPECT_EQ(single.selected_index, 0u);
  EXPECT_EQ(select(single).lambda, grid[3]);
}

// Linear basis: the coupled problem is a group-penalized neighborhood
// regression; its edge pattern must match the proximal-gradient reference.
TEST(FitPath, LinearBasisMatchesReference) {
  jamgraph::SimulationConfig config;
  config.d = 8;
  config.n = 150;
  config.edges = 8;
  config.scheme = Scheme::kLinear;
  config.seed = 9;
  const DataMatrix x = standardize(simulate(config).data);
  const ExpandedDesign design = expand(x, BasisSpec{{1}});
  const double lmax = lambda_max(design, x);
  for (double frac : {0.5, 0.25, 0.1}) {
    const FitResult f = fit(design, x, frac * lmax);
    const oracle::JointFit ref = oracle::joint_objective(x.values, {1}, frac * lmax);
    Graph expected(8, false);
    for (int j = 0; j < 8; ++j)
      for (int k = j + 1; k < 8; ++k)
        if (ref.functions[j].col(k).squaredNorm() + ref.functions[k].col(j).squaredNorm() > 0.0)
          expected.add_edge(j, k);
    EXPECT_EQ(edge_set(f.coefficients), expected) << frac;
    EXPECT_NEAR(f.objective, ref.objective, 1e-8);
  }
}
