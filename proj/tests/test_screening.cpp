#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "jamgraph/path.hpp"
#include "jamgraph/screening.hpp"
#include "support.hpp"

using namespace jamgraph;
using testing_support::code_of;

namespace {

Eigen::MatrixXd centered(Eigen::MatrixXd m) {
  m.rowwise() -= m.colwise().mean();
  return m;
}

// sqrt of the top eigenvalue of Saa^{-1} Sab Sbb^{-1} Sba.
double classical_canonical_corr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd saa = a.transpose() * a;
  const Eigen::MatrixXd sbb = b.transpose() * b;
  const Eigen::MatrixXd sab = a.transpose() * b;
  const Eigen::MatrixXd m = saa.inverse() * sab * sbb.inverse() * sab.transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> eig(m, false);
  return std::sqrt(eig.eigenvalues().real().maxCoeff());
}

Eigen::MatrixXd centered_powers(const Eigen::VectorXd& x, int r) {
  return centered(raw_powers(x, testing_support::degrees_up_to(r)));
}

}  // namespace

TEST(CanonicalCorr, SelfIsOne) {
  const Eigen::MatrixXd a = centered(testing_support::gaussian(40, 3, 1));
  EXPECT_EQ(canonical_corr(a, a), 1.0);
}

TEST(CanonicalCorr, MatchesClassicalFormula) {
  Eigen::MatrixXd a = centered(testing_support::gaussian(60, 3, 2));
  Eigen::MatrixXd b = testing_support::gaussian(60, 2, 3);
  b.col(0) += 0.5 * a.col(1);
  b = centered(b);
  EXPECT_NEAR(canonical_corr(a, b), classical_canonical_corr(a, b), 1e-10);
  EXPECT_EQ(code_of([&] { canonical_corr(a, b.topRows(10)); }), ErrorCode::kInvalidArgument);
}

TEST(CanonicalCorr, BasisVersionEqualsRawPowers) {
  const DataMatrix x = testing_support::cubic_data(80, 5, 6, 4);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const Eigen::MatrixXd rho = canonical_corr_matrix(design);
  const Eigen::MatrixXd rho2 = canonical_corr_matrix(design, 3);
  EXPECT_EQ(rho, rho2);
  for (int j = 0; j < 5; ++j) {
    EXPECT_EQ(rho(j, j), 1.0);
    for (int k = 0; k < 5; ++k) {
      if (j == k) continue;
      EXPECT_EQ(rho(j, k), rho(k, j));
      EXPECT_GE(rho(j, k), 0.0);
      EXPECT_LE(rho(j, k), 1.0);
      const double expected =
          classical_canonical_corr(centered_powers(x.values.col(j), 3), centered_powers(x.values.col(k), 3));
      EXPECT_NEAR(rho(j, k), expected, 1e-9);
      EXPECT_NEAR(basis_canonical_corr(design, j, k), rho(j, k), 1e-12);
    }
  }
}

TEST(CanonicalCorr, IndependentColumnsBelowPermutationNull) {
  const Eigen::MatrixXd g = testing_support::gaussian(500, 2, 5);
  const Eigen::MatrixXd a = centered_powers(g.col(0), 3);
  const Eigen::MatrixXd b = centered_powers(g.col(1), 3);
  const double observed = canonical_corr(a, b);

  Rng rng(77);
  std::vector<double> null;
  std::vector<int> rows(500);
  for (int i = 0; i < 500; ++i) rows[i] = i;
  for (int p = 0; p < 200; ++p) {
    for (int i = 499; i > 0; --i) std::swap(rows[i], rows[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    Eigen::MatrixXd shuffled(500, 3);
    for (int i = 0; i < 500; ++i) shuffled.row(i) = b.row(rows[i]);
    null.push_back(canonical_corr(a, shuffled));
  }
  std::sort(null.begin(), null.end());
  EXPECT_LT(observed, null[197]);
}

TEST(Components, NumberedBySmallestMember) {
  Graph g(6, false);
  g.add_edge(3, 5);
  g.add_edge(0, 4);
  const auto comps = connected_components(g);
  EXPECT_EQ(comps, (std::vector<std::vector<int>>{{0, 4}, {1}, {2}, {3, 5}}));

  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(4, 4);
  rho(1, 3) = rho(3, 1) = 0.6;
  rho(0, 2) = rho(2, 0) = 0.4;
  const ScreenReport report = report_from_rho(rho, 0.5);
  EXPECT_EQ(report.component_of, (std::vector<int>{0, 1, 2, 1}));
  EXPECT_EQ(report.marginal_graph.size(), 1u);
  EXPECT_EQ(code_of([&] { report_from_rho(rho, 1.5); }), ErrorCode::kInvalidArgument);
}

TEST(MarginalGraph, ZeroThresholdIsComplete) {
  const DataMatrix x = testing_support::cubic_data(50, 7, 5, 6);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const ScreenReport report = marginal_graph(design, 0.0);
  EXPECT_EQ(report.marginal_graph.size(), 21u);
  EXPECT_EQ(report.components.size(), 1u);
}

TEST(MarginalGraph, CustomMeasure) {
  const DataMatrix x = testing_support::cubic_data(50, 4, 3, 6);
  const ExpandedDesign design = expand(x, BasisSpec{{1}});
  const ScreenReport report =
      marginal_graph(design, 0.5, 1, [](const ExpandedDesign&, int j, int k) { return j + k == 3 ? 0.9 : 0.1; });
  EXPECT_EQ(report.components, (std::vector<std::vector<int>>{{0, 3}, {1, 2}}));
}

// Independent blocks never share a component. A block can still split when one
// of its edges is weak, so exact recovery is only required on most seeds.
TEST(MarginalGraph, RecoversIndependentBlocks) {
  int matched = 0;
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    SimulationConfig config;
    config.d = 5;
    config.edges = 6;
    config.n = 500;
    config.blocks = 2;
    config.seed = static_cast<std::uint64_t>(seed);
    const DataMatrix x = standardize(simulate(config).data);
    const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
    const ScreenReport report = marginal_graph(design, 0.5);
    for (const auto& c : report.components) {
      const bool first = c.front() < 5;
      for (int v : c) EXPECT_EQ(v < 5, first) << "seed " << seed;
    }
    if (report.components == std::vector<std::vector<int>>{{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}}) ++matched;
  }
  EXPECT_GE(matched, 15);
}

TEST(FitScreened, ZeroThresholdReproducesFullFit) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DataMatrix x = testing_support::cubic_data(50, 12, 10, seed);
    const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
    const double lambda = 0.3 * lambda_max(design, x);
    const FitResult full = fit(design, x, lambda);
    const auto [screened, report] = fit_screened(design, x, lambda, 0.0);
    EXPECT_EQ(report.components.size(), 1u);
    EXPECT_EQ(edge_set(screened.coefficients), edge_set(full.coefficients));
    EXPECT_NEAR(screened.objective, full.objective, 1e-8);
    for (std::size_t i = 0; i < full.coefficients.values().size(); ++i)
      EXPECT_NEAR(screened.coefficients.values()[i], full.coefficients.values()[i], 1e-8);
  }
}

TEST(FitScreened, EdgesStayInsideComponents) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DataMatrix x = testing_support::cubic_data(50, 15, 10, seed);
    const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
    for (double lambda2 : {0.3, 0.5}) {
      const auto [f, report] = fit_screened(design, x, 0.1 * lambda_max(design, x), lambda2);
      for (const auto& [a, b] : edge_set(f.coefficients, 0.0).edges())
        EXPECT_EQ(report.component_of[a], report.component_of[b]) << seed << " " << lambda2;
      EXPECT_LE(lambda_max(design, x, &report.component_of), lambda_max(design, x));
    }
  }
}
