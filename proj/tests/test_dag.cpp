#include <algorithm>

#include <gtest/gtest.h>

#include "jamgraph/dag.hpp"
#include "jamgraph/path.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace jamgraph;
using testing_support::code_of;

namespace {

DataMatrix linear_dag_data(int d, int n, std::int64_t m, std::uint64_t seed) {
  SimulationConfig config;
  config.d = d;
  config.n = n;
  config.edges = m;
  config.scheme = Scheme::kLinear;
  config.seed = seed;
  return standardize(simulate(config).data);
}

}  // namespace

TEST(CausalOrdering, Validation) {
  const CausalOrdering o({2, 0, 1});
  EXPECT_EQ(o.position(), (std::vector<int>{1, 2, 0}));
  EXPECT_TRUE(o.precedes(2, 0));
  EXPECT_FALSE(o.precedes(1, 0));
  EXPECT_EQ(o.predecessors(1), (std::vector<int>{2, 0}));
  EXPECT_TRUE(o.predecessors(2).empty());
  EXPECT_EQ(code_of([] { CausalOrdering({0, 0, 1}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { CausalOrdering({0, 3, 1}); }), ErrorCode::kInvalidArgument);
}

TEST(FitDag, FirstNodeHasNoParentsAndEdgesFollowOrdering) {
  const DataMatrix x = testing_support::cubic_data(80, 8, 10, 3);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  for (const auto& order : {std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}, std::vector<int>{7, 6, 5, 4, 3, 2, 1, 0},
                            std::vector<int>{3, 0, 6, 1, 7, 2, 5, 4}}) {
    const CausalOrdering ordering(order);
    const FitResult f = fit_dag(design, x, ordering, 0.05 * dag_lambda_max(design, x, ordering));
    EXPECT_TRUE(f.directed);
    const Graph g = directed_edge_set(f.coefficients);
    EXPECT_FALSE(g.empty());
    for (const auto& [src, dst] : g.edges()) {
      EXPECT_TRUE(ordering.precedes(src, dst));
      EXPECT_NE(dst, order.front());
    }
  }
}

TEST(FitDag, NodeLambdaMaxGivesEmptyParents) {
  const DataMatrix x = testing_support::cubic_data(60, 6, 8, 4);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const CausalOrdering ordering = CausalOrdering::identity(6);
  const double lmax = dag_lambda_max(design, x, ordering);
  double largest = 0.0;
  for (int j = 0; j < 6; ++j) largest = std::max(largest, node_lambda_max(design, x, ordering, j));
  EXPECT_EQ(lmax, largest);
  EXPECT_EQ(node_lambda_max(design, x, ordering, 0), 0.0);

  EXPECT_TRUE(directed_edge_set(fit_dag(design, x, ordering, lmax).coefficients).empty());
  EXPECT_FALSE(directed_edge_set(fit_dag(design, x, ordering, 0.999 * lmax).coefficients).empty());
}

TEST(FitDag, LinearBasisMatchesNodeOracle) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const DataMatrix x = linear_dag_data(15, 200, 15, seed);
    const ExpandedDesign design = expand(x, BasisSpec{{1}});
    const CausalOrdering ordering = CausalOrdering::identity(15);
    const double lmax = dag_lambda_max(design, x, ordering);
    for (double frac : {0.5, 0.2, 0.08}) {
      const double lambda = frac * lmax;
      const FitResult f = fit_dag(design, x, ordering, lambda);
      const Graph g = directed_edge_set(f.coefficients);
      double oracle_objective = 0.0;
      for (int j = 0; j < 15; ++j) {
        const oracle::NodeFit ref = oracle::node_group_lasso(x.values, j, ordering.predecessors(j), {1}, lambda);
        oracle_objective += ref.objective;
        std::vector<int> parents;
        for (int k = 0; k < 15; ++k)
          if (g.has_edge(k, j)) parents.push_back(k);
        EXPECT_EQ(parents, ref.parents) << "seed " << seed << " node " << j << " frac " << frac;
      }
      EXPECT_NEAR(dag_objective(design, x, ordering, f.coefficients, lambda), oracle_objective, 1e-8);
      EXPECT_NEAR(f.objective, oracle_objective, 1e-8);
    }
  }
}

TEST(FitDag, KktAndMonotoneTraces) {
  const DataMatrix x = testing_support::cubic_data(100, 10, 12, 6);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2, 3}});
  const CausalOrdering ordering = CausalOrdering::identity(10);
  SolverOptions options;
  options.tolerance = 1e-10;
  const FitResult f = fit_dag(design, x, ordering, 0.2 * dag_lambda_max(design, x, ordering), options);
  EXPECT_TRUE(f.converged);
  EXPECT_LT(dag_kkt_residual(design, x, ordering, f), 1e-6);
  for (const auto& trace : f.objective_traces)
    for (std::size_t s = 1; s < trace.size(); ++s) EXPECT_LE(trace[s] - trace[s - 1], 1e-12);
}

TEST(FitDag, PathAndErrors) {
  const DataMatrix x = testing_support::cubic_data(60, 6, 6, 7);
  const ExpandedDesign design = expand(x, BasisSpec{{1, 2}});
  const CausalOrdering ordering = CausalOrdering::identity(6);
  const std::vector<double> grid = lambda_grid(dag_lambda_max(design, x, ordering), 8, 0.05);
  const PathResult path = fit_dag_path(design, x, ordering, grid);
  EXPECT_TRUE(path.directed);
  EXPECT_TRUE(path.graphs.front().empty());
  for (const Graph& g : path.graphs) EXPECT_TRUE(g.directed());

  EXPECT_EQ(code_of([&] { fit_dag(design, x, CausalOrdering::identity(5), 0.1); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { fit_dag(design, x, ordering, -1.0); }), ErrorCode::kInvalidArgument);
}
