#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "jamgraph/basis.hpp"
#include "jamgraph/data.hpp"
#include "jamgraph/graph.hpp"
#include "jamgraph/solver.hpp"

namespace jamgraph {

// Smallest lambda at which a sweep from zero keeps every pair at zero:
// max_{j<k} (||b_jk||^2 + ||b_kj||^2)^{1/2} / sqrt(n), b_jk = Psi_jk^T x_j / n.
// When `component_of` is given only within-component pairs count.
double lambda_max(const ExpandedDesign& design, const DataMatrix& x,
                  const std::vector<int>* component_of = nullptr);

// count log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, int count = 100, double ratio = 0.01);
std::vector<double> lambda_grid(const ExpandedDesign& design, const DataMatrix& x, int count = 100,
                                double ratio = 0.01);

struct BicValues {
  Eigen::VectorXd per_node;
  Eigen::VectorXd df;
  Eigen::VectorXd rss;
  double total = 0.0;
};

// BIC_j = n log(RSS_j) + log(n) DF_j, with
// DF_j = |S_j| + sum_{k in S_j} (r_k - 1) ||Psi_jk b||^2 / (||Psi_jk b||^2 + lambda).
// `scale_lambda_by_n` replaces lambda by n * lambda in the DF denominator.
// Throws kZeroResidual when some RSS_j is zero.
BicValues bic(const ExpandedDesign& design, const FitResult& fit, double lambda,
              bool scale_lambda_by_n = false);

struct PathResult {
  std::vector<double> lambdas;
  std::vector<FitResult> fits;
  std::vector<Graph> graphs;
  std::vector<double> bic_total;
  // Same criterion with the n-scaled DF denominator; diagnostic only.
  std::vector<double> bic_total_nscaled;
  std::vector<Eigen::VectorXd> df;
  std::vector<Eigen::VectorXd> rss;
  std::vector<double> kkt;
  std::size_t selected_index = 0;
  bool directed = false;

  std::size_t size() const { return lambdas.size(); }
};

// Throws kInvalidArgument unless the grid is nonempty, positive and strictly decreasing.
void validate_grid(const std::vector<double>& grid);

// Warm-started fits along a decreasing grid. When `groups` is nonempty the
// fits are restricted to within-group pairs (see fit_groups).
PathResult fit_path(const ExpandedDesign& design, const DataMatrix& x, const std::vector<double>& grid,
                    const SolverOptions& options = {}, const std::vector<std::vector<int>>& groups = {});

// Index minimizing total BIC; ties go to the larger lambda.
std::size_t select_index(const std::vector<double>& bic_total);

struct Selection {
  double lambda;
  const FitResult& fit;
};
Selection select(const PathResult& path);

// Fills graphs, BIC, DF, RSS and the selected index from path.fits.
void score_path(const ExpandedDesign& design, PathResult& path, double edge_tolerance);

}  // namespace jamgraph
