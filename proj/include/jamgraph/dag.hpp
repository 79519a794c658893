#pragma once

#include <vector>

#include "jamgraph/basis.hpp"
#include "jamgraph/data.hpp"
#include "jamgraph/path.hpp"
#include "jamgraph/solver.hpp"

namespace jamgraph {

// Known causal ordering: order[p] is the variable at position p and
// position[v] its inverse. k precedes j iff position[k] < position[j].
class CausalOrdering {
 public:
  CausalOrdering() = default;
  // Throws kInvalidArgument unless `order` is a permutation of 0..d-1.
  explicit CausalOrdering(std::vector<int> order);
  static CausalOrdering identity(int d);

  int d() const { return static_cast<int>(order_.size()); }
  const std::vector<int>& order() const { return order_; }
  const std::vector<int>& position() const { return position_; }
  bool precedes(int k, int j) const { return position_[k] < position_[j]; }
  // Predecessors of j listed in ordering order.
  std::vector<int> predecessors(int j) const;

 private:
  std::vector<int> order_;
  std::vector<int> position_;
};

// Per-node threshold: max_{k < j} ||Psi_jk^T x_j / n|| / sqrt(n).
double node_lambda_max(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                       int j);
double dag_lambda_max(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering);

// sum_j [ (1/2n) ||x_j - sum_{k<j} Psi_jk b_jk||^2 + lambda sum_{k<j} ||Psi_jk b_jk|| ]
double dag_objective(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                     const CoefficientSet& beta, double lambda);

// Independent group lasso per node over its predecessors, solved by block
// coordinate descent with threshold (1 - n lambda / ||Psi b_hat||)_+.
// Result has directed = true; one objective trace per node with parents.
FitResult fit_dag(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                  double lambda, const SolverOptions& options = {},
                  const CoefficientSet* warm_start = nullptr);

// Per-node analog of kkt_residual with the single-block penalty.
double dag_kkt_residual(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                        const FitResult& fit);

PathResult fit_dag_path(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                        const std::vector<double>& grid, const SolverOptions& options = {});

}  // namespace jamgraph
