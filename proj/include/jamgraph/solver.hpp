#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jamgraph/basis.hpp"
#include "jamgraph/data.hpp"
#include "jamgraph/graph.hpp"

namespace jamgraph {

// beta_jk in R^r for every ordered pair (j, k), j != k, in one flat buffer.
// Blocks for a regressor with reduced rank only use their leading entries.
class CoefficientSet {
 public:
  CoefficientSet() = default;
  CoefficientSet(Eigen::Index d, int r);

  Eigen::Index d() const { return d_; }
  int r() const { return r_; }

  Eigen::Map<Eigen::VectorXd> block(Eigen::Index j, Eigen::Index k) {
    return Eigen::Map<Eigen::VectorXd>(values_.data() + offset(j, k), r_);
  }
  Eigen::Map<const Eigen::VectorXd> block(Eigen::Index j, Eigen::Index k) const {
    return Eigen::Map<const Eigen::VectorXd>(values_.data() + offset(j, k), r_);
  }

  double squared_norm(Eigen::Index j, Eigen::Index k) const { return block(j, k).squaredNorm(); }
  bool all_finite() const;
  void set_zero();

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;

 private:
  std::size_t offset(Eigen::Index j, Eigen::Index k) const {
    return static_cast<std::size_t>((j * d_ + k) * r_);
  }

  Eigen::Index d_ = 0;
  int r_ = 0;
  std::vector<double> values_;
};

struct SolverOptions {
  // Stop when every block moves less than this in function space,
  // ||Psi (beta_new - beta_old)|| / sqrt(n) ...
  double tolerance = 1e-7;
  // ... and the relative objective change over the sweep is below this.
  double objective_tolerance = 1e-10;
  int max_sweeps = 1000;
  // Full residual recompute period, in sweeps.
  int recompute_every = 50;
  // Scale both blocks of a pair by one factor computed from both unthresholded
  // fits. When false, the second block is thresholded with the already
  // shrunk first block (sequential reading of the update).
  bool coupled_threshold = true;
  double edge_tolerance = 1e-8;
  double kkt_tolerance = 1e-6;
  int threads = 1;
};

struct FitResult {
  CoefficientSet coefficients;
  Eigen::MatrixXd fitted;
  Eigen::MatrixXd residuals;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  double lambda = 0.0;
  bool directed = false;
  // Objective of each independently solved subproblem (variable group or DAG
  // node) after every sweep, starting with the initial value.
  std::vector<std::vector<double>> objective_traces;
};

// (1/2n) sum_j ||x_j - sum_k Psi_jk beta_jk||^2
//   + lambda sum_{j<k} (||Psi_jk beta_jk||^2 + ||Psi_kj beta_kj||^2)^{1/2}
double objective(const ExpandedDesign& design, const DataMatrix& x, const CoefficientSet& beta,
                 double lambda);

// fitted.col(j) = sum_{k != j} Psi_jk beta_jk
Eigen::MatrixXd fitted_values(const ExpandedDesign& design, const CoefficientSet& beta);

// Residual cache and coefficients for block coordinate descent over pairs.
class BlockCoordinateState {
 public:
  BlockCoordinateState(const ExpandedDesign& design, const DataMatrix& x, double lambda,
                       CoefficientSet initial, bool coupled_threshold = true);

  // One joint update of beta_jk and beta_kj: partial residuals, projection
  // onto the orthonormal bases, then the pair-wise group soft threshold.
  // Returns the larger of the two function-space changes.
  double block_update(Eigen::Index j, Eigen::Index k);

  // Scratch vectors for block_update; one per thread when groups are solved
  // concurrently.
  struct Workspace {
    explicit Workspace(int r) : fit_jk(r), fit_kj(r), delta_jk(r), delta_kj(r) {}
    Eigen::VectorXd fit_jk;
    Eigen::VectorXd fit_kj;
    Eigen::VectorXd delta_jk;
    Eigen::VectorXd delta_kj;
  };
  double block_update(Eigen::Index j, Eigen::Index k, Workspace& workspace);
  // True when either block of the pair is nonzero.
  bool pair_active(Eigen::Index j, Eigen::Index k) const;

  // Recomputes residual columns of `variables` from scratch using only
  // coefficients inside that set.
  void recompute_residuals(const std::vector<int>& variables);
  // Objective restricted to `variables` from cached residuals.
  double group_objective(const std::vector<int>& variables) const;
  // Same value when every pair outside `nonzero` has zero coefficients; costs
  // O(|nonzero|) instead of O(|variables|^2) for the penalty.
  double group_objective(const std::vector<int>& variables,
                         const std::vector<std::pair<int, int>>& nonzero) const;

  const CoefficientSet& coefficients() const { return beta_; }
  CoefficientSet&& release_coefficients() { return std::move(beta_); }
  const Eigen::MatrixXd& residuals() const { return residuals_; }
  double lambda() const { return lambda_; }

 private:
  const ExpandedDesign& design_;
  const DataMatrix& x_;
  double lambda_;
  bool coupled_;
  double n_;
  CoefficientSet beta_;
  Eigen::MatrixXd residuals_;
  Workspace workspace_;
};

// Block coordinate descent on the full coupled objective from `warm_start`
// (zero when null). Throws kNonFinite.
FitResult fit(const ExpandedDesign& design, const DataMatrix& x, double lambda,
              const SolverOptions& options = {}, const CoefficientSet* warm_start = nullptr);

// Same objective with pairs restricted to lie inside one of the disjoint
// `groups`; every group is solved independently to convergence and all
// cross-group coefficients are exactly zero. With a single group holding
// all variables this is identical to fit().
FitResult fit_groups(const ExpandedDesign& design, const DataMatrix& x, double lambda,
                     const std::vector<std::vector<int>>& groups, const SolverOptions& options = {},
                     const CoefficientSet* warm_start = nullptr);

// Undirected edge (j, k) iff ||beta_jk||^2 + ||beta_kj||^2 > tol.
Graph edge_set(const CoefficientSet& beta, double tol = 1e-8);

// Directed edge k -> j iff ||beta_jk|| > tol.
Graph directed_edge_set(const CoefficientSet& beta, double tol = 1e-8);

// Largest violation of the subgradient optimality conditions. Active pairs
// contribute the norm of the stationarity residual
//   -(1/n) Psi_jk^T res_j + lambda sqrt(n) beta_jk / ||(beta_jk, beta_kj)||
// (stacked over both directions); inactive pairs contribute
// (||g_jk||^2 + ||g_kj||^2 - 1)_+ with g_jk = Psi_jk^T res_j / (lambda n^{3/2}),
// the implied subgradient in unit-ball normalization. When `component_of` is
// given only pairs inside one component are checked.
double kkt_residual(const ExpandedDesign& design, const DataMatrix& x, const FitResult& fit,
                    const std::vector<int>* component_of = nullptr);

}  // namespace jamgraph
