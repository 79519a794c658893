#include "jamgraph/dag.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jamgraph/error.hpp"
#include "parallel.hpp"

namespace jamgraph {

CausalOrdering::CausalOrdering(std::vector<int> order) : order_(std::move(order)) {
  position_.assign(order_.size(), -1);
  for (std::size_t p = 0; p < order_.size(); ++p) {
    const int v = order_[p];
    require(v >= 0 && v < static_cast<int>(order_.size()), "ordering entry out of range");
    require(position_[static_cast<std::size_t>(v)] < 0, "ordering repeats variable " + std::to_string(v + 1));
    position_[static_cast<std::size_t>(v)] = static_cast<int>(p);
  }
}

CausalOrdering CausalOrdering::identity(int d) {
  std::vector<int> order(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
  return CausalOrdering(std::move(order));
}

std::vector<int> CausalOrdering::predecessors(int j) const {
  const int p = position_[static_cast<std::size_t>(j)];
  return {order_.begin(), order_.begin() + p};
}

namespace {

void check_dag_inputs(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering) {
  if (design.d() != x.d() || design.n() != x.n()) {
    fail(ErrorCode::kShapeMismatch, "design does not match data");
  }
  require(ordering.d() == x.d(), "ordering size does not match the number of variables");
}

struct NodeOutcome {
  int sweeps = 0;
  bool converged = true;
  std::vector<double> trace;
};

NodeOutcome solve_node(const ExpandedDesign& design, const DataMatrix& x, const std::vector<int>& parents,
                       int j, double lambda, const SolverOptions& options, CoefficientSet& beta) {
  NodeOutcome outcome;
  if (parents.empty()) return outcome;
  const double n = static_cast<double>(x.n());
  const double threshold = n * lambda;
  Eigen::VectorXd residual = x.values.col(j);
  auto recompute = [&] {
    residual = x.values.col(j);
    for (int k : parents) {
      const auto& psi = design.regressor(k).psi;
      const auto b = beta.block(j, k).head(psi.cols());
      if (b.squaredNorm() != 0.0) residual.noalias() -= psi * b;
    }
  };
  auto node_objective = [&] {
    double penalty = 0.0;
    for (int k : parents) penalty += std::sqrt(n * beta.squared_norm(j, k));
    return residual.squaredNorm() / (2.0 * n) + lambda * penalty;
  };
  recompute();
  double previous = node_objective();
  outcome.trace.push_back(previous);
  outcome.converged = false;
  Eigen::VectorXd fit;
  Eigen::VectorXd delta;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int k : parents) {
      const Eigen::MatrixXd& psi = design.regressor(k).psi;
      auto b = beta.block(j, k).head(psi.cols());
      fit = b;
      fit.noalias() += psi.transpose() * residual / n;
      const double nu = std::sqrt(n * fit.squaredNorm());
      if (!std::isfinite(nu)) {
        fail(ErrorCode::kNonFinite,
             "non-finite block update for edge " + std::to_string(k + 1) + " -> " + std::to_string(j + 1));
      }
      fit *= nu > threshold ? 1.0 - threshold / nu : 0.0;
      delta = fit - b;
      const double change = delta.norm();
      if (change > 0.0) residual.noalias() -= psi * delta;
      b = fit;
      max_change = std::max(max_change, change);
    }
    if (sweep % options.recompute_every == 0) recompute();
    const double current = node_objective();
    outcome.trace.push_back(current);
    outcome.sweeps = sweep;
    const bool flat = std::abs(previous - current) <= options.objective_tolerance * std::max(1.0, std::abs(previous));
    previous = current;
    if (max_change < options.tolerance && flat) {
      outcome.converged = true;
      break;
    }
  }
  return outcome;
}

}  // namespace

double node_lambda_max(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                       int j) {
  check_dag_inputs(design, x, ordering);
  const double n = static_cast<double>(x.n());
  double best = 0.0;
  for (int k : ordering.predecessors(j)) {
    const double norm = (design.regressor(k).psi.transpose() * x.values.col(j) / n).norm();
    best = std::max(best, norm / std::sqrt(n));
  }
  return best;
}

double dag_lambda_max(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering) {
  double best = 0.0;
  for (int j = 0; j < x.d(); ++j) best = std::max(best, node_lambda_max(design, x, ordering, j));
  return best;
}

double dag_objective(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                     const CoefficientSet& beta, double lambda) {
  check_dag_inputs(design, x, ordering);
  const double n = static_cast<double>(x.n());
  double total = 0.0;
  for (int j = 0; j < x.d(); ++j) {
    Eigen::VectorXd residual = x.values.col(j);
    double penalty = 0.0;
    for (int k : ordering.predecessors(j)) {
      const auto& psi = design.regressor(k).psi;
      const Eigen::VectorXd f = psi * beta.block(j, k).head(psi.cols());
      residual -= f;
      penalty += f.norm();
    }
    total += residual.squaredNorm() / (2.0 * n) + lambda * penalty;
  }
  return total;
}

FitResult fit_dag(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                  double lambda, const SolverOptions& options, const CoefficientSet* warm_start) {
  check_dag_inputs(design, x, ordering);
  require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive and finite");
  require(options.max_sweeps >= 1 && options.recompute_every >= 1, "invalid solver options");
  const int d = static_cast<int>(x.d());

  CoefficientSet beta(d, design.r());
  if (warm_start != nullptr) {
    require(warm_start->d() == d && warm_start->r() == design.r(), "warm start has the wrong shape");
    for (int j = 0; j < d; ++j) {
      for (int k : ordering.predecessors(j)) {
        const int rank = design.regressor(k).rank();
        beta.block(j, k).head(rank) = warm_start->block(j, k).head(rank);
      }
    }
  }

  std::vector<NodeOutcome> outcomes(static_cast<std::size_t>(d));
  detail::parallel_for(static_cast<std::size_t>(d), options.threads, [&](std::size_t node) {
    const int j = static_cast<int>(node);
    outcomes[node] = solve_node(design, x, ordering.predecessors(j), j, lambda, options, beta);
  });

  FitResult result;
  result.lambda = lambda;
  result.directed = true;
  result.coefficients = std::move(beta);
  if (!result.coefficients.all_finite()) fail(ErrorCode::kNonFinite, "solver produced non-finite coefficients");
  result.fitted = fitted_values(design, result.coefficients);
  result.residuals = x.values - result.fitted;
  result.objective = dag_objective(design, x, ordering, result.coefficients, lambda);
  result.converged = true;
  for (auto& outcome : outcomes) {
    result.sweeps = std::max(result.sweeps, outcome.sweeps);
    result.converged = result.converged && outcome.converged;
    if (!outcome.trace.empty()) result.objective_traces.push_back(std::move(outcome.trace));
  }
  return result;
}

double dag_kkt_residual(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                        const FitResult& fit) {
  check_dag_inputs(design, x, ordering);
  require(fit.lambda > 0.0, "KKT check needs a positive lambda");
  const double n = static_cast<double>(x.n());
  const double lambda = fit.lambda;
  const Eigen::MatrixXd residuals = x.values - fitted_values(design, fit.coefficients);
  double worst = 0.0;
  for (int j = 0; j < x.d(); ++j) {
    for (int k : ordering.predecessors(j)) {
      const auto& psi = design.regressor(k).psi;
      const Eigen::VectorXd g = psi.transpose() * residuals.col(j) / n;
      const auto b = fit.coefficients.block(j, k).head(psi.cols());
      const double norm = b.norm();
      double violation = 0.0;
      if (norm > 0.0) {
        violation = (lambda * std::sqrt(n) / norm * b - g).norm();
      } else {
        violation = std::max(0.0, g.squaredNorm() / (lambda * lambda * n) - 1.0);
      }
      worst = std::max(worst, violation);
    }
  }
  return worst;
}

PathResult fit_dag_path(const ExpandedDesign& design, const DataMatrix& x, const CausalOrdering& ordering,
                        const std::vector<double>& grid, const SolverOptions& options) {
  validate_grid(grid);
  PathResult path;
  path.directed = true;
  path.lambdas = grid;
  path.fits.reserve(grid.size());
  const CoefficientSet* warm = nullptr;
  for (double lambda : grid) {
    path.fits.push_back(fit_dag(design, x, ordering, lambda, options, warm));
    warm = &path.fits.back().coefficients;
    path.kkt.push_back(dag_kkt_residual(design, x, ordering, path.fits.back()));
  }
  score_path(design, path, options.edge_tolerance);
  return path;
}

}  // namespace jamgraph
