#include "jamgraph/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jamgraph/error.hpp"
#include "parallel.hpp"

namespace jamgraph {

CoefficientSet::CoefficientSet(Eigen::Index d, int r)
    : d_(d), r_(r), values_(static_cast<std::size_t>(d * d * r), 0.0) {
  require(d >= 0 && r >= 1, "invalid coefficient set shape");
}

bool CoefficientSet::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void CoefficientSet::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

namespace {

void check_shapes(const ExpandedDesign& design, const DataMatrix& x, const CoefficientSet& beta) {
  if (design.d() != x.d() || design.n() != x.n() || beta.d() != x.d() || beta.r() != design.r()) {
    fail(ErrorCode::kShapeMismatch,
         "shape mismatch: design " + std::to_string(design.n()) + "x" + std::to_string(design.d()) +
             " (r=" + std::to_string(design.r()) + "), data " + std::to_string(x.n()) + "x" +
             std::to_string(x.d()) + ", coefficients d=" + std::to_string(beta.d()) +
             " r=" + std::to_string(beta.r()));
  }
}

std::vector<std::pair<int, int>> pairs_of(const std::vector<int>& group) {
  std::vector<int> sorted = group;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(sorted.size() * (sorted.size() - 1) / 2);
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    for (std::size_t b = a + 1; b < sorted.size(); ++b) pairs.emplace_back(sorted[a], sorted[b]);
  }
  return pairs;
}

}  // namespace

Eigen::MatrixXd fitted_values(const ExpandedDesign& design, const CoefficientSet& beta) {
  Eigen::MatrixXd fitted = Eigen::MatrixXd::Zero(design.n(), design.d());
  for (Eigen::Index j = 0; j < design.d(); ++j) {
    for (Eigen::Index k = 0; k < design.d(); ++k) {
      if (k == j) continue;
      const auto& psi = design.regressor(k).psi;
      const auto b = beta.block(j, k).head(psi.cols());
      if (b.squaredNorm() == 0.0) continue;
      fitted.col(j).noalias() += psi * b;
    }
  }
  return fitted;
}

double objective(const ExpandedDesign& design, const DataMatrix& x, const CoefficientSet& beta,
                 double lambda) {
  check_shapes(design, x, beta);
  require(lambda >= 0.0, "lambda must be non-negative");
  const double n = static_cast<double>(x.n());
  const Eigen::MatrixXd residuals = x.values - fitted_values(design, beta);
  const double loss = residuals.squaredNorm() / (2.0 * n);
  double penalty = 0.0;
  for (Eigen::Index j = 0; j < x.d(); ++j) {
    for (Eigen::Index k = j + 1; k < x.d(); ++k) {
      const auto& psi_k = design.regressor(k).psi;
      const auto& psi_j = design.regressor(j).psi;
      const double a = (psi_k * beta.block(j, k).head(psi_k.cols())).squaredNorm();
      const double b = (psi_j * beta.block(k, j).head(psi_j.cols())).squaredNorm();
      penalty += std::sqrt(a + b);
    }
  }
  return loss + lambda * penalty;
}

BlockCoordinateState::BlockCoordinateState(const ExpandedDesign& design, const DataMatrix& x,
                                           double lambda, CoefficientSet initial,
                                           bool coupled_threshold)
    : design_(design),
      x_(x),
      lambda_(lambda),
      coupled_(coupled_threshold),
      n_(static_cast<double>(x.n())),
      beta_(std::move(initial)),
      workspace_(design.r()) {
  check_shapes(design, x, beta_);
  residuals_ = x.values - fitted_values(design, beta_);
}

double BlockCoordinateState::block_update(Eigen::Index j, Eigen::Index k) {
  return block_update(j, k, workspace_);
}

double BlockCoordinateState::block_update(Eigen::Index j, Eigen::Index k, Workspace& workspace) {
  const Eigen::MatrixXd& psi_k = design_.regressor(k).psi;  // Psi_jk
  const Eigen::MatrixXd& psi_j = design_.regressor(j).psi;  // Psi_kj
  auto beta_jk = beta_.block(j, k).head(psi_k.cols());
  auto beta_kj = beta_.block(k, j).head(psi_j.cols());
  auto fit_jk = workspace.fit_jk.head(psi_k.cols());
  auto fit_kj = workspace.fit_kj.head(psi_j.cols());

  // Steps 1-2: regress r_jk = res_j + Psi_jk beta_jk on Psi_jk, which under
  // Psi^T Psi = n I is Psi_jk^T res_j / n + beta_jk.
  fit_jk.noalias() = psi_k.transpose() * residuals_.col(j);
  fit_jk = fit_jk / n_ + beta_jk;
  fit_kj.noalias() = psi_j.transpose() * residuals_.col(k);
  fit_kj = fit_kj / n_ + beta_kj;

  // Step 3: ||Psi beta||^2 = n ||beta||^2.
  const double threshold = n_ * lambda_;
  const double nu = std::sqrt(n_ * (fit_jk.squaredNorm() + fit_kj.squaredNorm()));
  if (!std::isfinite(nu)) {
    fail(ErrorCode::kNonFinite,
         "non-finite block update for pair (" + std::to_string(j + 1) + ", " + std::to_string(k + 1) + ")");
  }
  const double scale_jk = nu > threshold ? 1.0 - threshold / nu : 0.0;
  double scale_kj = scale_jk;
  if (!coupled_) {
    const double nu2 = std::sqrt(n_ * (scale_jk * scale_jk * fit_jk.squaredNorm() + fit_kj.squaredNorm()));
    scale_kj = nu2 > threshold ? 1.0 - threshold / nu2 : 0.0;
  }

  auto delta_jk = workspace.delta_jk.head(psi_k.cols());
  auto delta_kj = workspace.delta_kj.head(psi_j.cols());
  delta_jk = scale_jk * fit_jk - beta_jk;
  delta_kj = scale_kj * fit_kj - beta_kj;
  const double change_jk = delta_jk.norm();
  const double change_kj = delta_kj.norm();
  if (change_jk > 0.0) {
    residuals_.col(j).noalias() -= psi_k * delta_jk;
    beta_jk += delta_jk;
  }
  if (change_kj > 0.0) {
    residuals_.col(k).noalias() -= psi_j * delta_kj;
    beta_kj += delta_kj;
  }
  if (scale_jk == 0.0) beta_jk.setZero();
  if (scale_kj == 0.0) beta_kj.setZero();
  return std::max(change_jk, change_kj);
}

bool BlockCoordinateState::pair_active(Eigen::Index j, Eigen::Index k) const {
  return beta_.squared_norm(j, k) != 0.0 || beta_.squared_norm(k, j) != 0.0;
}

void BlockCoordinateState::recompute_residuals(const std::vector<int>& variables) {
  for (int j : variables) {
    Eigen::VectorXd column = x_.values.col(j);
    for (int k : variables) {
      if (k == j) continue;
      const auto& psi = design_.regressor(k).psi;
      const auto b = beta_.block(j, k).head(psi.cols());
      if (b.squaredNorm() == 0.0) continue;
      column.noalias() -= psi * b;
    }
    residuals_.col(j) = column;
  }
}

double BlockCoordinateState::group_objective(const std::vector<int>& variables) const {
  double loss = 0.0;
  for (int j : variables) loss += residuals_.col(j).squaredNorm();
  double penalty = 0.0;
  for (int j : variables) {
    for (int k : variables) {
      if (k <= j) continue;
      penalty += std::sqrt(n_ * (beta_.squared_norm(j, k) + beta_.squared_norm(k, j)));
    }
  }
  return loss / (2.0 * n_) + lambda_ * penalty;
}

double BlockCoordinateState::group_objective(const std::vector<int>& variables,
                                             const std::vector<std::pair<int, int>>& nonzero) const {
  double loss = 0.0;
  for (int j : variables) loss += residuals_.col(j).squaredNorm();
  double penalty = 0.0;
  for (const auto& [j, k] : nonzero) penalty += std::sqrt(n_ * (beta_.squared_norm(j, k) + beta_.squared_norm(k, j)));
  return loss / (2.0 * n_) + lambda_ * penalty;
}

FitResult fit_groups(const ExpandedDesign& design, const DataMatrix& x, double lambda,
                     const std::vector<std::vector<int>>& groups, const SolverOptions& options,
                     const CoefficientSet* warm_start) {
  require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive and finite");
  require(options.max_sweeps >= 1, "max_sweeps must be >= 1");
  require(options.recompute_every >= 1, "recompute_every must be >= 1");
  const Eigen::Index d = x.d();

  std::vector<int> owner(static_cast<std::size_t>(d), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int v : groups[g]) {
      require(v >= 0 && v < d, "group member out of range");
      require(owner[static_cast<std::size_t>(v)] < 0, "groups must be disjoint");
      owner[static_cast<std::size_t>(v)] = static_cast<int>(g);
    }
  }

  CoefficientSet initial(d, design.r());
  if (warm_start != nullptr) {
    require(warm_start->d() == d && warm_start->r() == design.r(), "warm start has the wrong shape");
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        const int gj = owner[static_cast<std::size_t>(j)];
        if (k == j || gj < 0 || gj != owner[static_cast<std::size_t>(k)]) continue;
        const int rank = design.regressor(k).rank();
        initial.block(j, k).head(rank) = warm_start->block(j, k).head(rank);
      }
    }
  }
  BlockCoordinateState state(design, x, lambda, std::move(initial), options.coupled_threshold);

  std::vector<int> sweeps(groups.size(), 0);
  std::vector<char> converged(groups.size(), 1);
  std::vector<std::vector<double>> traces(groups.size());

  detail::parallel_for(groups.size(), options.threads, [&](std::size_t g) {
    const std::vector<int>& group = groups[g];
    if (group.size() < 2) return;
    const auto pairs = pairs_of(group);
    std::vector<std::pair<int, int>> active;
    BlockCoordinateState::Workspace workspace(design.r());
    std::vector<double>& trace = traces[g];
    double previous = state.group_objective(group);
    trace.push_back(previous);
    converged[g] = 0;
    // Full sweeps alternate with sweeps over the currently nonzero pairs.
    // Convergence is only declared after a full sweep.
    bool full = true;
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
      double max_change = 0.0;
      const auto& order = full ? pairs : active;
      for (const auto& [j, k] : order) max_change = std::max(max_change, state.block_update(j, k, workspace));
      if (sweep % options.recompute_every == 0) state.recompute_residuals(group);
      // Active sweeps only touch pairs in `active`, so every other pair is
      // still zero; after a full sweep the list is rebuilt first.
      if (full) {
        active.clear();
        for (const auto& pair : pairs) {
          if (state.pair_active(pair.first, pair.second)) active.push_back(pair);
        }
      }
      const double current = state.group_objective(group, active);
      trace.push_back(current);
      sweeps[g] = sweep;
      const bool small_step = max_change < options.tolerance;
      const bool flat = std::abs(previous - current) <= options.objective_tolerance * std::max(1.0, std::abs(previous));
      previous = current;
      if (full) {
        if (small_step && flat) {
          converged[g] = 1;
          break;
        }
        full = active.empty();
      } else if (small_step && flat) {
        full = true;
      }
    }
  });

  FitResult result;
  result.lambda = lambda;
  result.coefficients = state.release_coefficients();
  if (!result.coefficients.all_finite()) fail(ErrorCode::kNonFinite, "solver produced non-finite coefficients");
  result.fitted = fitted_values(design, result.coefficients);
  result.residuals = x.values - result.fitted;
  result.objective = objective(design, x, result.coefficients, lambda);
  result.sweeps = sweeps.empty() ? 0 : *std::max_element(sweeps.begin(), sweeps.end());
  result.converged = std::all_of(converged.begin(), converged.end(), [](char c) { return c != 0; });
  for (auto& trace : traces) {
    if (!trace.empty()) result.objective_traces.push_back(std::move(trace));
  }
  return result;
}

FitResult fit(const ExpandedDesign& design, const DataMatrix& x, double lambda,
              const SolverOptions& options, const CoefficientSet* warm_start) {
  std::vector<int> all(static_cast<std::size_t>(x.d()));
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
  return fit_groups(design, x, lambda, {all}, options, warm_start);
}

Graph edge_set(const CoefficientSet& beta, double tol) {
  require(tol >= 0.0, "edge tolerance must be non-negative");
  Graph graph(static_cast<int>(beta.d()), false);
  for (Eigen::Index j = 0; j < beta.d(); ++j) {
    for (Eigen::Index k = j + 1; k < beta.d(); ++k) {
      if (beta.squared_norm(j, k) + beta.squared_norm(k, j) > tol) {
        graph.add_edge(static_cast<int>(j), static_cast<int>(k));
      }
    }
  }
  return graph;
}

Graph directed_edge_set(const CoefficientSet& beta, double tol) {
  require(tol >= 0.0, "edge tolerance must be non-negative");
  Graph graph(static_cast<int>(beta.d()), true);
  for (Eigen::Index j = 0; j < beta.d(); ++j) {
    for (Eigen::Index k = 0; k < beta.d(); ++k) {
      if (k != j && std::sqrt(beta.squared_norm(j, k)) > tol) {
        graph.add_edge(static_cast<int>(k), static_cast<int>(j));
      }
    }
  }
  return graph;
}

double kkt_residual(const ExpandedDesign& design, const DataMatrix& x, const FitResult& fit,
                    const std::vector<int>* component_of) {
  const CoefficientSet& beta = fit.coefficients;
  check_shapes(design, x, beta);
  require(fit.lambda > 0.0, "KKT check needs a positive lambda");
  const Eigen::Index d = x.d();
  const double n = static_cast<double>(x.n());
  const double lambda = fit.lambda;
  const Eigen::MatrixXd residuals = x.values - fitted_values(design, beta);

  // gradients[k].col(j) = Psi_jk^T res_j / n
  std::vector<Eigen::MatrixXd> gradients(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    gradients[static_cast<std::size_t>(k)] = design.regressor(k).psi.transpose() * residuals / n;
  }

  double worst = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      if (component_of != nullptr && (*component_of)[static_cast<std::size_t>(j)] !=
                                         (*component_of)[static_cast<std::size_t>(k)]) {
        continue;
      }
      const int rank_k = design.regressor(k).rank();
      const int rank_j = design.regressor(j).rank();
      const Eigen::VectorXd g_jk = gradients[static_cast<std::size_t>(k)].col(j);
      const Eigen::VectorXd g_kj = gradients[static_cast<std::size_t>(j)].col(k);
      const auto b_jk = beta.block(j, k).head(rank_k);
      const auto b_kj = beta.block(k, j).head(rank_j);
      const double pair_norm = std::sqrt(b_jk.squaredNorm() + b_kj.squaredNorm());
      double violation = 0.0;
      if (pair_norm > 0.0) {
        const double weight = lambda * std::sqrt(n) / pair_norm;
        const double s_jk = (weight * b_jk - g_jk).squaredNorm();
        const double s_kj = (weight * b_kj - g_kj).squaredNorm();
        violation = std::sqrt(s_jk + s_kj);
      } else {
        const double implied = (g_jk.squaredNorm() + g_kj.squaredNorm()) / (lambda * lambda * n);
        violation = std::max(0.0, implied - 1.0);
      }
      worst = std::max(worst, violation);
    }
  }
  return worst;
}

}  // namespace jamgraph
