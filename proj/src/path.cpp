#include "jamgraph/path.hpp"

#include <cmath>
#include <limits>

#include "jamgraph/error.hpp"

namespace jamgraph {

double lambda_max(const ExpandedDesign& design, const DataMatrix& x, const std::vector<int>* component_of) {
  require(design.d() == x.d() && design.n() == x.n(), "design does not match data");
  const Eigen::Index d = x.d();
  const double n = static_cast<double>(x.n());
  // projections[k].col(j) = Psi_jk^T x_j / n
  std::vector<Eigen::MatrixXd> projections(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    projections[static_cast<std::size_t>(k)] = design.regressor(k).psi.transpose() * x.values / n;
  }
  double best = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      if (component_of != nullptr && (*component_of)[static_cast<std::size_t>(j)] !=
                                         (*component_of)[static_cast<std::size_t>(k)]) {
        continue;
      }
      const double ss = projections[static_cast<std::size_t>(k)].col(j).squaredNorm() +
                        projections[static_cast<std::size_t>(j)].col(k).squaredNorm();
      best = std::max(best, std::sqrt(ss / n));
    }
  }
  return best;
}

std::vector<double> lambda_grid(double lambda_max, int count, double ratio) {
  require(count >= 2, "lambda grid needs at least 2 values");
  require(ratio > 0.0 && ratio < 1.0, "lambda ratio must lie in (0, 1)");
  require(lambda_max > 0.0 && std::isfinite(lambda_max), "lambda_max must be positive");
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double log_ratio = std::log(ratio);
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] = lambda_max * std::exp(log_ratio * i / (count - 1));
  }
  grid.front() = lambda_max;
  grid.back() = lambda_max * ratio;
  return grid;
}

std::vector<double> lambda_grid(const ExpandedDesign& design, const DataMatrix& x, int count, double ratio) {
  return lambda_grid(lambda_max(design, x), count, ratio);
}

BicValues bic(const ExpandedDesign& design, const FitResult& fit, double lambda, bool scale_lambda_by_n) {
  const CoefficientSet& beta = fit.coefficients;
  const Eigen::Index d = beta.d();
  const double n = static_cast<double>(fit.residuals.rows());
  const double denominator_lambda = scale_lambda_by_n ? n * lambda : lambda;
  BicValues out;
  out.per_node.resize(d);
  out.df.resize(d);
  out.rss.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double rss = fit.residuals.col(j).squaredNorm();
    if (!(rss > 0.0)) {
      fail(ErrorCode::kZeroResidual, "zero residual sum of squares for column " + std::to_string(j + 1));
    }
    double df = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (k == j) continue;
      const double coef_norm = beta.squared_norm(j, k);
      if (coef_norm == 0.0) continue;
      const double fitted_norm = n * coef_norm;  // ||Psi_jk b||^2 under Psi^T Psi = n I
      const int rank = design.regressor(k).rank();
      df += 1.0 + (rank - 1) * fitted_norm / (fitted_norm + denominator_lambda);
    }
    out.rss(j) = rss;
    out.df(j) = df;
    out.per_node(j) = n * std::log(rss) + std::log(n) * df;
  }
  out.total = out.per_node.sum();
  return out;
}

void validate_grid(const std::vector<double>& grid) {
  require(!grid.empty(), "lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0 && std::isfinite(grid[i]), "lambda values must be positive and finite");
    if (i > 0) require(grid[i] < grid[i - 1], "lambda grid must be strictly decreasing");
  }
}

std::size_t select_index(const std::vector<double>& bic_total) {
  require(!bic_total.empty(), "cannot select from an empty path");
  std::size_t best = 0;
  for (std::size_t i = 1; i < bic_total.size(); ++i) {
    if (bic_total[i] < bic_total[best]) best = i;
  }
  return best;
}

Selection select(const PathResult& path) {
  require(!path.fits.empty(), "cannot select from an empty path");
  return {path.lambdas[path.selected_index], path.fits[path.selected_index]};
}

void score_path(const ExpandedDesign& design, PathResult& path, double edge_tolerance) {
  const std::size_t count = path.fits.size();
  path.graphs.clear();
  path.bic_total.assign(count, 0.0);
  path.bic_total_nscaled.assign(count, 0.0);
  path.df.assign(count, Eigen::VectorXd());
  path.rss.assign(count, Eigen::VectorXd());
  for (std::size_t i = 0; i < count; ++i) {
    const FitResult& fit = path.fits[i];
    path.graphs.push_back(path.directed ? directed_edge_set(fit.coefficients, edge_tolerance)
                                        : edge_set(fit.coefficients, edge_tolerance));
    try {
      BicValues values = bic(design, fit, path.lambdas[i]);
      path.bic_total[i] = values.total;
      path.df[i] = std::move(values.df);
      path.rss[i] = std::move(values.rss);
      path.bic_total_nscaled[i] = bic(design, fit, path.lambdas[i], true).total;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroResidual) throw;
      // Saturated fit: never selected.
      path.bic_total[i] = std::numeric_limits<double>::infinity();
      path.bic_total_nscaled[i] = std::numeric_limits<double>::infinity();
      path.df[i] = Eigen::VectorXd::Constant(fit.coefficients.d(), std::numeric_limits<double>::quiet_NaN());
      path.rss[i] = fit.residuals.colwise().squaredNorm().transpose();
    }
  }
  path.selected_index = select_index(path.bic_total);
}

PathResult fit_path(const ExpandedDesign& design, const DataMatrix& x, const std::vector<double>& grid,
                    const SolverOptions& options, const std::vector<std::vector<int>>& groups) {
  validate_grid(grid);
  std::vector<std::vector<int>> effective = groups;
  if (effective.empty()) {
    effective.emplace_back();
    for (Eigen::Index j = 0; j < x.d(); ++j) effective.front().push_back(static_cast<int>(j));
  }
  std::vector<int> component_of(static_cast<std::size_t>(x.d()), -1);
  for (std::size_t g = 0; g < effective.size(); ++g) {
    for (int v : effective[g]) component_of[static_cast<std::size_t>(v)] = static_cast<int>(g);
  }
  // Variables outside every group form their own singleton components.
  int next_id = static_cast<int>(effective.size());
  for (int& c : component_of) {
    if (c < 0) c = next_id++;
  }

  PathResult path;
  path.lambdas = grid;
  path.fits.reserve(grid.size());
  const CoefficientSet* warm = nullptr;
  for (double lambda : grid) {
    path.fits.push_back(fit_groups(design, x, lambda, effective, options, warm));
    warm = &path.fits.back().coefficients;
    path.kkt.push_back(kkt_residual(design, x, path.fits.back(), &component_of));
  }
  score_path(design, path, options.edge_tolerance);
  return path;
}

}  // namespace jamgraph
