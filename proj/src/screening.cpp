#include "jamgraph/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jamgraph/error.hpp"
#include "parallel.hpp"

namespace jamgraph {

namespace {

double clamp_correlation(double rho) {
  if (!(rho > 0.0)) return 0.0;
  // Exactly collinear bases come out within rounding of 1.
  if (rho > 1.0 - 1e-12) return 1.0;
  return rho;
}

// Largest eigenvalue of a symmetric gram matrix; the sizes up to 3 that every
// polynomial basis of degree <= 3 produces skip the iterative solver.
double top_gram_eigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& g) {
  if (g.rows() == 1) return g(0, 0);
  if (g.rows() == 2) {
    const double half_trace = 0.5 * (g(0, 0) + g(1, 1));
    const double half_gap = 0.5 * (g(0, 0) - g(1, 1));
    return half_trace + std::sqrt(half_gap * half_gap + g(0, 1) * g(0, 1));
  }
  if (g.rows() == 3) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
    eig.computeDirect(Eigen::Matrix3d(g), Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

double top_singular_value(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  const double top = m.rows() <= m.cols() ? top_gram_eigenvalue(m * m.transpose())
                                          : top_gram_eigenvalue(m.transpose() * m);
  return std::sqrt(std::max(0.0, top));
}

class UnionFind {
 public:
  explicit UnionFind(int size) : parent_(static_cast<std::size_t>(size)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int v) {
    while (parent_[static_cast<std::size_t>(v)] != v) {
      auto& p = parent_[static_cast<std::size_t>(v)];
      p = parent_[static_cast<std::size_t>(p)];
      v = p;
    }
    return v;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller index as root.
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

double canonical_corr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require(a.rows() == b.rows(), "canonical correlation needs equal row counts");
  require(a.cols() >= 1 && b.cols() >= 1, "canonical correlation needs nonempty blocks");
  const Orthonormalized qa = orthonormalize(a);
  const Orthonormalized qb = orthonormalize(b);
  const double n = static_cast<double>(a.rows());
  return clamp_correlation(top_singular_value(qa.q.transpose() * qb.q / n));
}

double basis_canonical_corr(const ExpandedDesign& design, int j, int k) {
  const Eigen::MatrixXd& psi_kj = design.psi(k, j);
  const Eigen::MatrixXd& psi_jk = design.psi(j, k);
  if (psi_kj.cols() == 0 || psi_jk.cols() == 0) return 0.0;
  return clamp_correlation(top_singular_value(psi_kj.transpose() * psi_jk / static_cast<double>(design.n())));
}

Eigen::MatrixXd canonical_corr_matrix(const ExpandedDesign& design, int threads) {
  const int d = static_cast<int>(design.d());
  const double n = static_cast<double>(design.n());
  std::vector<Eigen::Index> offset(static_cast<std::size_t>(d) + 1, 0);
  for (int k = 0; k < d; ++k) offset[k + 1] = offset[k] + design.regressor(k).rank();
  Eigen::MatrixXd stacked(design.n(), offset.back());
  for (int k = 0; k < d; ++k) {
    stacked.middleCols(offset[k], design.regressor(k).rank()) = design.regressor(k).psi;
  }

  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(d, d);
  constexpr int kChunk = 64;
  const int chunks = (d + kChunk - 1) / kChunk;
  detail::parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t c) {
    const int first = static_cast<int>(c) * kChunk;
    const int last = std::min(d, first + kChunk);
    const Eigen::Index rows = offset[last] - offset[first];
    // Only pairs k > j are needed, so the product starts at this chunk's columns.
    const Eigen::MatrixXd cross =
        stacked.middleCols(offset[first], rows).transpose() * stacked.rightCols(offset.back() - offset[first]) / n;
    for (int j = first; j < last; ++j) {
      const Eigen::Index rj = offset[j + 1] - offset[j];
      for (int k = j + 1; k < d; ++k) {
        const Eigen::Index rk = offset[k + 1] - offset[k];
        const double value = clamp_correlation(
            top_singular_value(cross.block(offset[j] - offset[first], offset[k] - offset[first], rj, rk)));
        rho(j, k) = value;
        rho(k, j) = value;
      }
    }
  });
  return rho;
}

std::vector<std::vector<int>> connected_components(const Graph& graph) {
  UnionFind uf(graph.d());
  for (const auto& [a, b] : graph.edge_set()) uf.unite(a, b);
  std::vector<std::vector<int>> components;
  std::vector<int> id(static_cast<std::size_t>(graph.d()), -1);
  for (int v = 0; v < graph.d(); ++v) {
    const int root = uf.find(v);
    if (id[static_cast<std::size_t>(root)] < 0) {
      id[static_cast<std::size_t>(root)] = static_cast<int>(components.size());
      components.emplace_back();
    }
    components[static_cast<std::size_t>(id[static_cast<std::size_t>(root)])].push_back(v);
  }
  return components;
}

ScreenReport report_from_rho(Eigen::MatrixXd rho, double lambda2) {
  require(lambda2 >= 0.0 && lambda2 <= 1.0, "lambda2 must lie in [0, 1]");
  require(rho.rows() == rho.cols(), "association matrix must be square");
  const int d = static_cast<int>(rho.rows());
  ScreenReport report;
  report.lambda2 = lambda2;
  report.marginal_graph = Graph(d, false);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      if (rho(j, k) >= lambda2) report.marginal_graph.add_edge(j, k);
    }
  }
  report.components = connected_components(report.marginal_graph);
  report.component_of.assign(static_cast<std::size_t>(d), -1);
  for (std::size_t c = 0; c < report.components.size(); ++c) {
    for (int v : report.components[c]) report.component_of[static_cast<std::size_t>(v)] = static_cast<int>(c);
  }
  report.rho = std::move(rho);
  return report;
}

ScreenReport marginal_graph(const ExpandedDesign& design, double lambda2, int threads,
                            const AssociationMeasure& measure) {
  require(lambda2 >= 0.0 && lambda2 <= 1.0, "lambda2 must lie in [0, 1]");
  if (!measure) return report_from_rho(canonical_corr_matrix(design, threads), lambda2);
  const int d = static_cast<int>(design.d());
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      const double value = measure(design, j, k);
      rho(j, k) = value;
      rho(k, j) = value;
    }
  }
  return report_from_rho(std::move(rho), lambda2);
}

std::pair<FitResult, ScreenReport> fit_screened(const ExpandedDesign& design, const DataMatrix& x, double lambda,
                                                double lambda2, const SolverOptions& options) {
  ScreenReport report = marginal_graph(design, lambda2, options.threads);
  FitResult result = fit_groups(design, x, lambda, report.components, options);
  return {std::move(result), std::move(report)};
}

}  // namespace jamgraph
