#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jamgraph/basis.hpp"
#include "jamgraph/data.hpp"
#include "jamgraph/graph.hpp"
#include "jamgraph/solver.hpp"

namespace jamgraph {

// Largest canonical correlation between the column spaces of A and B.
// Both must be column-centered with full column rank (kRankDeficient otherwise).
double canonical_corr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Marginal association between variables j and k computed from the design.
using AssociationMeasure = std::function<double(const ExpandedDesign&, int j, int k)>;

// Canonical correlation between Psi_kj (functions of x_j) and Psi_jk
// (functions of x_k): the top singular value of Psi_kj^T Psi_jk / n.
double basis_canonical_corr(const ExpandedDesign& design, int j, int k);

// Symmetric d x d matrix of basis_canonical_corr for all pairs; diagonal 1.
Eigen::MatrixXd canonical_corr_matrix(const ExpandedDesign& design, int threads = 1);

struct ScreenReport {
  Graph marginal_graph;
  // component_of[v] is the id of v's component; ids are numbered by smallest member.
  std::vector<int> component_of;
  std::vector<std::vector<int>> components;
  Eigen::MatrixXd rho;
  double lambda2 = 0.0;
};

// Union-find labelling of connected components.
std::vector<std::vector<int>> connected_components(const Graph& graph);

// Edge (j, k) iff rho_jk >= lambda2. A null measure selects canonical correlation.
ScreenReport marginal_graph(const ExpandedDesign& design, double lambda2, int threads = 1,
                            const AssociationMeasure& measure = {});
ScreenReport report_from_rho(Eigen::MatrixXd rho, double lambda2);

// Screen, then solve the coupled problem independently on every component.
std::pair<FitResult, ScreenReport> fit_screened(const ExpandedDesign& design, const DataMatrix& x, double lambda,
                                                double lambda2, const SolverOptions& options = {});

}  // namespace jamgraph
