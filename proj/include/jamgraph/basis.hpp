#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jamgraph/data.hpp"

namespace jamgraph {

// Polynomial basis family: psi_t(x) = x^degrees[t].
struct BasisSpec {
  std::vector<int> degrees;

  int r() const { return static_cast<int>(degrees.size()); }

  // Parses a comma separated list such as "1,2,3".
  static BasisSpec parse(std::string_view text);
};

// Throws kInvalidArgument unless degrees are nonempty, >= 1 and strictly increasing.
void validate(const BasisSpec& spec);

// Orthonormal basis for one regressor column x_k.
//
// psi = (P - 1 * means^T) * transform, where P holds the raw powers x_k^p for
// p in `degrees`. psi^T psi / n = I. In lenient mode `degrees` may be a
// strict subset of the requested spec.
struct RegressorBasis {
  std::vector<int> degrees;
  Eigen::VectorXd means;
  Eigen::MatrixXd transform;
  Eigen::MatrixXd psi;

  int rank() const { return static_cast<int>(psi.cols()); }
};

struct Orthonormalized {
  Eigen::MatrixXd q;
  Eigen::MatrixXd transform;
};

inline constexpr double kRankThreshold = 1e-10;

// Thin QR scaled by sqrt(n): returns q = m * transform with q^T q / n = I and
// a positive diagonal in the triangular factor. Throws kRankDeficient when the
// smallest singular value of the column-normalized matrix is below `threshold`.
Orthonormalized orthonormalize(const Eigen::MatrixXd& m, double threshold = kRankThreshold);

struct ExpandOptions {
  // Drop dependent power columns instead of failing.
  bool lenient = false;
  double rank_threshold = kRankThreshold;
};

// Per ordered pair (j, k) basis matrices Psi_jk. Under polynomial bases Psi_jk
// depends only on the regressor k, so one RegressorBasis is stored per column
// and shared by every pair (j, k) with that k.
class ExpandedDesign {
 public:
  ExpandedDesign() = default;
  ExpandedDesign(BasisSpec spec, std::vector<RegressorBasis> bases, Eigen::Index n);

  Eigen::Index n() const { return n_; }
  Eigen::Index d() const { return static_cast<Eigen::Index>(bases_.size()); }
  // Nominal basis size |degrees|.
  int r() const { return spec_.r(); }
  const BasisSpec& spec() const { return spec_; }

  const Eigen::MatrixXd& psi(Eigen::Index j, Eigen::Index k) const;
  const RegressorBasis& basis(Eigen::Index j, Eigen::Index k) const;
  // Basis of the regressor column k; same object as basis(j, k) for any j.
  const RegressorBasis& regressor(Eigen::Index k) const {
    return bases_[static_cast<std::size_t>(k)];
  }
  int rank(Eigen::Index j, Eigen::Index k) const { return basis(j, k).rank(); }

 private:
  BasisSpec spec_;
  std::vector<RegressorBasis> bases_;
  Eigen::Index n_ = 0;
};

// Raw powers of one column, uncentered: column t holds x^degrees[t].
Eigen::MatrixXd raw_powers(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const std::vector<int>& degrees);

// Power coefficients c_0..c_p (p = largest kept degree) of the fitted
// component in raw units: when the regressor was standardized as
// z = (x - center) / scale and the response as (y - y_center) / response_scale,
// response_scale * (psi(z) beta)_i = sum_q c_q x_i^q for every row i.
Eigen::VectorXd raw_polynomial(const RegressorBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& beta,
                               double center = 0.0, double scale = 1.0, double response_scale = 1.0);

// Builds the orthonormal regressor basis for one column.
RegressorBasis expand_column(const Eigen::Ref<const Eigen::VectorXd>& x, const BasisSpec& spec,
                             const ExpandOptions& options = {});

// Expands every column. Requires n > r. Throws kRankDeficient (strict mode).
ExpandedDesign expand(const DataMatrix& x, const BasisSpec& spec, const ExpandOptions& options = {});

}  // namespace jamgraph
