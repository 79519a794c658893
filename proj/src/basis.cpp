#include "jamgraph/basis.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "jamgraph/error.hpp"

namespace jamgraph {

BasisSpec BasisSpec::parse(std::string_view text) {
  BasisSpec spec;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
      fail(ErrorCode::kInvalidArgument, "invalid basis degree '" + std::string(token) + "'");
    }
    spec.degrees.push_back(value);
    start = end + 1;
  }
  validate(spec);
  return spec;
}

void validate(const BasisSpec& spec) {
  require(!spec.degrees.empty(), "basis needs at least one degree");
  for (std::size_t t = 0; t < spec.degrees.size(); ++t) {
    require(spec.degrees[t] >= 1, "basis degrees must be >= 1");
    if (t > 0) require(spec.degrees[t] > spec.degrees[t - 1], "basis degrees must be strictly increasing");
  }
}

namespace {

double smallest_normalized_singular_value(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd scaled = m;
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    const double norm = m.col(t).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) return 0.0;
    scaled.col(t) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

Orthonormalized orthonormalize(const Eigen::MatrixXd& m, double threshold) {
  const Eigen::Index n = m.rows();
  const Eigen::Index r = m.cols();
  require(r >= 1 && n > r, "orthonormalize needs more rows than columns");
  if (smallest_normalized_singular_value(m) < threshold) {
    fail(ErrorCode::kRankDeficient, "basis matrix is rank deficient");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd upper = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  // Flip signs so the triangular factor has a positive diagonal.
  for (Eigen::Index t = 0; t < r; ++t) {
    if (upper(t, t) < 0.0) {
      upper.row(t) *= -1.0;
      q.col(t) *= -1.0;
    }
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  Orthonormalized out;
  out.q = q * root_n;
  // m = q0 * upper  =>  q0 * sqrt(n) = m * upper^{-1} * sqrt(n)
  out.transform = upper.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(r, r)) * root_n;
  return out;
}

Eigen::MatrixXd raw_powers(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const std::vector<int>& degrees) {
  Eigen::MatrixXd out(x.size(), static_cast<Eigen::Index>(degrees.size()));
  for (std::size_t t = 0; t < degrees.size(); ++t) {
    out.col(static_cast<Eigen::Index>(t)) = x.array().pow(static_cast<double>(degrees[t]));
  }
  return out;
}

RegressorBasis expand_column(const Eigen::Ref<const Eigen::VectorXd>& x, const BasisSpec& spec,
                             const ExpandOptions& options) {
  validate(spec);
  require(x.size() > spec.r(), "basis expansion needs n > r");
  Eigen::MatrixXd raw = raw_powers(x, spec.degrees);
  Eigen::VectorXd means = raw.colwise().mean().transpose();
  raw.rowwise() -= means.transpose();

  RegressorBasis basis;
  if (!options.lenient) {
    Orthonormalized on = orthonormalize(raw, options.rank_threshold);
    basis.degrees = spec.degrees;
    basis.means = std::move(means);
    basis.transform = std::move(on.transform);
    basis.psi = std::move(on.q);
    return basis;
  }

  // Lenient: keep power columns greedily while the kept set stays full rank.
  std::vector<Eigen::Index> kept;
  for (Eigen::Index t = 0; t < raw.cols(); ++t) {
    Eigen::MatrixXd candidate(raw.rows(), static_cast<Eigen::Index>(kept.size()) + 1);
    for (std::size_t i = 0; i < kept.size(); ++i) candidate.col(static_cast<Eigen::Index>(i)) = raw.col(kept[i]);
    candidate.col(candidate.cols() - 1) = raw.col(t);
    if (smallest_normalized_singular_value(candidate) >= options.rank_threshold) kept.push_back(t);
  }
  Eigen::MatrixXd reduced(raw.rows(), static_cast<Eigen::Index>(kept.size()));
  basis.means.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    reduced.col(col) = raw.col(kept[i]);
    basis.means(col) = means(kept[i]);
    basis.degrees.push_back(spec.degrees[static_cast<std::size_t>(kept[i])]);
  }
  if (kept.empty()) {
    basis.transform.resize(0, 0);
    basis.psi.resize(raw.rows(), 0);
    return basis;
  }
  Orthonormalized on = orthonormalize(reduced, options.rank_threshold);
  basis.transform = std::move(on.transform);
  basis.psi = std::move(on.q);
  return basis;
}

Eigen::VectorXd raw_polynomial(const RegressorBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& beta,
                               double center, double scale, double response_scale) {
  require(beta.size() >= basis.rank(), "coefficient block shorter than the basis");
  require(scale > 0.0, "scale must be positive");
  const int top = basis.degrees.empty() ? 0 : basis.degrees.back();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(top + 1);
  if (basis.rank() == 0) return out;
  // psi(z) beta = sum_t w_t (z^p_t - m_t) with w = transform * beta.
  const Eigen::VectorXd w = basis.transform * beta.head(basis.rank());
  for (int t = 0; t < basis.rank(); ++t) {
    const int p = basis.degrees[static_cast<std::size_t>(t)];
    out(0) -= w(t) * basis.means(t);
    // ((x - c) / s)^p = s^-p sum_q C(p, q) x^q (-c)^(p - q)
    double binom = 1.0;
    for (int q = 0; q <= p; ++q) {
      out(q) += w(t) * binom * std::pow(-center, p - q) / std::pow(scale, p);
      binom = binom * (p - q) / (q + 1);
    }
  }
  return out * response_scale;
}

ExpandedDesign::ExpandedDesign(BasisSpec spec, std::vector<RegressorBasis> bases, Eigen::Index n)
    : spec_(std::move(spec)), bases_(std::move(bases)), n_(n) {}

const RegressorBasis& ExpandedDesign::basis(Eigen::Index j, Eigen::Index k) const {
  require(j >= 0 && k >= 0 && j < d() && k < d() && j != k, "invalid basis pair index");
  return bases_[static_cast<std::size_t>(k)];
}

const Eigen::MatrixXd& ExpandedDesign::psi(Eigen::Index j, Eigen::Index k) const {
  return basis(j, k).psi;
}

ExpandedDesign expand(const DataMatrix& x, const BasisSpec& spec, const ExpandOptions& options) {
  validate(spec);
  require(x.n() > spec.r(), "basis expansion needs more samples than basis functions");
  std::vector<RegressorBasis> bases;
  bases.reserve(static_cast<std::size_t>(x.d()));
  for (Eigen::Index k = 0; k < x.d(); ++k) {
    try {
      bases.push_back(expand_column(x.values.col(k), spec, options));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRankDeficient) throw;
      fail(ErrorCode::kRankDeficient,
           "basis for column " + std::to_string(k + 1) + " (" + x.names[static_cast<std::size_t>(k)] +
               ") is rank deficient; every pair (j, " + std::to_string(k + 1) +
               ") is affected (use lenient mode to drop dependent powers)");
    }
  }
  return ExpandedDesign(spec, std::move(bases), x.n());
}

}  // namespace jamgraph
