#include "jamgraph/data.hpp"

#include <cmath>

#include "jamgraph/error.hpp"

namespace jamgraph {

std::vector<std::string> default_names(Eigen::Index d) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) names.push_back("V" + std::to_string(j + 1));
  return names;
}

DataMatrix make_data(Eigen::MatrixXd values, std::vector<std::string> names) {
  require(values.rows() >= 2, "data needs at least 2 rows");
  require(values.cols() >= 1, "data needs at least 1 column");
  if (names.empty()) names = default_names(values.cols());
  require(static_cast<Eigen::Index>(names.size()) == values.cols(),
          "column name count does not match column count");
  DataMatrix out;
  out.values = std::move(values);
  out.names = std::move(names);
  return out;
}

double column_mean(const Eigen::Ref<const Eigen::VectorXd>& column) {
  return column.mean();
}

double column_sd(const Eigen::Ref<const Eigen::VectorXd>& column) {
  const double mean = column.mean();
  return std::sqrt((column.array() - mean).square().mean());
}

DataMatrix standardize(const DataMatrix& x) {
  if (x.standardized) return x;
  require(x.n() >= 2, "data needs at least 2 rows");
  DataMatrix out = x;
  out.center.resize(x.d());
  out.scale.resize(x.d());
  for (Eigen::Index j = 0; j < x.d(); ++j) {
    const auto column = x.values.col(j);
    if (!column.allFinite()) {
      fail(ErrorCode::kParse, "column " + std::to_string(j + 1) + " (" +
                                      x.names[static_cast<std::size_t>(j)] +
                                      ") contains non-finite values");
    }
    const double mean = column_mean(column);
    const double sd = column_sd(column);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      fail(ErrorCode::kConstantColumn, "column " + std::to_string(j + 1) + " (" +
                                           x.names[static_cast<std::size_t>(j)] +
                                           ") has zero variance");
    }
    out.values.col(j) = (column.array() - mean) / sd;
    out.center(j) = mean;
    out.scale(j) = sd;
  }
  out.standardized = true;
  return out;
}

}  // namespace jamgraph
