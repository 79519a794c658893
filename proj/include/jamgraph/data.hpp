#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jamgraph {

// n x d observation matrix with column labels. When `standardized` is set,
// `center` and `scale` hold the per-column mean and standard deviation that
// were removed, so x_raw = center + scale * x.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
  bool standardized = false;
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index d() const { return values.cols(); }
};

// Builds a DataMatrix with default names V1..Vd when `names` is empty.
// Throws kInvalidArgument for n < 2, d < 1 or a name count mismatch.
DataMatrix make_data(Eigen::MatrixXd values, std::vector<std::string> names = {});

std::vector<std::string> default_names(Eigen::Index d);

// Centers each column and scales it to unit variance, where variance uses
// the 1/n convention so that ||x_j||^2 / n = 1 afterwards. Already
// standardized input is returned unchanged. Throws kConstantColumn.
DataMatrix standardize(const DataMatrix& x);

// Mean and 1/n standard deviation of one column.
double column_mean(const Eigen::Ref<const Eigen::VectorXd>& column);
double column_sd(const Eigen::Ref<const Eigen::VectorXd>& column);

}  // namespace jamgraph
