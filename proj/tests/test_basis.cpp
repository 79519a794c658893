#include <cmath>

#include <gtest/gtest.h>

#include "jamgraph/basis.hpp"
#include "jamgraph/data.hpp"
#include "jamgraph/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace jamgraph;
using testing_support::code_of;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Standardize, ThreePointColumn) {
  Eigen::MatrixXd v(3, 1);
  v << 1, 2, 3;
  DataMatrix z = standardize(make_data(v));
  // mean 2, 1/n variance 2/3
  const double s = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(z.values(0, 0), -1.0 / s, 1e-15);
  EXPECT_NEAR(z.values(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(z.values(2, 0), 1.0 / s, 1e-15);
  EXPECT_NEAR(z.values.col(0).squaredNorm() / 3.0, 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(z.center(0), 2.0);
  EXPECT_DOUBLE_EQ(z.scale(0), s);
}

TEST(Standardize, Idempotent) {
  DataMatrix z = standardize(make_data(testing_support::gaussian(40, 4, 3)));
  DataMatrix again = standardize(z);
  EXPECT_EQ(again.values, z.values);

  DataMatrix unflagged = make_data(z.values);
  EXPECT_LT(max_abs(standardize(unflagged).values - z.values), 1e-13);
}

TEST(Standardize, ConstantColumn) {
  Eigen::MatrixXd v = testing_support::gaussian(10, 2, 5);
  v.col(1).setConstant(5.0);
  EXPECT_EQ(code_of([&] { standardize(make_data(v)); }), ErrorCode::kConstantColumn);
}

TEST(Data, DefaultNamesAndShapeChecks) {
  DataMatrix x = make_data(Eigen::MatrixXd::Zero(3, 2));
  EXPECT_EQ(x.names, (std::vector<std::string>{"V1", "V2"}));
  EXPECT_EQ(code_of([] { make_data(Eigen::MatrixXd::Zero(1, 2)); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { make_data(Eigen::MatrixXd::Zero(3, 2), {"a"}); }), ErrorCode::kInvalidArgument);
}

TEST(BasisSpec, Parse) {
  EXPECT_EQ(BasisSpec::parse("1,2,3").degrees, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(BasisSpec::parse(" 1 , 3 ").degrees, (std::vector<int>{1, 3}));
  for (const char* bad : {"", "0", "2,1", "1,1", "1,x", "1,"}) {
    EXPECT_EQ(code_of([&] { BasisSpec::parse(bad); }), ErrorCode::kInvalidArgument) << bad;
  }
}

TEST(Orthonormalize, AlreadyOrthonormal) {
  const Eigen::MatrixXd m = oracle::cholesky_basis(testing_support::gaussian(60, 1, 9).col(0), {1, 2, 3});
  Orthonormalized on = orthonormalize(m);
  EXPECT_LT(max_abs(on.q - m), 1e-10);
  EXPECT_LT(max_abs(on.transform - Eigen::MatrixXd::Identity(3, 3)), 1e-10);
}

TEST(Orthonormalize, DuplicatedColumn) {
  Eigen::MatrixXd m(20, 2);
  m.col(0) = testing_support::gaussian(20, 1, 2).col(0);
  m.col(1) = 2.0 * m.col(0);
  EXPECT_EQ(code_of([&] { orthonormalize(m); }), ErrorCode::kRankDeficient);
}

TEST(Orthonormalize, RandomMatrix) {
  const Eigen::MatrixXd m = testing_support::gaussian(50, 3, 17);
  Orthonormalized on = orthonormalize(m);
  const double n = 50.0;
  EXPECT_LT(max_abs(on.q.transpose() * on.q / n - Eigen::MatrixXd::Identity(3, 3)), 1e-10);
  EXPECT_LT(max_abs(m * on.transform - on.q), 1e-10);
}

TEST(ExpandColumn, LinearIsScaledColumn) {
  const Eigen::VectorXd x = testing_support::gaussian(30, 1, 4).col(0).array() * 3.0 + 1.0;
  RegressorBasis b = expand_column(x, BasisSpec{{1}});
  const Eigen::VectorXd expected = (x.array() - column_mean(x)) / column_sd(x);
  ASSERT_EQ(b.rank(), 1);
  EXPECT_LT((b.psi.col(0) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExpandColumn, CubicOrthonormalAndSpansRawPowers) {
  const Eigen::VectorXd x = testing_support::gaussian(100, 1, 21).col(0);
  RegressorBasis b = expand_column(x, BasisSpec{{1, 2, 3}});
  EXPECT_LT(max_abs(b.psi.transpose() * b.psi / 100.0 - Eigen::MatrixXd::Identity(3, 3)), 1e-8);
  EXPECT_LT(b.psi.colwise().sum().cwiseAbs().maxCoeff(), 1e-10);
  // The Cholesky basis spans the same space, so projecting it onto psi loses nothing.
  const Eigen::MatrixXd other = oracle::cholesky_basis(x, {1, 2, 3});
  const Eigen::MatrixXd projected = b.psi * (b.psi.transpose() * other / 100.0);
  EXPECT_LT(max_abs(projected - other), 1e-9);
}

TEST(ExpandColumn, BinaryColumnRankDeficient) {
  Eigen::VectorXd x(12);
  for (int i = 0; i < 12; ++i) x(i) = i % 3 == 0 ? 1.0 : -1.0;
  EXPECT_EQ(code_of([&] { expand_column(x, BasisSpec{{1, 2}}); }), ErrorCode::kRankDeficient);

  ExpandOptions lenient;
  lenient.lenient = true;
  RegressorBasis b = expand_column(x, BasisSpec{{1, 2, 3}}, lenient);
  // x^2 is constant and x^3 = x on {-1, 1}
  EXPECT_EQ(b.degrees, (std::vector<int>{1}));
  EXPECT_EQ(b.rank(), 1);
}

TEST(Expand, NeedsMoreRowsThanBasisFunctions) {
  const DataMatrix x = standardize(make_data(testing_support::gaussian(3, 2, 1)));
  EXPECT_EQ(code_of([&] { expand(x, BasisSpec{{1, 2, 3}}); }), ErrorCode::kInvalidArgument);
}

TEST(Expand, PairBasisDependsOnRegressorOnly) {
  const DataMatrix x = standardize(make_data(testing_support::gaussian(25, 3, 8)));
  ExpandedDesign design = expand(x, BasisSpec{{1, 2}});
  EXPECT_EQ(design.d(), 3);
  EXPECT_EQ(design.r(), 2);
  EXPECT_EQ(&design.psi(0, 2), &design.psi(1, 2));
}

TEST(RawPolynomial, ReproducesFittedComponentOnRawScale) {
  Eigen::MatrixXd raw = testing_support::gaussian(40, 2, 33);
  raw.col(0) = raw.col(0).array() * 2.5 + 4.0;
  raw.col(1) = raw.col(1).array() * 0.3 - 1.0;
  const DataMatrix z = standardize(make_data(raw));
  const RegressorBasis b = expand_column(z.values.col(0), BasisSpec{{1, 2, 3}});
  Eigen::VectorXd beta(3);
  beta << 0.4, -0.7, 0.25;

  const Eigen::VectorXd c = raw_polynomial(b, beta, z.center(0), z.scale(0), z.scale(1));
  ASSERT_EQ(c.size(), 4);
  const Eigen::VectorXd fitted = z.scale(1) * (b.psi * beta);
  for (int i = 0; i < 40; ++i) {
    const double xi = raw(i, 0);
    const double poly = c(0) + c(1) * xi + c(2) * xi * xi + c(3) * xi * xi * xi;
    EXPECT_NEAR(poly, fitted(i), 1e-9) << i;
  }
}
