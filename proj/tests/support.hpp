#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "jamgraph/data.hpp"
#include "jamgraph/error.hpp"
#include "jamgraph/simulate.hpp"

namespace testing_support {

// n x d standard normal matrix from the library generator.
inline Eigen::MatrixXd gaussian(int n, int d, std::uint64_t seed) {
  jamgraph::Rng rng(seed);
  Eigen::MatrixXd m(n, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = rng.normal();
  return m;
}

// Standardized cubic-scheme data from a random DAG; gives fits with a mix of
// active and inactive pairs.
inline jamgraph::DataMatrix cubic_data(int n, int d, std::int64_t edges, std::uint64_t seed) {
  jamgraph::SimulationConfig config;
  config.d = d;
  config.n = n;
  config.edges = edges;
  config.seed = seed;
  return jamgraph::standardize(jamgraph::simulate(config).data);
}

// Error code thrown by f; records a test failure when nothing is thrown.
inline jamgraph::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const jamgraph::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return static_cast<jamgraph::ErrorCode>(-1);
}

inline std::vector<int> degrees_up_to(int r) {
  std::vector<int> out;
  for (int p = 1; p <= r; ++p) out.push_back(p);
  return out;
}

}  // namespace testing_support
