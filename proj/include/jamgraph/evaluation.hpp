#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jamgraph/dag.hpp"
#include "jamgraph/graph.hpp"
#include "jamgraph/path.hpp"

namespace jamgraph {

struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Counts over the C(d, 2) unordered pairs, or over ordered pairs for directed
// graphs: the d(d-1)/2 pairs consistent with `ordering` when one is given
// (edges against the ordering are rejected), all d(d-1) otherwise.
// Throws kDimensionMismatch when d or directedness differ.
Confusion confusion(const Graph& est, const Graph& truth, const CausalOrdering* ordering = nullptr);

struct RocRow {
  double lambda = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t edge_count = 0;
  double bic_total = 0.0;
};

// One row per lambda, in path order.
std::vector<RocRow> roc_table(const PathResult& path, const Graph& truth);
std::vector<RocRow> roc_table(const std::vector<double>& lambdas, const std::vector<Graph>& graphs,
                              const std::vector<double>& bic_total, const Graph& truth);

struct RocSummaryRow {
  std::size_t lambda_index = 0;
  double lambda_mean = 0.0;
  double tp_mean = 0.0;
  double fp_mean = 0.0;
  double edges_mean = 0.0;
};

// Pointwise means by lambda-grid index. All tables must have equal length.
std::vector<RocSummaryRow> aggregate_by_index(const std::vector<std::vector<RocRow>>& tables);

// Piecewise-linear value of `y` at `target` along the curve (x[i], y[i]),
// taken in path order. x is replaced by its running maximum so the curve is
// monotone; targets outside the covered range clamp to the end points, and
// among equal x the last point wins.
double interpolate_at(const std::vector<double>& x, const std::vector<double>& y, double target);

// Mean tp of one table at a given number of false positives.
double tp_at_fp(const std::vector<RocRow>& table, double fp);
// tp_mean of an aggregated curve at a given fp_mean.
double tp_at_fp(const std::vector<RocSummaryRow>& curve, double fp);

// Alternative aggregation: every replicate curve is interpolated at each value
// of `fp_grid` and the interpolated lambda, tp and edge counts are averaged.
std::vector<RocSummaryRow> aggregate_by_fp(const std::vector<std::vector<RocRow>>& tables,
                                           const std::vector<double>& fp_grid);

struct SvgCurve {
  std::string label;
  std::vector<RocSummaryRow> rows;
};

// Line plot of tp_mean against fp_mean, one polyline per curve.
std::string roc_svg(const std::vector<SvgCurve>& curves, const std::string& title = {});

}  // namespace jamgraph
