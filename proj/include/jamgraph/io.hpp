#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "jamgraph/data.hpp"
#include "jamgraph/evaluation.hpp"
#include "jamgraph/graph.hpp"
#include "jamgraph/path.hpp"
#include "jamgraph/screening.hpp"
#include "jamgraph/simulate.hpp"

namespace jamgraph::io {

std::string read_text(const std::string& path);
void write_text(const std::string& path, std::string_view content);

// Shortest representation that parses back to the same double.
std::string format_double(double value);
// Whole cell must parse; accepts nan/inf spellings. Returns false otherwise.
bool parse_double(std::string_view text, double& value);

// Header row of names, then one row per observation. Errors report the
// 1-based file line and column of the offending cell (kParse).
DataMatrix parse_data_csv(std::string_view text);
DataMatrix read_data_csv(const std::string& path);
std::string format_data_csv(const DataMatrix& data);
void write_data_csv(const std::string& path, const DataMatrix& data);

// Edge list with header `a,b` (undirected, a < b) or `src,dst` (directed);
// cells are variable names, one edge per row, lexicographic by index.
std::string format_edge_list(const Graph& graph, const std::vector<std::string>& names);
void write_edge_list(const std::string& path, const Graph& graph, const std::vector<std::string>& names);
// The header decides directedness. Cells may be names or 1-based indices.
// Unknown names throw kDimensionMismatch.
Graph parse_edge_list(std::string_view text, const std::vector<std::string>& names);
Graph read_edge_list(const std::string& path, const std::vector<std::string>& names);

// lambda,edge_count,bic_total,df_total,rss_total,bic_total_nscaled,kkt_residual,converged,sweeps
std::string format_path_csv(const PathResult& path);
// lambda_index,lambda,a,b (or src,dst) for every edge of every fit.
std::string format_path_edges(const PathResult& path, const std::vector<std::string>& names);
// lambda_index,lambda,kkt_residual,converged,sweeps,objective
std::string format_kkt_report(const PathResult& path);

// Graphs and scores of a path read back from its CSV files.
struct PathGraphs {
  std::vector<double> lambdas;
  std::vector<double> bic_total;
  std::vector<Graph> graphs;
};
PathGraphs parse_path_files(std::string_view path_csv, std::string_view path_edges_csv,
                            const std::vector<std::string>& names);
PathGraphs read_path_files(const std::string& path_csv, const std::string& path_edges_csv,
                           const std::vector<std::string>& names);

// Selected fit as JSON: per edge the orthonormal-basis coefficients and the
// power coefficients on the raw data scale. `data` supplies names and, when
// standardized, the center and scale of every column.
std::string format_coefficients_json(const ExpandedDesign& design, const DataMatrix& data, const FitResult& fit,
                                     double edge_tolerance);

// variable,component
std::string format_components_csv(const ScreenReport& report, const std::vector<std::string>& names);
// Square matrix with a leading `variable` column.
std::string format_rho_csv(const ScreenReport& report, const std::vector<std::string>& names);

// {"d", "scheme", "seed", "names", "edges": [{"src", "dst", "b1", "b2", "b3"}]}
// with 1-based node indices.
std::string format_dag_json(const DagSpec& dag, const std::vector<std::string>& names);
DagSpec parse_dag_json(std::string_view text);

// Whitespace- or comma-separated names or 1-based indices, or a JSON array
// of either. Throws kInvalidArgument unless the result is a permutation.
std::vector<int> parse_ordering(std::string_view text, const std::vector<std::string>& names);
std::vector<int> read_ordering(const std::string& path, const std::vector<std::string>& names);

// tp,fp,fn,tn
std::string format_confusion_csv(const Confusion& c);
// lambda_index,lambda_mean,tp_mean,fp_mean,edges_mean
std::string format_roc_csv(const std::vector<RocSummaryRow>& rows);
std::vector<RocSummaryRow> parse_roc_csv(std::string_view text);

// Splits CSV text into trimmed cells per nonblank line; quotes around a cell
// are removed. line_numbers receives the 1-based source line of every row.
std::vector<std::vector<std::string>> split_csv(std::string_view text, std::vector<int>* line_numbers = nullptr);

}  // namespace jamgraph::io
