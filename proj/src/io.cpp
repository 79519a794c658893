#include "jamgraph/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "jamgraph/error.hpp"

namespace jamgraph::io {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

bool parse_int(std::string_view text, long long& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::unordered_map<std::string, int> name_index(const std::vector<std::string>& names) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], static_cast<int>(i));
  return index;
}

// Name first, then 1-based index. -1 when neither matches.
int resolve_variable(std::string_view cell, const std::unordered_map<std::string, int>& index, int d) {
  if (auto it = index.find(std::string(cell)); it != index.end()) return it->second;
  long long value = 0;
  if (parse_int(cell, value) && value >= 1 && value <= d) return static_cast<int>(value - 1);
  return -1;
}

std::string edge_header(bool directed) { return directed ? "src,dst" : "a,b"; }

std::map<std::string, std::size_t> header_columns(const std::vector<std::string>& header) {
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header.size(); ++i) columns.emplace(header[i], i);
  return columns;
}

std::size_t need_column(const std::map<std::string, std::size_t>& columns, const std::string& name,
                        const std::string& what) {
  auto it = columns.find(name);
  if (it == columns.end()) fail(ErrorCode::kParse, what + " lacks a '" + name + "' column");
  return it->second;
}

double cell_double(const std::vector<std::string>& row, std::size_t column, int line, const std::string& what) {
  double value = 0.0;
  if (column >= row.size() || !parse_double(row[column], value)) {
    fail(ErrorCode::kParse, what + ": row " + std::to_string(line) + ", column " + std::to_string(column + 1) +
                                ": expected a number");
  }
  return value;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "failed reading '" + path + "'");
  return buffer.str();
}

void write_text(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) fail(ErrorCode::kIo, "failed writing '" + path + "'");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) fail(ErrorCode::kInvalidArgument, "cannot format number");
  return std::string(buffer, ptr);
}

bool parse_double(std::string_view text, double& value) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::vector<std::string>> split_csv(std::string_view text, std::vector<int>* line_numbers) {
  std::vector<std::vector<std::string>> rows;
  if (line_numbers != nullptr) line_numbers->clear();
  int line = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view content = text.substr(start, end - start);
    ++line;
    start = end + 1;
    if (trim(content).empty()) continue;
    std::vector<std::string> cells;
    std::size_t cell_start = 0;
    while (true) {
      std::size_t comma = content.find(',', cell_start);
      if (comma == std::string_view::npos) comma = content.size();
      cells.emplace_back(trim(content.substr(cell_start, comma - cell_start)));
      if (comma == content.size()) break;
      cell_start = comma + 1;
    }
    rows.push_back(std::move(cells));
    if (line_numbers != nullptr) line_numbers->push_back(line);
  }
  return rows;
}

DataMatrix parse_data_csv(std::string_view text) {
  std::vector<int> lines;
  const auto rows = split_csv(text, &lines);
  if (rows.empty()) fail(ErrorCode::kParse, "data file is empty");
  const std::vector<std::string>& header = rows.front();
  const std::size_t d = header.size();
  for (std::size_t c = 0; c < d; ++c) {
    if (header[c].empty()) fail(ErrorCode::kParse, "header column " + std::to_string(c + 1) + " has no name");
  }
  if (name_index(header).size() != d) fail(ErrorCode::kParse, "header repeats a column name");
  const std::size_t n = rows.size() - 1;
  if (n < 2) fail(ErrorCode::kParse, "data needs at least 2 observations");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != d) {
      fail(ErrorCode::kParse, "row " + std::to_string(lines[i]) + ": expected " + std::to_string(d) +
                                  " columns, found " + std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < d; ++c) {
      double value = 0.0;
      if (!parse_double(row[c], value) || !std::isfinite(value)) {
        fail(ErrorCode::kParse, "row " + std::to_string(lines[i]) + ", column " + std::to_string(c + 1) +
                                    ": '" + row[c] + "' is not a finite number");
      }
      values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(c)) = value;
    }
  }
  return make_data(std::move(values), header);
}

DataMatrix read_data_csv(const std::string& path) { return parse_data_csv(read_text(path)); }

std::string format_data_csv(const DataMatrix& data) {
  std::string out;
  for (std::size_t c = 0; c < data.names.size(); ++c) {
    if (c > 0) out += ',';
    out += data.names[c];
  }
  out += '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index c = 0; c < data.d(); ++c) {
      if (c > 0) out += ',';
      out += format_double(data.values(i, c));
    }
    out += '\n';
  }
  return out;
}

void write_data_csv(const std::string& path, const DataMatrix& data) { write_text(path, format_data_csv(data)); }

std::string format_edge_list(const Graph& graph, const std::vector<std::string>& names) {
  require(static_cast<int>(names.size()) == graph.d(), "name count does not match graph size");
  std::string out = edge_header(graph.directed()) + "\n";
  for (const auto& [a, b] : graph.edge_set()) {
    out += names[static_cast<std::size_t>(a)] + "," + names[static_cast<std::size_t>(b)] + "\n";
  }
  return out;
}

void write_edge_list(const std::string& path, const Graph& graph, const std::vector<std::string>& names) {
  write_text(path, format_edge_list(graph, names));
}

Graph parse_edge_list(std::string_view text, const std::vector<std::string>& names) {
  std::vector<int> lines;
  const auto rows = split_csv(text, &lines);
  if (rows.empty()) fail(ErrorCode::kParse, "edge list has no header");
  const auto& header = rows.front();
  bool directed = false;
  if (header == std::vector<std::string>{"src", "dst"}) {
    directed = true;
  } else if (header != std::vector<std::string>{"a", "b"}) {
    fail(ErrorCode::kParse, "edge list header must be 'a,b' or 'src,dst'");
  }
  const int d = static_cast<int>(names.size());
  const auto index = name_index(names);
  Graph graph(d, directed);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2) fail(ErrorCode::kParse, "row " + std::to_string(lines[i]) + ": expected 2 columns");
    const int a = resolve_variable(rows[i][0], index, d);
    const int b = resolve_variable(rows[i][1], index, d);
    if (a < 0 || b < 0) {
      fail(ErrorCode::kDimensionMismatch, "row " + std::to_string(lines[i]) + ": unknown variable '" +
                                              (a < 0 ? rows[i][0] : rows[i][1]) + "'");
    }
    if (a == b) fail(ErrorCode::kParse, "row " + std::to_string(lines[i]) + ": self loop");
    graph.add_edge(a, b);
  }
  return graph;
}

Graph read_edge_list(const std::string& path, const std::vector<std::string>& names) {
  return parse_edge_list(read_text(path), names);
}

std::string format_path_csv(const PathResult& path) {
  std::string out = "lambda,edge_count,bic_total,df_total,rss_total,bic_total_nscaled,kkt_residual,converged,sweeps\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    const FitResult& fit = path.fits[i];
    out += format_double(path.lambdas[i]) + "," + std::to_string(path.graphs[i].size()) + "," +
           format_double(path.bic_total[i]) + "," + format_double(path.df[i].sum()) + "," +
           format_double(path.rss[i].sum()) + "," + format_double(path.bic_total_nscaled[i]) + "," +
           format_double(path.kkt[i]) + "," + (fit.converged ? "1" : "0") + "," + std::to_string(fit.sweeps) +
           "\n";
  }
  return out;
}

std::string format_path_edges(const PathResult& path, const std::vector<std::string>& names) {
  std::string out = "lambda_index,lambda," + edge_header(path.directed) + "\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::string prefix = std::to_string(i) + "," + format_double(path.lambdas[i]) + ",";
    for (const auto& [a, b] : path.graphs[i].edge_set()) {
      out += prefix + names[static_cast<std::size_t>(a)] + "," + names[static_cast<std::size_t>(b)] + "\n";
    }
  }
  return out;
}

std::string format_kkt_report(const PathResult& path) {
  std::string out = "lambda_index,lambda,kkt_residual,converged,sweeps,objective\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    const FitResult& fit = path.fits[i];
    out += std::to_string(i) + "," + format_double(path.lambdas[i]) + "," + format_double(path.kkt[i]) + "," +
           (fit.converged ? "1" : "0") + "," + std::to_string(fit.sweeps) + "," + format_double(fit.objective) +
           "\n";
  }
  return out;
}

PathGraphs parse_path_files(std::string_view path_csv, std::string_view path_edges_csv,
                            const std::vector<std::string>& names) {
  std::vector<int> lines;
  const auto rows = split_csv(path_csv, &lines);
  if (rows.empty()) fail(ErrorCode::kParse, "path file has no header");
  const auto columns = header_columns(rows.front());
  const std::size_t lambda_col = need_column(columns, "lambda", "path file");
  const std::size_t bic_col = need_column(columns, "bic_total", "path file");

  const auto edge_rows = split_csv(path_edges_csv, nullptr);
  if (edge_rows.empty()) fail(ErrorCode::kParse, "path edge file has no header");
  const auto& edge_header_row = edge_rows.front();
  if (edge_header_row.size() != 4 || edge_header_row[0] != "lambda_index" || edge_header_row[1] != "lambda") {
    fail(ErrorCode::kParse, "path edge header must be 'lambda_index,lambda,a,b' or 'lambda_index,lambda,src,dst'");
  }
  const bool directed = edge_header_row[2] == "src" && edge_header_row[3] == "dst";
  if (!directed && !(edge_header_row[2] == "a" && edge_header_row[3] == "b")) {
    fail(ErrorCode::kParse, "path edge header must end in 'a,b' or 'src,dst'");
  }

  PathGraphs out;
  const int d = static_cast<int>(names.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out.lambdas.push_back(cell_double(rows[i], lambda_col, lines[i], "path file"));
    out.bic_total.push_back(cell_double(rows[i], bic_col, lines[i], "path file"));
    out.graphs.emplace_back(d, directed);
  }
  const auto index = name_index(names);
  for (std::size_t i = 1; i < edge_rows.size(); ++i) {
    const auto& row = edge_rows[i];
    long long at = 0;
    if (row.size() != 4 || !parse_int(row[0], at) || at < 0 || at >= static_cast<long long>(out.graphs.size())) {
      fail(ErrorCode::kParse, "path edge row " + std::to_string(i + 1) + " is malformed");
    }
    const int a = resolve_variable(row[2], index, d);
    const int b = resolve_variable(row[3], index, d);
    if (a < 0 || b < 0) {
      fail(ErrorCode::kDimensionMismatch, "path edge row " + std::to_string(i + 1) + " names an unknown variable");
    }
    out.graphs[static_cast<std::size_t>(at)].add_edge(a, b);
  }
  return out;
}

PathGraphs read_path_files(const std::string& path_csv, const std::string& path_edges_csv,
                           const std::vector<std::string>& names) {
  return parse_path_files(read_text(path_csv), read_text(path_edges_csv), names);
}

std::string format_coefficients_json(const ExpandedDesign& design, const DataMatrix& data, const FitResult& fit,
                                     double edge_tolerance) {
  const Graph graph = fit.directed ? directed_edge_set(fit.coefficients, edge_tolerance)
                                   : edge_set(fit.coefficients, edge_tolerance);
  const double n = static_cast<double>(design.n());
  auto center = [&](Eigen::Index j) { return data.standardized ? data.center(j) : 0.0; };
  auto scale = [&](Eigen::Index j) { return data.standardized ? data.scale(j) : 1.0; };

  json edges = json::array();
  auto add = [&](int j, int k) {
    const RegressorBasis& basis = design.regressor(k);
    const auto block = fit.coefficients.block(j, k).head(basis.rank());
    if (block.squaredNorm() == 0.0) return;
    json entry;
    entry["response"] = data.names[static_cast<std::size_t>(j)];
    entry["regressor"] = data.names[static_cast<std::size_t>(k)];
    entry["degrees"] = basis.degrees;
    entry["basis_coefficients"] = std::vector<double>(block.begin(), block.end());
    entry["function_norm"] = std::sqrt(block.squaredNorm());
    const Eigen::VectorXd raw = raw_polynomial(basis, block, center(k), scale(k), scale(j));
    entry["raw_polynomial"] = std::vector<double>(raw.begin(), raw.end());
    edges.push_back(std::move(entry));
  };
  for (const auto& [a, b] : graph.edge_set()) {
    if (fit.directed) {
      add(b, a);
    } else {
      add(a, b);
      add(b, a);
    }
  }
  json doc;
  doc["lambda"] = fit.lambda;
  doc["directed"] = fit.directed;
  doc["degrees"] = design.spec().degrees;
  doc["standardized"] = data.standardized;
  doc["n"] = static_cast<std::int64_t>(n);
  doc["variables"] = data.names;
  doc["objective"] = fit.objective;
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

std::string format_components_csv(const ScreenReport& report, const std::vector<std::string>& names) {
  require(names.size() == report.component_of.size(), "name count does not match the screen report");
  std::string out = "variable,component\n";
  for (std::size_t v = 0; v < names.size(); ++v) {
    out += names[v] + "," + std::to_string(report.component_of[v] + 1) + "\n";
  }
  return out;
}

std::string format_rho_csv(const ScreenReport& report, const std::vector<std::string>& names) {
  require(static_cast<Eigen::Index>(names.size()) == report.rho.rows(), "name count does not match rho");
  std::string out = "variable";
  for (const auto& name : names) out += "," + name;
  out += '\n';
  for (Eigen::Index j = 0; j < report.rho.rows(); ++j) {
    out += names[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < report.rho.cols(); ++k) out += "," + format_double(report.rho(j, k));
    out += '\n';
  }
  return out;
}

std::string format_dag_json(const DagSpec& dag, const std::vector<std::string>& names) {
  json doc;
  doc["d"] = dag.d;
  doc["scheme"] = scheme_name(dag.scheme);
  doc["seed"] = dag.seed;
  if (!names.empty()) {
    require(static_cast<int>(names.size()) == dag.d, "name count does not match DAG size");
    doc["names"] = names;
  }
  json edges = json::array();
  for (const auto& e : dag.edges) {
    json entry{{"src", e.src + 1}, {"dst", e.dst + 1}};
    if (dag.has_coefficients) {
      entry["b1"] = e.b1;
      entry["b2"] = e.b2;
      entry["b3"] = e.b3;
    }
    edges.push_back(std::move(entry));
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

DagSpec parse_dag_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
    DagSpec dag;
    dag.d = doc.at("d").get<int>();
    dag.scheme = parse_scheme(doc.at("scheme").get<std::string>());
    dag.seed = doc.value("seed", std::uint64_t{0});
    dag.has_coefficients = true;
    for (const auto& entry : doc.at("edges")) {
      DagEdge e;
      e.src = entry.at("src").get<int>() - 1;
      e.dst = entry.at("dst").get<int>() - 1;
      if (entry.contains("b1")) {
        e.b1 = entry.at("b1").get<double>();
        e.b2 = entry.value("b2", 0.0);
        e.b3 = entry.value("b3", 0.0);
      } else {
        dag.has_coefficients = false;
      }
      dag.edges.push_back(e);
    }
    if (dag.edges.empty()) dag.has_coefficients = true;
    topological_order(dag);
    return dag;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid DAG JSON: ") + e.what());
  }
}

std::vector<int> parse_ordering(std::string_view text, const std::vector<std::string>& names) {
  std::vector<std::string> tokens;
  const std::string_view stripped = trim(text);
  if (!stripped.empty() && stripped.front() == '[') {
    try {
      for (const auto& item : json::parse(stripped)) {
        tokens.push_back(item.is_string() ? item.get<std::string>() : std::to_string(item.get<long long>()));
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, std::string("invalid ordering JSON: ") + e.what());
    }
  } else {
    std::string current;
    for (char c : text) {
      if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
      } else {
        current += c;
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    for (auto& token : tokens) token = std::string(trim(token));
  }
  const auto index = name_index(names);
  const int d = static_cast<int>(names.size());
  if (!tokens.empty() && (tokens.front() == "variable" || tokens.front() == "name") &&
      index.count(tokens.front()) == 0) {
    tokens.erase(tokens.begin());
  }
  std::vector<int> order;
  std::vector<bool> seen(names.size(), false);
  for (const auto& token : tokens) {
    const int v = resolve_variable(token, index, d);
    require(v >= 0, "ordering names unknown variable '" + token + "'");
    require(!seen[static_cast<std::size_t>(v)], "ordering repeats variable '" + token + "'");
    seen[static_cast<std::size_t>(v)] = true;
    order.push_back(v);
  }
  require(static_cast<int>(order.size()) == d, "ordering lists " + std::to_string(order.size()) + " of " +
                                                   std::to_string(d) + " variables");
  return order;
}

std::vector<int> read_ordering(const std::string& path, const std::vector<std::string>& names) {
  return parse_ordering(read_text(path), names);
}

std::string format_confusion_csv(const Confusion& c) {
  return "tp,fp,fn,tn\n" + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," + std::to_string(c.fn) + "," +
         std::to_string(c.tn) + "\n";
}

std::string format_roc_csv(const std::vector<RocSummaryRow>& rows) {
  std::string out = "lambda_index,lambda_mean,tp_mean,fp_mean,edges_mean\n";
  for (const auto& row : rows) {
    out += std::to_string(row.lambda_index) + "," + format_double(row.lambda_mean) + "," +
           format_double(row.tp_mean) + "," + format_double(row.fp_mean) + "," + format_double(row.edges_mean) +
           "\n";
  }
  return out;
}

std::vector<RocSummaryRow> parse_roc_csv(std::string_view text) {
  std::vector<int> lines;
  const auto rows = split_csv(text, &lines);
  if (rows.empty() || rows.front() != std::vector<std::string>{"lambda_index", "lambda_mean", "tp_mean",
                                                                "fp_mean", "edges_mean"}) {
    fail(ErrorCode::kParse, "ROC file header must be 'lambda_index,lambda_mean,tp_mean,fp_mean,edges_mean'");
  }
  std::vector<RocSummaryRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    long long index = 0;
    if (rows[i].size() != 5 || !parse_int(rows[i][0], index) || index < 0) {
      fail(ErrorCode::kParse, "ROC row " + std::to_string(lines[i]) + " is malformed");
    }
    RocSummaryRow row;
    row.lambda_index = static_cast<std::size_t>(index);
    row.lambda_mean = cell_double(rows[i], 1, lines[i], "ROC file");
    row.tp_mean = cell_double(rows[i], 2, lines[i], "ROC file");
    row.fp_mean = cell_double(rows[i], 3, lines[i], "ROC file");
    row.edges_mean = cell_double(rows[i], 4, lines[i], "ROC file");
    out.push_back(row);
  }
  return out;
}

}  // namespace jamgraph::io
