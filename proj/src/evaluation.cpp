#include "jamgraph/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "jamgraph/error.hpp"

namespace jamgraph {

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Confusion confusion(const Graph& est, const Graph& truth, const CausalOrdering* ordering) {
  if (est.d() != truth.d() || est.directed() != truth.directed()) {
    fail(ErrorCode::kDimensionMismatch, "estimated and true graphs differ in size or directedness");
  }
  const std::int64_t d = est.d();
  std::int64_t universe = d * (d - 1) / 2;
  if (est.directed()) {
    if (ordering != nullptr) {
      if (ordering->d() != est.d()) fail(ErrorCode::kDimensionMismatch, "ordering size differs from graph size");
      for (const Graph* g : {&est, &truth}) {
        for (const auto& [src, dst] : g->edge_set()) {
          require(ordering->precedes(src, dst), "edge " + std::to_string(src + 1) + " -> " +
                                                    std::to_string(dst + 1) + " contradicts the ordering");
        }
      }
    } else {
      universe = d * (d - 1);
    }
  }
  Confusion c;
  for (const auto& edge : est.edge_set()) {
    if (truth.edge_set().count(edge) != 0) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = static_cast<std::int64_t>(truth.size()) - c.tp;
  c.tn = universe - c.tp - c.fp - c.fn;
  return c;
}

std::vector<RocRow> roc_table(const std::vector<double>& lambdas, const std::vector<Graph>& graphs,
                              const std::vector<double>& bic_total, const Graph& truth) {
  require(lambdas.size() == graphs.size(), "lambda and graph counts differ");
  require(bic_total.empty() || bic_total.size() == graphs.size(), "BIC and graph counts differ");
  std::vector<RocRow> rows;
  rows.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Confusion c = confusion(graphs[i], truth);
    rows.push_back({lambdas[i], c.tp, c.fp, static_cast<std::int64_t>(graphs[i].size()),
                    bic_total.empty() ? std::numeric_limits<double>::quiet_NaN() : bic_total[i]});
  }
  return rows;
}

std::vector<RocRow> roc_table(const PathResult& path, const Graph& truth) {
  return roc_table(path.lambdas, path.graphs, path.bic_total, truth);
}

std::vector<RocSummaryRow> aggregate_by_index(const std::vector<std::vector<RocRow>>& tables) {
  require(!tables.empty(), "no tables to aggregate");
  const std::size_t length = tables.front().size();
  for (const auto& t : tables) require(t.size() == length, "replicate tables have different lengths");
  const double count = static_cast<double>(tables.size());
  std::vector<RocSummaryRow> out(length);
  for (std::size_t i = 0; i < length; ++i) {
    RocSummaryRow& row = out[i];
    row.lambda_index = i;
    for (const auto& t : tables) {
      row.lambda_mean += t[i].lambda;
      row.tp_mean += static_cast<double>(t[i].tp);
      row.fp_mean += static_cast<double>(t[i].fp);
      row.edges_mean += static_cast<double>(t[i].edge_count);
    }
    row.lambda_mean /= count;
    row.tp_mean /= count;
    row.fp_mean /= count;
    row.edges_mean /= count;
  }
  return out;
}

double interpolate_at(const std::vector<double>& x, const std::vector<double>& y, double target) {
  require(!x.empty() && x.size() == y.size(), "interpolation needs matching nonempty inputs");
  std::vector<double> xs(x.size());
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    running = std::max(running, x[i]);
    xs[i] = running;
  }
  if (target < xs.front()) return y.front();
  if (target >= xs.back()) {
    // Last point reaching the final plateau.
    return y.back();
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > target) {
      const double span = xs[i] - xs[i - 1];
      const double t = (target - xs[i - 1]) / span;
      return y[i - 1] + t * (y[i] - y[i - 1]);
    }
  }
  return y.back();
}

double tp_at_fp(const std::vector<RocRow>& table, double fp) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : table) {
    x.push_back(static_cast<double>(row.fp));
    y.push_back(static_cast<double>(row.tp));
  }
  return interpolate_at(x, y, fp);
}

double tp_at_fp(const std::vector<RocSummaryRow>& curve, double fp) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& row : curve) {
    x.push_back(row.fp_mean);
    y.push_back(row.tp_mean);
  }
  return interpolate_at(x, y, fp);
}

std::vector<RocSummaryRow> aggregate_by_fp(const std::vector<std::vector<RocRow>>& tables,
                                           const std::vector<double>& fp_grid) {
  require(!tables.empty(), "no tables to aggregate");
  std::vector<RocSummaryRow> out(fp_grid.size());
  for (std::size_t g = 0; g < fp_grid.size(); ++g) {
    out[g].lambda_index = g;
    out[g].fp_mean = fp_grid[g];
  }
  const double count = static_cast<double>(tables.size());
  for (const auto& table : tables) {
    require(!table.empty(), "empty replicate table");
    std::vector<double> fp;
    std::vector<double> lambda;
    std::vector<double> tp;
    std::vector<double> edges;
    for (const auto& row : table) {
      fp.push_back(static_cast<double>(row.fp));
      lambda.push_back(row.lambda);
      tp.push_back(static_cast<double>(row.tp));
      edges.push_back(static_cast<double>(row.edge_count));
    }
    for (std::size_t g = 0; g < fp_grid.size(); ++g) {
      out[g].lambda_mean += interpolate_at(fp, lambda, fp_grid[g]) / count;
      out[g].tp_mean += interpolate_at(fp, tp, fp_grid[g]) / count;
      out[g].edges_mean += interpolate_at(fp, edges, fp_grid[g]) / count;
    }
  }
  return out;
}

std::string roc_svg(const std::vector<SvgCurve>& curves, const std::string& title) {
  constexpr double kWidth = 480.0;
  constexpr double kHeight = 360.0;
  constexpr double kMargin = 50.0;
  double max_fp = 1.0;
  double max_tp = 1.0;
  for (const auto& c : curves) {
    for (const auto& row : c.rows) {
      if (std::isfinite(row.fp_mean)) max_fp = std::max(max_fp, row.fp_mean);
      if (std::isfinite(row.tp_mean)) max_tp = std::max(max_tp, row.tp_mean);
    }
  }
  auto px = [&](double fp) { return kMargin + fp / max_fp * (kWidth - 2 * kMargin); };
  auto py = [&](double tp) { return kHeight - kMargin - tp / max_tp * (kHeight - 2 * kMargin); };
  static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kMargin,
                     kHeight - kMargin, kWidth - kMargin);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kMargin, kMargin,
                     kHeight - kMargin);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">incorrect edges</text>\n",
                     kWidth / 2, kHeight - 15);
  svg += fmt::format(
      "<text x=\"15\" y=\"{0}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 {0})\">"
      "correct edges</text>\n",
      kHeight / 2);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\">{:g}</text>\n", kWidth - kMargin, kHeight - 35,
                     max_fp);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{:g}</text>\n", kMargin - 4,
                     kMargin, max_tp);
  if (!title.empty()) {
    svg += fmt::format("<text x=\"{}\" y=\"25\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", kWidth / 2,
                       xml_escape(title));
  }
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    std::string points;
    for (const auto& row : curves[i].rows) {
      if (!std::isfinite(row.fp_mean) || !std::isfinite(row.tp_mean)) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(row.fp_mean), py(row.tp_mean));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
                       points);
    if (!curves[i].label.empty()) {
      svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{}\">{}</text>\n", kMargin + 10,
                         kMargin + 14.0 * static_cast<double>(i + 1), color, xml_escape(curves[i].label));
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace jamgraph
