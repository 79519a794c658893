#include "jamgraph/jamgraph.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "jamgraph/dag.hpp"
#include "jamgraph/error.hpp"
#include "jamgraph/evaluation.hpp"
#include "jamgraph/io.hpp"
#include "jamgraph/path.hpp"
#include "jamgraph/screening.hpp"
#include "jamgraph/simulate.hpp"

using namespace jamgraph;

struct jg_data {
  DataMatrix data;
};

struct jg_graph {
  Graph graph;
};

struct jg_path {
  DataMatrix data;
  ExpandedDesign design;
  PathResult path;
  std::optional<ScreenReport> screen;
  double edge_tolerance = 1e-8;
};

struct jg_screen {
  std::vector<std::string> names;
  ScreenReport report;
};

struct jg_simulation {
  Simulation sim;
  jg_data data;
};

struct jg_roc {
  std::vector<std::vector<RocRow>> tables;
};

namespace {

thread_local std::string last_error;

jg_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return JG_ERROR_INVALID_ARGUMENT;
    case ErrorCode::kIo: return JG_ERROR_IO;
    case ErrorCode::kParse: return JG_ERROR_PARSE;
    case ErrorCode::kConstantColumn: return JG_ERROR_CONSTANT_COLUMN;
    case ErrorCode::kRankDeficient: return JG_ERROR_RANK_DEFICIENT;
    case ErrorCode::kShapeMismatch: return JG_ERROR_SHAPE_MISMATCH;
    case ErrorCode::kNonFinite: return JG_ERROR_NON_FINITE;
    case ErrorCode::kZeroResidual: return JG_ERROR_ZERO_RESIDUAL;
    case ErrorCode::kTooManyEdges: return JG_ERROR_TOO_MANY_EDGES;
    case ErrorCode::kDegenerateComponent: return JG_ERROR_DEGENERATE_COMPONENT;
    case ErrorCode::kDimensionMismatch: return JG_ERROR_DIMENSION_MISMATCH;
  }
  return JG_ERROR_INTERNAL;
}

template <typename Body>
jg_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return JG_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return JG_ERROR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return JG_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return JG_ERROR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return JG_ERROR_INTERNAL;
  }
}

void need(const void* pointer, const char* what) {
  if (pointer == nullptr) fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

SolverOptions solver_options(const jg_solver_options* in) {
  jg_solver_options defaults;
  jg_solver_options_default(&defaults);
  const jg_solver_options& o = in != nullptr ? *in : defaults;
  require(o.tolerance > 0.0 && o.objective_tolerance >= 0.0, "tolerances must be positive");
  require(o.max_sweeps >= 1 && o.recompute_every >= 1, "max_sweeps and recompute_every must be >= 1");
  require(o.edge_tolerance >= 0.0, "edge tolerance must be non-negative");
  require(o.threads >= 1, "threads must be >= 1");
  SolverOptions out;
  out.tolerance = o.tolerance;
  out.objective_tolerance = o.objective_tolerance;
  out.max_sweeps = o.max_sweeps;
  out.recompute_every = o.recompute_every;
  out.coupled_threshold = o.coupled_threshold != 0;
  out.edge_tolerance = o.edge_tolerance;
  out.threads = o.threads;
  return out;
}

struct Model {
  DataMatrix data;
  ExpandedDesign design;
};

Model build_model(const jg_data* data, const jg_model_options* in) {
  need(data, "data");
  jg_model_options defaults;
  jg_model_options_default(&defaults);
  const jg_model_options& o = in != nullptr ? *in : defaults;
  const BasisSpec spec = BasisSpec::parse(o.degrees != nullptr ? o.degrees : "1,2,3");
  ExpandOptions expand_options;
  expand_options.lenient = o.lenient != 0;
  expand_options.rank_threshold = o.rank_threshold;
  require(o.rank_threshold > 0.0, "rank threshold must be positive");
  Model model;
  model.data = o.raw != 0 ? data->data : standardize(data->data);
  if (o.raw != 0 && !model.data.values.allFinite()) fail(ErrorCode::kParse, "data contains non-finite values");
  model.design = expand(model.data, spec, expand_options);
  return model;
}

std::vector<double> grid_from(const jg_path_options& o, double lmax) {
  if (o.lambdas != nullptr && o.lambda_count > 0) return {o.lambdas, o.lambdas + o.lambda_count};
  require(o.count >= 1, "grid size must be >= 1");
  require(o.ratio > 0.0 && o.ratio < 1.0, "grid ratio must lie in (0, 1)");
  if (!(lmax > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "lambda_max is zero: no pair carries any signal (lower lambda2?)");
  }
  if (o.count == 1) return {lmax};
  return lambda_grid(lmax, o.count, o.ratio);
}

std::vector<std::string> names_from(const char* const* names, int d) {
  if (names == nullptr) return default_names(d);
  std::vector<std::string> out;
  for (int j = 0; j < d; ++j) {
    need(names[j], "variable name");
    out.emplace_back(names[j]);
  }
  return out;
}

template <typename T>
jg_status create(T** out, const std::function<void(T&)>& fill) {
  return guarded([&] {
    need(out, "output handle");
    *out = nullptr;
    auto object = std::make_unique<T>();
    fill(*object);
    *out = object.release();
  });
}

std::vector<RocSummaryRow> summarize(const jg_roc& roc, double fp_step) {
  require(!roc.tables.empty(), "no replicates added");
  if (!(fp_step > 0.0)) return aggregate_by_index(roc.tables);
  double max_fp = 0.0;
  for (const auto& table : roc.tables) {
    for (const auto& row : table) max_fp = std::max(max_fp, static_cast<double>(row.fp));
  }
  std::vector<double> grid;
  for (double fp = 0.0; fp <= max_fp + 1e-9; fp += fp_step) grid.push_back(fp);
  return aggregate_by_fp(roc.tables, grid);
}

}  // namespace

extern "C" {

const char* jg_last_error(void) { return last_error.c_str(); }

const char* jg_status_name(jg_status status) {
  switch (status) {
    case JG_OK: return "ok";
    case JG_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case JG_ERROR_IO: return "I/O error";
    case JG_ERROR_PARSE: return "parse error";
    case JG_ERROR_CONSTANT_COLUMN: return "constant column";
    case JG_ERROR_RANK_DEFICIENT: return "rank deficient basis";
    case JG_ERROR_SHAPE_MISMATCH: return "shape mismatch";
    case JG_ERROR_NON_FINITE: return "non-finite values";
    case JG_ERROR_ZERO_RESIDUAL: return "zero residual";
    case JG_ERROR_TOO_MANY_EDGES: return "too many edges";
    case JG_ERROR_DEGENERATE_COMPONENT: return "degenerate component";
    case JG_ERROR_DIMENSION_MISMATCH: return "dimension mismatch";
    case JG_ERROR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* jg_version(void) { return "0.1.0"; }

jg_status jg_data_read_csv(const char* path, jg_data** out) {
  return create<jg_data>(out, [&](jg_data& d) {
    need(path, "path");
    d.data = io::read_data_csv(path);
  });
}

jg_status jg_data_from_values(const double* values, int n, int d, const char* const* names, jg_data** out) {
  return create<jg_data>(out, [&](jg_data& data) {
    need(values, "values");
    require(n >= 2 && d >= 1, "data needs n >= 2 and d >= 1");
    Eigen::MatrixXd m(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = values[static_cast<std::size_t>(i) * d + j];
    }
    data.data = make_data(std::move(m), names_from(names, d));
  });
}

void jg_data_free(jg_data* data) { delete data; }
int jg_data_n(const jg_data* data) { return data != nullptr ? static_cast<int>(data->data.n()) : 0; }
int jg_data_d(const jg_data* data) { return data != nullptr ? static_cast<int>(data->data.d()) : 0; }

const char* jg_data_name(const jg_data* data, int j) {
  if (data == nullptr || j < 0 || j >= data->data.d()) return nullptr;
  return data->data.names[static_cast<std::size_t>(j)].c_str();
}

double jg_data_value(const jg_data* data, int i, int j) {
  if (data == nullptr || i < 0 || j < 0 || i >= data->data.n() || j >= data->data.d()) return std::nan("");
  return data->data.values(i, j);
}

jg_status jg_data_write_csv(const jg_data* data, const char* path) {
  return guarded([&] {
    need(data, "data");
    need(path, "path");
    io::write_data_csv(path, data->data);
  });
}

void jg_solver_options_default(jg_solver_options* options) {
  if (options == nullptr) return;
  const SolverOptions d;
  options->tolerance = d.tolerance;
  options->objective_tolerance = d.objective_tolerance;
  options->max_sweeps = d.max_sweeps;
  options->recompute_every = d.recompute_every;
  options->coupled_threshold = d.coupled_threshold ? 1 : 0;
  options->edge_tolerance = d.edge_tolerance;
  options->threads = d.threads;
}

void jg_model_options_default(jg_model_options* options) {
  if (options == nullptr) return;
  options->degrees = "1,2,3";
  options->raw = 0;
  options->lenient = 0;
  options->rank_threshold = kRankThreshold;
}

void jg_path_options_default(jg_path_options* options) {
  if (options == nullptr) return;
  options->count = 100;
  options->ratio = 0.01;
  options->lambdas = nullptr;
  options->lambda_count = 0;
  options->lambda2 = 0.0;
}

jg_status jg_graph_create(int d, int directed, jg_graph** out) {
  return create<jg_graph>(out, [&](jg_graph& g) {
    require(d >= 1, "graph needs at least one vertex");
    g.graph = Graph(d, directed != 0);
  });
}

jg_status jg_graph_add_edge(jg_graph* graph, int a, int b) {
  return guarded([&] {
    need(graph, "graph");
    graph->graph.add_edge(a, b);
  });
}

jg_status jg_graph_read_csv(const char* path, const char* const* names, int d, jg_graph** out) {
  return create<jg_graph>(out, [&](jg_graph& g) {
    need(path, "path");
    require(d >= 1, "graph needs at least one vertex");
    g.graph = io::read_edge_list(path, names_from(names, d));
  });
}

jg_status jg_graph_write_csv(const jg_graph* graph, const char* const* names, const char* path) {
  return guarded([&] {
    need(graph, "graph");
    need(path, "path");
    io::write_edge_list(path, graph->graph, names_from(names, graph->graph.d()));
  });
}

void jg_graph_free(jg_graph* graph) { delete graph; }
int jg_graph_d(const jg_graph* graph) { return graph != nullptr ? graph->graph.d() : 0; }
int jg_graph_directed(const jg_graph* graph) { return graph != nullptr && graph->graph.directed() ? 1 : 0; }
size_t jg_graph_edge_count(const jg_graph* graph) { return graph != nullptr ? graph->graph.size() : 0; }

jg_status jg_graph_edge(const jg_graph* graph, size_t index, int* a, int* b) {
  return guarded([&] {
    need(graph, "graph");
    need(a, "a");
    need(b, "b");
    require(index < graph->graph.size(), "edge index out of range");
    auto it = graph->graph.edge_set().begin();
    std::advance(it, static_cast<std::ptrdiff_t>(index));
    *a = it->first;
    *b = it->second;
  });
}

jg_status jg_fit_path(const jg_data* data, const jg_model_options* model, const jg_path_options* path,
                      const jg_solver_options* solver, jg_path** out) {
  return create<jg_path>(out, [&](jg_path& p) {
    jg_path_options path_defaults;
    jg_path_options_default(&path_defaults);
    const jg_path_options& po = path != nullptr ? *path : path_defaults;
    require(po.lambda2 >= 0.0 && po.lambda2 <= 1.0, "lambda2 must lie in [0, 1]");
    const SolverOptions options = solver_options(solver);
    Model m = build_model(data, model);
    std::vector<std::vector<int>> groups;
    const std::vector<int>* component_of = nullptr;
    if (po.lambda2 > 0.0) {
      p.screen = marginal_graph(m.design, po.lambda2, options.threads);
      groups = p.screen->components;
      component_of = &p.screen->component_of;
    }
    const std::vector<double> grid = grid_from(po, lambda_max(m.design, m.data, component_of));
    p.path = fit_path(m.design, m.data, grid, options, groups);
    p.data = std::move(m.data);
    p.design = std::move(m.design);
    p.edge_tolerance = options.edge_tolerance;
  });
}

jg_status jg_fit_dag_path(const jg_data* data, const int* ordering, const jg_model_options* model,
                          const jg_path_options* path, const jg_solver_options* solver, jg_path** out) {
  return create<jg_path>(out, [&](jg_path& p) {
    need(ordering, "ordering");
    jg_path_options path_defaults;
    jg_path_options_default(&path_defaults);
    const jg_path_options& po = path != nullptr ? *path : path_defaults;
    require(po.lambda2 == 0.0, "screening is not available for ordered fits");
    const SolverOptions options = solver_options(solver);
    Model m = build_model(data, model);
    const CausalOrdering order(std::vector<int>(ordering, ordering + m.data.d()));
    const std::vector<double> grid = grid_from(po, dag_lambda_max(m.design, m.data, order));
    p.path = fit_dag_path(m.design, m.data, order, grid, options);
    p.data = std::move(m.data);
    p.design = std::move(m.design);
    p.edge_tolerance = options.edge_tolerance;
  });
}

void jg_path_free(jg_path* path) { delete path; }
size_t jg_path_size(const jg_path* path) { return path != nullptr ? path->path.size() : 0; }
size_t jg_path_selected(const jg_path* path) { return path != nullptr ? path->path.selected_index : 0; }

double jg_path_lambda(const jg_path* path, size_t index) {
  return path != nullptr && index < path->path.size() ? path->path.lambdas[index] : std::nan("");
}

double jg_path_bic(const jg_path* path, size_t index) {
  return path != nullptr && index < path->path.size() ? path->path.bic_total[index] : std::nan("");
}

double jg_path_kkt(const jg_path* path, size_t index) {
  return path != nullptr && index < path->path.size() ? path->path.kkt[index] : std::nan("");
}

int jg_path_converged(const jg_path* path, size_t index) {
  return path != nullptr && index < path->path.size() && path->path.fits[index].converged ? 1 : 0;
}

jg_status jg_path_graph(const jg_path* path, size_t index, jg_graph** out) {
  return create<jg_graph>(out, [&](jg_graph& g) {
    need(path, "path");
    require(index < path->path.size(), "path index out of range");
    g.graph = path->path.graphs[index];
  });
}

int jg_path_screened(const jg_path* path) { return path != nullptr && path->screen.has_value() ? 1 : 0; }

jg_status jg_path_write_csv(const jg_path* path, const char* file) {
  return guarded([&] {
    need(path, "path");
    need(file, "file");
    io::write_text(file, io::format_path_csv(path->path));
  });
}

jg_status jg_path_write_edges(const jg_path* path, const char* file) {
  return guarded([&] {
    need(path, "path");
    need(file, "file");
    io::write_text(file, io::format_path_edges(path->path, path->data.names));
  });
}

jg_status jg_path_write_selected(const jg_path* path, const char* file) {
  return guarded([&] {
    need(path, "path");
    need(file, "file");
    io::write_edge_list(file, path->path.graphs[path->path.selected_index], path->data.names);
  });
}

jg_status jg_path_write_coefficients(const jg_path* path, const char* file) {
  return guarded([&] {
    need(path, "path");
    need(file, "file");
    const FitResult& fit = select(path->path).fit;
    io::write_text(file, io::format_coefficients_json(path->design, path->data, fit, path->edge_tolerance));
  });
}

jg_status jg_path_write_kkt(const jg_path* path, const char* file) {
  return guarded([&] {
    need(path, "path");
    need(file, "file");
    io::write_text(file, io::format_kkt_report(path->path));
  });
}

jg_status jg_path_write_screen(const jg_path* path, const char* components_file, const char* rho_file) {
  return guarded([&] {
    need(path, "path");
    require(path->screen.has_value(), "path was fitted without screening");
    if (components_file != nullptr) {
      io::write_text(components_file, io::format_components_csv(*path->screen, path->data.names));
    }
    if (rho_file != nullptr) io::write_text(rho_file, io::format_rho_csv(*path->screen, path->data.names));
  });
}

jg_status jg_screen_compute(const jg_data* data, const jg_model_options* model, double lambda2, int threads,
                            jg_screen** out) {
  return create<jg_screen>(out, [&](jg_screen& s) {
    require(threads >= 1, "threads must be >= 1");
    Model m = build_model(data, model);
    s.report = marginal_graph(m.design, lambda2, threads);
    s.names = m.data.names;
  });
}

void jg_screen_free(jg_screen* screen) { delete screen; }

int jg_screen_component_count(const jg_screen* screen) {
  return screen != nullptr ? static_cast<int>(screen->report.components.size()) : 0;
}

int jg_screen_component_of(const jg_screen* screen, int j) {
  if (screen == nullptr || j < 0 || j >= static_cast<int>(screen->report.component_of.size())) return -1;
  return screen->report.component_of[static_cast<std::size_t>(j)];
}

double jg_screen_rho(const jg_screen* screen, int j, int k) {
  if (screen == nullptr || j < 0 || k < 0 || j >= screen->report.rho.rows() || k >= screen->report.rho.cols()) {
    return std::nan("");
  }
  return screen->report.rho(j, k);
}

jg_status jg_screen_write(const jg_screen* screen, const char* components_file, const char* rho_file,
                          const char* edges_file) {
  return guarded([&] {
    need(screen, "screen");
    if (components_file != nullptr) {
      io::write_text(components_file, io::format_components_csv(screen->report, screen->names));
    }
    if (rho_file != nullptr) io::write_text(rho_file, io::format_rho_csv(screen->report, screen->names));
    if (edges_file != nullptr) io::write_edge_list(edges_file, screen->report.marginal_graph, screen->names);
  });
}

void jg_sim_options_default(jg_sim_options* options) {
  if (options == nullptr) return;
  const SimulationConfig d;
  options->d = d.d;
  options->edges = d.edges;
  options->n = d.n;
  options->scheme = "cubic";
  options->seed = d.seed;
  options->blocks = d.blocks;
  options->clone_coefficients = 0;
}

jg_status jg_simulate(const jg_sim_options* options, jg_simulation** out) {
  return create<jg_simulation>(out, [&](jg_simulation& s) {
    jg_sim_options defaults;
    jg_sim_options_default(&defaults);
    const jg_sim_options& o = options != nullptr ? *options : defaults;
    require(o.d >= 1, "d must be >= 1");
    require(o.n >= 2, "n must be >= 2");
    SimulationConfig config;
    config.d = o.d;
    config.edges = o.edges;
    config.n = o.n;
    config.scheme = parse_scheme(o.scheme != nullptr ? o.scheme : "cubic");
    config.seed = o.seed;
    config.blocks = o.blocks;
    config.clone_coefficients = o.clone_coefficients != 0;
    s.sim = simulate(config);
    s.data.data = s.sim.data;
  });
}

void jg_simulation_free(jg_simulation* sim) { delete sim; }
const jg_data* jg_simulation_data(const jg_simulation* sim) { return sim != nullptr ? &sim->data : nullptr; }

jg_status jg_simulation_truth(const jg_simulation* sim, int moralized, jg_graph** out) {
  return create<jg_graph>(out, [&](jg_graph& g) {
    need(sim, "simulation");
    g.graph = moralized != 0 ? moralize(sim->sim.dag) : directed_graph(sim->sim.dag);
  });
}

jg_status jg_simulation_write_dag_json(const jg_simulation* sim, const char* file) {
  return guarded([&] {
    need(sim, "simulation");
    need(file, "file");
    io::write_text(file, io::format_dag_json(sim->sim.dag, sim->data.data.names));
  });
}

jg_status jg_confusion_compute(const jg_graph* est, const jg_graph* truth, const int* ordering, jg_confusion* out) {
  return guarded([&] {
    need(est, "estimate");
    need(truth, "truth");
    need(out, "output");
    std::optional<CausalOrdering> order;
    if (ordering != nullptr) order.emplace(std::vector<int>(ordering, ordering + est->graph.d()));
    const Confusion c = confusion(est->graph, truth->graph, order ? &*order : nullptr);
    *out = {c.tp, c.fp, c.fn, c.tn};
  });
}

jg_status jg_confusion_write_csv(const jg_confusion* confusion, const char* file) {
  return guarded([&] {
    need(confusion, "confusion");
    need(file, "file");
    io::write_text(file, io::format_confusion_csv({confusion->tp, confusion->fp, confusion->fn, confusion->tn}));
  });
}

jg_status jg_roc_create(jg_roc** out) {
  return create<jg_roc>(out, [](jg_roc&) {});
}

void jg_roc_free(jg_roc* roc) { delete roc; }

jg_status jg_roc_add_path(jg_roc* roc, const jg_path* path, const jg_graph* truth) {
  return guarded([&] {
    need(roc, "roc");
    need(path, "path");
    need(truth, "truth");
    roc->tables.push_back(roc_table(path->path, truth->graph));
  });
}

jg_status jg_roc_add_files(jg_roc* roc, const char* path_csv, const char* path_edges_csv, const jg_graph* truth,
                           const char* const* names) {
  return guarded([&] {
    need(roc, "roc");
    need(path_csv, "path file");
    need(path_edges_csv, "path edge file");
    need(truth, "truth");
    const auto graphs = io::read_path_files(path_csv, path_edges_csv, names_from(names, truth->graph.d()));
    roc->tables.push_back(roc_table(graphs.lambdas, graphs.graphs, graphs.bic_total, truth->graph));
  });
}

jg_status jg_roc_merge(jg_roc* dst, const jg_roc* src) {
  return guarded([&] {
    need(dst, "destination");
    need(src, "source");
    dst->tables.insert(dst->tables.end(), src->tables.begin(), src->tables.end());
  });
}

size_t jg_roc_replicates(const jg_roc* roc) { return roc != nullptr ? roc->tables.size() : 0; }

jg_status jg_roc_write_csv(const jg_roc* roc, double fp_step, const char* file) {
  return guarded([&] {
    need(roc, "roc");
    need(file, "file");
    io::write_text(file, io::format_roc_csv(summarize(*roc, fp_step)));
  });
}

jg_status jg_roc_write_svg(const jg_roc* roc, double fp_step, const char* label, const char* file) {
  return guarded([&] {
    need(roc, "roc");
    need(file, "file");
    io::write_text(file, roc_svg({{label != nullptr ? label : "", summarize(*roc, fp_step)}}));
  });
}

jg_status jg_roc_tp_at_fp(const jg_roc* roc, double fp, double* tp) {
  return guarded([&] {
    need(roc, "roc");
    need(tp, "output");
    *tp = tp_at_fp(aggregate_by_index(roc->tables), fp);
  });
}

jg_status jg_read_ordering(const char* file, const jg_data* data, int* order) {
  return guarded([&] {
    need(file, "file");
    need(data, "data");
    need(order, "order");
    const std::vector<int> parsed = io::read_ordering(file, data->data.names);
    std::copy(parsed.begin(), parsed.end(), order);
  });
}

}  // extern "C"
