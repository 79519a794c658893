/* C interface to libjamgraph.
 *
 * Every function returning jg_status stores a message retrievable with
 * jg_last_error() on failure (per thread). Handles are created by the
 * library and released with the matching *_free function; strings returned
 * by accessors stay valid as long as their handle. */
#ifndef JAMGRAPH_JAMGRAPH_H
#define JAMGRAPH_JAMGRAPH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(JAMGRAPH_BUILDING)
#define JG_API __declspec(dllexport)
#else
#define JG_API __declspec(dllimport)
#endif
#else
#define JG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jg_status {
  JG_OK = 0,
  JG_ERROR_INVALID_ARGUMENT,
  JG_ERROR_IO,
  JG_ERROR_PARSE,
  JG_ERROR_CONSTANT_COLUMN,
  JG_ERROR_RANK_DEFICIENT,
  JG_ERROR_SHAPE_MISMATCH,
  JG_ERROR_NON_FINITE,
  JG_ERROR_ZERO_RESIDUAL,
  JG_ERROR_TOO_MANY_EDGES,
  JG_ERROR_DEGENERATE_COMPONENT,
  JG_ERROR_DIMENSION_MISMATCH,
  JG_ERROR_INTERNAL
} jg_status;

JG_API const char* jg_last_error(void);
JG_API const char* jg_status_name(jg_status status);
JG_API const char* jg_version(void);

/* ---- data ---- */

typedef struct jg_data jg_data;

JG_API jg_status jg_data_read_csv(const char* path, jg_data** out);
/* values is row-major n x d; names may be NULL (V1..Vd). */
JG_API jg_status jg_data_from_values(const double* values, int n, int d, const char* const* names, jg_data** out);
JG_API void jg_data_free(jg_data* data);
JG_API int jg_data_n(const jg_data* data);
JG_API int jg_data_d(const jg_data* data);
JG_API const char* jg_data_name(const jg_data* data, int j);
JG_API double jg_data_value(const jg_data* data, int i, int j);
JG_API jg_status jg_data_write_csv(const jg_data* data, const char* path);

/* ---- options ---- */

typedef struct jg_solver_options {
  double tolerance;           /* block change in function space, default 1e-7 */
  double objective_tolerance; /* relative objective change, default 1e-10 */
  int max_sweeps;             /* default 1000 */
  int recompute_every;        /* default 50 */
  int coupled_threshold;      /* 1: joint pair threshold (default); 0: sequential */
  double edge_tolerance;      /* default 1e-8 */
  int threads;                /* default 1 */
} jg_solver_options;

JG_API void jg_solver_options_default(jg_solver_options* options);

typedef struct jg_model_options {
  const char* degrees;   /* comma separated, default "1,2,3" */
  int raw;               /* 1: skip standardization */
  int lenient;           /* 1: drop dependent powers instead of failing */
  double rank_threshold; /* default 1e-10 */
} jg_model_options;

JG_API void jg_model_options_default(jg_model_options* options);

typedef struct jg_path_options {
  int count;              /* grid size, default 100 */
  double ratio;           /* smallest / largest lambda, default 0.01 */
  const double* lambdas;  /* explicit decreasing grid; overrides count/ratio */
  int lambda_count;
  double lambda2;         /* screening threshold in [0, 1]; 0 disables */
} jg_path_options;

JG_API void jg_path_options_default(jg_path_options* options);

/* ---- graphs ---- */

typedef struct jg_graph jg_graph;

JG_API jg_status jg_graph_create(int d, int directed, jg_graph** out);
JG_API jg_status jg_graph_add_edge(jg_graph* graph, int a, int b);
/* Reads an `a,b` or `src,dst` edge list; cells are names or 1-based indices. */
JG_API jg_status jg_graph_read_csv(const char* path, const char* const* names, int d, jg_graph** out);
JG_API jg_status jg_graph_write_csv(const jg_graph* graph, const char* const* names, const char* path);
JG_API void jg_graph_free(jg_graph* graph);
JG_API int jg_graph_d(const jg_graph* graph);
JG_API int jg_graph_directed(const jg_graph* graph);
JG_API size_t jg_graph_edge_count(const jg_graph* graph);
/* Edges in lexicographic order, 0-based endpoints. */
JG_API jg_status jg_graph_edge(const jg_graph* graph, size_t index, int* a, int* b);

/* ---- fitting ---- */

typedef struct jg_path jg_path;

JG_API jg_status jg_fit_path(const jg_data* data, const jg_model_options* model, const jg_path_options* path,
                             const jg_solver_options* solver, jg_path** out);
/* ordering: permutation of 0..d-1 listing variables from first to last. */
JG_API jg_status jg_fit_dag_path(const jg_data* data, const int* ordering, const jg_model_options* model,
                                 const jg_path_options* path, const jg_solver_options* solver, jg_path** out);
JG_API void jg_path_free(jg_path* path);
JG_API size_t jg_path_size(const jg_path* path);
JG_API size_t jg_path_selected(const jg_path* path);
JG_API double jg_path_lambda(const jg_path* path, size_t index);
JG_API double jg_path_bic(const jg_path* path, size_t index);
JG_API double jg_path_kkt(const jg_path* path, size_t index);
JG_API int jg_path_converged(const jg_path* path, size_t index);
JG_API jg_status jg_path_graph(const jg_path* path, size_t index, jg_graph** out);
JG_API int jg_path_screened(const jg_path* path);

JG_API jg_status jg_path_write_csv(const jg_path* path, const char* file);
JG_API jg_status jg_path_write_edges(const jg_path* path, const char* file);
JG_API jg_status jg_path_write_selected(const jg_path* path, const char* file);
JG_API jg_status jg_path_write_coefficients(const jg_path* path, const char* file);
JG_API jg_status jg_path_write_kkt(const jg_path* path, const char* file);
/* Only for paths fitted with lambda2 > 0. */
JG_API jg_status jg_path_write_screen(const jg_path* path, const char* components_file, const char* rho_file);

/* ---- screening ---- */

typedef struct jg_screen jg_screen;

JG_API jg_status jg_screen_compute(const jg_data* data, const jg_model_options* model, double lambda2, int threads,
                                   jg_screen** out);
JG_API void jg_screen_free(jg_screen* screen);
JG_API int jg_screen_component_count(const jg_screen* screen);
/* 0-based component id, numbered by smallest member. */
JG_API int jg_screen_component_of(const jg_screen* screen, int j);
JG_API double jg_screen_rho(const jg_screen* screen, int j, int k);
JG_API jg_status jg_screen_write(const jg_screen* screen, const char* components_file, const char* rho_file,
                                 const char* edges_file);

/* ---- simulation ---- */

typedef struct jg_sim_options {
  int d;
  int64_t edges;
  int n;
  const char* scheme; /* "cubic" or "linear" */
  uint64_t seed;
  int blocks;
  int clone_coefficients;
} jg_sim_options;

JG_API void jg_sim_options_default(jg_sim_options* options);

typedef struct jg_simulation jg_simulation;

JG_API jg_status jg_simulate(const jg_sim_options* options, jg_simulation** out);
JG_API void jg_simulation_free(jg_simulation* sim);
JG_API const jg_data* jg_simulation_data(const jg_simulation* sim);
JG_API jg_status jg_simulation_truth(const jg_simulation* sim, int moralized, jg_graph** out);
JG_API jg_status jg_simulation_write_dag_json(const jg_simulation* sim, const char* file);

/* ---- evaluation ---- */

typedef struct jg_confusion {
  int64_t tp;
  int64_t fp;
  int64_t fn;
  int64_t tn;
} jg_confusion;

/* ordering may be NULL; for directed graphs it restricts the universe to
 * ordering-consistent pairs. */
JG_API jg_status jg_confusion_compute(const jg_graph* est, const jg_graph* truth, const int* ordering,
                                      jg_confusion* out);
JG_API jg_status jg_confusion_write_csv(const jg_confusion* confusion, const char* file);

typedef struct jg_roc jg_roc;

JG_API jg_status jg_roc_create(jg_roc** out);
JG_API void jg_roc_free(jg_roc* roc);
JG_API jg_status jg_roc_add_path(jg_roc* roc, const jg_path* path, const jg_graph* truth);
/* Adds a replicate from files written by jg_path_write_csv / jg_path_write_edges. */
JG_API jg_status jg_roc_add_files(jg_roc* roc, const char* path_csv, const char* path_edges_csv,
                                  const jg_graph* truth, const char* const* names);
/* Appends every replicate of src to dst. */
JG_API jg_status jg_roc_merge(jg_roc* dst, const jg_roc* src);
JG_API size_t jg_roc_replicates(const jg_roc* roc);
/* fp_step > 0 selects fp-interpolated aggregation on 0, fp_step, 2 fp_step, ...;
 * otherwise rows are averaged by lambda index. */
JG_API jg_status jg_roc_write_csv(const jg_roc* roc, double fp_step, const char* file);
JG_API jg_status jg_roc_write_svg(const jg_roc* roc, double fp_step, const char* label, const char* file);
/* Mean tp interpolated at a mean fp on the index-averaged curve. */
JG_API jg_status jg_roc_tp_at_fp(const jg_roc* roc, double fp, double* tp);

/* ---- orderings ---- */

/* Reads names or 1-based indices (text or JSON array) into order[0..d-1]. */
JG_API jg_status jg_read_ordering(const char* file, const jg_data* data, int* order);

#ifdef __cplusplus
}
#endif

#endif
