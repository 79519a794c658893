// jamgraph command-line front end. Talks to the library only through the C API.
#include <jamgraph/jamgraph.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kInvalidConfig = 2, kDataError = 3, kNumericalFailure = 4 };

int exit_code_for(jg_status status) {
  switch (status) {
    case JG_OK: return kOk;
    case JG_ERROR_INVALID_ARGUMENT:
    case JG_ERROR_TOO_MANY_EDGES: return kInvalidConfig;
    case JG_ERROR_IO:
    case JG_ERROR_PARSE:
    case JG_ERROR_CONSTANT_COLUMN:
    case JG_ERROR_RANK_DEFICIENT:
    case JG_ERROR_SHAPE_MISMATCH:
    case JG_ERROR_DIMENSION_MISMATCH: return kDataError;
    default: return kNumericalFailure;
  }
}

struct Failure {
  int code;
  std::string message;
};

void check(jg_status status, const std::string& context) {
  if (status != JG_OK) throw Failure{exit_code_for(status), context + ": " + jg_last_error()};
}

[[noreturn]] void config_error(const std::string& message) { throw Failure{kInvalidConfig, message}; }

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DataPtr = std::unique_ptr<jg_data, Deleter<jg_data, jg_data_free>>;
using GraphPtr = std::unique_ptr<jg_graph, Deleter<jg_graph, jg_graph_free>>;
using PathPtr = std::unique_ptr<jg_path, Deleter<jg_path, jg_path_free>>;
using ScreenPtr = std::unique_ptr<jg_screen, Deleter<jg_screen, jg_screen_free>>;
using SimPtr = std::unique_ptr<jg_simulation, Deleter<jg_simulation, jg_simulation_free>>;
using RocPtr = std::unique_ptr<jg_roc, Deleter<jg_roc, jg_roc_free>>;

DataPtr read_data(const std::string& path) {
  jg_data* raw = nullptr;
  check(jg_data_read_csv(path.c_str(), &raw), "reading " + path);
  return DataPtr(raw);
}

GraphPtr read_graph(const std::string& path, const std::vector<const char*>& names) {
  jg_graph* raw = nullptr;
  check(jg_graph_read_csv(path.c_str(), names.data(), static_cast<int>(names.size()), &raw), "reading " + path);
  return GraphPtr(raw);
}

std::vector<const char*> names_of(const jg_data* data) {
  std::vector<const char*> names;
  for (int j = 0; j < jg_data_d(data); ++j) names.push_back(jg_data_name(data, j));
  return names;
}

// Owns generated V1..Vd labels when no data file supplies names.
struct NameList {
  std::vector<std::string> storage;
  std::vector<const char*> pointers;

  static NameList from_data(const jg_data* data) {
    NameList list;
    list.pointers = names_of(data);
    return list;
  }
  static NameList generated(int d) {
    NameList list;
    for (int j = 0; j < d; ++j) list.storage.push_back("V" + std::to_string(j + 1));
    for (const auto& s : list.storage) list.pointers.push_back(s.c_str());
    return list;
  }
};

std::string in_dir(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kDataError, "cannot create directory " + dir + ": " + ec.message()};
}

int default_threads() {
  const char* env = std::getenv("JAMGRAPH_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 4096) config_error("JAMGRAPH_THREADS must be a positive integer");
  return static_cast<int>(value);
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& arg : args) {
    if (arg == flag || arg.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

// Expands `--config file.json` (a flat JSON object such as
// {"degrees": "1,2,3", "nlambda": 50}) into flags placed after the
// subcommand. Keys already given on the command line are skipped, so
// explicit flags win. Unknown keys surface as ordinary parse errors.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (file.empty()) return args;
  std::ifstream in(file);
  if (!in) config_error("cannot open config file " + file);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    config_error("invalid JSON in " + file + ": " + e.what());
  }
  if (!doc.is_object()) config_error("config file " + file + " must hold a JSON object");
  auto text = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (given_on_command_line(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
      continue;
    }
    if (value.is_array()) {
      std::string joined;
      for (const auto& element : value) joined += (joined.empty() ? "" : ",") + text(element);
      extra.push_back(flag + "=" + joined);
      continue;
    }
    extra.push_back(flag + "=" + text(value));
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

struct ModelArgs {
  std::string degrees = "1,2,3";
  bool raw = false;
  bool lenient = false;
  double rank_threshold = 1e-10;

  void add(CLI::App* app) {
    app->add_option("--degrees", degrees, "Polynomial degrees of the basis, comma separated")->capture_default_str();
    app->add_flag("--raw", raw, "Use the data as given instead of standardizing each column");
    app->add_flag("--lenient", lenient, "Drop dependent basis powers instead of failing");
    app->add_option("--rank-threshold", rank_threshold, "Smallest singular value accepted for a basis")
        ->capture_default_str();
  }
  jg_model_options options() const {
    jg_model_options o;
    jg_model_options_default(&o);
    o.degrees = degrees.c_str();
    o.raw = raw ? 1 : 0;
    o.lenient = lenient ? 1 : 0;
    o.rank_threshold = rank_threshold;
    return o;
  }
};

struct SolverArgs {
  jg_solver_options o{};
  bool sequential = false;

  SolverArgs() { jg_solver_options_default(&o); }
  void add(CLI::App* app) {
    app->add_option("--tol", o.tolerance, "Largest block change (function space) at convergence")
        ->capture_default_str();
    app->add_option("--obj-tol", o.objective_tolerance, "Largest relative objective change at convergence")
        ->capture_default_str();
    app->add_option("--max-sweeps", o.max_sweeps, "Sweep limit per fit")->capture_default_str();
    app->add_option("--recompute-every", o.recompute_every, "Sweeps between full residual recomputes")
        ->capture_default_str();
    app->add_option("--edge-tol", o.edge_tolerance, "Coefficient norm above which a pair is an edge")
        ->capture_default_str();
    app->add_flag("--sequential-threshold", sequential,
                  "Threshold the second block of a pair after shrinking the first");
    app->add_option("--threads", o.threads, "Worker threads (default: JAMGRAPH_THREADS or 1)");
  }
  jg_solver_options options() const {
    jg_solver_options out = o;
    out.coupled_threshold = sequential ? 0 : 1;
    return out;
  }
};

struct GridArgs {
  int nlambda = 100;
  double ratio = 0.01;
  std::vector<double> lambdas;

  void add(CLI::App* app) {
    app->add_option("--nlambda", nlambda, "Number of lambda values")->capture_default_str();
    app->add_option("--ratio", ratio, "Smallest lambda as a fraction of lambda_max")->capture_default_str();
    app->add_option("--lambda", lambdas, "Explicit decreasing lambda values (overrides the grid)")
        ->delimiter(',');
  }
  jg_path_options options(double lambda2) const {
    jg_path_options o;
    jg_path_options_default(&o);
    o.count = nlambda;
    o.ratio = ratio;
    if (!lambdas.empty()) {
      o.lambdas = lambdas.data();
      o.lambda_count = static_cast<int>(lambdas.size());
    }
    o.lambda2 = lambda2;
    return o;
  }
};

// Runs body(i) for i in [0, count) on up to `threads` workers; first failure wins.
template <typename Body>
void run_parallel(std::size_t count, int threads, Body body) {
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::optional<Failure> first;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (const Failure& f) {
        std::lock_guard lock(mutex);
        if (!first) first = f;
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first) throw *first;
}

std::vector<std::string> replicate_dirs(const std::string& root) {
  std::vector<std::string> dirs;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (entry.is_directory()) dirs.push_back(entry.path().string());
  }
  if (ec) throw Failure{kDataError, "cannot list " + root + ": " + ec.message()};
  std::sort(dirs.begin(), dirs.end(), [](const std::string& a, const std::string& b) {
    const std::string na = fs::path(a).filename().string();
    const std::string nb = fs::path(b).filename().string();
    if (na.size() != nb.size()) return na.size() < nb.size();
    return na < nb;
  });
  if (dirs.empty()) throw Failure{kDataError, "no replicate directories under " + root};
  return dirs;
}

// ---- simulate ----

struct SimulateArgs {
  int d = 100;
  std::int64_t edges = 80;
  int n = 50;
  std::string scheme = "cubic";
  std::uint64_t seed = 1;
  int blocks = 1;
  bool clone = false;
  int replicates = 0;
  std::string out;
};

void simulate_one(const SimulateArgs& args, std::uint64_t seed, const std::string& dir) {
  jg_sim_options o;
  jg_sim_options_default(&o);
  o.d = args.d;
  o.edges = args.edges;
  o.n = args.n;
  o.scheme = args.scheme.c_str();
  o.seed = seed;
  o.blocks = args.blocks;
  o.clone_coefficients = args.clone ? 1 : 0;
  jg_simulation* raw = nullptr;
  check(jg_simulate(&o, &raw), "simulate");
  SimPtr sim(raw);
  make_dir(dir);
  const jg_data* data = jg_simulation_data(sim.get());
  const auto names = names_of(data);
  check(jg_data_write_csv(data, in_dir(dir, "data.csv").c_str()), "writing data");
  for (int moral : {0, 1}) {
    jg_graph* g = nullptr;
    check(jg_simulation_truth(sim.get(), moral, &g), "truth graph");
    GraphPtr graph(g);
    const std::string file = in_dir(dir, moral ? "truth_moral.csv" : "truth_directed.csv");
    check(jg_graph_write_csv(graph.get(), names.data(), file.c_str()), "writing " + file);
  }
  check(jg_simulation_write_dag_json(sim.get(), in_dir(dir, "dag.json").c_str()), "writing DAG");
}

void run_simulate(const SimulateArgs& args, int threads) {
  if (args.replicates <= 0) {
    simulate_one(args, args.seed, args.out);
    return;
  }
  run_parallel(static_cast<std::size_t>(args.replicates), threads, [&](std::size_t i) {
    simulate_one(args, args.seed + i, in_dir(args.out, std::to_string(i + 1)));
  });
}

// ---- fit / fit-dag ----

struct FitArgs {
  std::string data;
  std::string replicates;
  std::string out;
  std::string ordering;
  double lambda2 = 0.0;
  ModelArgs model;
  SolverArgs solver;
  GridArgs grid;
};

void write_path_outputs(const jg_path* path, const std::string& dir) {
  make_dir(dir);
  check(jg_path_write_csv(path, in_dir(dir, "path.csv").c_str()), "writing path.csv");
  check(jg_path_write_edges(path, in_dir(dir, "path_edges.csv").c_str()), "writing path_edges.csv");
  check(jg_path_write_selected(path, in_dir(dir, "edges.csv").c_str()), "writing edges.csv");
  check(jg_path_write_coefficients(path, in_dir(dir, "coefficients.json").c_str()), "writing coefficients");
  check(jg_path_write_kkt(path, in_dir(dir, "kkt.csv").c_str()), "writing kkt.csv");
  if (jg_path_screened(path)) {
    check(jg_path_write_screen(path, in_dir(dir, "components.csv").c_str(), in_dir(dir, "rho.csv").c_str()),
          "writing screen report");
  }
}

std::string fit_one(const FitArgs& args, bool dag, const std::string& data_file, const std::string& out_dir,
                    int solver_threads) {
  DataPtr data = read_data(data_file);
  const jg_model_options model = args.model.options();
  const jg_path_options grid = args.grid.options(args.lambda2);
  jg_solver_options solver = args.solver.options();
  solver.threads = solver_threads;
  jg_path* raw = nullptr;
  if (dag) {
    std::vector<int> order(static_cast<std::size_t>(jg_data_d(data.get())));
    check(jg_read_ordering(args.ordering.c_str(), data.get(), order.data()), "reading ordering");
    check(jg_fit_dag_path(data.get(), order.data(), &model, &grid, &solver, &raw), "fit-dag");
  } else {
    check(jg_fit_path(data.get(), &model, &grid, &solver, &raw), "fit");
  }
  PathPtr path(raw);
  write_path_outputs(path.get(), out_dir);
  const std::size_t selected = jg_path_selected(path.get());
  jg_graph* g = nullptr;
  check(jg_path_graph(path.get(), selected, &g), "selected graph");
  GraphPtr graph(g);
  std::size_t unconverged = 0;
  for (std::size_t i = 0; i < jg_path_size(path.get()); ++i) unconverged += jg_path_converged(path.get(), i) ? 0 : 1;
  std::string summary = out_dir + ": " + std::to_string(jg_path_size(path.get())) + " lambdas, selected lambda " +
                        std::to_string(jg_path_lambda(path.get(), selected)) + " with " +
                        std::to_string(jg_graph_edge_count(graph.get())) + " edges";
  if (unconverged > 0) summary += " (" + std::to_string(unconverged) + " fits hit the sweep limit)";
  return summary;
}

void run_fit(const FitArgs& args, bool dag) {
  if (args.data.empty() == args.replicates.empty()) config_error("give exactly one of --data or --replicates");
  if (!args.replicates.empty()) {
    const auto dirs = replicate_dirs(args.replicates);
    std::vector<std::string> summaries(dirs.size());
    run_parallel(dirs.size(), args.solver.o.threads, [&](std::size_t i) {
      summaries[i] = fit_one(args, dag, in_dir(dirs[i], "data.csv"), dirs[i], 1);
    });
    for (const auto& s : summaries) std::cout << s << "\n";
    return;
  }
  if (args.out.empty()) config_error("--out is required with --data");
  std::cout << fit_one(args, dag, args.data, args.out, args.solver.o.threads) << "\n";
}

// ---- eval ----

struct EvalArgs {
  std::string truth;
  std::string est;
  std::string path_dir;
  std::string replicates;
  std::string truth_name = "truth_moral.csv";
  std::string data;
  int d = 0;
  std::string ordering;
  std::string out;
  std::string svg;
  std::string label;
  double interpolate = 0.0;
  int threads = 1;
};

NameList eval_names(const EvalArgs& args, const std::string& replicate_dir, DataPtr& holder) {
  std::string data_file = args.data;
  if (data_file.empty() && !replicate_dir.empty() && fs::exists(in_dir(replicate_dir, "data.csv"))) {
    data_file = in_dir(replicate_dir, "data.csv");
  }
  if (!data_file.empty()) {
    holder = read_data(data_file);
    return NameList::from_data(holder.get());
  }
  if (args.d <= 0) config_error("eval needs --data or --d to know the variables");
  return NameList::generated(args.d);
}

void write_roc(const jg_roc* roc, const EvalArgs& args) {
  check(jg_roc_write_csv(roc, args.interpolate, in_dir(args.out, "roc.csv").c_str()), "writing roc.csv");
  if (!args.svg.empty()) {
    check(jg_roc_write_svg(roc, args.interpolate, args.label.c_str(), args.svg.c_str()), "writing " + args.svg);
  }
}

void run_eval(const EvalArgs& args) {
  const int modes = (args.est.empty() ? 0 : 1) + (args.path_dir.empty() ? 0 : 1) + (args.replicates.empty() ? 0 : 1);
  if (modes != 1) config_error("give exactly one of --est, --path-dir or --replicates");
  if (args.out.empty()) config_error("--out is required");
  make_dir(args.out);

  if (!args.replicates.empty()) {
    const auto dirs = replicate_dirs(args.replicates);
    std::vector<RocPtr> parts(dirs.size());
    run_parallel(dirs.size(), args.threads, [&](std::size_t i) {
      DataPtr holder;
      const NameList names = eval_names(args, dirs[i], holder);
      const std::string truth_file = args.truth.empty() ? in_dir(dirs[i], args.truth_name) : args.truth;
      GraphPtr truth = read_graph(truth_file, names.pointers);
      jg_roc* raw = nullptr;
      check(jg_roc_create(&raw), "roc");
      parts[i].reset(raw);
      check(jg_roc_add_files(raw, in_dir(dirs[i], "path.csv").c_str(), in_dir(dirs[i], "path_edges.csv").c_str(),
                             truth.get(), names.pointers.data()),
            "reading path files in " + dirs[i]);
    });
    // Merge in directory order so the table does not depend on scheduling.
    jg_roc* raw = nullptr;
    check(jg_roc_create(&raw), "roc");
    RocPtr roc(raw);
    for (const auto& part : parts) check(jg_roc_merge(roc.get(), part.get()), "merging replicates");
    write_roc(roc.get(), args);
    std::cout << "averaged " << jg_roc_replicates(roc.get()) << " replicates into "
              << in_dir(args.out, "roc.csv") << "\n";
    return;
  }

  if (args.truth.empty()) config_error("--truth is required");
  DataPtr holder;
  const NameList names = eval_names(args, "", holder);
  GraphPtr truth = read_graph(args.truth, names.pointers);

  if (!args.est.empty()) {
    GraphPtr est = read_graph(args.est, names.pointers);
    std::vector<int> order;
    if (!args.ordering.empty()) {
      if (!holder) config_error("--ordering needs --data");
      order.resize(static_cast<std::size_t>(jg_data_d(holder.get())));
      check(jg_read_ordering(args.ordering.c_str(), holder.get(), order.data()), "reading ordering");
    }
    jg_confusion c{};
    check(jg_confusion_compute(est.get(), truth.get(), order.empty() ? nullptr : order.data(), &c), "confusion");
    check(jg_confusion_write_csv(&c, in_dir(args.out, "confusion.csv").c_str()), "writing confusion.csv");
    std::cout << "tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn << " tn=" << c.tn << "\n";
    return;
  }

  jg_roc* raw = nullptr;
  check(jg_roc_create(&raw), "roc");
  RocPtr roc(raw);
  check(jg_roc_add_files(roc.get(), in_dir(args.path_dir, "path.csv").c_str(),
                         in_dir(args.path_dir, "path_edges.csv").c_str(), truth.get(), names.pointers.data()),
        "reading path files");
  write_roc(roc.get(), args);
  std::cout << "wrote " << in_dir(args.out, "roc.csv") << "\n";
}

// ---- screen-report ----

struct ScreenArgs {
  std::string data;
  std::string out;
  double lambda2 = 0.5;
  ModelArgs model;
  int threads = 1;
};

void run_screen(const ScreenArgs& args) {
  DataPtr data = read_data(args.data);
  const jg_model_options model = args.model.options();
  jg_screen* raw = nullptr;
  check(jg_screen_compute(data.get(), &model, args.lambda2, args.threads, &raw), "screen-report");
  ScreenPtr screen(raw);
  make_dir(args.out);
  check(jg_screen_write(screen.get(), in_dir(args.out, "components.csv").c_str(), in_dir(args.out, "rho.csv").c_str(),
                        in_dir(args.out, "marginal_edges.csv").c_str()),
        "writing screen report");
  std::cout << jg_screen_component_count(screen.get()) << " components at lambda2 = " << args.lambda2 << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse additive graph estimation with polynomial bases", "jamgraph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(jg_version()));

  int threads = 1;
  try {
    threads = default_threads();
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }

  std::string config_file;
  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON file with option values; command-line flags take precedence");
  };

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Sample data from a random DAG with additive equations");
  with_config(sim);
  sim->add_option("--d", sim_args.d, "Number of variables per block")->capture_default_str();
  sim->add_option("--edges", sim_args.edges, "Number of DAG edges per block")->capture_default_str();
  sim->add_option("--n", sim_args.n, "Number of observations")->capture_default_str();
  sim->add_option("--scheme", sim_args.scheme, "Edge functions")
      ->check(CLI::IsMember({"cubic", "linear"}))
      ->capture_default_str();
  sim->add_option("--seed", sim_args.seed, "Random seed")->capture_default_str();
  sim->add_option("--blocks", sim_args.blocks, "Disjoint copies of the graph")->capture_default_str();
  sim->add_flag("--clone-coeffs", sim_args.clone, "Reuse the first block's coefficients in every block");
  sim->add_option("--replicates", sim_args.replicates,
                   "Write this many datasets to <out>/1, <out>/2, ... with seeds seed, seed+1, ...");
  sim->add_option("--out", sim_args.out, "Output directory")->required();
  sim->add_option("--threads", threads, "Worker threads for replicates");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Fit a path of graphs and select one by BIC");
  with_config(fit);
  fit->add_option("--data", fit_args.data, "Data CSV with a header row");
  fit->add_option("--replicates", fit_args.replicates, "Fit <dir>/*/data.csv in place");
  fit->add_option("--out", fit_args.out, "Output directory");
  fit->add_option("--lambda2", fit_args.lambda2, "Screening threshold in [0, 1]; 0 disables")->capture_default_str();
  fit_args.model.add(fit);
  fit_args.solver.add(fit);
  fit_args.grid.add(fit);

  FitArgs dag_args;
  CLI::App* fit_dag = app.add_subcommand("fit-dag", "Fit a path of DAGs given a causal ordering");
  with_config(fit_dag);
  fit_dag->add_option("--data", dag_args.data, "Data CSV with a header row");
  fit_dag->add_option("--replicates", dag_args.replicates, "Fit <dir>/*/data.csv in place");
  fit_dag->add_option("--out", dag_args.out, "Output directory");
  fit_dag->add_option("--ordering", dag_args.ordering, "Ordering file: names or 1-based indices, first to last")
      ->required();
  dag_args.model.add(fit_dag);
  dag_args.solver.add(fit_dag);
  dag_args.grid.add(fit_dag);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Score estimated graphs against a true graph");
  with_config(eval);
  eval->add_option("--truth", eval_args.truth, "True edge list");
  eval->add_option("--est", eval_args.est, "Estimated edge list (writes confusion.csv)");
  eval->add_option("--path-dir", eval_args.path_dir, "Directory with path.csv and path_edges.csv (writes roc.csv)");
  eval->add_option("--replicates", eval_args.replicates, "Directory of replicate directories (writes averaged roc.csv)");
  eval->add_option("--truth-name", eval_args.truth_name, "Truth file name inside each replicate directory")
      ->capture_default_str();
  eval->add_option("--data", eval_args.data, "Data CSV supplying variable names");
  eval->add_option("--d", eval_args.d, "Number of variables named V1..Vd when no data file is given");
  eval->add_option("--ordering", eval_args.ordering, "Ordering restricting directed counts to consistent pairs");
  eval->add_option("--out", eval_args.out, "Output directory")->required();
  eval->add_option("--svg", eval_args.svg, "Also draw the ROC curve to this SVG file");
  eval->add_option("--label", eval_args.label, "Curve label for the SVG");
  eval->add_option("--interpolate", eval_args.interpolate,
                   "Average curves at fp = 0, step, 2 step, ... instead of by lambda index");
  eval->add_option("--threads", eval_args.threads, "Worker threads for replicates");

  ScreenArgs screen_args;
  CLI::App* screen = app.add_subcommand("screen-report", "Marginal screening components and correlations");
  with_config(screen);
  screen->add_option("--data", screen_args.data, "Data CSV with a header row")->required();
  screen->add_option("--out", screen_args.out, "Output directory")->required();
  screen->add_option("--lambda2", screen_args.lambda2, "Screening threshold in [0, 1]")->capture_default_str();
  screen_args.model.add(screen);
  screen->add_option("--threads", screen_args.threads, "Worker threads");

  fit_args.solver.o.threads = threads;
  dag_args.solver.o.threads = threads;
  eval_args.threads = threads;
  screen_args.threads = threads;

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  // CLI11 consumes arguments in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);

  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidConfig;
  }

  try {
    if (sim->parsed()) run_simulate(sim_args, threads);
    if (fit->parsed()) run_fit(fit_args, false);
    if (fit_dag->parsed()) run_fit(dag_args, true);
    if (eval->parsed()) run_eval(eval_args);
    if (screen->parsed()) run_screen(screen_args);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kOk;
}
