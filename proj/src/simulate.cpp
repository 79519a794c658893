#include "jamgraph/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <unordered_map>

#include "jamgraph/error.hpp"

namespace jamgraph {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Unordered pair index p in [0, C(d, 2)) -> (a, b), a < b, row-major.
std::pair<int, int> pair_from_index(std::int64_t p, int d) {
  int a = 0;
  std::int64_t row = d - 1;
  while (p >= row) {
    p -= row;
    ++a;
    --row;
  }
  return {a, a + 1 + static_cast<int>(p)};
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  require(bound > 0, "empty integer range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t value = engine_();
  while (value >= limit) value = engine_();
  return value % bound;
}

Rng Rng::substream(std::uint64_t tag, std::uint64_t index) const {
  return Rng(splitmix64(splitmix64(seed_ ^ (tag * 0x9E3779B97F4A7C15ULL)) ^ index));
}

Scheme parse_scheme(std::string_view text) {
  if (text == "linear") return Scheme::kLinear;
  if (text == "cubic") return Scheme::kCubic;
  fail(ErrorCode::kInvalidArgument, "unknown scheme '" + std::string(text) + "' (expected linear or cubic)");
}

const char* scheme_name(Scheme scheme) { return scheme == Scheme::kLinear ? "linear" : "cubic"; }

DagSpec random_dag(int d, std::int64_t m, Rng& rng) {
  require(d >= 1, "DAG needs at least one node");
  const std::int64_t total = static_cast<std::int64_t>(d) * (d - 1) / 2;
  if (m < 0 || m > total) {
    fail(ErrorCode::kTooManyEdges, "cannot place " + std::to_string(m) + " edges on " + std::to_string(d) +
                                       " nodes (at most " + std::to_string(total) + ")");
  }
  // Partial Fisher-Yates over pair indices with a sparse swap table.
  std::unordered_map<std::int64_t, std::int64_t> swapped;
  auto at = [&](std::int64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  DagSpec spec;
  spec.d = d;
  spec.seed = rng.seed();
  spec.edges.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total - i)));
    const std::int64_t chosen = at(j);
    swapped[j] = at(i);
    const auto [a, b] = pair_from_index(chosen, d);
    spec.edges.push_back({a, b, 0.0, 0.0, 0.0});
  }
  std::sort(spec.edges.begin(), spec.edges.end(),
            [](const DagEdge& l, const DagEdge& r) { return std::pair(l.src, l.dst) < std::pair(r.src, r.dst); });
  return spec;
}

DagSpec gen_coeffs(DagSpec spec, const Rng& rng) {
  for (auto& edge : spec.edges) {
    if (spec.scheme == Scheme::kLinear) {
      edge.b1 = 1.0;
      edge.b2 = 0.0;
      edge.b3 = 0.0;
      continue;
    }
    const std::uint64_t index = (static_cast<std::uint64_t>(edge.src) << 32) | static_cast<std::uint32_t>(edge.dst);
    Rng stream = rng.substream(kCoefficientStream, index);
    edge.b1 = stream.normal();
    edge.b2 = std::sqrt(0.5) * stream.normal();
    edge.b3 = std::sqrt(0.5) * stream.normal();
  }
  spec.has_coefficients = true;
  return spec;
}

std::vector<int> topological_order(const DagSpec& dag) {
  std::vector<std::vector<int>> children(static_cast<std::size_t>(dag.d));
  std::vector<int> indegree(static_cast<std::size_t>(dag.d), 0);
  for (const auto& e : dag.edges) {
    require(e.src >= 0 && e.dst >= 0 && e.src < dag.d && e.dst < dag.d && e.src != e.dst, "invalid DAG edge");
    children[static_cast<std::size_t>(e.src)].push_back(e.dst);
    ++indegree[static_cast<std::size_t>(e.dst)];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < dag.d; ++v) {
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(dag.d));
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : children[static_cast<std::size_t>(v)]) {
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
  }
  require(static_cast<int>(order.size()) == dag.d, "edge set contains a cycle");
  return order;
}

DataMatrix sample(const DagSpec& dag, int n, const Rng& rng) {
  require(n >= 2, "need at least 2 observations");
  require(dag.has_coefficients, "DAG has no coefficients; run gen_coeffs first");
  const std::vector<int> order = topological_order(dag);
  std::vector<std::vector<const DagEdge*>> parents(static_cast<std::size_t>(dag.d));
  for (const auto& e : dag.edges) parents[static_cast<std::size_t>(e.dst)].push_back(&e);

  Eigen::MatrixXd values(n, dag.d);
  Eigen::VectorXd component(n);
  for (int j : order) {
    Rng noise = rng.substream(kNoiseStream, static_cast<std::uint64_t>(j));
    auto column = values.col(j);
    for (int i = 0; i < n; ++i) column(i) = noise.normal();
    for (const DagEdge* e : parents[static_cast<std::size_t>(j)]) {
      const auto x = values.col(e->src).array();
      component = (e->b1 * x + e->b2 * x.square() + e->b3 * x.cube()).matrix();
      const double mean = component.mean();
      const double variance = (component.array() - mean).square().mean();
      if (!(variance >= 1e-12)) {
        fail(ErrorCode::kDegenerateComponent, "edge " + std::to_string(e->src + 1) + " -> " +
                                                  std::to_string(j + 1) + " has a degenerate realized component");
      }
      column += component / std::sqrt(variance);
    }
  }
  return make_data(std::move(values));
}

Graph directed_graph(const DagSpec& dag) {
  Graph graph(dag.d, true);
  for (const auto& e : dag.edges) graph.add_edge(e.src, e.dst);
  return graph;
}

Graph moralize(const DagSpec& dag) {
  Graph graph(dag.d, false);
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(dag.d));
  for (const auto& e : dag.edges) {
    graph.add_edge(e.src, e.dst);
    parents[static_cast<std::size_t>(e.dst)].push_back(e.src);
  }
  for (const auto& ps : parents) {
    for (std::size_t a = 0; a < ps.size(); ++a) {
      for (std::size_t b = a + 1; b < ps.size(); ++b) {
        if (ps[a] != ps[b]) graph.add_edge(ps[a], ps[b]);
      }
    }
  }
  return graph;
}

DagSpec replicate(const DagSpec& dag, int blocks) {
  require(blocks >= 1, "need at least one block");
  DagSpec out;
  out.d = dag.d * blocks;
  out.scheme = dag.scheme;
  out.seed = dag.seed;
  out.has_coefficients = dag.has_coefficients;
  for (int b = 0; b < blocks; ++b) {
    for (DagEdge e : dag.edges) {
      e.src += b * dag.d;
      e.dst += b * dag.d;
      out.edges.push_back(e);
    }
  }
  return out;
}

Simulation simulate(const SimulationConfig& config) {
  require(config.blocks >= 1, "blocks must be >= 1");
  const Rng root(config.seed);
  Rng edge_stream = root.substream(kEdgeStream, 0);
  DagSpec base = random_dag(config.d, config.edges, edge_stream);
  base.scheme = config.scheme;
  base.seed = config.seed;
  DagSpec dag;
  if (config.blocks > 1 && config.clone_coefficients) {
    dag = replicate(gen_coeffs(base, root), config.blocks);
  } else {
    dag = gen_coeffs(replicate(base, config.blocks), root);
  }
  Simulation out;
  out.data = sample(dag, config.n, root);
  out.dag = std::move(dag);
  return out;
}

}  // namespace jamgraph
