#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "jamgraph/data.hpp"
#include "jamgraph/graph.hpp"

namespace jamgraph {

// Seedable generator with portable output: the 64-bit Mersenne Twister engine
// plus hand-written uniform, integer and normal conversions (the standard
// library distributions differ between implementations).
//
// Stream splitting: substream(tag, index) seeds a fresh generator from
// splitmix64(splitmix64(seed ^ tag * golden) ^ index), so every edge and every
// node draws from its own stream and results do not depend on traversal order
// or on d. Tags used by the simulator are listed in SimulationStream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal by the Box-Muller transform.
  double normal();
  // Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  Rng substream(std::uint64_t tag, std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum SimulationStream : std::uint64_t {
  kEdgeStream = 1,         // index 0: choice of DAG edges
  kCoefficientStream = 2,  // index (src << 32) | dst: one stream per edge
  kNoiseStream = 3,        // index j: one stream per node
};

enum class Scheme { kLinear, kCubic };

Scheme parse_scheme(std::string_view text);
const char* scheme_name(Scheme scheme);

// Directed edge src -> dst with f(x) = b1 x + b2 x^2 + b3 x^3.
struct DagEdge {
  int src = 0;
  int dst = 0;
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
};

struct DagSpec {
  int d = 0;
  std::vector<DagEdge> edges;
  Scheme scheme = Scheme::kCubic;
  std::uint64_t seed = 0;
  bool has_coefficients = false;
};

// m of the C(d, 2) unordered pairs drawn uniformly without replacement and
// oriented low -> high index, so the identity is a valid causal ordering.
// Edges are sorted. Throws kTooManyEdges.
DagSpec random_dag(int d, std::int64_t m, Rng& rng);

// Cubic: b1 ~ N(0, 1), b2 ~ N(0, 0.5), b3 ~ N(0, 0.5); linear: (1, 0, 0).
// Draws come from per-edge substreams of `rng`.
DagSpec gen_coeffs(DagSpec spec, const Rng& rng);

// Kahn's algorithm, smallest index first. Throws kInvalidArgument on a cycle.
std::vector<int> topological_order(const DagSpec& dag);

// x_j = sum_{k -> j} f~_jk(x_k) + eps_j, eps_j ~ N(0, 1), where f~_jk is the
// realized f_jk(x_k) column rescaled to unit sample variance (1/n
// convention). Throws kDegenerateComponent when a realized column has
// variance below 1e-12.
DataMatrix sample(const DagSpec& dag, int n, const Rng& rng);

// Undirected skeleton plus edges between every pair of co-parents.
Graph moralize(const DagSpec& dag);
Graph directed_graph(const DagSpec& dag);

// `blocks` disjoint copies of the edge set; block b shifts indices by b * d.
// Coefficients are copied when present.
DagSpec replicate(const DagSpec& dag, int blocks);

struct SimulationConfig {
  int d = 100;
  std::int64_t edges = 80;
  int n = 50;
  Scheme scheme = Scheme::kCubic;
  std::uint64_t seed = 1;
  int blocks = 1;
  // With blocks > 1: copy the first block's coefficients instead of redrawing.
  bool clone_coefficients = false;
};

struct Simulation {
  DagSpec dag;
  DataMatrix data;
};

Simulation simulate(const SimulationConfig& config);

}  // namespace jamgraph
