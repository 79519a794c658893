#include "jamgraph/graph.hpp"

#include <string>

#include "jamgraph/error.hpp"

namespace jamgraph {

Graph::Graph(int d, bool directed) : d_(d), directed_(directed) {
  require(d >= 0, "graph vertex count must be non-negative");
}

void Graph::add_edge(int a, int b) {
  require(a >= 0 && b >= 0 && a < d_ && b < d_,
          "edge (" + std::to_string(a + 1) + ", " + std::to_string(b + 1) + ") out of range");
  require(a != b, "self-loop on vertex " + std::to_string(a + 1));
  if (!directed_ && a > b) std::swap(a, b);
  edges_.emplace(a, b);
}

bool Graph::has_edge(int a, int b) const {
  if (!directed_ && a > b) std::swap(a, b);
  return edges_.count({a, b}) > 0;
}

}  // namespace jamgraph
