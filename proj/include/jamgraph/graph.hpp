#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

namespace jamgraph {

// Edge set over d vertices labelled 0..d-1. Undirected edges are stored as
// (a, b) with a < b; directed edges as (src, dst).
class Graph {
 public:
  using Edge = std::pair<int, int>;

  Graph() = default;
  Graph(int d, bool directed);

  int d() const { return d_; }
  bool directed() const { return directed_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  // Ignores duplicates. Throws kInvalidArgument on self-loops or out-of-range vertices.
  void add_edge(int a, int b);
  bool has_edge(int a, int b) const;

  // Lexicographically sorted.
  std::vector<Edge> edges() const { return {edges_.begin(), edges_.end()}; }
  const std::set<Edge>& edge_set() const { return edges_; }

  friend bool operator==(const Graph& lhs, const Graph& rhs) {
    return lhs.d_ == rhs.d_ && lhs.directed_ == rhs.directed_ && lhs.edges_ == rhs.edges_;
  }

 private:
  int d_ = 0;
  bool directed_ = false;
  std::set<Edge> edges_;
};

}  // namespace jamgraph
