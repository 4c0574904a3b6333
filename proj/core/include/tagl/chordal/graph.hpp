#pragma once

#include <cstdint>
#include <vector>

namespace tagl {

// Sorted list of attribute indices.
using VarSet = std::vector<std::uint32_t>;

VarSet set_intersection(const VarSet& a, const VarSet& b);
VarSet set_union(const VarSet& a, const VarSet& b);
bool is_subset(const VarSet& sub, const VarSet& super);

class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(std::size_t num_vertices);

  std::size_t num_vertices() const { return adjacency_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  bool has_edge(std::uint32_t a, std::uint32_t b) const {
    return adjacency_[a][b] != 0;
  }
  void add_edge(std::uint32_t a, std::uint32_t b);
  void remove_edge(std::uint32_t a, std::uint32_t b);

  VarSet neighbors(std::uint32_t v) const;
  VarSet common_neighbors(std::uint32_t a, std::uint32_t b) const;
  // Pairs (a, b) with a < b, lexicographic.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;

  bool operator==(const UndirectedGraph&) const = default;

 private:
  std::vector<std::vector<std::uint8_t>> adjacency_;
  std::size_t num_edges_ = 0;
};

// Maximum cardinality search visiting order (ties to the lowest index).
std::vector<std::uint32_t> maximum_cardinality_search(const UndirectedGraph& g);

// Tarjan-Yannakakis zero fill-in test on the reverse MCS order.
bool is_chordal(const UndirectedGraph& g);

// Maximal cliques of a chordal graph, each sorted, listed in lexicographic
// order. Throws InvalidArgument for a non-chordal graph.
std::vector<VarSet> maximal_cliques(const UndirectedGraph& g);

// Tree over maximal cliques. Distinct connected components are joined by
// empty separators so the result is always a single tree.
struct JunctionTree {
  std::vector<VarSet> cliques;
  std::size_t root = 0;
  // parent[root] == cliques.size(); separator[c] = cliques[c] ∩ parent.
  std::vector<std::size_t> parent;
  std::vector<VarSet> separator;
  std::vector<std::vector<std::size_t>> children;
  // Cliques ordered root first, every parent before its children.
  std::vector<std::size_t> preorder;

  std::size_t num_cliques() const { return cliques.size(); }
  bool is_root(std::size_t c) const { return c == root; }
  // Smallest clique containing `v` (lowest index among equals).
  std::size_t home_clique(std::uint32_t v) const;
};

// Maximum-weight spanning tree on clique intersection sizes, rooted at the
// largest clique (lexicographically smallest content among equals).
JunctionTree build_junction_tree(const UndirectedGraph& g);

// Every vertex's cliques form a connected subtree and every separator equals
// the intersection of the cliques it joins.
bool has_running_intersection(const JunctionTree& tree, std::size_t num_vertices);

}  // namespace tagl
