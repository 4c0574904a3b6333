#include "tagl/chordal/graph.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "tagl/error.hpp"

namespace tagl {

VarSet set_intersection(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

VarSet set_union(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const VarSet& sub, const VarSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

UndirectedGraph::UndirectedGraph(std::size_t num_vertices)
    : adjacency_(num_vertices, std::vector<std::uint8_t>(num_vertices, 0)) {}

void UndirectedGraph::add_edge(std::uint32_t a, std::uint32_t b) {
  if (a == b) throw InvalidArgument("self loops are not allowed");
  if (adjacency_[a][b]) return;
  adjacency_[a][b] = adjacency_[b][a] = 1;
  ++num_edges_;
}

void UndirectedGraph::remove_edge(std::uint32_t a, std::uint32_t b) {
  if (!adjacency_[a][b]) return;
  adjacency_[a][b] = adjacency_[b][a] = 0;
  --num_edges_;
}

VarSet UndirectedGraph::neighbors(std::uint32_t v) const {
  VarSet out;
  for (std::uint32_t u = 0; u < num_vertices(); ++u)
    if (adjacency_[v][u]) out.push_back(u);
  return out;
}

VarSet UndirectedGraph::common_neighbors(std::uint32_t a, std::uint32_t b) const {
  VarSet out;
  for (std::uint32_t u = 0; u < num_vertices(); ++u)
    if (adjacency_[a][u] && adjacency_[b][u]) out.push_back(u);
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> UndirectedGraph::edges() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t a = 0; a < num_vertices(); ++a)
    for (std::uint32_t b = a + 1; b < num_vertices(); ++b)
      if (adjacency_[a][b]) out.emplace_back(a, b);
  return out;
}

std::vector<std::uint32_t> maximum_cardinality_search(const UndirectedGraph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::size_t> weight(n, 0);
  std::vector<std::uint8_t> visited(n, 0);
  std::vector<std::uint32_t> order;
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::uint32_t best = 0;
    bool found = false;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (visited[v]) continue;
      if (!found || weight[v] > weight[best]) {
        best = v;
        found = true;
      }
    }
    visited[best] = 1;
    order.push_back(best);
    for (std::uint32_t u = 0; u < n; ++u)
      if (!visited[u] && g.has_edge(best, u)) ++weight[u];
  }
  return order;
}

bool is_chordal(const UndirectedGraph& g) {
  // Tarjan & Yannakakis (1984): MCS order reversed is a perfect elimination
  // order iff the graph is chordal. For every vertex v, its earlier-visited
  // neighbours minus the latest one (the "follower") must all be adjacent to
  // that follower.
  const std::size_t n = g.num_vertices();
  const auto order = maximum_cardinality_search(g);
  std::vector<std::size_t> position(n);
  for (std::size_t k = 0; k < n; ++k) position[order[k]] = k;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t v = order[k];
    std::uint32_t follower = 0;
    bool has_follower = false;
    for (std::uint32_t u = 0; u < n; ++u) {
      if (!g.has_edge(v, u) || position[u] >= k) continue;
      if (!has_follower || position[u] > position[follower]) {
        follower = u;
        has_follower = true;
      }
    }
    if (!has_follower) continue;
    for (std::uint32_t u = 0; u < n; ++u) {
      if (u == follower || !g.has_edge(v, u) || position[u] >= k) continue;
      if (!g.has_edge(follower, u)) return false;
    }
  }
  return true;
}

std::vector<VarSet> maximal_cliques(const UndirectedGraph& g) {
  if (!is_chordal(g)) throw InvalidArgument("maximal_cliques needs a chordal graph");
  const std::size_t n = g.num_vertices();
  const auto order = maximum_cardinality_search(g);
  std::vector<std::size_t> position(n);
  for (std::size_t k = 0; k < n; ++k) position[order[k]] = k;
  // In a chordal graph every maximal clique is {v} plus v's earlier-visited
  // neighbours for some v.
  std::vector<VarSet> candidates;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t v = order[k];
    VarSet c{v};
    for (std::uint32_t u = 0; u < n; ++u)
      if (g.has_edge(v, u) && position[u] < k) c.push_back(u);
    std::sort(c.begin(), c.end());
    candidates.push_back(std::move(c));
  }
  std::vector<VarSet> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < candidates.size() && maximal; ++j) {
      if (i == j) continue;
      const bool sub = is_subset(candidates[i], candidates[j]);
      if (sub && (candidates[i].size() < candidates[j].size() || j < i)) {
        maximal = false;
      }
    }
    if (maximal) out.push_back(candidates[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t JunctionTree::home_clique(std::uint32_t v) const {
  std::size_t best = cliques.size();
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    if (!std::binary_search(cliques[c].begin(), cliques[c].end(), v)) continue;
    if (best == cliques.size() || cliques[c].size() < cliques[best].size()) best = c;
  }
  if (best == cliques.size()) throw InvalidArgument("vertex not in any clique");
  return best;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& dsu, std::size_t x) {
  while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
  return x;
}

}  // namespace

JunctionTree build_junction_tree(const UndirectedGraph& g) {
  JunctionTree t;
  t.cliques = maximal_cliques(g);
  const std::size_t k = t.cliques.size();
  t.parent.assign(k, k);
  t.separator.assign(k, {});
  t.children.assign(k, {});
  if (k == 0) return t;

  // Kruskal on intersection sizes, heaviest first, ties by (i, j).
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      cand.emplace_back(set_intersection(t.cliques[i], t.cliques[j]).size(), i, j);
  std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) > std::get<0>(b);
  });
  std::vector<std::size_t> dsu(k);
  std::iota(dsu.begin(), dsu.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> adj(k);
  for (const auto& [w, i, j] : cand) {
    const std::size_t ri = find_root(dsu, i), rj = find_root(dsu, j);
    if (ri == rj) continue;
    dsu[ri] = rj;
    adj[i].push_back(j);
    adj[j].push_back(i);
  }

  t.root = 0;
  for (std::size_t c = 1; c < k; ++c) {
    const auto& a = t.cliques[c];
    const auto& b = t.cliques[t.root];
    if (a.size() > b.size() || (a.size() == b.size() && a < b)) t.root = c;
  }
  // Breadth-first orientation from the root.
  std::vector<std::uint8_t> seen(k, 0);
  t.preorder.push_back(t.root);
  seen[t.root] = 1;
  for (std::size_t head = 0; head < t.preorder.size(); ++head) {
    const std::size_t c = t.preorder[head];
    auto next = adj[c];
    std::sort(next.begin(), next.end());
    for (std::size_t d : next) {
      if (seen[d]) continue;
      seen[d] = 1;
      t.parent[d] = c;
      t.separator[d] = set_intersection(t.cliques[d], t.cliques[c]);
      t.children[c].push_back(d);
      t.preorder.push_back(d);
    }
  }
  return t;
}

bool has_running_intersection(const JunctionTree& t, std::size_t num_vertices) {
  const std::size_t k = t.cliques.size();
  if (t.preorder.size() != k) return false;
  for (std::size_t c = 0; c < k; ++c) {
    if (c == t.root) continue;
    if (t.parent[c] >= k) return false;
    if (t.separator[c] != set_intersection(t.cliques[c], t.cliques[t.parent[c]])) {
      return false;
    }
  }
  // For each vertex, the cliques holding it must induce a connected subtree:
  // exactly one of them has a parent that does not hold the vertex.
  for (std::uint32_t v = 0; v < num_vertices; ++v) {
    std::size_t tops = 0;
    for (std::size_t c = 0; c < k; ++c) {
      if (!std::binary_search(t.cliques[c].begin(), t.cliques[c].end(), v)) continue;
      const bool parent_has =
          c != t.root &&
          std::binary_search(t.cliques[t.parent[c]].begin(),
                             t.cliques[t.parent[c]].end(), v);
      if (!parent_has) ++tops;
    }
    if (tops != 1) return false;
  }
  return true;
}

}  // namespace tagl
