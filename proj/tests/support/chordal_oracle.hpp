#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "tagl/chordal/model.hpp"
#include "tagl/rng.hpp"

namespace tagl::synth {

// Random chordal graph: edges offered in random order, kept when the graph
// stays chordal and no clique grows beyond `max_clique`.
inline UndirectedGraph random_chordal_graph(std::size_t J, std::size_t max_clique, Rng& rng) {
  UndirectedGraph g(J);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t a = 0; a < J; ++a)
    for (std::uint32_t b = a + 1; b < J; ++b) pairs.emplace_back(a, b);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::bernoulli_distribution take(0.6);
  for (auto [a, b] : pairs) {
    if (!take(rng)) continue;
    g.add_edge(a, b);
    bool ok = is_chordal(g);
    if (ok)
      for (const auto& c : maximal_cliques(g)) ok = ok && c.size() <= max_clique;
    if (!ok) g.remove_edge(a, b);
  }
  return g;
}

// Random coded data whose rows follow a random discrete distribution, so
// the fitted tables are far from uniform.
inline CodedData random_coded(std::size_t J, std::uint32_t card, std::size_t n, Rng& rng) {
  CodedData d;
  d.num_rows = n;
  d.num_vars = J;
  d.cards.assign(J, card);
  d.has_missing_state.assign(J, 0);
  std::size_t states = 1;
  for (std::size_t j = 0; j < J; ++j) states *= card;
  std::gamma_distribution<double> g(0.3);
  std::vector<double> w(states);
  for (auto& x : w) x = g(rng) + 1e-3;
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  d.states.resize(n * J);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t s = pick(rng);
    for (std::size_t j = J; j-- > 0;) {
      d.states[i * J + j] = std::uint16_t(s % card);
      s /= card;
    }
  }
  return d;
}

// Factorised joint computed straight from the clique and separator tables.
inline double oracle_joint(const JunctionTreeModel& m, const std::vector<std::uint32_t>& x) {
  auto lookup = [&](const Table& t) {
    std::vector<std::uint32_t> local;
    for (auto v : t.vars) local.push_back(x[v]);
    return t.values[t.encode(local)];
  };
  double num = 1.0, den = 1.0;
  for (std::size_t c = 0; c < m.tree().num_cliques(); ++c) {
    num *= lookup(m.clique_table(c));
    if (c != m.tree().root) den *= lookup(m.separator_table(c));
  }
  return den > 0.0 ? num / den : 0.0;
}

// Enumerates every full assignment consistent with the evidence.
inline std::vector<double> oracle_posterior(const JunctionTreeModel& m, const Evidence& e,
                                            std::uint32_t target) {
  const std::size_t J = m.num_vars();
  std::vector<double> out(m.cards()[target], 0.0);
  std::vector<std::uint32_t> x(J, 0);
  for (;;) {
    bool consistent = true;
    for (std::size_t v = 0; v < J; ++v)
      if (e[v] && *e[v] != x[v]) consistent = false;
    if (consistent) out[x[target]] += oracle_joint(m, x);
    std::size_t k = J;
    while (k-- > 0) {
      if (++x[k] < m.cards()[k]) break;
      x[k] = 0;
    }
    if (k == std::size_t(-1)) break;
  }
  double s = 0.0;
  for (double p : out) s += p;
  for (double& p : out) p /= s;
  return out;
}

}  // namespace tagl::synth
