#include "tagl/chordal/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tagl/error.hpp"
#include "tagl/stats.hpp"

namespace tagl {

G2Result g2_score(const Table& counts, std::uint32_t a, std::uint32_t b) {
  if (counts.values.empty()) throw InvalidArgument("g2_score on an empty table");
  const auto pos_a = std::find(counts.vars.begin(), counts.vars.end(), a);
  const auto pos_b = std::find(counts.vars.begin(), counts.vars.end(), b);
  if (a == b || pos_a == counts.vars.end() || pos_b == counts.vars.end()) {
    throw InvalidArgument("g2_score: tested variables must both be in the table");
  }
  VarSet sep;
  for (auto v : counts.vars)
    if (v != a && v != b) sep.push_back(v);
  VarSet a_sep = set_union(sep, {a});
  VarSet b_sep = set_union(sep, {b});

  const Table n_s = counts.marginalize(sep);
  const Table n_as = counts.marginalize(a_sep);
  const Table n_bs = counts.marginalize(b_sep);
  const auto map_s = projection_map(counts.vars, counts.cards, sep, n_s.cards);
  const auto map_as = projection_map(counts.vars, counts.cards, a_sep, n_as.cards);
  const auto map_bs = projection_map(counts.vars, counts.cards, b_sep, n_bs.cards);

  double g2 = 0.0;
  for (std::size_t idx = 0; idx < counts.values.size(); ++idx) {
    const double o = counts.values[idx];
    if (o <= 0.0) continue;
    const double expected = n_as.values[map_as[idx]] * n_bs.values[map_bs[idx]] /
                            n_s.values[map_s[idx]];
    g2 += o * std::log(o / expected);
  }
  g2 = std::max(0.0, 2.0 * g2);

  long df = static_cast<long>(counts.cards[pos_a - counts.vars.begin()] - 1) *
            static_cast<long>(counts.cards[pos_b - counts.vars.begin()] - 1);
  for (std::size_t k = 0; k < counts.vars.size(); ++k) {
    if (counts.vars[k] != a && counts.vars[k] != b) df *= counts.cards[k];
  }
  G2Result r;
  r.statistic = g2;
  r.df = df;
  r.p_value = chi_square_upper_tail(g2, static_cast<double>(df));
  r.log_p_value = log_chi_square_upper_tail(g2, static_cast<double>(df));
  return r;
}

EdgeScore G2Scorer::score(std::uint32_t a, std::uint32_t b, const VarSet& sep,
                          ContingencyCache& cache) const {
  VarSet vars = set_union(sep, a < b ? VarSet{a, b} : VarSet{b, a});
  const G2Result r = g2_score(cache.counts(vars), a, b);
  return {r.statistic, r.df, r.p_value, r.log_p_value};
}

ChordalGraph make_chordal_graph(UndirectedGraph g) {
  ChordalGraph out;
  out.tree = build_junction_tree(g);
  out.graph = std::move(g);
  return out;
}

namespace {

struct Candidate {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  VarSet sep;
  EdgeScore score;
};

// Smaller log p first; equal (e.g. both underflowed) by larger statistic;
// then lexicographic pair.
bool stronger(const Candidate& x, const Candidate& y) {
  if (x.score.log_p != y.score.log_p) return x.score.log_p < y.score.log_p;
  if (x.score.statistic != y.score.statistic) {
    return x.score.statistic > y.score.statistic;
  }
  return std::tie(x.a, x.b) < std::tie(y.a, y.b);
}

}  // namespace

ChordalGraph learn_structure(const CodedData& data, const ScoreConfig& cfg,
                             const EdgeScorer& scorer) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw InvalidArgument("score alpha must lie in (0, 1)");
  }
  const std::size_t J = data.num_vars;
  UndirectedGraph g(J);
  std::vector<EdgeStep> history;
  if (J < 2 || data.num_rows == 0) {
    ChordalGraph out = make_chordal_graph(std::move(g));
    return out;
  }
  const double family = cfg.bonferroni ? 0.5 * static_cast<double>(J) * static_cast<double>(J - 1) : 1.0;
  const double log_threshold = std::log(cfg.alpha / family);

  ContingencyCache cache(data);
  // The score depends only on (a, b, S): re-scoring happens only for pairs
  // whose separator changed since they were last evaluated.
  std::map<std::tuple<std::uint32_t, std::uint32_t, VarSet>, EdgeScore> memo;

  for (;;) {
    bool found = false;
    Candidate best;
    for (std::uint32_t a = 0; a < J; ++a) {
      for (std::uint32_t b = a + 1; b < J; ++b) {
        if (g.has_edge(a, b)) continue;
        VarSet sep = g.common_neighbors(a, b);
        if (sep.size() + 2 > cfg.max_clique_size) continue;
        VarSet clique = set_union(sep, VarSet{a, b});
        if (data.cells_of(clique) > cfg.max_table_cells) continue;
        g.add_edge(a, b);
        const bool chordal = is_chordal(g);
        g.remove_edge(a, b);
        if (!chordal) continue;
        auto key = std::make_tuple(a, b, sep);
        auto it = memo.find(key);
        if (it == memo.end()) {
          it = memo.emplace(key, scorer.score(a, b, sep, cache)).first;
        }
        Candidate c{a, b, std::move(sep), it->second};
        if (!found || stronger(c, best)) {
          best = std::move(c);
          found = true;
        }
      }
    }
    if (!found || !(best.score.log_p <= log_threshold)) break;
    g.add_edge(best.a, best.b);
    history.push_back({best.a, best.b, best.sep, best.score});
  }
  ChordalGraph out = make_chordal_graph(std::move(g));
  out.history = std::move(history);
  return out;
}

ChordalGraph learn_structure(const Dataset& train, const ScoreConfig& cfg) {
  return learn_structure(code_dataset(train), cfg);
}

}  // namespace tagl
