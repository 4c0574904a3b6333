#include "tagl/chordal/model.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tagl/csv.hpp"
#include "tagl/error.hpp"

namespace tagl {

namespace {

void marginal_into(const Table& t, const std::vector<std::uint32_t>& map,
                   std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < t.values.size(); ++i) out[map[i]] += t.values[i];
}

std::vector<double> normalised(std::vector<double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (s > 0.0)
    for (double& x : v) x /= s;
  return v;
}

}  // namespace

JunctionTreeModel fit_parameters(const ChordalGraph& graph, const CodedData& data,
                                 double m, std::vector<std::string> names) {
  if (!(m >= 0.0)) throw InvalidArgument("smoothing pseudo-count must be non-negative");
  if (graph.num_vertices() != data.num_vars) {
    throw InvalidArgument("graph and data disagree on the number of attributes");
  }
  if (data.num_rows == 0 && m == 0.0) {
    throw InvalidArgument("cannot fit without data or smoothing");
  }
  JunctionTreeModel model;
  model.graph_ = graph;
  model.m_ = m;
  model.cards_ = data.cards;
  model.has_missing_state_ = data.has_missing_state;
  if (names.empty()) {
    for (std::size_t v = 0; v < data.num_vars; ++v) names.push_back("v" + std::to_string(v));
  }
  model.names_ = std::move(names);

  const JunctionTree& t = graph.tree;
  const double n = static_cast<double>(data.num_rows);
  model.clique_tables_.resize(t.num_cliques());
  model.separator_tables_.resize(t.num_cliques());
  for (std::size_t c = 0; c < t.num_cliques(); ++c) {
    Table counts = count_table(data, t.cliques[c]);
    const double prior = m / static_cast<double>(counts.size());
    for (double& x : counts.values) x = (x + prior) / (n + m);
    model.clique_tables_[c] = std::move(counts);
  }
  for (std::size_t c = 0; c < t.num_cliques(); ++c) {
    if (c == t.root) continue;
    model.separator_tables_[c] = model.clique_tables_[c].marginalize(t.separator[c]);
  }
  model.build_potentials();
  return model;
}

JunctionTreeModel fit_parameters(const ChordalGraph& graph, const Dataset& train,
                                 double m) {
  std::vector<std::string> names;
  for (const auto& a : train.schema()) names.push_back(a.name);
  return fit_parameters(graph, code_dataset(train), m, std::move(names));
}

void JunctionTreeModel::build_potentials() {
  const JunctionTree& t = graph_.tree;
  const std::size_t k = t.num_cliques();
  potentials_ = clique_tables_;
  child_to_sep_.assign(k, {});
  parent_to_sep_.assign(k, {});
  for (std::size_t c = 0; c < k; ++c) {
    if (c == t.root) continue;
    const Table& sep = separator_tables_[c];
    const Table& clique = clique_tables_[c];
    const Table& parent = clique_tables_[t.parent[c]];
    child_to_sep_[c] = projection_map(clique.vars, clique.cards, sep.vars, sep.cards);
    parent_to_sep_[c] = projection_map(parent.vars, parent.cards, sep.vars, sep.cards);
    for (std::size_t i = 0; i < clique.size(); ++i) {
      const double s = sep.values[child_to_sep_[c][i]];
      potentials_[c].values[i] = s > 0.0 ? clique.values[i] / s : 0.0;
    }
  }
  home_.assign(num_vars(), 0);
  home_to_var_.assign(num_vars(), {});
  for (std::uint32_t v = 0; v < num_vars(); ++v) {
    home_[v] = t.home_clique(v);
    const Table& h = clique_tables_[home_[v]];
    home_to_var_[v] = projection_map(h.vars, h.cards, VarSet{v},
                                     std::vector<std::uint32_t>{cards_[v]});
  }
}

double JunctionTreeModel::joint_probability(std::span<const std::uint32_t> states) const {
  if (states.size() != num_vars()) throw InvalidArgument("assignment has the wrong width");
  double p = 1.0;
  std::vector<std::uint32_t> local;
  for (const Table& pot : potentials_) {
    local.resize(pot.vars.size());
    for (std::size_t k = 0; k < pot.vars.size(); ++k) {
      if (states[pot.vars[k]] >= pot.cards[k]) throw InvalidArgument("state out of range");
      local[k] = states[pot.vars[k]];
    }
    p *= pot.values[pot.encode(local)];
  }
  return p;
}

std::vector<Table> JunctionTreeModel::absorb(const Evidence& evidence) const {
  if (evidence.size() != num_vars()) throw InvalidArgument("evidence has the wrong width");
  std::vector<Table> pot = potentials_;
  for (std::uint32_t v = 0; v < num_vars(); ++v) {
    if (!evidence[v]) continue;
    const std::uint32_t s = *evidence[v];
    if (s >= cards_[v]) {
      throw InvalidArgument("evidence for '" + names_[v] + "' is outside its value list");
    }
    Table& h = pot[home_[v]];
    const auto& map = home_to_var_[v];
    for (std::size_t i = 0; i < h.size(); ++i)
      if (map[i] != s) h.values[i] = 0.0;
  }
  return pot;
}

void JunctionTreeModel::propagate(std::vector<Table>& pot) const {
  const JunctionTree& t = graph_.tree;
  std::vector<std::vector<double>> msg(t.num_cliques());
  for (std::size_t r = t.preorder.size(); r-- > 0;) {
    const std::size_t c = t.preorder[r];
    if (c == t.root) continue;
    msg[c].assign(separator_tables_[c].size(), 0.0);
    marginal_into(pot[c], child_to_sep_[c], msg[c]);
    Table& p = pot[t.parent[c]];
    const auto& map = parent_to_sep_[c];
    for (std::size_t i = 0; i < p.size(); ++i) p.values[i] *= msg[c][map[i]];
  }
  std::vector<double> update;
  for (std::size_t c : t.preorder) {
    if (c == t.root) continue;
    update.assign(msg[c].size(), 0.0);
    marginal_into(pot[t.parent[c]], parent_to_sep_[c], update);
    for (std::size_t s = 0; s < update.size(); ++s)
      update[s] = msg[c][s] > 0.0 ? update[s] / msg[c][s] : 0.0;
    const auto& map = child_to_sep_[c];
    for (std::size_t i = 0; i < pot[c].size(); ++i) pot[c].values[i] *= update[map[i]];
  }
}

std::vector<std::vector<double>> JunctionTreeModel::all_posteriors(
    const Evidence& evidence) const {
  std::vector<Table> pot = absorb(evidence);
  propagate(pot);
  if (!pot.empty() && !(pot[graph_.tree.root].sum() > 0.0)) {
    pot = potentials_;
    propagate(pot);
  }
  std::vector<std::vector<double>> out(num_vars());
  for (std::uint32_t v = 0; v < num_vars(); ++v) {
    out[v].assign(cards_[v], 0.0);
    marginal_into(pot[home_[v]], home_to_var_[v], out[v]);
    out[v] = normalised(std::move(out[v]));
  }
  return out;
}

std::vector<double> JunctionTreeModel::posterior(const Evidence& evidence,
                                                 std::uint32_t target) const {
  if (target >= num_vars()) throw InvalidArgument("target out of range");
  if (evidence.size() == num_vars() && evidence[target]) {
    throw InvalidArgument("target '" + names_[target] + "' is part of the evidence");
  }
  return std::move(all_posteriors(evidence)[target]);
}

Evidence JunctionTreeModel::evidence_from_row(std::span<const Cell> row,
                                              std::span<const std::uint32_t> masked) const {
  if (row.size() != num_vars()) throw InvalidArgument("row has the wrong width");
  Evidence e(num_vars());
  for (std::uint32_t v = 0; v < num_vars(); ++v) {
    if (std::binary_search(masked.begin(), masked.end(), v)) continue;
    const Cell& c = row[v];
    if (c.is_missing()) {
      if (has_missing_state_[v]) e[v] = cards_[v] - 1;
    } else if (c.is_categorical()) {
      const std::uint32_t recorded = cards_[v] - (has_missing_state_[v] ? 1 : 0);
      if (c.category() >= recorded) {
        throw InvalidArgument("value for '" + names_[v] + "' is outside its value list");
      }
      e[v] = c.category();
    } else {
      throw InvalidArgument("attribute '" + names_[v] + "' holds a continuous value");
    }
  }
  return e;
}

std::vector<Cell> JunctionTreeModel::predict_instance(std::span<const Cell> row,
                                                      std::span<const std::uint32_t> masked,
                                                      std::uint64_t) const {
  const auto post = all_posteriors(evidence_from_row(row, masked));
  std::vector<Cell> out;
  out.reserve(masked.size());
  for (auto v : masked) {
    const std::size_t recorded = cards_[v] - (has_missing_state_[v] ? 1 : 0);
    std::size_t best = 0;
    for (std::size_t s = 1; s < recorded; ++s)
      if (post[v][s] > post[v][best]) best = s;
    out.push_back(Cell::categorical(static_cast<std::uint32_t>(best)));
  }
  return out;
}

void JunctionTreeModel::save(std::ostream& out) const {
  const JunctionTree& t = graph_.tree;
  out << "junction_tree_model 1\n";
  out << "m " << format_real(m_) << '\n';
  out << "vertices " << num_vars() << '\n';
  for (std::size_t v = 0; v < num_vars(); ++v) {
    out << names_[v] << '\t' << cards_[v] << '\t' << int(has_missing_state_[v]) << '\n';
  }
  const auto edges = graph_.graph.edges();
  out << "edges " << edges.size() << '\n';
  for (auto [a, b] : edges) out << a << ' ' << b << '\n';
  out << "cliques " << t.num_cliques() << " root " << t.root << '\n';
  for (std::size_t c = 0; c < t.num_cliques(); ++c) {
    out << "clique " << c << " parent ";
    if (c == t.root) out << '-';
    else out << t.parent[c];
    out << " vars";
    for (auto v : t.cliques[c]) out << ' ' << v;
    out << "\ntable " << clique_tables_[c].size() << '\n';
    for (std::size_t i = 0; i < clique_tables_[c].size(); ++i) {
      out << (i ? " " : "") << format_real(clique_tables_[c].values[i]);
    }
    out << '\n';
  }
}

void JunctionTreeModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save(out);
}

namespace {

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw StructuralError("model file: expected '" + word + "', found '" + got + "'");
  }
}

}  // namespace

JunctionTreeModel JunctionTreeModel::load(std::istream& in) {
  expect(in, "junction_tree_model");
  int version = 0;
  in >> version;
  if (version != 1) throw StructuralError("model file: unsupported version");
  JunctionTreeModel model;
  expect(in, "m");
  in >> model.m_;
  expect(in, "vertices");
  std::size_t J = 0;
  in >> J;
  in.ignore();
  model.names_.resize(J);
  model.cards_.resize(J);
  model.has_missing_state_.resize(J);
  for (std::size_t v = 0; v < J; ++v) {
    std::string line;
    std::getline(in, line);
    std::istringstream ls(line);
    int flag = 0;
    if (!std::getline(ls, model.names_[v], '\t') || !(ls >> model.cards_[v] >> flag)) {
      throw StructuralError("model file: bad vertex line " + std::to_string(v));
    }
    model.has_missing_state_[v] = static_cast<std::uint8_t>(flag != 0);
  }
  expect(in, "edges");
  std::size_t E = 0;
  in >> E;
  UndirectedGraph g(J);
  for (std::size_t e = 0; e < E; ++e) {
    std::uint32_t a = 0, b = 0;
    if (!(in >> a >> b) || a >= J || b >= J) throw StructuralError("model file: bad edge");
    g.add_edge(a, b);
  }
  if (!is_chordal(g)) throw StructuralError("model file: graph is not chordal");
  model.graph_ = make_chordal_graph(std::move(g));
  const JunctionTree& t = model.graph_.tree;
  expect(in, "cliques");
  std::size_t K = 0, root = 0;
  in >> K;
  expect(in, "root");
  in >> root;
  if (K != t.num_cliques() || root != t.root) {
    throw StructuralError("model file: clique tree does not match the graph");
  }
  model.clique_tables_.resize(K);
  model.separator_tables_.resize(K);
  for (std::size_t c = 0; c < K; ++c) {
    std::string tok;
    std::size_t idx = 0;
    expect(in, "clique");
    in >> idx;
    expect(in, "parent");
    in >> tok;
    expect(in, "vars");
    if (idx != c) throw StructuralError("model file: cliques out of order");
    for (std::size_t k = 0; k < t.cliques[c].size(); ++k) {
      std::uint32_t v = 0;
      in >> v;
      if (v != t.cliques[c][k]) throw StructuralError("model file: clique content mismatch");
    }
    std::vector<std::uint32_t> cards;
    for (auto v : t.cliques[c]) cards.push_back(model.cards_[v]);
    Table table(t.cliques[c], std::move(cards));
    expect(in, "table");
    std::size_t cells = 0;
    in >> cells;
    if (cells != table.size()) throw StructuralError("model file: table size mismatch");
    for (double& x : table.values)
      if (!(in >> x)) throw StructuralError("model file: truncated table");
    model.clique_tables_[c] = std::move(table);
  }
  for (std::size_t c = 0; c < K; ++c) {
    if (c == t.root) continue;
    model.separator_tables_[c] = model.clique_tables_[c].marginalize(t.separator[c]);
  }
  model.build_potentials();
  return model;
}

JunctionTreeModel JunctionTreeModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  return load(in);
}

}  // namespace tagl
