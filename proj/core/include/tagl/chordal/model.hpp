#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagl/chordal/structure.hpp"
#include "tagl/chordal/table.hpp"
#include "tagl/dataset.hpp"
#include "tagl/predictor.hpp"

namespace tagl {

// Per-attribute evidence in model states; nullopt marks an unobserved
// attribute. For attributes that carry a missing state, that state (the last
// one) may be used as evidence.
using Evidence = std::vector<std::optional<std::uint32_t>>;

// Decomposable model over categorical attributes: a chordal graph, smoothed
// clique tables and the junction-tree potentials derived from them.
class JunctionTreeModel final : public Predictor {
 public:
  JunctionTreeModel() = default;

  std::string name() const override { return "chordal"; }

  std::size_t num_vars() const { return cards_.size(); }
  const ChordalGraph& graph() const { return graph_; }
  const JunctionTree& tree() const { return graph_.tree; }
  double m() const { return m_; }
  const std::vector<std::uint32_t>& cards() const { return cards_; }
  bool has_missing_state(std::uint32_t v) const { return has_missing_state_[v] != 0; }
  const std::vector<std::string>& names() const { return names_; }

  // Smoothed P(C) for clique c and the separator table P(S) obtained from it.
  const Table& clique_table(std::size_t c) const { return clique_tables_[c]; }
  const Table& separator_table(std::size_t c) const { return separator_tables_[c]; }

  // Product of clique tables over separator tables at a full assignment.
  double joint_probability(std::span<const std::uint32_t> states) const;

  // Exact P(X_target | evidence) over all model states of `target`. Throws
  // InvalidArgument if the target is observed or an evidence state is out of
  // range. Evidence of probability zero yields the prior marginal.
  std::vector<double> posterior(const Evidence& evidence, std::uint32_t target) const;
  // Posteriors of every variable from one two-pass propagation.
  std::vector<std::vector<double>> all_posteriors(const Evidence& evidence) const;

  // Masked cells are unobserved. An unmasked Missing cell is evidence for the
  // missing state when the attribute has one, otherwise unobserved.
  Evidence evidence_from_row(std::span<const Cell> row,
                             std::span<const std::uint32_t> masked) const;

  // Argmax of each target's posterior over the recorded values, lowest index
  // on ties. The seed is unused: prediction is deterministic.
  std::vector<Cell> predict_instance(std::span<const Cell> row,
                                     std::span<const std::uint32_t> masked,
                                     std::uint64_t seed) const override;

  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  static JunctionTreeModel load(std::istream& in);
  static JunctionTreeModel load(const std::string& path);

  friend JunctionTreeModel fit_parameters(const ChordalGraph& graph,
                                          const CodedData& data, double m,
                                          std::vector<std::string> names);

 private:
  void build_potentials();
  void propagate(std::vector<Table>& pot) const;
  std::vector<Table> absorb(const Evidence& evidence) const;

  ChordalGraph graph_;
  double m_ = 1.0;
  std::vector<std::uint32_t> cards_;
  std::vector<std::uint8_t> has_missing_state_;
  std::vector<std::string> names_;
  std::vector<Table> clique_tables_;
  std::vector<Table> separator_tables_;  // indexed by child clique; empty at root

  // Derived.
  std::vector<Table> potentials_;
  std::vector<std::vector<std::uint32_t>> child_to_sep_;
  std::vector<std::vector<std::uint32_t>> parent_to_sep_;
  std::vector<std::size_t> home_;
  std::vector<std::vector<std::uint32_t>> home_to_var_;
};

// P(C = c) = (count(c) + m / |cells(C)|) / (n + m) per clique. Each separator
// table is the marginal of its child clique's table, which keeps the
// factorised joint normalised.
JunctionTreeModel fit_parameters(const ChordalGraph& graph, const CodedData& data,
                                 double m = 1.0, std::vector<std::string> names = {});
JunctionTreeModel fit_parameters(const ChordalGraph& graph, const Dataset& train,
                                 double m = 1.0);

}  // namespace tagl
