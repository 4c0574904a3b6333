#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "tagl/chordal/graph.hpp"
#include "tagl/chordal/table.hpp"
#include "tagl/dataset.hpp"

namespace tagl {

struct G2Result {
  double statistic = 0.0;
  long df = 0;
  double p_value = 1.0;
  double log_p_value = 0.0;
};

// Likelihood-ratio test of a ⟂ b | S on a count table whose variables are
// {a, b} ∪ S. Zero cells contribute nothing; df = (|a|-1)(|b|-1) ∏|s|.
// Throws InvalidArgument if a or b is not in the table or the table has no
// cells.
G2Result g2_score(const Table& counts, std::uint32_t a, std::uint32_t b);

// Score of adding edge (a, b) with separator S. Lower `log_p` is stronger
// evidence for the edge.
struct EdgeScore {
  double statistic = 0.0;
  long df = 0;
  double p_value = 1.0;
  double log_p = 0.0;
};

class EdgeScorer {
 public:
  virtual ~EdgeScorer() = default;
  virtual EdgeScore score(std::uint32_t a, std::uint32_t b, const VarSet& sep,
                          ContingencyCache& cache) const = 0;
};

class G2Scorer final : public EdgeScorer {
 public:
  EdgeScore score(std::uint32_t a, std::uint32_t b, const VarSet& sep,
                  ContingencyCache& cache) const override;
};

struct ScoreConfig {
  double alpha = 0.05;
  // Divide alpha by J(J-1)/2.
  bool bonferroni = true;
  // Largest clique (in attributes) a candidate edge may create.
  std::size_t max_clique_size = 5;
  // Largest count table (in cells) a candidate edge may create; 8^5.
  std::size_t max_table_cells = 32768;
};

struct EdgeStep {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  VarSet separator;
  EdgeScore score;
};

struct ChordalGraph {
  UndirectedGraph graph;
  JunctionTree tree;
  std::vector<EdgeStep> history;  // accepted edges in order

  std::size_t num_vertices() const { return graph.num_vertices(); }
};

// Wraps an existing chordal graph (throws if it is not chordal).
ChordalGraph make_chordal_graph(UndirectedGraph g);

// Forward selection from the edgeless graph. Each round scores every
// non-adjacent pair whose addition keeps the graph chordal, using the
// separator S = N(a) ∩ N(b); the strongest candidate is added while its
// p-value stays under the (corrected) threshold.
ChordalGraph learn_structure(const CodedData& data, const ScoreConfig& cfg,
                             const EdgeScorer& scorer = G2Scorer());
ChordalGraph learn_structure(const Dataset& train, const ScoreConfig& cfg);

}  // namespace tagl
