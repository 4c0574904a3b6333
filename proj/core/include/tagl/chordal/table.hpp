#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tagl/chordal/graph.hpp"
#include "tagl/dataset.hpp"

namespace tagl {

// Dense table over a sorted variable set. Cell index is mixed-radix with the
// last variable varying fastest.
struct Table {
  VarSet vars;
  std::vector<std::uint32_t> cards;
  std::vector<double> values;

  Table() = default;
  Table(VarSet vars, std::vector<std::uint32_t> cards, double fill = 0.0);

  std::size_t size() const { return values.size(); }
  double sum() const;

  // Decodes cell `index` into one state per variable.
  void decode(std::size_t index, std::span<std::uint32_t> states) const;
  std::size_t encode(std::span<const std::uint32_t> states) const;

  // Sums out every variable not in `keep` (which must be a subset).
  Table marginalize(const VarSet& keep) const;
};

// For each cell of a table over `super`, the index of the matching cell in a
// table over `sub` (sub ⊆ super).
std::vector<std::uint32_t> projection_map(const VarSet& super,
                                          std::span<const std::uint32_t> super_cards,
                                          const VarSet& sub,
                                          std::span<const std::uint32_t> sub_cards);

// Categorical data recoded to small integer states. An attribute that has
// Missing cells in the training data gets one extra state (index
// values.size()) so that "not recorded" is modelled like any other value.
struct CodedData {
  std::size_t num_rows = 0;
  std::size_t num_vars = 0;
  std::vector<std::uint32_t> cards;
  std::vector<std::uint8_t> has_missing_state;
  std::vector<std::uint16_t> states;  // row-major

  std::uint16_t at(std::size_t i, std::size_t j) const {
    return states[i * num_vars + j];
  }
  std::vector<std::uint32_t> cards_of(const VarSet& vars) const;
  std::size_t cells_of(const VarSet& vars) const;
};

// Throws InvalidArgument unless every attribute is categorical.
CodedData code_dataset(const Dataset& ds);

// Memoised count tables over variable subsets. When the cached cells would
// exceed `max_cells` the cache is flushed; references returned by counts()
// are valid until the next call.
class ContingencyCache {
 public:
  explicit ContingencyCache(const CodedData& data,
                            std::size_t max_cells = std::size_t{1} << 24)
      : data_(&data), max_cells_(max_cells) {}

  const Table& counts(const VarSet& vars);
  std::size_t size() const { return cache_.size(); }

 private:
  const CodedData* data_;
  std::size_t max_cells_;
  std::size_t cached_cells_ = 0;
  std::map<VarSet, Table> cache_;
};

// Counts computed straight from the data, bypassing any cache.
Table count_table(const CodedData& data, const VarSet& vars);

}  // namespace tagl
