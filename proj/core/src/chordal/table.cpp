#include "tagl/chordal/table.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "tagl/error.hpp"

namespace tagl {

Table::Table(VarSet v, std::vector<std::uint32_t> c, double fill)
    : vars(std::move(v)), cards(std::move(c)) {
  if (vars.size() != cards.size()) throw InvalidArgument("table shape mismatch");
  std::size_t cells = 1;
  for (auto k : cards) {
    if (k == 0) throw InvalidArgument("table variable with zero states");
    cells *= k;
  }
  values.assign(cells, fill);
}

double Table::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

void Table::decode(std::size_t index, std::span<std::uint32_t> states) const {
  for (std::size_t k = vars.size(); k-- > 0;) {
    states[k] = static_cast<std::uint32_t>(index % cards[k]);
    index /= cards[k];
  }
}

std::size_t Table::encode(std::span<const std::uint32_t> states) const {
  std::size_t index = 0;
  for (std::size_t k = 0; k < vars.size(); ++k) index = index * cards[k] + states[k];
  return index;
}

std::vector<std::uint32_t> projection_map(const VarSet& super,
                                          std::span<const std::uint32_t> super_cards,
                                          const VarSet& sub,
                                          std::span<const std::uint32_t> sub_cards) {
  if (!is_subset(sub, super)) throw InvalidArgument("projection onto a non-subset");
  // Stride of each super variable inside the sub table (0 if absent).
  std::vector<std::size_t> sub_stride(super.size(), 0);
  {
    std::size_t stride = 1;
    for (std::size_t k = sub.size(); k-- > 0;) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(super.begin(), super.end(), sub[k]) - super.begin());
      sub_stride[pos] = stride;
      stride *= sub_cards[k];
    }
  }
  std::size_t cells = 1;
  for (auto c : super_cards) cells *= c;
  std::vector<std::uint32_t> map(cells);
  std::vector<std::uint32_t> state(super.size(), 0);
  std::size_t target = 0;
  for (std::size_t idx = 0; idx < cells; ++idx) {
    map[idx] = static_cast<std::uint32_t>(target);
    // Odometer increment, last variable fastest.
    for (std::size_t k = super.size(); k-- > 0;) {
      if (++state[k] < super_cards[k]) {
        target += sub_stride[k];
        break;
      }
      target -= sub_stride[k] * (super_cards[k] - 1);
      state[k] = 0;
    }
  }
  return map;
}

Table Table::marginalize(const VarSet& keep) const {
  std::vector<std::uint32_t> keep_cards;
  for (auto v : keep) {
    auto it = std::lower_bound(vars.begin(), vars.end(), v);
    if (it == vars.end() || *it != v) throw InvalidArgument("marginalize onto a non-subset");
    keep_cards.push_back(cards[static_cast<std::size_t>(it - vars.begin())]);
  }
  Table out(keep, keep_cards, 0.0);
  const auto map = projection_map(vars, cards, keep, keep_cards);
  for (std::size_t idx = 0; idx < values.size(); ++idx) out.values[map[idx]] += values[idx];
  return out;
}

std::vector<std::uint32_t> CodedData::cards_of(const VarSet& vars) const {
  std::vector<std::uint32_t> out;
  out.reserve(vars.size());
  for (auto v : vars) out.push_back(cards[v]);
  return out;
}

std::size_t CodedData::cells_of(const VarSet& vars) const {
  std::size_t cells = 1;
  for (auto v : vars) {
    if (cells > std::numeric_limits<std::size_t>::max() / cards[v]) {
      return std::numeric_limits<std::size_t>::max();
    }
    cells *= cards[v];
  }
  return cells;
}

CodedData code_dataset(const Dataset& ds) {
  CodedData d;
  d.num_rows = ds.num_rows();
  d.num_vars = ds.num_attributes();
  d.cards.resize(d.num_vars);
  d.has_missing_state.assign(d.num_vars, 0);
  for (std::size_t j = 0; j < d.num_vars; ++j) {
    const Attribute& a = ds.attribute(j);
    if (!a.is_categorical()) {
      throw InvalidArgument("attribute '" + a.name +
                            "' is continuous; discretize before fitting a chordal model");
    }
    if (a.cardinality() >= 0xffff) {
      throw InvalidArgument("attribute '" + a.name + "' has too many values");
    }
    d.cards[j] = static_cast<std::uint32_t>(a.cardinality());
    for (std::size_t i = 0; i < d.num_rows; ++i) {
      if (ds.at(i, j).is_missing()) {
        d.has_missing_state[j] = 1;
        break;
      }
    }
    if (d.has_missing_state[j]) ++d.cards[j];
  }
  d.states.resize(d.num_rows * d.num_vars);
  for (std::size_t i = 0; i < d.num_rows; ++i) {
    for (std::size_t j = 0; j < d.num_vars; ++j) {
      const Cell& c = ds.at(i, j);
      d.states[i * d.num_vars + j] = static_cast<std::uint16_t>(
          c.is_missing() ? d.cards[j] - 1 : c.category());
    }
  }
  return d;
}

Table count_table(const CodedData& data, const VarSet& vars) {
  Table t(vars, data.cards_of(vars), 0.0);
  for (std::size_t i = 0; i < data.num_rows; ++i) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      idx = idx * t.cards[k] + data.at(i, vars[k]);
    }
    t.values[idx] += 1.0;
  }
  return t;
}

const Table& ContingencyCache::counts(const VarSet& vars) {
  auto it = cache_.find(vars);
  if (it != cache_.end()) return it->second;
  Table t = count_table(*data_, vars);
  if (cached_cells_ + t.size() > max_cells_) {
    cache_.clear();
    cached_cells_ = 0;
  }
  cached_cells_ += t.size();
  return cache_.emplace(vars, std::move(t)).first->second;
}

}  // namespace tagl
