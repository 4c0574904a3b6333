#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tagl/dataset.hpp"
#include "tagl/rng.hpp"

namespace tagl::synth {

inline Attribute categorical(const std::string& name, std::size_t index,
                             std::size_t card) {
  Attribute a;
  a.name = name;
  a.index = index;
  a.kind = AttributeKind::Categorical;
  for (std::size_t v = 0; v < card; ++v) a.values.push_back("v" + std::to_string(v));
  return a;
}

inline Attribute continuous(const std::string& name, std::size_t index) {
  Attribute a;
  a.name = name;
  a.index = index;
  a.kind = AttributeKind::Continuous;
  return a;
}

inline Schema categorical_schema(const std::vector<std::size_t>& cards) {
  Schema s;
  for (std::size_t j = 0; j < cards.size(); ++j)
    s.push_back(categorical("a" + std::to_string(j), j, cards[j]));
  return s;
}

inline Dataset from_states(const Schema& schema,
                           const std::vector<std::vector<int>>& rows) {
  Dataset ds(schema);
  std::vector<Cell> row;
  for (const auto& r : rows) {
    row.clear();
    for (int v : r) row.push_back(v < 0 ? Cell::missing() : Cell::categorical(std::uint32_t(v)));
    ds.add_row(row);
  }
  return ds;
}

// Binary chain A - B - C: A uniform, B copies A with prob 0.8, C copies B
// with prob 0.8.
inline Dataset chain_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution half(0.5), keep(0.8);
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    int a = half(rng);
    int b = keep(rng) ? a : 1 - a;
    int c = keep(rng) ? b : 1 - b;
    rows.push_back({a, b, c});
  }
  return from_states(categorical_schema({2, 2, 2}), rows);
}

inline Dataset independent_data(std::size_t n, std::size_t J, std::size_t card,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, int(card) - 1);
  std::vector<std::vector<int>> rows(n, std::vector<int>(J));
  for (auto& r : rows)
    for (auto& v : r) v = pick(rng);
  return from_states(categorical_schema(std::vector<std::size_t>(J, card)), rows);
}

// Pairs of strongly coupled attributes: a_{2k+1} copies a_{2k} with
// probability `fidelity`, otherwise uniform.
inline Dataset coupled_pairs(std::size_t n, std::size_t pairs, std::size_t card,
                             double fidelity, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, int(card) - 1);
  std::bernoulli_distribution copy(fidelity);
  std::vector<std::vector<int>> rows(n, std::vector<int>(2 * pairs));
  for (auto& r : rows) {
    for (std::size_t k = 0; k < pairs; ++k) {
      r[2 * k] = pick(rng);
      r[2 * k + 1] = copy(rng) ? r[2 * k] : pick(rng);
    }
  }
  return from_states(categorical_schema(std::vector<std::size_t>(2 * pairs, card)), rows);
}

inline Dataset normal_data(std::size_t n, std::size_t J, std::uint64_t seed) {
  Schema s;
  for (std::size_t j = 0; j < J; ++j) s.push_back(continuous("x" + std::to_string(j), j));
  Dataset ds(s);
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Cell> row(J);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : row) c = Cell::continuous(z(rng));
    ds.add_row(row);
  }
  return ds;
}

}  // namespace tagl::synth
