#include "tagl/baseline.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "tagl/csv.hpp"
#include "tagl/error.hpp"

namespace tagl {

BaselineModel BaselineModel::fit(const Dataset& train) {
  if (train.num_rows() == 0) throw InvalidArgument("baseline needs training rows");
  BaselineModel m;
  m.schema_ = train.schema();
  m.constants_.resize(train.num_attributes());
  for (std::size_t j = 0; j < train.num_attributes(); ++j) {
    const Attribute& a = train.attribute(j);
    if (a.is_categorical()) {
      std::vector<std::size_t> counts(a.cardinality(), 0);
      bool any = false;
      for (std::size_t i = 0; i < train.num_rows(); ++i) {
        const Cell& c = train.at(i, j);
        if (!c.is_categorical()) continue;
        ++counts[c.category()];
        any = true;
      }
      if (!any) continue;
      // max_element returns the first maximum: lowest index wins ties.
      const auto best = std::max_element(counts.begin(), counts.end());
      m.constants_[j] = Cell::categorical(
          static_cast<std::uint32_t>(best - counts.begin()));
    } else {
      std::vector<double> v;
      for (std::size_t i = 0; i < train.num_rows(); ++i) {
        const Cell& c = train.at(i, j);
        if (c.is_continuous()) v.push_back(c.value());
      }
      if (v.empty()) continue;
      std::sort(v.begin(), v.end());
      const std::size_t mid = v.size() / 2;
      const double median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
      m.constants_[j] = Cell::continuous(median);
    }
  }
  return m;
}

Cell BaselineModel::predict(std::size_t attribute) const {
  const auto& c = constants_.at(attribute);
  if (!c) {
    throw InvalidArgument("baseline has no fitted value for attribute '" +
                          schema_[attribute].name +
                          "' (entirely missing in training)");
  }
  return *c;
}

std::vector<Cell> BaselineModel::predict_instance(
    std::span<const Cell>, std::span<const std::uint32_t> masked,
    std::uint64_t) const {
  std::vector<Cell> out;
  out.reserve(masked.size());
  for (auto j : masked) out.push_back(predict(j));
  return out;
}

void BaselineModel::save(std::ostream& out) const {
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    const Attribute& a = schema_[j];
    out << a.name << '\t' << to_string(a.kind) << '\t';
    const auto& c = constants_[j];
    if (!c) {
      out << '?';
    } else if (c->is_categorical()) {
      out << a.values[c->category()];
    } else {
      out << format_real(c->value());
    }
    out << '\n';
  }
}

BaselineModel BaselineModel::load(std::istream& in, const Schema& schema) {
  BaselineModel m;
  m.schema_ = schema;
  m.constants_.resize(schema.size());
  std::string line;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (!std::getline(in, line)) throw StructuralError("baseline: truncated model");
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw StructuralError("baseline: malformed line " + std::to_string(j + 1));
    }
    const std::string name = line.substr(0, t1);
    const std::string value = line.substr(t2 + 1);
    if (name != schema[j].name) {
      throw SchemaError("baseline: expected attribute '" + schema[j].name +
                        "', found '" + name + "'");
    }
    if (value == "?") continue;
    if (schema[j].is_categorical()) {
      auto idx = schema[j].value_index(value);
      if (!idx) throw SchemaError("baseline: unknown value '" + value + "'");
      m.constants_[j] = Cell::categorical(*idx);
    } else {
      m.constants_[j] = Cell::continuous(std::stod(value));
    }
  }
  return m;
}

PredictionTable predict_baseline(const BaselineModel& model, const MaskPlan& plan) {
  PredictionTable out;
  for (std::size_t i = 0; i < plan.num_instances(); ++i) {
    for (auto j : plan.masked(i)) out.add(i, j, model.predict(j));
  }
  return out;
}

}  // namespace tagl
