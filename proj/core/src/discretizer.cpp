#include "tagl/discretizer.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tagl/error.hpp"

namespace tagl {
namespace {

double median_of_sorted(const std::vector<double>& v, std::size_t begin,
                        std::size_t end) {
  const std::size_t count = end - begin;
  const std::size_t mid = begin + count / 2;
  if (count % 2 == 1) return v[mid];
  return 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::size_t AttributeBins::bin_of(double value) const {
  std::size_t b = 0;
  while (b + 1 < medians.size() && value > 0.5 * (upper[b] + lower[b + 1])) {
    ++b;
  }
  return b;
}

AttributeBins fit_bins(std::vector<double> values, std::size_t bins) {
  if (bins < 2) throw InvalidArgument("discretizer needs at least two bins");
  AttributeBins out;
  if (values.empty()) {
    // Entirely missing: a single placeholder bin keeps the schema valid.
    out.lower = out.upper = out.medians = {0.0};
    return out;
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();

  // Positions p where values[p-1] < values[p]: the only legal cut points.
  std::vector<std::size_t> changes;
  for (std::size_t p = 1; p < n; ++p) {
    if (values[p - 1] < values[p]) changes.push_back(p);
  }
  std::vector<std::size_t> cuts;
  if (changes.size() + 1 < bins) {
    cuts = changes;
  } else {
    for (std::size_t i = 1; i < bins; ++i) {
      const std::size_t ideal = i * n / bins;
      auto hi = std::lower_bound(changes.begin(), changes.end(), ideal);
      std::size_t chosen;
      if (hi == changes.end()) {
        chosen = changes.back();
      } else if (*hi == ideal || hi == changes.begin()) {
        chosen = *hi;
      } else {
        const std::size_t above = *hi;
        const std::size_t below = *(hi - 1);
        chosen = (ideal - below < above - ideal) ? below : above;
      }
      cuts.push_back(chosen);
    }
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  }

  std::size_t start = 0;
  cuts.push_back(n);
  for (std::size_t end : cuts) {
    if (end <= start) continue;
    out.lower.push_back(values[start]);
    out.upper.push_back(values[end - 1]);
    out.medians.push_back(median_of_sorted(values, start, end));
    start = end;
  }
  return out;
}

Discretizer Discretizer::fit(const Dataset& train, std::size_t bins) {
  if (bins < 2) throw InvalidArgument("discretizer needs at least two bins");
  Discretizer d;
  d.source_schema_ = train.schema();
  d.requested_bins_ = bins;
  d.bins_.resize(train.num_attributes());
  for (std::size_t j = 0; j < train.num_attributes(); ++j) {
    if (!train.attribute(j).is_continuous()) continue;
    std::vector<double> values;
    values.reserve(train.num_rows());
    for (std::size_t i = 0; i < train.num_rows(); ++i) {
      const Cell& c = train.at(i, j);
      if (c.is_continuous()) values.push_back(c.value());
    }
    AttributeBins b = fit_bins(std::move(values), bins);
    b.attribute = j;
    d.bins_[j] = std::move(b);
  }
  return d;
}

const AttributeBins* Discretizer::bins_for(std::size_t attribute) const {
  if (attribute >= bins_.size() || !bins_[attribute]) return nullptr;
  return &*bins_[attribute];
}

Schema Discretizer::output_schema(const Schema& input) const {
  if (input.size() != source_schema_.size()) {
    throw SchemaError("discretizer was fitted on a different schema");
  }
  Schema out = input;
  for (std::size_t j = 0; j < input.size(); ++j) {
    if (input[j].name != source_schema_[j].name ||
        input[j].kind != source_schema_[j].kind) {
      throw SchemaError("discretizer schema mismatch at attribute '" +
                        input[j].name + "'");
    }
    if (const AttributeBins* b = bins_for(j)) {
      out[j].kind = AttributeKind::Categorical;
      out[j].values.clear();
      for (std::size_t k = 0; k < b->num_bins(); ++k) {
        out[j].values.push_back("b" + std::to_string(k));
      }
    }
  }
  return out;
}

Dataset Discretizer::apply(const Dataset& ds) const {
  Dataset out(output_schema(ds.schema()), ds.provenance());
  out.reserve(ds.num_rows());
  std::vector<Cell> row(ds.num_attributes());
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
      const Cell& c = ds.at(i, j);
      const AttributeBins* b = bins_for(j);
      if (b && c.is_continuous()) {
        row[j] = Cell::categorical(static_cast<std::uint32_t>(b->bin_of(c.value())));
      } else {
        row[j] = c;
      }
    }
    out.add_row(row);
  }
  return out;
}

double Discretizer::median(std::size_t attribute, std::size_t bin) const {
  const AttributeBins* b = bins_for(attribute);
  if (!b || bin >= b->num_bins()) {
    throw InvalidArgument("no bin " + std::to_string(bin) + " for attribute " +
                          std::to_string(attribute));
  }
  return b->medians[bin];
}

Cell Discretizer::back_project(std::size_t attribute, const Cell& binned) const {
  if (!is_binned(attribute) || !binned.is_categorical()) return binned;
  return Cell::continuous(median(attribute, binned.category()));
}

std::string Discretizer::to_json() const {
  nlohmann::json doc;
  doc["bins"] = requested_bins_;
  nlohmann::json attrs = nlohmann::json::array();
  for (std::size_t j = 0; j < source_schema_.size(); ++j) {
    nlohmann::json a;
    a["name"] = source_schema_[j].name;
    a["kind"] = std::string(to_string(source_schema_[j].kind));
    if (source_schema_[j].is_categorical()) a["values"] = source_schema_[j].values;
    if (const AttributeBins* b = bins_for(j)) {
      a["lower"] = b->lower;
      a["upper"] = b->upper;
      a["medians"] = b->medians;
    }
    attrs.push_back(a);
  }
  doc["attributes"] = attrs;
  return doc.dump(2);
}

Discretizer Discretizer::from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  Discretizer d;
  d.requested_bins_ = doc.at("bins").get<std::size_t>();
  const auto& attrs = doc.at("attributes");
  d.bins_.resize(attrs.size());
  for (std::size_t j = 0; j < attrs.size(); ++j) {
    const auto& a = attrs[j];
    Attribute attr;
    attr.name = a.at("name").get<std::string>();
    attr.index = j;
    attr.kind = a.at("kind").get<std::string>() == "continuous"
                    ? AttributeKind::Continuous
                    : AttributeKind::Categorical;
    if (a.contains("values")) attr.values = a["values"].get<std::vector<std::string>>();
    d.source_schema_.push_back(attr);
    if (a.contains("medians")) {
      AttributeBins b;
      b.attribute = j;
      b.lower = a.at("lower").get<std::vector<double>>();
      b.upper = a.at("upper").get<std::vector<double>>();
      b.medians = a.at("medians").get<std::vector<double>>();
      d.bins_[j] = std::move(b);
    }
  }
  validate_schema(d.source_schema_);
  return d;
}

}  // namespace tagl
