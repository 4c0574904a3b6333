#include "tagl/dataset.hpp"

#include <cmath>
#include <set>
#include <string>

#include "tagl/error.hpp"

namespace tagl {

std::string_view to_string(AttributeKind kind) {
  return kind == AttributeKind::Categorical ? "categorical" : "continuous";
}

std::optional<std::uint32_t> Attribute::value_index(
    std::string_view token) const {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] == token) return static_cast<std::uint32_t>(k);
  }
  return std::nullopt;
}

void validate_schema(const Schema& schema) {
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const Attribute& a = schema[j];
    if (a.index != j) {
      throw SchemaError("attribute '" + a.name + "' has index " +
                        std::to_string(a.index) + ", expected " +
                        std::to_string(j));
    }
    if (a.is_categorical()) {
      if (a.values.empty()) {
        throw SchemaError("categorical attribute '" + a.name +
                          "' has an empty value list");
      }
      std::set<std::string> seen(a.values.begin(), a.values.end());
      if (seen.size() != a.values.size()) {
        throw SchemaError("categorical attribute '" + a.name +
                          "' has duplicate values");
      }
    }
  }
}

Cell Cell::continuous(double value) {
  if (!std::isfinite(value)) {
    throw InvalidArgument("continuous cell value must be finite");
  }
  Cell c;
  c.tag_ = Tag::Continuous;
  c.value_ = value;
  return c;
}

bool Cell::operator==(const Cell& other) const {
  if (tag_ != other.tag_) return false;
  switch (tag_) {
    case Tag::Missing:
      return true;
    case Tag::Categorical:
      return category_ == other.category_;
    case Tag::Continuous:
      return value_ == other.value_;
  }
  return false;
}

Dataset::Dataset(Schema schema, Provenance provenance)
    : schema_(std::move(schema)), provenance_(std::move(provenance)) {
  validate_schema(schema_);
}

void Dataset::check_cell(std::size_t j, const Cell& cell) const {
  const Attribute& a = schema_[j];
  if (cell.is_missing()) return;
  if (a.is_categorical()) {
    if (!cell.is_categorical()) {
      throw SchemaError("attribute '" + a.name +
                        "' is categorical but cell holds a real value");
    }
    if (cell.category() >= a.cardinality()) {
      throw SchemaError("attribute '" + a.name + "' has no value index " +
                        std::to_string(cell.category()));
    }
  } else if (!cell.is_continuous()) {
    throw SchemaError("attribute '" + a.name +
                      "' is continuous but cell holds a category");
  }
}

void Dataset::add_row(std::span<const Cell> row) {
  if (row.size() != schema_.size()) {
    throw StructuralError("row " + std::to_string(num_rows_) + " has " +
                          std::to_string(row.size()) + " cells, expected " +
                          std::to_string(schema_.size()));
  }
  for (std::size_t j = 0; j < row.size(); ++j) check_cell(j, row[j]);
  cells_.insert(cells_.end(), row.begin(), row.end());
  ++num_rows_;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out(schema_, provenance_);
  out.reserve(rows.size());
  for (std::size_t i : rows) {
    if (i >= num_rows_) throw InvalidArgument("row index out of range");
    auto r = row(i);
    out.cells_.insert(out.cells_.end(), r.begin(), r.end());
    ++out.num_rows_;
  }
  return out;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < num_rows_; ++i) {
    for (std::size_t j = 0; j < schema_.size(); ++j) check_cell(j, at(i, j));
  }
}

bool Dataset::all_categorical() const {
  for (const auto& a : schema_)
    if (!a.is_categorical()) return false;
  return true;
}

bool Dataset::all_continuous() const {
  for (const auto& a : schema_)
    if (!a.is_continuous()) return false;
  return true;
}

double mean(const Dataset& ds, std::size_t attribute) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    const Cell& c = ds.at(i, attribute);
    if (!c.is_continuous()) continue;
    sum += c.value();
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double sample_stddev(const Dataset& ds, std::size_t attribute) {
  // Two-pass for accuracy.
  const double mu = mean(ds, attribute);
  double ss = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    const Cell& c = ds.at(i, attribute);
    if (!c.is_continuous()) continue;
    const double d = c.value() - mu;
    ss += d * d;
    ++count;
  }
  if (count < 2) return 0.0;
  return std::sqrt(ss / static_cast<double>(count - 1));
}

}  // namespace tagl
