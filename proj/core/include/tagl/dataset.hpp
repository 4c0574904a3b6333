#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tagl {

enum class AttributeKind { Categorical, Continuous };

std::string_view to_string(AttributeKind kind);

// One column of a tabular dataset. Categorical attributes carry an ordered,
// duplicate-free value list; a cell stores an index into it.
struct Attribute {
  std::string name;
  std::size_t index = 0;
  AttributeKind kind = AttributeKind::Categorical;
  std::vector<std::string> values;

  bool is_categorical() const { return kind == AttributeKind::Categorical; }
  bool is_continuous() const { return kind == AttributeKind::Continuous; }
  std::size_t cardinality() const { return values.size(); }
  std::optional<std::uint32_t> value_index(std::string_view token) const;

  bool operator==(const Attribute&) const = default;
};

using Schema = std::vector<Attribute>;

// Throws SchemaError if indices are not 0..J-1 or a value list is empty or
// contains duplicates.
void validate_schema(const Schema& schema);

class Cell {
 public:
  Cell() = default;

  static Cell missing() { return Cell(); }
  static Cell categorical(std::uint32_t index) {
    Cell c;
    c.tag_ = Tag::Categorical;
    c.category_ = index;
    return c;
  }
  // Throws InvalidArgument for non-finite values.
  static Cell continuous(double value);

  bool is_missing() const { return tag_ == Tag::Missing; }
  bool is_categorical() const { return tag_ == Tag::Categorical; }
  bool is_continuous() const { return tag_ == Tag::Continuous; }

  std::uint32_t category() const { return category_; }
  double value() const { return value_; }

  bool operator==(const Cell& other) const;

 private:
  enum class Tag : std::uint8_t { Missing, Categorical, Continuous };
  Tag tag_ = Tag::Missing;
  std::uint32_t category_ = 0;
  double value_ = 0.0;
};

struct Provenance {
  std::string source;
  std::uint64_t seed = 0;
  std::string note;
};

// Row-major n x J grid of cells with a fixed schema. Immutable once built
// apart from explicit `set` calls during construction.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema, Provenance provenance = {});

  const Schema& schema() const { return schema_; }
  const Attribute& attribute(std::size_t j) const { return schema_[j]; }
  const Provenance& provenance() const { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = std::move(p); }

  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_attributes() const { return schema_.size(); }

  std::span<const Cell> row(std::size_t i) const {
    return {cells_.data() + i * schema_.size(), schema_.size()};
  }
  const Cell& at(std::size_t i, std::size_t j) const {
    return cells_[i * schema_.size() + j];
  }
  void set(std::size_t i, std::size_t j, Cell cell) {
    cells_[i * schema_.size() + j] = cell;
  }

  // Appends a row; throws StructuralError if the width is wrong and
  // SchemaError if a cell contradicts its attribute.
  void add_row(std::span<const Cell> row);
  void reserve(std::size_t rows) { cells_.reserve(rows * schema_.size()); }

  Dataset select_rows(std::span<const std::size_t> rows) const;

  // Checks every cell against the schema.
  void validate() const;

  bool all_categorical() const;
  bool all_continuous() const;

  bool operator==(const Dataset& other) const {
    return schema_ == other.schema_ && num_rows_ == other.num_rows_ &&
           cells_ == other.cells_;
  }

 private:
  void check_cell(std::size_t j, const Cell& cell) const;

  Schema schema_;
  Provenance provenance_;
  std::vector<Cell> cells_;
  std::size_t num_rows_ = 0;
};

// Sample standard deviation (n-1 denominator) of the non-missing values of a
// continuous attribute. Returns 0 when fewer than two values exist.
double sample_stddev(const Dataset& ds, std::size_t attribute);

// Mean of the non-missing values of a continuous attribute (0 if none).
double mean(const Dataset& ds, std::size_t attribute);

}  // namespace tagl
