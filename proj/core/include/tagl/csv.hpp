#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tagl/dataset.hpp"

namespace tagl {

// Per-column override read from a JSON schema sidecar.
struct ColumnSpec {
  std::optional<AttributeKind> kind;
  std::optional<std::vector<std::string>> values;
};

// Sidecar document. Two layouts are accepted:
//   {"col": {"kind": "categorical", "values": [...]}, ...}
//   {"columns": {...same...}, "missing": ["?", "NA"]}
struct SchemaSidecar {
  std::map<std::string, ColumnSpec> columns;
  std::vector<std::string> missing_tokens{"?"};
};

SchemaSidecar load_sidecar(const std::filesystem::path& path);
SchemaSidecar parse_sidecar(const std::string& json_text);
// Sidecar that pins every kind and value list of `schema`, so that files
// split from one source decode with identical category indices.
SchemaSidecar sidecar_from_schema(const Schema& schema);
void save_sidecar(const SchemaSidecar& sidecar,
                  const std::filesystem::path& path);
std::string sidecar_to_json(const SchemaSidecar& sidecar);

// Reads a comma-delimited file with a header row. "?" (or a sidecar alias)
// marks a missing cell. Without a sidecar override, a column is continuous
// iff every non-missing token parses as a finite real; categorical value
// lists are sorted lexicographically.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::filesystem::path>& sidecar = {});
Dataset read_csv(std::istream& in, const SchemaSidecar* sidecar = nullptr,
                 const std::string& source = "<stream>");

void write_csv(const Dataset& ds, std::ostream& out);
void write_csv(const Dataset& ds, const std::filesystem::path& path);

// Shortest round-trip text for a double.
std::string format_real(double value);

}  // namespace tagl
