#include "tagl/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tagl/error.hpp"

namespace tagl {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return std::string(s.substr(b, e - b));
}

// Splits one CSV record. Double-quoted fields may contain commas and "".
std::vector<std::string> split_record(const std::string& line,
                                      std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          field.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      out.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) {
    throw StructuralError("line " + std::to_string(line_no) +
                          ": unterminated quoted field");
  }
  out.push_back(was_quoted ? field : trim(field));
  return out;
}

std::optional<double> parse_real(const std::string& token) {
  if (token.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

AttributeKind parse_kind(const std::string& s) {
  if (s == "categorical") return AttributeKind::Categorical;
  if (s == "continuous") return AttributeKind::Continuous;
  throw SchemaError("unknown attribute kind '" + s + "'");
}

ColumnSpec parse_column(const std::string& name, const json& j) {
  if (!j.is_object()) {
    throw SchemaError("sidecar entry for '" + name + "' must be an object");
  }
  ColumnSpec spec;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "kind") {
      spec.kind = parse_kind(it.value().get<std::string>());
    } else if (it.key() == "values") {
      spec.values = it.value().get<std::vector<std::string>>();
    } else {
      throw SchemaError("sidecar entry for '" + name + "' has unknown key '" +
                        it.key() + "'");
    }
  }
  if (spec.values && spec.kind == AttributeKind::Continuous) {
    throw SchemaError("continuous column '" + name + "' cannot list values");
  }
  if (spec.values && !spec.kind) spec.kind = AttributeKind::Categorical;
  return spec;
}

}  // namespace

SchemaSidecar parse_sidecar(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("schema sidecar is not valid JSON: ") +
                      e.what());
  }
  if (!doc.is_object()) throw SchemaError("schema sidecar must be an object");
  SchemaSidecar out;
  const bool wrapped = doc.contains("columns") && doc["columns"].is_object();
  if (wrapped) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.key() == "columns") continue;
      if (it.key() == "missing") {
        out.missing_tokens = it.value().get<std::vector<std::string>>();
        if (out.missing_tokens.empty()) {
          throw SchemaError("sidecar 'missing' list must not be empty");
        }
      } else {
        throw SchemaError("unknown sidecar key '" + it.key() + "'");
      }
    }
  }
  const json& cols = wrapped ? doc["columns"] : doc;
  for (auto it = cols.begin(); it != cols.end(); ++it) {
    out.columns[it.key()] = parse_column(it.key(), it.value());
  }
  return out;
}

SchemaSidecar load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schema sidecar " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sidecar(ss.str());
}

SchemaSidecar sidecar_from_schema(const Schema& schema) {
  SchemaSidecar out;
  for (const auto& a : schema) {
    ColumnSpec spec;
    spec.kind = a.kind;
    if (a.is_categorical()) spec.values = a.values;
    out.columns[a.name] = spec;
  }
  return out;
}

std::string sidecar_to_json(const SchemaSidecar& sidecar) {
  json cols = json::object();
  for (const auto& [name, spec] : sidecar.columns) {
    json c = json::object();
    if (spec.kind) c["kind"] = std::string(to_string(*spec.kind));
    if (spec.values) c["values"] = *spec.values;
    cols[name] = c;
  }
  json doc = {{"columns", cols}, {"missing", sidecar.missing_tokens}};
  return doc.dump(2);
}

void save_sidecar(const SchemaSidecar& sidecar,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write schema sidecar " + path.string());
  out << sidecar_to_json(sidecar) << '\n';
}

Dataset read_csv(std::istream& in, const SchemaSidecar* sidecar,
                 const std::string& source) {
  static const SchemaSidecar kDefault;
  const SchemaSidecar& sc = sidecar ? *sidecar : kDefault;
  const std::set<std::string> missing(sc.missing_tokens.begin(),
                                      sc.missing_tokens.end());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_record(line, line_no);
      break;
    }
  }
  if (header.empty()) throw StructuralError(source + ": missing header row");
  const std::size_t width = header.size();
  {
    std::set<std::string> names(header.begin(), header.end());
    if (names.size() != width) {
      throw StructuralError(source + ": duplicate column names in header");
    }
  }
  for (const auto& [name, spec] : sc.columns) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw SchemaError(source + ": sidecar names unknown column '" + name +
                        "'");
    }
  }

  std::vector<std::vector<std::string>> tokens;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto rec = split_record(line, line_no);
    if (rec.size() != width) {
      throw StructuralError(source + ": row " + std::to_string(tokens.size() + 1) +
                            " (line " + std::to_string(line_no) + ") has " +
                            std::to_string(rec.size()) + " fields, expected " +
                            std::to_string(width));
    }
    tokens.push_back(std::move(rec));
  }

  Schema schema(width);
  for (std::size_t j = 0; j < width; ++j) {
    Attribute& a = schema[j];
    a.name = header[j];
    a.index = j;
    const auto found = sc.columns.find(a.name);
    const ColumnSpec* spec = found == sc.columns.end() ? nullptr : &found->second;

    bool numeric = true;
    std::set<std::string> distinct;
    for (const auto& row : tokens) {
      const std::string& t = row[j];
      if (missing.count(t)) continue;
      distinct.insert(t);
      if (numeric && !parse_real(t)) numeric = false;
    }
    if (spec && spec->kind) {
      a.kind = *spec->kind;
    } else {
      a.kind = numeric ? AttributeKind::Continuous : AttributeKind::Categorical;
    }
    if (a.is_categorical()) {
      if (spec && spec->values) {
        a.values = *spec->values;
        for (const auto& t : distinct) {
          if (!a.value_index(t)) {
            throw SchemaError(source + ": column '" + a.name +
                              "' has value '" + t +
                              "' not declared in the sidecar");
          }
        }
      } else {
        a.values.assign(distinct.begin(), distinct.end());
      }
      if (a.values.empty()) {
        throw SchemaError(source + ": categorical column '" + a.name +
                          "' has no observed values; declare them in a sidecar");
      }
    }
  }

  Dataset ds(std::move(schema), Provenance{source, 0, ""});
  ds.reserve(tokens.size());
  std::vector<Cell> row(width);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const std::string& t = tokens[i][j];
      const Attribute& a = ds.attribute(j);
      if (missing.count(t)) {
        row[j] = Cell::missing();
      } else if (a.is_categorical()) {
        row[j] = Cell::categorical(*a.value_index(t));
      } else {
        auto v = parse_real(t);
        if (!v) {
          throw SchemaError(source + ": row " + std::to_string(i + 1) +
                            ", column '" + a.name + "': '" + t +
                            "' is not a finite real");
        }
        row[j] = Cell::continuous(*v);
      }
    }
    ds.add_row(row);
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::filesystem::path>& sidecar) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  if (sidecar) {
    SchemaSidecar sc = load_sidecar(*sidecar);
    return read_csv(in, &sc, path.string());
  }
  return read_csv(in, nullptr, path.string());
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {
std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos && s == trim(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}
}  // namespace

void write_csv(const Dataset& ds, std::ostream& out) {
  for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
    if (j) out << ',';
    out << quote_if_needed(ds.attribute(j).name);
  }
  out << '\n';
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    for (std::size_t j = 0; j < ds.num_attributes(); ++j) {
      if (j) out << ',';
      const Cell& c = ds.at(i, j);
      if (c.is_missing()) {
        out << '?';
      } else if (c.is_categorical()) {
        out << quote_if_needed(ds.attribute(j).values[c.category()]);
      } else {
        out << format_real(c.value());
      }
    }
    out << '\n';
  }
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(ds, out);
}

}  // namespace tagl
