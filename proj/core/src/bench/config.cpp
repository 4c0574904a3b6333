#include "tagl/bench/config.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tagl/error.hpp"

namespace tagl::bench {

using nlohmann::json;

std::size_t model_index(const std::string& name) {
  const auto& m = known_models();
  const auto it = std::find(m.begin(), m.end(), name);
  if (it == m.end()) throw InvalidArgument("unknown model '" + name + "'");
  return std::size_t(it - m.begin());
}

std::string to_string(DatasetKind kind) {
  return kind == DatasetKind::Categorical ? "categorical" : "continuous";
}

void BenchConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw InvalidArgument("unsupported config schema_version " + std::to_string(schema_version));
  }
  for (const auto& m : models) model_index(m);
  for (std::size_t i = 0; i < models.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (models[i] == models[k]) throw InvalidArgument("model '" + models[i] + "' listed twice");
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    if (datasets[i].name.empty()) throw InvalidArgument("every dataset needs a name");
    for (std::size_t k = 0; k < i; ++k)
      if (datasets[i].name == datasets[k].name) {
        throw InvalidArgument("dataset name '" + datasets[i].name + "' used twice");
      }
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");
  if (!(train_mask_rate > 0.0 && train_mask_rate < 1.0)) {
    throw InvalidArgument("train mask rate must lie in (0, 1)");
  }
  if (test_rates.empty()) throw InvalidArgument("at least one test rate is needed");
  for (double r : test_rates)
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("test rates must lie in (0, 1)");
  if (chunks == 0) throw InvalidArgument("chunk count must be at least 1");
  if (settings.bins < 2) throw InvalidArgument("discretization needs at least two bins");
  if (settings.samples == 0) throw InvalidArgument("at least one imputation sample is needed");
  if (!(settings.chordal.m >= 0.0)) throw InvalidArgument("smoothing pseudo-count must be non-negative");
  settings.made.validate();
  settings.dae.validate();
}

namespace {

json train_json(const TrainConfig& c) { return json::parse(c.to_json()); }

json dataset_json(const DatasetSpec& d) {
  json j = {{"name", d.name}, {"path", d.path.string()}, {"kind", to_string(d.kind)}};
  if (d.schema) j["schema"] = d.schema->string();
  return j;
}

template <class F>
void for_keys(const json& j, const std::string& where, F&& f) {
  if (!j.is_object()) throw SchemaError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (!f(key, value)) throw SchemaError(where + ": unknown key '" + key + "'");
    } catch (const json::exception& e) {
      throw SchemaError(where + " key '" + key + "': " + e.what());
    }
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

std::string BenchConfig::to_json() const {
  json ds = json::array();
  for (const auto& d : datasets) ds.push_back(dataset_json(d));
  json j = {{"schema_version", schema_version},
            {"datasets", ds},
            {"models", models},
            {"seed", seed},
            {"split_ratio", split_ratio},
            {"train_mask_rate", train_mask_rate},
            {"test_rates", test_rates},
            {"chunks", chunks},
            {"bins", settings.bins},
            {"samples", settings.samples},
            {"search_draws", settings.search_draws},
            {"chordal",
             {{"alpha", settings.chordal.score.alpha},
              {"bonferroni", settings.chordal.score.bonferroni},
              {"max_clique_size", settings.chordal.score.max_clique_size},
              {"max_table_cells", settings.chordal.score.max_table_cells},
              {"m", settings.chordal.m}}},
            {"made", train_json(settings.made)},
            {"dae", train_json(settings.dae)},
            {"output", output.string()}};
  return j.dump(2);
}

BenchConfig BenchConfig::from_json(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bench config: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw SchemaError("bench config needs a top-level schema_version");
  }
  BenchConfig c;
  for_keys(doc, "bench config", [&](const std::string& key, const json& v) {
    if (key == "schema_version") c.schema_version = v.get<int>();
    else if (key == "datasets") {
      if (!v.is_array()) throw SchemaError("datasets must be an array");
      for (const auto& d : v) {
        DatasetSpec spec;
        bool has_path = false;
        for_keys(d, "dataset", [&](const std::string& k, const json& x) {
          if (k == "name") spec.name = x.get<std::string>();
          else if (k == "path") {
            spec.path = resolve(base_dir, x.get<std::string>());
            has_path = true;
          } else if (k == "schema") spec.schema = resolve(base_dir, x.get<std::string>());
          else if (k == "kind") {
            const auto s = x.get<std::string>();
            if (s == "categorical") spec.kind = DatasetKind::Categorical;
            else if (s == "continuous") spec.kind = DatasetKind::Continuous;
            else throw SchemaError("dataset kind must be categorical or continuous, got '" + s + "'");
          } else return false;
          return true;
        });
        if (!has_path) throw SchemaError("dataset entry needs a path");
        if (spec.name.empty()) spec.name = spec.path.stem().string();
        c.datasets.push_back(std::move(spec));
      }
    } else if (key == "models") c.models = v.get<std::vector<std::string>>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "split_ratio") c.split_ratio = v.get<double>();
    else if (key == "train_mask_rate") c.train_mask_rate = v.get<double>();
    else if (key == "test_rates") c.test_rates = v.get<std::vector<double>>();
    else if (key == "chunks") c.chunks = v.get<std::size_t>();
    else if (key == "bins") c.settings.bins = v.get<std::size_t>();
    else if (key == "samples") c.settings.samples = v.get<std::size_t>();
    else if (key == "search_draws") c.settings.search_draws = v.get<std::size_t>();
    else if (key == "chordal") {
      auto& ch = c.settings.chordal;
      for_keys(v, "chordal", [&](const std::string& k, const json& x) {
        if (k == "alpha") ch.score.alpha = x.get<double>();
        else if (k == "bonferroni") ch.score.bonferroni = x.get<bool>();
        else if (k == "max_clique_size") ch.score.max_clique_size = x.get<std::size_t>();
        else if (k == "max_table_cells") ch.score.max_table_cells = x.get<std::size_t>();
        else if (k == "m") ch.m = x.get<double>();
        else return false;
        return true;
      });
    } else if (key == "made") c.settings.made = TrainConfig::from_json(v.dump());
    else if (key == "dae") c.settings.dae = TrainConfig::from_json(v.dump());
    else if (key == "output") c.output = resolve(base_dir, v.get<std::string>());
    else return false;
    return true;
  });
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("bench config: ") + e.what());
  }
  return c;
}

BenchConfig BenchConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return from_json(s.str(), path.parent_path());
}

}  // namespace tagl::bench
