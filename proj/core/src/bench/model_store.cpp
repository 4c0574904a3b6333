#include "tagl/bench/model_store.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tagl/error.hpp"

namespace tagl::bench {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace

std::string schema_to_json(const Schema& schema) {
  json a = json::array();
  for (const auto& attr : schema) {
    json j = {{"name", attr.name}, {"kind", std::string(to_string(attr.kind))}};
    if (attr.is_categorical()) j["values"] = attr.values;
    a.push_back(j);
  }
  return a.dump();
}

Schema schema_from_json(const std::string& text) {
  Schema s;
  try {
    const auto a = json::parse(text);
    for (std::size_t j = 0; j < a.size(); ++j) {
      Attribute attr;
      attr.name = a[j].at("name").get<std::string>();
      attr.index = j;
      const auto kind = a[j].at("kind").get<std::string>();
      if (kind != "categorical" && kind != "continuous") throw SchemaError("unknown attribute kind " + kind);
      attr.kind = kind == "continuous" ? AttributeKind::Continuous : AttributeKind::Categorical;
      if (attr.is_categorical()) attr.values = a[j].at("values").get<std::vector<std::string>>();
      s.push_back(std::move(attr));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("schema: ") + e.what());
  }
  validate_schema(s);
  return s;
}

TrainedModel::TrainedModel(std::string name, AnyModel model, Schema schema,
                           std::optional<Discretizer> discretizer)
    : name_(std::move(name)),
      model_(std::move(model)),
      schema_(std::move(schema)),
      discretizer_(std::move(discretizer)) {}

const Predictor& TrainedModel::inner() const {
  return std::visit([](const auto& m) -> const Predictor& { return m; }, model_);
}

std::vector<Cell> TrainedModel::predict_instance(std::span<const Cell> row,
                                                 std::span<const std::uint32_t> masked,
                                                 std::uint64_t seed) const {
  if (!discretizer_) return inner().predict_instance(row, masked, seed);
  std::vector<Cell> binned(row.begin(), row.end());
  for (std::size_t a = 0; a < binned.size(); ++a)
    if (const AttributeBins* b = discretizer_->bins_for(a); b && binned[a].is_continuous()) {
      binned[a] = Cell::categorical(std::uint32_t(b->bin_of(binned[a].value())));
    }
  auto out = inner().predict_instance(binned, masked, seed);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = discretizer_->back_project(masked[k], out[k]);
  return out;
}

void TrainedModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  json meta = {{"format", "tagl-model"}, {"version", 1}, {"model", name_},
               {"schema", json::parse(schema_to_json(schema_))}};
  if (discretizer_) meta["discretizer"] = json::parse(discretizer_->to_json());
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BaselineModel>) {
          std::ostringstream s;
          m.save(s);
          write_file(dir / "baseline.tsv", s.str());
          meta["inner"] = "baseline";
        } else if constexpr (std::is_same_v<T, JunctionTreeModel>) {
          m.save((dir / "junction_tree.txt").string());
          meta["inner"] = "chordal";
        } else if constexpr (std::is_same_v<T, MadeModel>) {
          m.save(dir / "made");
          meta["inner"] = "made";
        } else {
          m.save(dir / "dae");
          meta["inner"] = "dae";
        }
      },
      model_);
  write_file(dir / "model.json", meta.dump(2));
}

TrainedModel TrainedModel::load(const std::filesystem::path& dir) {
  json meta;
  try {
    meta = json::parse(read_file(dir / "model.json"));
    if (meta.at("format") != "tagl-model") throw SchemaError(dir.string() + " is not a model directory");
  } catch (const json::exception& e) {
    throw SchemaError("model.json: " + std::string(e.what()));
  }
  Schema schema = schema_from_json(meta.at("schema").dump());
  std::optional<Discretizer> disc;
  if (meta.contains("discretizer")) disc = Discretizer::from_json(meta["discretizer"].dump());
  const std::string inner = meta.at("inner").get<std::string>();
  const std::string name = meta.at("model").get<std::string>();
  if (inner == "baseline") {
    std::istringstream in(read_file(dir / "baseline.tsv"));
    return TrainedModel(name, BaselineModel::load(in, schema), schema, std::move(disc));
  }
  if (inner == "chordal") {
    return TrainedModel(name, JunctionTreeModel::load((dir / "junction_tree.txt").string()), schema,
                        std::move(disc));
  }
  if (inner == "made") return TrainedModel(name, MadeModel::load(dir / "made"), schema, std::move(disc));
  if (inner == "dae") return TrainedModel(name, DaeModel::load(dir / "dae"), schema, std::move(disc));
  throw SchemaError("model.json: unknown inner model '" + inner + "'");
}

bool uses_discretization(const std::string& model) { return model == "chordal" || model == "made"; }

TrainedModel train_model(const std::string& name, const Dataset& train, const ModelSettings& settings,
                         std::uint64_t seed) {
  model_index(name);
  std::optional<Discretizer> disc;
  const Dataset* data = &train;
  Dataset binned;
  if (uses_discretization(name) && !train.all_categorical()) {
    disc = Discretizer::fit(train, settings.bins);
    binned = disc->apply(train);
    data = &binned;
  }
  if (name == "most_freq" || name == "median") {
    return TrainedModel(name, BaselineModel::fit(train), train.schema());
  }
  if (name == "chordal") {
    auto graph = learn_structure(*data, settings.chordal.score);
    return TrainedModel(name, fit_parameters(graph, *data, settings.chordal.m), train.schema(),
                        std::move(disc));
  }
  if (name == "made") {
    MadeModel m = settings.search_draws
                      ? search_made(*data, settings.made, SearchSpace::made(), settings.search_draws, seed).model
                      : train_made(*data, settings.made, seed);
    m.imputation().samples = settings.samples;
    return TrainedModel(name, std::move(m), train.schema(), std::move(disc));
  }
  DaeModel m = settings.search_draws
                   ? search_dae(train, settings.dae, SearchSpace::dae(), settings.search_draws, seed).model
                   : train_dae(train, settings.dae, seed);
  m.imputation().samples = settings.samples;
  return TrainedModel(name, std::move(m), train.schema());
}

}  // namespace tagl::bench
