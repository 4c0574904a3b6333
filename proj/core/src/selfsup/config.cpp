#include "tagl/selfsup/config.hpp"

#include <map>
#include <nlohmann/json.hpp>

#include "tagl/error.hpp"
#include "tagl/rng.hpp"

namespace tagl {

void TrainConfig::validate() const {
  if (!(mask_rate > 0.0 && mask_rate < 1.0)) throw InvalidArgument("mask rate must lie in (0, 1)");
  if (!(validation_fraction > 0.0 && validation_fraction <= 1.0)) {
    throw InvalidArgument("validation fraction must lie in (0, 1]");
  }
  if (max_epochs == 0) throw InvalidArgument("max_epochs must be positive");
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("dropout must lie in [0, 1)");
  for (auto h : hidden)
    if (h == 0) throw InvalidArgument("hidden layers need at least one unit");
}

std::string TrainConfig::to_json() const {
  nlohmann::json j = {{"mask_rate", mask_rate},
                      {"validation_fraction", validation_fraction},
                      {"max_epochs", max_epochs},
                      {"patience", patience},
                      {"batch_size", batch_size},
                      {"hidden", hidden},
                      {"learning_rate", learning_rate},
                      {"dropout", dropout},
                      {"masked_only", masked_only},
                      {"full_reconstruction", full_reconstruction},
                      {"validation_subsample", validation_subsample}};
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  TrainConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("training config: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("training config must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "mask_rate") c.mask_rate = value.get<double>();
      else if (key == "validation_fraction") c.validation_fraction = value.get<double>();
      else if (key == "max_epochs") c.max_epochs = value.get<std::size_t>();
      else if (key == "patience") c.patience = value.get<std::size_t>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "hidden") c.hidden = value.get<std::vector<std::size_t>>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "dropout") c.dropout = value.get<double>();
      else if (key == "masked_only") c.masked_only = value.get<bool>();
      else if (key == "full_reconstruction") c.full_reconstruction = value.get<bool>();
      else if (key == "validation_subsample") c.validation_subsample = value.get<std::size_t>();
      else throw SchemaError("training config: unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("training config key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

void ImputationConfig::validate() const {
  if (samples == 0) throw InvalidArgument("at least one imputation sample is needed");
}

Cell aggregate_samples(const std::vector<Cell>& samples) {
  std::map<std::uint32_t, std::size_t> votes;
  double sum = 0.0;
  std::size_t reals = 0;
  for (const Cell& c : samples) {
    if (c.is_categorical()) ++votes[c.category()];
    else if (c.is_continuous()) {
      sum += c.value();
      ++reals;
    }
  }
  if (!votes.empty() && reals) throw InvalidArgument("samples mix categorical and continuous values");
  if (reals) return Cell::continuous(sum / double(reals));
  if (votes.empty()) return Cell::missing();
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it)
    if (it->second > best->second) best = it;
  return Cell::categorical(best->first);
}

SearchSpace SearchSpace::made() {
  return {{1, 2, 3}, {32, 64, 128, 256, 512, 1024, 2048}, {8, 16, 32, 64, 128}, {}};
}

SearchSpace SearchSpace::dae() {
  return {{1, 2, 3}, {32, 64, 128, 256, 512}, {8, 16, 32, 64}, {0.1, 0.2, 0.3, 0.4, 0.5}};
}

std::size_t SearchSpace::grid_size() const {
  return layers.size() * neurons.size() * batch.size() * std::max<std::size_t>(1, dropout.size());
}

std::vector<TrainConfig> draw_configs(const SearchSpace& space, const TrainConfig& base,
                                      std::size_t draws, std::uint64_t seed) {
  const std::size_t total = space.grid_size();
  if (total == 0) throw InvalidArgument("empty search space");
  Rng rng(derive_seed(seed, stream::kSearch));
  const auto k = static_cast<std::uint32_t>(std::min(draws, total));
  std::vector<std::uint32_t> picks = sample_without_replacement(std::uint32_t(total), k, rng);
  std::vector<TrainConfig> out;
  for (std::uint32_t p : picks) {
    TrainConfig c = base;
    std::size_t idx = p;
    const std::size_t nd = std::max<std::size_t>(1, space.dropout.size());
    if (!space.dropout.empty()) c.dropout = space.dropout[idx % nd];
    idx /= nd;
    c.batch_size = space.batch[idx % space.batch.size()];
    idx /= space.batch.size();
    const std::size_t width = space.neurons[idx % space.neurons.size()];
    idx /= space.neurons.size();
    c.hidden.assign(space.layers[idx % space.layers.size()], width);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tagl
