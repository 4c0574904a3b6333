#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "tagl/baseline.hpp"
#include "tagl/bench/config.hpp"
#include "tagl/chordal/model.hpp"
#include "tagl/discretizer.hpp"
#include "tagl/selfsup/dae.hpp"
#include "tagl/selfsup/made.hpp"

namespace tagl::bench {

using AnyModel = std::variant<BaselineModel, JunctionTreeModel, MadeModel, DaeModel>;

// A fitted model in the space of the original data. When a discretizer is
// attached, continuous cells are binned before reaching the inner model and
// its bin predictions are mapped back to the bin's training median.
class TrainedModel final : public Predictor {
 public:
  TrainedModel(std::string name, AnyModel model, Schema schema,
               std::optional<Discretizer> discretizer = {});

  std::string name() const override { return name_; }
  std::vector<Cell> predict_instance(std::span<const Cell> row,
                                     std::span<const std::uint32_t> masked,
                                     std::uint64_t seed) const override;

  const AnyModel& model() const { return model_; }
  const Schema& schema() const { return schema_; }
  const std::optional<Discretizer>& discretizer() const { return discretizer_; }
  const Predictor& inner() const;

  // Directory holding model.json plus the inner model's own files.
  void save(const std::filesystem::path& dir) const;
  static TrainedModel load(const std::filesystem::path& dir);

 private:
  std::string name_;
  AnyModel model_;
  Schema schema_;
  std::optional<Discretizer> discretizer_;
};

// Chordal and autoregressive models see continuous attributes through an
// equal-frequency discretization fitted on `train`; the others see raw
// values.
bool uses_discretization(const std::string& model);

// Throws InvalidArgument on unknown names or data the model cannot handle.
TrainedModel train_model(const std::string& name, const Dataset& train, const ModelSettings& settings,
                         std::uint64_t seed);

std::string schema_to_json(const Schema& schema);
Schema schema_from_json(const std::string& text);

}  // namespace tagl::bench
