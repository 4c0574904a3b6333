#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tagl/dataset.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/metrics.hpp"
#include "tagl/predictor.hpp"

namespace tagl {

// Per-attribute constant predictor: the most frequent value of a categorical
// attribute (ties to the lowest value index) or the median of a continuous
// one (even counts average the two middle values). Fitted on non-missing
// training cells only.
class BaselineModel final : public Predictor {
 public:
  BaselineModel() = default;

  // Throws InvalidArgument on an empty dataset.
  static BaselineModel fit(const Dataset& train);

  std::string name() const override { return "baseline"; }
  std::vector<Cell> predict_instance(std::span<const Cell> row,
                                     std::span<const std::uint32_t> masked,
                                     std::uint64_t seed) const override;

  const Schema& schema() const { return schema_; }
  // Empty when the attribute was entirely missing in training.
  const std::optional<Cell>& constant(std::size_t attribute) const {
    return constants_.at(attribute);
  }
  // Throws InvalidArgument naming the attribute if it is unfit.
  Cell predict(std::size_t attribute) const;

  // One line per attribute: <name>\t<kind>\t<value or ?>
  void save(std::ostream& out) const;
  static BaselineModel load(std::istream& in, const Schema& schema);

 private:
  Schema schema_;
  std::vector<std::optional<Cell>> constants_;
};

// Every masked cell of the plan receives its attribute's constant.
PredictionTable predict_baseline(const BaselineModel& model, const MaskPlan& plan);

}  // namespace tagl
