#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tagl/dataset.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/metrics.hpp"

namespace tagl {

// A fitted model that fills in hidden cells of a single instance.
//
// `row` holds the instance with every masked cell already blanked to
// Missing, so a predictor cannot read the values it is asked for. `masked`
// (sorted) lists the hidden attributes; an unmasked Missing cell is a value
// that was never recorded, which some models treat as evidence.
// Implementations must be pure functions of their arguments and safe to
// call concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string name() const = 0;
  // One predicted cell per entry of `masked`, in the same order.
  virtual std::vector<Cell> predict_instance(std::span<const Cell> row,
                                             std::span<const std::uint32_t> masked,
                                             std::uint64_t seed) const = 0;
};

// Seed handed to instance `instance` of a prediction run.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t instance);

// Predicts every masked cell of `test`. Instances are split into `chunks`
// contiguous ranges of near-equal size, processed concurrently, and merged in
// instance order; the result does not depend on the chunk count.
PredictionTable predict_chunked(const Predictor& model, const Dataset& test,
                                const MaskPlan& plan, std::size_t chunks,
                                std::uint64_t seed);

// Sizes of an even partition of n items into `chunks` ranges, larger ranges
// first (n = 10, chunks = 3 gives 4, 3, 3). Chunks beyond n are empty and
// dropped.
std::vector<std::size_t> chunk_sizes(std::size_t n, std::size_t chunks);

}  // namespace tagl
