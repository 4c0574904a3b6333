#pragma once

#include <cstdint>
#include <utility>

#include "tagl/dataset.hpp"

namespace tagl {

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Uniform shuffle by `seed`; the first floor(ratio * n) shuffled rows form the
// training set. Throws InvalidArgument if n < 2, ratio is outside (0, 1), or
// either side would be empty.
TrainTestSplit split_train_test(const Dataset& ds, double ratio,
                                std::uint64_t seed);

// floor(ratio * n), robust to representation error in `ratio`.
std::size_t train_size(std::size_t n, double ratio);

}  // namespace tagl
