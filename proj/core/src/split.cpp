#include "tagl/split.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "tagl/error.hpp"
#include "tagl/rng.hpp"

namespace tagl {

std::size_t train_size(std::size_t n, double ratio) {
  // 0.8 * 10 evaluates to 8.000000000000002 or 7.999999999999999 depending
  // on the operands; nudge before flooring.
  return static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(n) + 1e-9));
}

TrainTestSplit split_train_test(const Dataset& ds, double ratio,
                                std::uint64_t seed) {
  const std::size_t n = ds.num_rows();
  if (n < 2) throw InvalidArgument("split needs at least two rows");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("split ratio must lie in (0, 1)");
  }
  const std::size_t n_train = train_size(n, ratio);
  if (n_train == 0 || n_train == n) {
    throw InvalidArgument("split ratio leaves one side empty");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, stream::kSplit));
  shuffle(std::span<std::size_t>(order), rng);

  std::span<const std::size_t> all(order);
  TrainTestSplit out{ds.select_rows(all.first(n_train)),
                     ds.select_rows(all.subspan(n_train))};
  Provenance p = ds.provenance();
  p.seed = seed;
  p.note = "train";
  out.train.set_provenance(p);
  p.note = "test";
  out.test.set_provenance(p);
  return out;
}

}  // namespace tagl
