#include "tagl/predictor.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "tagl/error.hpp"
#include "tagl/rng.hpp"

namespace tagl {

std::uint64_t instance_seed(std::uint64_t seed, std::size_t instance) {
  return derive_seed(seed, stream::kPredict, instance);
}

std::vector<std::size_t> chunk_sizes(std::size_t n, std::size_t chunks) {
  if (chunks == 0) throw InvalidArgument("chunk count must be at least 1");
  std::vector<std::size_t> sizes;
  const std::size_t base = n / chunks;
  const std::size_t extra = n % chunks;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t s = base + (c < extra ? 1 : 0);
    if (s > 0) sizes.push_back(s);
  }
  return sizes;
}

namespace {

PredictionTable predict_range(const Predictor& model, const Dataset& test,
                              const MaskPlan& plan, std::size_t begin,
                              std::size_t end, std::uint64_t seed) {
  PredictionTable out;
  std::vector<Cell> blanked(test.num_attributes());
  for (std::size_t i = begin; i < end; ++i) {
    auto row = test.row(i);
    std::copy(row.begin(), row.end(), blanked.begin());
    auto masked = plan.masked(i);
    for (auto j : masked) blanked[j] = Cell::missing();
    if (masked.empty()) continue;
    auto values = model.predict_instance(blanked, masked, instance_seed(seed, i));
    if (values.size() != masked.size()) {
      throw Error(model.name() + " returned " + std::to_string(values.size()) +
                  " predictions for " + std::to_string(masked.size()) +
                  " targets");
    }
    for (std::size_t k = 0; k < masked.size(); ++k) out.add(i, masked[k], values[k]);
  }
  return out;
}

}  // namespace

PredictionTable predict_chunked(const Predictor& model, const Dataset& test,
                                const MaskPlan& plan, std::size_t chunks,
                                std::uint64_t seed) {
  if (plan.num_instances() != test.num_rows() ||
      plan.num_attributes() != test.num_attributes()) {
    throw InvalidArgument("mask plan does not match the test dataset");
  }
  const auto sizes = chunk_sizes(test.num_rows(), chunks);
  std::vector<PredictionTable> parts(sizes.size());
  std::vector<std::exception_ptr> errors(sizes.size());
  if (sizes.size() <= 1) {
    return predict_range(model, test, plan, 0, test.num_rows(), seed);
  }
  std::vector<std::size_t> starts(sizes.size(), 0);
  for (std::size_t c = 1; c < sizes.size(); ++c) starts[c] = starts[c - 1] + sizes[c - 1];
  // Chunks are claimed from a shared counter by at most one worker per core.
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t num_workers = std::min(hw, sizes.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < num_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t c = next++; c < sizes.size(); c = next++) {
        try {
          parts[c] = predict_range(model, test, plan, starts[c],
                                   starts[c] + sizes[c], seed);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  PredictionTable merged;
  for (const auto& p : parts) merged.append(p);
  return merged;
}

}  // namespace tagl
