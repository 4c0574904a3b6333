#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tagl/dataset.hpp"

namespace tagl {

struct TrainConfig {
  double mask_rate = 0.2;
  double validation_fraction = 0.25;
  std::size_t max_epochs = 50;
  // Epochs without a validation improvement before stopping.
  std::size_t patience = 5;
  std::size_t batch_size = 64;
  std::vector<std::size_t> hidden{128, 128};
  double learning_rate = 1e-3;
  // Per-hidden-layer drop probability (denoising model only).
  double dropout = 0.2;
  // Autoregressive model: score only the masked cells instead of every
  // attribute given its predecessors.
  bool masked_only = false;
  // Denoising model: reconstruct every observed cell, not just the masked
  // ones.
  bool full_reconstruction = false;
  // Instances scored for the autoregressive validation loss (0 = all).
  std::size_t validation_subsample = 256;

  void validate() const;
  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  bool operator==(const TrainConfig&) const = default;
};

struct ImputationConfig {
  std::size_t samples = 10;

  void validate() const;
};

// Majority vote over categorical samples (ties to the lowest value index),
// arithmetic mean over continuous ones. Missing samples are ignored; all
// missing gives Missing.
Cell aggregate_samples(const std::vector<Cell>& samples);

// Training trace kept with a fitted model.
struct TrainingReport {
  std::vector<double> train_loss;       // per epoch, per scored cell
  std::vector<double> validation_loss;  // per epoch, per validation cell
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
};

// Candidate values for a seeded random hyperparameter search.
struct SearchSpace {
  std::vector<std::size_t> layers;
  std::vector<std::size_t> neurons;
  std::vector<std::size_t> batch;
  std::vector<double> dropout;  // empty: keep the base value

  static SearchSpace made();  // 1-3 layers, 32..2048 neurons, batch 8..128
  static SearchSpace dae();   // 1-3 layers, 32..512 neurons, batch 8..64, dropout 0.1..0.5
  std::size_t grid_size() const;
};

// `draws` distinct grid points chosen uniformly by `seed` (all of them if the
// grid is smaller), applied on top of `base`.
std::vector<TrainConfig> draw_configs(const SearchSpace& space, const TrainConfig& base,
                                      std::size_t draws, std::uint64_t seed);

}  // namespace tagl
