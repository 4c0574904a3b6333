#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tagl/encoding.hpp"
#include "tagl/nn/network.hpp"
#include "tagl/predictor.hpp"
#include "tagl/selfsup/config.hpp"

namespace tagl {

// Denoising autoencoder with dropout on every hidden layer; dropout stays on
// at prediction time to produce multiple imputations.
class DaeModel final : public Predictor {
 public:
  DaeModel() = default;

  std::string name() const override { return "dae"; }

  std::vector<Cell> predict_instance(std::span<const Cell> row,
                                     std::span<const std::uint32_t> masked,
                                     std::uint64_t seed) const override;

  // Targets are zero-encoded; each sample is one forward pass with fresh
  // dropout. Categorical samples take the head's arg-max and are combined
  // by majority vote; continuous samples are averaged.
  std::vector<Cell> impute(std::span<const Cell> row, std::span<const std::uint32_t> targets,
                           const ImputationConfig& cfg, std::uint64_t seed) const;

  const OneHotEncoder& encoder() const { return encoder_; }
  const nn::Network& network() const { return net_; }
  const nn::DropoutSpec& dropout() const { return dropout_; }
  const TrainConfig& config() const { return config_; }
  const TrainingReport& report() const { return report_; }
  ImputationConfig& imputation() { return imputation_; }
  const ImputationConfig& imputation() const { return imputation_; }

  void save(const std::filesystem::path& dir) const;
  static DaeModel load(const std::filesystem::path& dir);

  friend DaeModel train_dae(const Dataset& train, const TrainConfig& cfg, std::uint64_t seed);

 private:
  nn::Network net_;
  OneHotEncoder encoder_;
  nn::DropoutSpec dropout_;
  TrainConfig config_;
  TrainingReport report_;
  ImputationConfig imputation_;
};

// Each epoch masks a fresh `mask_rate` of every instance's attributes
// (zeroed in the input) and flags validation targets among them. The loss
// covers the masked, observed, non-validation cells (every observed
// non-validation cell with full_reconstruction). Validation loss is computed
// without dropout; the best epoch's parameters are returned.
DaeModel train_dae(const Dataset& train, const TrainConfig& cfg, std::uint64_t seed);

struct DaeSearchResult {
  DaeModel model;
  std::vector<TrainConfig> tried;
  std::vector<double> validation_loss;
  std::size_t best = 0;
};

DaeSearchResult search_dae(const Dataset& train, const TrainConfig& base,
                           const SearchSpace& space, std::size_t draws, std::uint64_t seed);

}  // namespace tagl
