#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tagl/encoding.hpp"
#include "tagl/nn/network.hpp"
#include "tagl/predictor.hpp"
#include "tagl/rng.hpp"
#include "tagl/selfsup/config.hpp"

namespace tagl {

// order[k] is the attribute at position k; position[a] = t(a).
struct Ordering {
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> position;

  static Ordering identity(std::size_t J);
  // Throws InvalidArgument unless `order` is a permutation of 0..J-1.
  static Ordering from_order(std::vector<std::uint32_t> order);
  static Ordering random(std::size_t J, Rng& rng);
  // Random permutation of `first` followed by a random permutation of
  // `last`; together they must cover 0..J-1.
  static Ordering random_split(std::vector<std::uint32_t> first,
                               std::vector<std::uint32_t> last, Rng& rng);

  std::size_t size() const { return order.size(); }
  bool operator==(const Ordering&) const = default;
};

struct MadeMasks {
  std::vector<Matrix> masks;  // one per layer, out x in
  std::vector<std::vector<std::uint32_t>> degrees;  // per hidden layer
};

// Connectivity masks for an ordering. Input columns of attribute a carry
// degree t(a); hidden units draw degrees in [min of previous layer, J-2]
// (every value in the range appears once when the layer is wide enough, the
// rest uniformly); a unit connects to a lower-layer unit of degree d iff its
// own degree is >= d, and output head b connects to a unit iff t(b) exceeds
// the unit's degree. Throws InvalidArgument if J < 2.
MadeMasks build_made_masks(const Ordering& ordering, const std::vector<std::size_t>& hidden,
                           const std::vector<ColumnSpan>& input_spans,
                           const std::vector<ColumnSpan>& output_spans, std::uint64_t seed);

// dep[a][b]: number of mask paths from input group a to output head b.
std::vector<std::vector<double>> dependency_paths(const nn::Network& net,
                                                  const std::vector<ColumnSpan>& input_spans);

// Called with every ordering and masked network the model uses.
using MaskObserver = std::function<void(const Ordering&, const nn::Network&)>;

// Permutation-autoregressive network over encoded attributes.
class MadeModel final : public Predictor {
 public:
  MadeModel() = default;

  std::string name() const override { return "made"; }

  // Multiple imputation with the model's imputation config.
  std::vector<Cell> predict_instance(std::span<const Cell> row,
                                     std::span<const std::uint32_t> masked,
                                     std::uint64_t seed) const override;

  // Per sample: ordering = shuffled observed attributes then shuffled
  // targets; targets are drawn one by one in ordering position (categorical
  // heads sampled, continuous heads take the head value) and fed back as
  // inputs. Samples are aggregated per attribute.
  std::vector<Cell> impute(std::span<const Cell> row, std::span<const std::uint32_t> targets,
                           const ImputationConfig& cfg, std::uint64_t seed) const;

  // The network with masks for `ordering`.
  nn::Network masked_network(const Ordering& ordering, std::uint64_t mask_seed) const;

  std::size_t num_attributes() const { return encoder_.schema().size(); }
  const OneHotEncoder& encoder() const { return encoder_; }
  const nn::Network& network() const { return net_; }
  const TrainConfig& config() const { return config_; }
  const TrainingReport& report() const { return report_; }
  ImputationConfig& imputation() { return imputation_; }
  const ImputationConfig& imputation() const { return imputation_; }
  void set_observer(MaskObserver observer) { observer_ = std::move(observer); }

  // Directory with network.bin and model.json.
  void save(const std::filesystem::path& dir) const;
  static MadeModel load(const std::filesystem::path& dir);

  friend MadeModel train_made(const Dataset& train, const TrainConfig& cfg, std::uint64_t seed,
                              const MaskObserver& observer);

 private:
  nn::Network net_;
  OneHotEncoder encoder_;
  TrainConfig config_;
  TrainingReport report_;
  ImputationConfig imputation_;
  MaskObserver observer_;
};

// Each epoch draws fresh training masks and validation targets; every
// minibatch gets one random ordering and fresh masks. The loss is the summed
// negative log-likelihood (squared error for continuous heads) of every
// observed non-validation cell given its predecessors. Validation cells are
// hidden from the input and scored with orderings that place them last.
// Returns the parameters of the best validation epoch. A single attribute
// is modelled by its bias alone.
MadeModel train_made(const Dataset& train, const TrainConfig& cfg, std::uint64_t seed,
                     const MaskObserver& observer = {});

struct MadeSearchResult {
  MadeModel model;
  std::vector<TrainConfig> tried;
  std::vector<double> validation_loss;
  std::size_t best = 0;
};

MadeSearchResult search_made(const Dataset& train, const TrainConfig& base,
                             const SearchSpace& space, std::size_t draws, std::uint64_t seed);

}  // namespace tagl
