#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tagl/encoding.hpp"

namespace tagl::nn {

enum class Activation : std::uint8_t { Relu, Identity };

// y = act(x W^T + b), with W replaced by W ⊙ mask when a mask is present.
struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
  std::optional<Matrix> mask;  // 0/1 entries, same shape as weight
  Activation activation = Activation::Identity;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act);

  std::size_t in() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out() const { return static_cast<std::size_t>(weight.rows()); }
  Matrix effective_weight() const;
};

// Layers applied in order; the last layer's output is split into heads.
// A one-hot head is a softmax over its span, a continuous head a linear
// scalar.
struct Network {
  std::vector<DenseLayer> layers;
  std::vector<ColumnSpan> heads;

  std::size_t input_width() const { return layers.empty() ? 0 : layers.front().in(); }
  std::size_t output_width() const { return layers.empty() ? 0 : layers.back().out(); }
  std::size_t num_parameters() const;

  // Throws InvalidArgument unless layer widths chain, masks match their
  // weights and the heads partition the output columns.
  void validate() const;
};

// Relu hidden layers of the given widths and an identity output layer.
Network make_network(std::size_t input_width, const std::vector<std::size_t>& hidden,
                     std::vector<ColumnSpan> heads);

// Uniform in ±sqrt(6 / (fan_in + fan_out)); biases zero.
void initialize(Network& net, std::uint64_t seed);

// Keep probability per hidden layer (one entry per layer except the last).
// Inactive dropout, or an empty keep list, is the identity.
struct DropoutSpec {
  std::vector<double> keep;
  bool active = false;

  static DropoutSpec none() { return {}; }
  void validate(std::size_t hidden_layers) const;
};

struct ForwardCache {
  std::vector<Matrix> inputs;      // input to each layer
  std::vector<Matrix> pre;         // pre-activation of each layer
  std::vector<Matrix> drop;        // dropout multipliers per hidden layer (empty if off)
  std::vector<Matrix> weights;     // effective weights used
};

struct ForwardResult {
  // Head outputs: probabilities on one-hot spans, values on continuous ones.
  Matrix outputs;
  ForwardCache cache;
};

// Batch rows are instances. Dropout multipliers come from Rng(seed) in
// row-major order over each hidden layer. Throws InvalidArgument on a width
// mismatch.
ForwardResult forward(const Network& net, const Matrix& batch, const DropoutSpec& dropout,
                      std::uint64_t seed);

// Softmax over each one-hot head of a logit matrix, in place.
void apply_heads(const std::vector<ColumnSpan>& heads, Matrix& logits);

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits, same shape as outputs
};

// Sum over rows i and heads h of weight(i, h) * loss_h, where loss_h is the
// cross-entropy -sum_k y_k log p_k for one-hot heads and (yhat - y)^2 for
// continuous heads. `targets` is encoded like the output; `weight` has one
// column per head (entry 0 skips the cell).
LossResult head_loss(const Network& net, const Matrix& outputs, const Matrix& targets,
                     const Matrix& weight);

struct Gradients {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;

  static Gradients zeros_like(const Network& net);
  double max_abs() const;
};

// Exact parameter gradients given d loss / d logits of the final layer.
// Masked weight positions get exactly zero.
Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& grad_logits);

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  Gradients m;
  Gradients v;

  static AdamState for_network(const Network& net, double learning_rate = 1e-3);
};

// Bias-corrected adaptive-moment update. Throws TrainingError (naming the
// layer) if a gradient entry is not finite.
void adam_step(AdamState& state, Network& net, const Gradients& grads);

// Flat little-endian container: "TAGLNN01", u64 header length, a JSON
// header with shapes, activations and heads, then per layer the weights
// (row-major doubles), the biases and, for masked layers, the mask packed
// as a bitset.
void save_network(const Network& net, std::ostream& out);
void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(std::istream& in);
Network load_network(const std::filesystem::path& path);

}  // namespace tagl::nn
