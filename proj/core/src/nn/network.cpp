#include "tagl/nn/network.hpp"

#include <cmath>
#include <random>
#include <string>

#include "tagl/error.hpp"
#include "tagl/rng.hpp"

namespace tagl::nn {

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act)
    : weight(Matrix::Zero(Eigen::Index(out), Eigen::Index(in))),
      bias(Vector::Zero(Eigen::Index(out))),
      activation(act) {}

Matrix DenseLayer::effective_weight() const {
  return mask ? Matrix(weight.cwiseProduct(*mask)) : weight;
}

std::size_t Network::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += std::size_t(l.weight.size() + l.bias.size());
  return n;
}

void Network::validate() const {
  if (layers.empty()) throw InvalidArgument("network has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (std::size_t(layer.bias.size()) != layer.out()) {
      throw InvalidArgument("layer " + std::to_string(l) + ": bias width mismatch");
    }
    if (layer.mask && (layer.mask->rows() != layer.weight.rows() ||
                       layer.mask->cols() != layer.weight.cols())) {
      throw InvalidArgument("layer " + std::to_string(l) + ": mask shape mismatch");
    }
    if (l > 0 && layers[l - 1].out() != layer.in()) {
      throw InvalidArgument("layer " + std::to_string(l) + ": input width " +
                            std::to_string(layer.in()) + " does not match previous output " +
                            std::to_string(layers[l - 1].out()));
    }
  }
  std::size_t next = 0;
  for (const auto& h : heads) {
    if (h.offset != next || h.width == 0) throw InvalidArgument("heads must tile the output");
    if (h.kind == SpanKind::Continuous && h.width != 1) {
      throw InvalidArgument("continuous heads have width 1");
    }
    next += h.width;
  }
  if (next != output_width()) throw InvalidArgument("heads do not cover the output");
}

Network make_network(std::size_t input_width, const std::vector<std::size_t>& hidden,
                     std::vector<ColumnSpan> heads) {
  Network net;
  std::size_t out = 0;
  for (const auto& h : heads) out += h.width;
  std::size_t in = input_width;
  for (std::size_t width : hidden) {
    net.layers.emplace_back(in, width, Activation::Relu);
    in = width;
  }
  net.layers.emplace_back(in, out, Activation::Identity);
  net.heads = std::move(heads);
  net.validate();
  return net;
}

void initialize(Network& net, std::uint64_t seed) {
  Rng rng(derive_seed(seed, stream::kInit));
  for (auto& layer : net.layers) {
    const double r = std::sqrt(6.0 / double(layer.in() + layer.out()));
    std::uniform_real_distribution<double> u(-r, r);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = u(rng);
    layer.bias.setZero();
  }
}

void DropoutSpec::validate(std::size_t hidden_layers) const {
  if (!keep.empty() && keep.size() != hidden_layers) {
    throw InvalidArgument("dropout needs one keep probability per hidden layer");
  }
  for (double k : keep)
    if (!(k > 0.0 && k <= 1.0)) throw InvalidArgument("keep probability must lie in (0, 1]");
}

namespace {

void activate(Activation act, Matrix& z) {
  if (act == Activation::Relu) z = z.cwiseMax(0.0);
}

}  // namespace

void apply_heads(const std::vector<ColumnSpan>& heads, Matrix& logits) {
  for (const auto& h : heads) {
    if (h.kind != SpanKind::OneHot) continue;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      auto seg = logits.row(i).segment(Eigen::Index(h.offset), Eigen::Index(h.width));
      const double mx = seg.maxCoeff();
      seg = (seg.array() - mx).exp();
      seg /= seg.sum();
    }
  }
}

ForwardResult forward(const Network& net, const Matrix& batch, const DropoutSpec& dropout,
                      std::uint64_t seed) {
  if (net.layers.empty()) throw InvalidArgument("network has no layers");
  if (std::size_t(batch.cols()) != net.input_width()) {
    throw InvalidArgument("batch width " + std::to_string(batch.cols()) +
                          " does not match network input " + std::to_string(net.input_width()));
  }
  const std::size_t L = net.layers.size();
  const bool drop = dropout.active && !dropout.keep.empty();
  if (drop) dropout.validate(L - 1);
  ForwardResult r;
  ForwardCache& c = r.cache;
  c.inputs.reserve(L);
  c.pre.reserve(L);
  c.weights.reserve(L);
  Rng rng(seed);
  Matrix x = batch;
  for (std::size_t l = 0; l < L; ++l) {
    const DenseLayer& layer = net.layers[l];
    c.weights.push_back(layer.effective_weight());
    Matrix z = x * c.weights.back().transpose();
    z.rowwise() += layer.bias.transpose();
    c.inputs.push_back(std::move(x));
    c.pre.push_back(z);
    activate(layer.activation, z);
    if (l + 1 < L && drop && dropout.keep[l] < 1.0) {
      const double keep = dropout.keep[l];
      std::bernoulli_distribution kept(keep);
      Matrix d(z.rows(), z.cols());
      for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = kept(rng) ? 1.0 / keep : 0.0;
      z = z.cwiseProduct(d);
      c.drop.push_back(std::move(d));
    } else if (l + 1 < L) {
      c.drop.emplace_back();
    }
    x = std::move(z);
  }
  apply_heads(net.heads, x);
  r.outputs = std::move(x);
  return r;
}

LossResult head_loss(const Network& net, const Matrix& outputs, const Matrix& targets,
                     const Matrix& weight) {
  if (targets.rows() != outputs.rows() || targets.cols() != outputs.cols() ||
      weight.rows() != outputs.rows() || std::size_t(weight.cols()) != net.heads.size()) {
    throw InvalidArgument("loss inputs have mismatched shapes");
  }
  LossResult r;
  r.grad = Matrix::Zero(outputs.rows(), outputs.cols());
  for (Eigen::Index i = 0; i < outputs.rows(); ++i) {
    for (std::size_t h = 0; h < net.heads.size(); ++h) {
      const double w = weight(i, Eigen::Index(h));
      if (w == 0.0) continue;
      const auto& head = net.heads[h];
      const auto off = Eigen::Index(head.offset), width = Eigen::Index(head.width);
      if (head.kind == SpanKind::Continuous) {
        const double diff = outputs(i, off) - targets(i, off);
        r.loss += w * diff * diff;
        r.grad(i, off) = 2.0 * w * diff;
      } else {
        double mass = 0.0;
        for (Eigen::Index k = 0; k < width; ++k) {
          const double y = targets(i, off + k);
          if (y != 0.0) r.loss -= w * y * std::log(std::max(outputs(i, off + k), 1e-300));
          mass += y;
        }
        for (Eigen::Index k = 0; k < width; ++k) {
          r.grad(i, off + k) = w * (outputs(i, off + k) * mass - targets(i, off + k));
        }
      }
    }
  }
  return r;
}

Gradients Gradients::zeros_like(const Network& net) {
  Gradients g;
  for (const auto& l : net.layers) {
    g.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Vector::Zero(l.bias.size()));
  }
  return g;
}

double Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& w : weight)
    if (w.size()) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : bias)
    if (b.size()) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& grad_logits) {
  const std::size_t L = net.layers.size();
  if (cache.pre.size() != L) throw InvalidArgument("cache does not match the network");
  Gradients g;
  g.weight.resize(L);
  g.bias.resize(L);
  Matrix dz = grad_logits;
  for (std::size_t l = L; l-- > 0;) {
    const DenseLayer& layer = net.layers[l];
    if (layer.activation == Activation::Relu) {
      dz = dz.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
    }
    g.weight[l] = dz.transpose() * cache.inputs[l];
    if (layer.mask) g.weight[l] = g.weight[l].cwiseProduct(*layer.mask);
    g.bias[l] = dz.colwise().sum().transpose();
    if (l == 0) break;
    Matrix dx = dz * cache.weights[l];
    if (cache.drop[l - 1].size()) dx = dx.cwiseProduct(cache.drop[l - 1]);
    dz = std::move(dx);
  }
  return g;
}

AdamState AdamState::for_network(const Network& net, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  s.m = Gradients::zeros_like(net);
  s.v = Gradients::zeros_like(net);
  return s;
}

namespace {

template <typename M>
void check_finite(const M& g, std::size_t layer, const char* what) {
  if (!g.allFinite()) {
    throw TrainingError("non-finite " + std::string(what) + " gradient in layer " +
                        std::to_string(layer));
  }
}

template <typename M>
void adam_update(M& param, M& m, M& v, const M& g, const AdamState& s, double c1, double c2) {
  m = s.beta1 * m + (1.0 - s.beta1) * g;
  v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
  param.array() -= s.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + s.epsilon);
}

}  // namespace

void adam_step(AdamState& s, Network& net, const Gradients& grads) {
  if (grads.weight.size() != net.layers.size() || s.m.weight.size() != net.layers.size()) {
    throw InvalidArgument("optimizer state does not match the network");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    check_finite(grads.weight[l], l, "weight");
    check_finite(grads.bias[l], l, "bias");
  }
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, double(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, double(s.step));
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    adam_update(net.layers[l].weight, s.m.weight[l], s.v.weight[l], grads.weight[l], s, c1, c2);
    adam_update(net.layers[l].bias, s.m.bias[l], s.v.bias[l], grads.bias[l], s, c1, c2);
    if (!net.layers[l].weight.allFinite() || !net.layers[l].bias.allFinite()) {
      throw TrainingError("parameters became non-finite in layer " + std::to_string(l));
    }
  }
}

}  // namespace tagl::nn
