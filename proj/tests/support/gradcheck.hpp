#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "tagl/nn/network.hpp"
#include "tagl/rng.hpp"

namespace tagl::synth {

// Small random network: 1-2 hidden relu layers, mixed softmax and linear
// heads, optional random 0/1 masks on every layer.
struct GradProblem {
  nn::Network net;
  Matrix batch;
  Matrix targets;
  Matrix weight;
  // Active dropout uses a fixed seed, so the multipliers are constants of
  // the loss and finite differences still apply.
  nn::DropoutSpec dropout = nn::DropoutSpec::none();
  std::uint64_t dropout_seed = 0;
};

inline GradProblem random_grad_problem(std::uint64_t seed, bool masked) {
  Rng rng(seed);
  std::uniform_int_distribution<int> small(1, 4);
  std::vector<ColumnSpan> heads;
  std::size_t off = 0;
  const int nheads = small(rng);
  for (int h = 0; h < nheads; ++h) {
    const bool cat = rng() % 3 != 0;
    const std::size_t w = cat ? std::size_t(1 + small(rng)) : 1;
    heads.push_back({std::size_t(h), off, w, cat ? SpanKind::OneHot : SpanKind::Continuous});
    off += w;
  }
  std::vector<std::size_t> hidden(1 + rng() % 2);
  for (auto& h : hidden) h = std::size_t(2 + small(rng));
  const std::size_t in = std::size_t(2 + small(rng));
  GradProblem p;
  p.net = nn::make_network(in, hidden, heads);
  nn::initialize(p.net, seed);
  std::normal_distribution<double> z(0.0, 1.0);
  for (auto& l : p.net.layers) {
    l.bias = Vector::NullaryExpr(l.bias.size(), [&] { return 0.3 * z(rng); });
    if (masked) {
      std::bernoulli_distribution on(0.7);
      l.mask = Matrix::NullaryExpr(l.weight.rows(), l.weight.cols(), [&] { return on(rng) ? 1.0 : 0.0; });
    }
  }
  const Eigen::Index n = 3;
  p.batch = Matrix::NullaryExpr(n, Eigen::Index(in), [&] { return z(rng); });
  p.targets = Matrix::Zero(n, Eigen::Index(off));
  p.weight = Matrix::Zero(n, Eigen::Index(heads.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t h = 0; h < heads.size(); ++h) {
      p.weight(i, Eigen::Index(h)) = rng() % 4 == 0 ? 0.0 : 1.0;
      const auto& s = heads[h];
      if (s.kind == SpanKind::OneHot) {
        p.targets(i, Eigen::Index(s.offset + rng() % s.width)) = 1.0;
      } else {
        p.targets(i, Eigen::Index(s.offset)) = z(rng);
      }
    }
  }
  return p;
}

inline GradProblem with_dropout(GradProblem p, double keep, std::uint64_t seed) {
  p.dropout.keep.assign(p.net.layers.size() - 1, keep);
  p.dropout.active = true;
  p.dropout_seed = seed;
  return p;
}

inline double problem_loss(const GradProblem& p) {
  auto f = nn::forward(p.net, p.batch, p.dropout, p.dropout_seed);
  return nn::head_loss(p.net, f.outputs, p.targets, p.weight).loss;
}

// Largest relative error between analytic and central-difference gradients
// over every unmasked parameter; |a - n| / max(1e-6, |a| + |n|).
inline double max_gradient_error(GradProblem p, double h = 1e-5) {
  auto f = nn::forward(p.net, p.batch, p.dropout, p.dropout_seed);
  auto loss = nn::head_loss(p.net, f.outputs, p.targets, p.weight);
  auto g = nn::backward(p.net, f.cache, loss.grad);
  double worst = 0.0;
  auto rel = [](double a, double n) { return std::abs(a - n) / std::max(1e-6, std::abs(a) + std::abs(n)); };
  for (std::size_t l = 0; l < p.net.layers.size(); ++l) {
    auto& layer = p.net.layers[l];
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      if (layer.mask && layer.mask->data()[i] == 0.0) {
        worst = std::max(worst, std::abs(g.weight[l].data()[i]) > 0.0 ? 1.0 : 0.0);
        continue;
      }
      const double saved = layer.weight.data()[i];
      layer.weight.data()[i] = saved + h;
      const double up = problem_loss(p);
      layer.weight.data()[i] = saved - h;
      const double down = problem_loss(p);
      layer.weight.data()[i] = saved;
      worst = std::max(worst, rel(g.weight[l].data()[i], (up - down) / (2 * h)));
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      const double saved = layer.bias[i];
      layer.bias[i] = saved + h;
      const double up = problem_loss(p);
      layer.bias[i] = saved - h;
      const double down = problem_loss(p);
      layer.bias[i] = saved;
      worst = std::max(worst, rel(g.bias[l][i], (up - down) / (2 * h)));
    }
  }
  return worst;
}

}  // namespace tagl::synth
