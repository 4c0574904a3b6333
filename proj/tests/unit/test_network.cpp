#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gradcheck.hpp"
#include "tagl/error.hpp"
#include "tagl/nn/network.hpp"

using namespace tagl;
using namespace tagl::nn;

namespace {

std::vector<ColumnSpan> linear_heads(std::size_t n) {
  std::vector<ColumnSpan> h;
  for (std::size_t k = 0; k < n; ++k) h.push_back({k, k, 1, SpanKind::Continuous});
  return h;
}

}  // namespace

TEST(Forward, IdentityLayerPassesInputThrough) {
  Network net = make_network(3, {}, linear_heads(3));
  net.layers[0].weight = Matrix::Identity(3, 3);
  Matrix x(2, 3);
  x << 1, -2, 3, 0.5, 0, -1;
  EXPECT_EQ(forward(net, x, DropoutSpec::none(), 0).outputs, x);
}

TEST(Forward, SoftmaxOfEqualLogitsIsUniform) {
  Network net = make_network(2, {}, {{0, 0, 3, SpanKind::OneHot}});
  auto out = forward(net, Matrix::Zero(1, 2), DropoutSpec::none(), 0).outputs;
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(out(0, k), 1.0 / 3.0, 1e-15);
}

TEST(Forward, ZeroMaskGivesBiasOnlyOutput) {
  Network net = make_network(4, {5}, {{0, 0, 2, SpanKind::OneHot}, {1, 2, 1, SpanKind::Continuous}});
  initialize(net, 1);
  net.layers[1].bias << 0.3, -0.2, 1.5;
  net.layers[0].mask = Matrix::Zero(5, 4);
  Rng rng(2);
  std::normal_distribution<double> z;
  Matrix a = Matrix::NullaryExpr(3, 4, [&] { return z(rng); });
  Matrix b = Matrix::NullaryExpr(3, 4, [&] { return 10 * z(rng); });
  auto fa = forward(net, a, DropoutSpec::none(), 0).outputs;
  auto fb = forward(net, b, DropoutSpec::none(), 0).outputs;
  EXPECT_EQ(fa, fb);
}

TEST(Forward, WidthMismatchThrows) {
  Network net = make_network(3, {4}, linear_heads(2));
  EXPECT_THROW(forward(net, Matrix::Zero(1, 5), DropoutSpec::none(), 0), InvalidArgument);
  net.layers[1].weight = Matrix::Zero(2, 7);
  EXPECT_THROW(net.validate(), InvalidArgument);
}

TEST(Forward, SoftmaxHeadsSumToOne) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto p = synth::random_grad_problem(s, false);
    for (auto& l : p.net.layers) l.weight *= 30.0;  // push logits far apart
    auto out = forward(p.net, p.batch, DropoutSpec::none(), 0).outputs;
    for (const auto& h : p.net.heads) {
      if (h.kind != SpanKind::OneHot) continue;
      for (Eigen::Index i = 0; i < out.rows(); ++i)
        EXPECT_NEAR(out.row(i).segment(Eigen::Index(h.offset), Eigen::Index(h.width)).sum(), 1.0, 1e-12);
    }
  }
}

TEST(Forward, KeepOneDropoutIsIdentity) {
  auto p = synth::random_grad_problem(3, false);
  DropoutSpec keep_all{std::vector<double>(p.net.layers.size() - 1, 1.0), true};
  EXPECT_EQ(forward(p.net, p.batch, keep_all, 9).outputs,
            forward(p.net, p.batch, DropoutSpec::none(), 9).outputs);
}

TEST(Forward, DropoutIsSeededAndScaled) {
  Network net = make_network(50, {400}, linear_heads(1));
  initialize(net, 4);
  Matrix x = Matrix::Ones(1, 50);
  DropoutSpec d{{0.5}, true};
  auto a = forward(net, x, d, 1);
  EXPECT_EQ(a.outputs, forward(net, x, d, 1).outputs);
  EXPECT_NE(a.outputs, forward(net, x, d, 2).outputs);
  const Matrix& mask = a.cache.drop[0];
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    EXPECT_TRUE(mask.data()[i] == 0.0 || mask.data()[i] == 2.0);
  EXPECT_NEAR(mask.mean(), 1.0, 0.15);
  EXPECT_THROW(forward(net, x, DropoutSpec{{1.5}, true}, 1), InvalidArgument);
}

TEST(Backward, MatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    EXPECT_LT(synth::max_gradient_error(synth::random_grad_problem(s, s % 2 == 1)), 1e-4) << s;
  }
}

TEST(Backward, MatchesFiniteDifferencesThroughDropout) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto p = synth::with_dropout(synth::random_grad_problem(100 + s, s % 2 == 0), 0.7, s);
    EXPECT_LT(synth::max_gradient_error(p), 1e-4) << s;
  }
}

TEST(Backward, ZeroLossGradientGivesZeroParameterGradient) {
  auto p = synth::random_grad_problem(5, true);
  auto f = forward(p.net, p.batch, DropoutSpec::none(), 0);
  auto g = backward(p.net, f.cache, Matrix::Zero(f.outputs.rows(), f.outputs.cols()));
  EXPECT_EQ(g.max_abs(), 0.0);
}

TEST(Backward, MaskedPositionsGetExactlyZero) {
  auto p = synth::random_grad_problem(6, true);
  auto f = forward(p.net, p.batch, DropoutSpec::none(), 0);
  auto loss = head_loss(p.net, f.outputs, p.targets, p.weight);
  auto g = backward(p.net, f.cache, loss.grad);
  for (std::size_t l = 0; l < p.net.layers.size(); ++l)
    for (Eigen::Index i = 0; i < g.weight[l].size(); ++i)
      if (p.net.layers[l].mask->data()[i] == 0.0) EXPECT_EQ(g.weight[l].data()[i], 0.0);
}

TEST(Backward, DropoutGradientMatchesFixedMaskDifferences) {
  // With a fixed seed the dropout pattern is fixed, so the loss is a smooth
  // function of the parameters and central differences apply.
  auto p = synth::random_grad_problem(7, false);
  DropoutSpec d{std::vector<double>(p.net.layers.size() - 1, 0.6), true};
  auto loss_at = [&](const Network& net) {
    auto f = forward(net, p.batch, d, 42);
    return head_loss(net, f.outputs, p.targets, p.weight).loss;
  };
  auto f = forward(p.net, p.batch, d, 42);
  auto g = backward(p.net, f.cache, head_loss(p.net, f.outputs, p.targets, p.weight).grad);
  Network net = p.net;
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < net.layers[0].weight.size(); ++i) {
    const double saved = net.layers[0].weight.data()[i];
    net.layers[0].weight.data()[i] = saved + h;
    const double up = loss_at(net);
    net.layers[0].weight.data()[i] = saved - h;
    const double down = loss_at(net);
    net.layers[0].weight.data()[i] = saved;
    const double num = (up - down) / (2 * h), a = g.weight[0].data()[i];
    EXPECT_LT(std::abs(a - num) / std::max(1e-6, std::abs(a) + std::abs(num)), 1e-4);
  }
}

TEST(Adam, ZeroGradientLeavesParameters) {
  auto p = synth::random_grad_problem(8, false);
  Network before = p.net;
  auto state = AdamState::for_network(p.net);
  for (int k = 0; k < 5; ++k) adam_step(state, p.net, Gradients::zeros_like(p.net));
  for (std::size_t l = 0; l < before.layers.size(); ++l) {
    EXPECT_EQ(before.layers[l].weight, p.net.layers[l].weight);
    EXPECT_EQ(before.layers[l].bias, p.net.layers[l].bias);
  }
}

TEST(Adam, ConstantGradientMovesOpposite) {
  Network net = make_network(2, {}, linear_heads(2));
  Network start = net;
  auto state = AdamState::for_network(net, 0.01);
  Gradients g = Gradients::zeros_like(net);
  g.weight[0] << 1.0, -2.0, 0.5, -0.1;
  for (int k = 0; k < 100; ++k) adam_step(state, net, g);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double moved = net.layers[0].weight.data()[i] - start.layers[0].weight.data()[i];
    EXPECT_LT(moved * g.weight[0].data()[i], 0.0);
  }
}

TEST(Adam, RejectsNonFiniteGradients) {
  Network net = make_network(2, {}, linear_heads(1));
  auto state = AdamState::for_network(net);
  Gradients g = Gradients::zeros_like(net);
  g.bias[0][0] = std::nan("");
  EXPECT_THROW(adam_step(state, net, g), TrainingError);
}

namespace {

// Two Gaussian blobs separated along the first axis; returns the loss trace.
std::vector<double> toy_training(std::uint64_t seed, Network* out = nullptr) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 0.3);
  Matrix x(64, 2), y = Matrix::Zero(64, 2);
  for (int i = 0; i < 64; ++i) {
    const int c = i % 2;
    x(i, 0) = (c ? 1.0 : -1.0) + z(rng);
    x(i, 1) = z(rng);
    y(i, c) = 1.0;
  }
  Network net = make_network(2, {8}, {{0, 0, 2, SpanKind::OneHot}});
  initialize(net, seed);
  auto state = AdamState::for_network(net, 0.01);
  std::vector<double> trace;
  const Matrix w = Matrix::Ones(64, 1);
  for (int step = 0; step < 50; ++step) {
    auto f = forward(net, x, DropoutSpec::none(), 0);
    auto l = head_loss(net, f.outputs, y, w);
    trace.push_back(l.loss);
    adam_step(state, net, backward(net, f.cache, l.grad));
  }
  if (out) *out = net;
  return trace;
}

}  // namespace

TEST(Training, LossDecreasesOnSeparableToy) {
  auto trace = toy_training(3);
  EXPECT_LT(trace.back(), 0.5 * trace.front());
}

TEST(Training, IdenticalRunsAreBitwiseEqual) {
  Network a, b;
  toy_training(4, &a);
  toy_training(4, &b);
  for (std::size_t l = 0; l < a.layers.size(); ++l) EXPECT_EQ(a.layers[l].weight, b.layers[l].weight);
}

TEST(Serialization, RoundTripWithMasks) {
  auto p = synth::random_grad_problem(9, true);
  p.net.layers.back().mask.reset();
  std::stringstream s;
  save_network(p.net, s);
  Network back = load_network(s);
  ASSERT_EQ(back.layers.size(), p.net.layers.size());
  EXPECT_EQ(back.heads, p.net.heads);
  for (std::size_t l = 0; l < back.layers.size(); ++l) {
    EXPECT_EQ(back.layers[l].weight, p.net.layers[l].weight);
    EXPECT_EQ(back.layers[l].bias, p.net.layers[l].bias);
    EXPECT_EQ(back.layers[l].mask.has_value(), p.net.layers[l].mask.has_value());
    if (back.layers[l].mask) EXPECT_EQ(*back.layers[l].mask, *p.net.layers[l].mask);
  }
  std::stringstream junk("not a network");
  EXPECT_THROW(load_network(junk), StructuralError);
}
