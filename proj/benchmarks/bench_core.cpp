#include <benchmark/benchmark.h>

#include "chordal_oracle.hpp"
#include "synthetic.hpp"
#include "tagl/chordal/model.hpp"
#include "tagl/chordal/structure.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/nn/network.hpp"
#include "tagl/pl/loglinear.hpp"
#include "tagl/predictor.hpp"
#include "tagl/selfsup/dae.hpp"
#include "tagl/selfsup/made.hpp"

using namespace tagl;

namespace {

void BM_MaskPlan(benchmark::State& state) {
  const auto J = std::size_t(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(make_mask_plan(10000, J, 0.4, seed++));
}
BENCHMARK(BM_MaskPlan)->Arg(7)->Arg(46);

void BM_LearnStructure(benchmark::State& state) {
  const auto data = synth::coupled_pairs(5000, std::size_t(state.range(0)), 4, 0.8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(learn_structure(data, ScoreConfig{}));
}
BENCHMARK(BM_LearnStructure)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_JunctionTreePosterior(benchmark::State& state) {
  const auto data = synth::coupled_pairs(5000, 6, 4, 0.8, 2);
  const auto model = fit_parameters(learn_structure(data, ScoreConfig{}), data);
  std::vector<std::uint32_t> masked{1, 3, 5, 7};
  std::vector<Cell> row(data.row(0).begin(), data.row(0).end());
  for (auto m : masked) row[m] = Cell::missing();
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_instance(row, masked, 0));
}
BENCHMARK(BM_JunctionTreePosterior);

void BM_ForwardBackward(benchmark::State& state) {
  const auto width = std::size_t(state.range(0));
  std::vector<ColumnSpan> heads;
  for (std::size_t h = 0; h < 20; ++h) heads.push_back({h, h * 5, 5, SpanKind::OneHot});
  auto net = nn::make_network(100, {width, width}, heads);
  nn::initialize(net, 1);
  Matrix x = Matrix::Random(64, 100), y = Matrix::Zero(64, 100), w = Matrix::Ones(64, 20);
  for (Eigen::Index i = 0; i < 64; ++i)
    for (Eigen::Index h = 0; h < 20; ++h) y(i, h * 5 + (i + h) % 5) = 1.0;
  for (auto _ : state) {
    auto f = nn::forward(net, x, nn::DropoutSpec::none(), 0);
    auto l = nn::head_loss(net, f.outputs, y, w);
    benchmark::DoNotOptimize(nn::backward(net, f.cache, l.grad));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(256);

void BM_MadeMasks(benchmark::State& state) {
  const auto J = std::size_t(state.range(0));
  std::vector<ColumnSpan> spans;
  for (std::size_t j = 0; j < J; ++j) spans.push_back({j, j * 4, 4, SpanKind::OneHot});
  Rng rng(1);
  for (auto _ : state) {
    auto t = Ordering::random(J, rng);
    benchmark::DoNotOptimize(build_made_masks(t, {256, 256}, spans, spans, rng()));
  }
}
BENCHMARK(BM_MadeMasks)->Arg(8)->Arg(46);

void BM_DaeImpute(benchmark::State& state) {
  const auto data = synth::coupled_pairs(1000, 4, 3, 0.9, 3);
  TrainConfig cfg;
  cfg.hidden = {64, 64};
  cfg.max_epochs = 2;
  const auto model = train_dae(data, cfg, 1);
  const auto plan = make_mask_plan(data.num_rows(), data.num_attributes(), 0.2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(predict_chunked(model, data, plan, 1, 0));
}
BENCHMARK(BM_DaeImpute)->Unit(benchmark::kMillisecond);

void BM_PseudoLikelihoodFit(benchmark::State& state) {
  const auto data = pl::sample(pl::LogLinearModel{{0.5, -0.5, 0.2, 0.8, -0.3, 0.1}}, 10000, 1);
  for (auto _ : state) benchmark::DoNotOptimize(pl::fit_pseudo_likelihood(data));
}
BENCHMARK(BM_PseudoLikelihoodFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
