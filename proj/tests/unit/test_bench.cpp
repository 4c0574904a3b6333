#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthetic.hpp"
#include "tagl/bench/runner.hpp"
#include "tagl/csv.hpp"
#include "tagl/error.hpp"

using namespace tagl;
using namespace tagl::bench;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const std::string& s) { return std::size_t(std::count(s.begin(), s.end(), '\n')); }

BenchConfig small_bench(const TempDir& dir) {
  write_csv(synth::coupled_pairs(400, 3, 3, 0.95, 1), dir.path / "pairs.csv");
  write_csv(synth::normal_data(300, 6, 2), dir.path / "normal.csv");
  BenchConfig c;
  c.datasets = {{"pairs", dir.path / "pairs.csv", {}, DatasetKind::Categorical},
                {"normal", dir.path / "normal.csv", {}, DatasetKind::Continuous}};
  c.models = {"most_freq", "chordal"};
  c.seed = 7;
  c.settings.samples = 3;
  return c;
}

}  // namespace

TEST(BenchConfig, JsonRoundTrip) {
  BenchConfig c;
  c.datasets = {{"d", "/data/d.csv", std::filesystem::path("/data/d.json"), DatasetKind::Continuous}};
  c.models = {"median", "dae"};
  c.seed = 99;
  c.chunks = 4;
  c.settings.dae.hidden = {16};
  c.output = "/tmp/out";
  auto back = BenchConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(BenchConfig, RejectsUnknownKeysAndVersions) {
  EXPECT_THROW(BenchConfig::from_json(R"({"models":[]})"), SchemaError);
  EXPECT_THROW(BenchConfig::from_json(R"({"schema_version":2})"), SchemaError);
  EXPECT_THROW(BenchConfig::from_json(R"({"schema_version":1,"colour":"red"})"), SchemaError);
  EXPECT_THROW(BenchConfig::from_json(R"({"schema_version":1,"chordal":{"beta":1}})"), SchemaError);
  EXPECT_THROW(BenchConfig::from_json(R"({"schema_version":1,"models":["gain"]})"), SchemaError);
  EXPECT_THROW(BenchConfig::from_json(R"({"schema_version":1,"chunks":0})"), SchemaError);
  auto c = BenchConfig::from_json(R"({"schema_version":1,"datasets":[{"path":"x/y.csv"}]})", "/base");
  EXPECT_EQ(c.datasets[0].path, std::filesystem::path("/base/x/y.csv"));
  EXPECT_EQ(c.datasets[0].name, "y");
}

TEST(Bench, CountsRowsAndRankTables) {
  TempDir dir("tagl_bench_counts");
  auto c = small_bench(dir);
  c.datasets.resize(1);
  auto r = run_benchmark(c);
  ASSERT_TRUE(r.ok()) << r.failures.front().message;
  EXPECT_EQ(r.metrics.size(), 2u * 5u);
  ASSERT_EQ(r.ranks.size(), 5u);
  for (const auto& t : r.ranks) EXPECT_EQ(t.datasets.size(), 1u);
  emit_reports(r, dir.path / "out");
  EXPECT_EQ(lines(slurp(dir.path / "out" / "metrics.csv")), 1u + 10u);
}

TEST(Bench, MetricMatchesDatasetKind) {
  TempDir dir("tagl_bench_kind");
  auto r = run_benchmark(small_bench(dir));
  ASSERT_TRUE(r.ok()) << r.failures.front().message;
  for (const auto& m : r.metrics) EXPECT_EQ(m.metric, m.dataset == "pairs" ? "wapmc" : "wnrmse");
}

TEST(Bench, ChordalBeatsMostFrequentOnDependentData) {
  TempDir dir("tagl_bench_dir");
  auto c = small_bench(dir);
  c.datasets.resize(1);
  c.test_rates = {0.2};
  auto r = run_benchmark(c);
  ASSERT_EQ(r.metrics.size(), 2u);
  EXPECT_LT(r.metrics[1].value, r.metrics[0].value);
  EXPECT_DOUBLE_EQ(r.ranks[0].mean_ranks[1], 1.0);
}

TEST(Bench, RerunIsByteIdentical) {
  TempDir dir("tagl_bench_det");
  auto c = small_bench(dir);
  c.models = {"median", "chordal", "dae"};
  c.settings.dae.hidden = {16};
  c.settings.dae.max_epochs = 3;
  c.chunks = 1;
  auto a = run_benchmark(c);
  c.chunks = 8;
  auto b = run_benchmark(c);
  ASSERT_TRUE(a.ok()) << a.failures.front().message;
  emit_reports(a, dir.path / "a");
  emit_reports(b, dir.path / "b");
  EXPECT_EQ(slurp(dir.path / "a" / "metrics.csv"), slurp(dir.path / "b" / "metrics.csv"));
  EXPECT_EQ(slurp(dir.path / "a" / "ranks.csv"), slurp(dir.path / "b" / "ranks.csv"));
}

TEST(Bench, EmptyModelListWritesHeaders) {
  TempDir dir("tagl_bench_empty");
  auto c = small_bench(dir);
  c.models.clear();
  auto r = run_benchmark(c);
  auto files = emit_reports(r, dir.path / "out");
  EXPECT_EQ(slurp(dir.path / "out" / "metrics.csv"), "dataset,model,rate,metric,value,M,runtime_s\n");
  EXPECT_EQ(lines(slurp(dir.path / "out" / "cd_data.csv")), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir.path / "out" / "manifest.json"));
}

TEST(Bench, LoadFailureIsRecordedNotFatal) {
  TempDir dir("tagl_bench_fail");
  auto c = small_bench(dir);
  c.datasets.push_back({"ghost", dir.path / "missing.csv", {}, DatasetKind::Categorical});
  auto r = run_benchmark(c);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].dataset, "ghost");
  EXPECT_EQ(r.metrics.size(), 2u * 2u * 5u);
  emit_reports(r, dir.path / "out");
  EXPECT_NE(slurp(dir.path / "out" / "manifest.json").find("\"partial\""), std::string::npos);
}

TEST(Bench, DeclaredKindIsChecked) {
  TempDir dir("tagl_bench_decl");
  write_csv(synth::normal_data(20, 2, 2), dir.path / "n.csv");
  EXPECT_THROW(load_dataset({"n", dir.path / "n.csv", {}, DatasetKind::Categorical}), SchemaError);
}

TEST(ModelStore, DiscretizedPredictionsAreBinMedians) {
  auto train = synth::normal_data(500, 3, 5);
  ModelSettings s;
  auto m = train_model("chordal", train, s, 1);
  ASSERT_TRUE(m.discretizer().has_value());
  std::vector<Cell> row(train.row(0).begin(), train.row(0).end());
  row[1] = Cell::missing();
  const std::uint32_t tgt[] = {1};
  const double v = m.predict_instance(row, tgt, 0)[0].value();
  const auto* bins = m.discretizer()->bins_for(1);
  EXPECT_NE(std::find(bins->medians.begin(), bins->medians.end(), v), bins->medians.end());
}

TEST(ModelStore, SaveLoadRoundTripEveryModel) {
  TempDir dir("tagl_store");
  Dataset train({synth::categorical("a", 0, 3), synth::continuous("x", 1), synth::categorical("b", 2, 2),
                 synth::continuous("y", 3), synth::categorical("c", 4, 2), synth::continuous("z", 5)});
  Rng rng(1);
  std::normal_distribution<double> z(0, 1);
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t a = std::uint32_t(i % 3);
    Cell row[] = {Cell::categorical(a), Cell::continuous(a + 0.2 * z(rng)), Cell::categorical(a % 2),
                  Cell::continuous(z(rng)), i % 13 ? Cell::categorical(std::uint32_t(i % 2)) : Cell::missing(),
                  Cell::continuous(z(rng))};
    train.add_row(row);
  }
  ModelSettings s;
  s.samples = 2;
  s.made.hidden = s.dae.hidden = {8};
  s.made.max_epochs = s.dae.max_epochs = 2;
  auto plan = make_mask_plan(train.num_rows(), 6, 0.4, 3);
  for (const auto& name : known_models()) {
    auto m = train_model(name, train, s, 4);
    m.save(dir.path / name);
    auto back = TrainedModel::load(dir.path / name);
    EXPECT_EQ(back.name(), name);
    EXPECT_EQ(predict_chunked(back, train, plan, 2, 5), predict_chunked(m, train, plan, 1, 5)) << name;
  }
}
