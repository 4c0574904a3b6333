#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tagl/bench/config.hpp"
#include "tagl/bench/model_store.hpp"
#include "tagl/metrics.hpp"

namespace tagl::bench {

struct MetricRow {
  std::string dataset;
  std::string model;
  double rate = 0.0;
  std::string metric;  // wapmc or wnrmse
  double value = 0.0;
  std::size_t count = 0;  // M: scored cells
};

struct StageTiming {
  std::string dataset;
  std::string model;
  std::string stage;  // "train" or "predict@<rate>"
  double seconds = 0.0;
};

struct DatasetSeeds {
  std::string dataset;
  std::uint64_t split = 0;
  std::vector<std::uint64_t> masks;                  // per test rate
  std::map<std::string, std::uint64_t> train;        // per model
  std::map<std::string, std::uint64_t> predict;      // per model, indexed by rate below
};

struct Failure {
  std::string dataset;
  std::string model;  // empty when the dataset itself failed
  std::string stage;
  std::string message;
};

struct BenchResult {
  BenchConfig config;
  std::vector<MetricRow> metrics;
  std::vector<StageTiming> timings;
  std::vector<DatasetSeeds> seeds;
  std::vector<Failure> failures;
  std::vector<double> rates;
  std::vector<RankTable> ranks;  // per rate; only models scored on every dataset

  bool ok() const { return failures.empty(); }
};

// Everything the harness derives from the master seed for one dataset.
// Predictions for model m at rate index r use derive_seed(predict[m], r).
DatasetSeeds derive_dataset_seeds(const BenchConfig& cfg, std::size_t dataset_index);

// Loads and checks a dataset against its declared kind.
Dataset load_dataset(const DatasetSpec& spec);

// Scores one prediction table with the metric matching `kind`.
MetricReport score(DatasetKind kind, const PredictionTable& preds, const Dataset& test,
                   const MaskPlan& plan, const Dataset& train);

// Runs every (dataset, model, rate) cell. Stage failures are recorded and
// the run continues with the remaining cells.
BenchResult run_benchmark(const BenchConfig& cfg);

// Writes metrics.csv, ranks.csv, ranks.md, cd_data.csv, timings.csv and
// manifest.json under `outdir`; returns the written paths. metrics.csv holds
// no timing data so that identical runs produce identical bytes; its
// runtime_s column is left empty and timings.csv carries the wall clock.
std::vector<std::filesystem::path> emit_reports(const BenchResult& result,
                                                const std::filesystem::path& outdir);

void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out);

}  // namespace tagl::bench
