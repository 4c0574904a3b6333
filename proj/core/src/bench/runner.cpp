#include "tagl/bench/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tagl/csv.hpp"
#include "tagl/error.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/predictor.hpp"
#include "tagl/rng.hpp"
#include "tagl/split.hpp"

namespace tagl::bench {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

// Prefixes every line of `table` (a CSV with header) with `prefix`; the
// header gets `header_prefix` and is kept only if `keep_header`.
void prefixed_lines(const std::string& table, const std::string& header_prefix, const std::string& prefix,
                    bool keep_header, std::ostream& out) {
  std::istringstream in(table);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      if (keep_header) out << header_prefix << line << '\n';
      first = false;
      continue;
    }
    out << prefix << line << '\n';
  }
}

}  // namespace

DatasetSeeds derive_dataset_seeds(const BenchConfig& cfg, std::size_t dataset_index) {
  const std::uint64_t ds = derive_seed(cfg.seed, stream::kDataset, dataset_index);
  DatasetSeeds s;
  s.dataset = cfg.datasets.at(dataset_index).name;
  s.split = derive_seed(ds, stream::kSplit);
  for (std::size_t r = 0; r < cfg.test_rates.size(); ++r) s.masks.push_back(derive_seed(ds, stream::kMask, r));
  for (const auto& m : cfg.models) {
    const std::size_t k = model_index(m);
    s.train[m] = derive_seed(ds, stream::kTrain, k);
    s.predict[m] = derive_seed(ds, stream::kPredict, k);
  }
  return s;
}

Dataset load_dataset(const DatasetSpec& spec) {
  Dataset ds = load_csv(spec.path, spec.schema);
  if (spec.kind == DatasetKind::Categorical && !ds.all_categorical()) {
    throw SchemaError(spec.name + ": declared categorical but has continuous attributes");
  }
  if (spec.kind == DatasetKind::Continuous && !ds.all_continuous()) {
    throw SchemaError(spec.name + ": declared continuous but has categorical attributes");
  }
  return ds;
}

MetricReport score(DatasetKind kind, const PredictionTable& preds, const Dataset& test, const MaskPlan& plan,
                   const Dataset& train) {
  if (kind == DatasetKind::Categorical) return wapmc(preds, test, plan);
  std::vector<double> sigma(train.num_attributes());
  for (std::size_t j = 0; j < sigma.size(); ++j) sigma[j] = sample_stddev(train, j);
  return wnrmse(preds, test, plan, sigma);
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  BenchResult result;
  result.config = cfg;
  result.rates = cfg.test_rates;
  // scores[rate][model][dataset]
  std::map<std::string, std::vector<std::vector<std::optional<double>>>> scores;
  for (const auto& m : cfg.models)
    scores[m].assign(cfg.test_rates.size(), std::vector<std::optional<double>>(cfg.datasets.size()));

  ModelSettings settings = cfg.settings;
  settings.made.mask_rate = cfg.train_mask_rate;
  settings.dae.mask_rate = cfg.train_mask_rate;

  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    const DatasetSpec& spec = cfg.datasets[d];
    const DatasetSeeds seeds = derive_dataset_seeds(cfg, d);
    result.seeds.push_back(seeds);
    Dataset train, test;
    std::vector<MaskPlan> plans;
    try {
      auto split = split_train_test(load_dataset(spec), cfg.split_ratio, seeds.split);
      train = std::move(split.train);
      test = std::move(split.test);
      for (std::size_t r = 0; r < cfg.test_rates.size(); ++r)
        plans.push_back(make_mask_plan(test.num_rows(), test.num_attributes(), cfg.test_rates[r], seeds.masks[r]));
    } catch (const std::exception& e) {
      result.failures.push_back({spec.name, "", "load", e.what()});
      continue;
    }
    for (const auto& name : cfg.models) {
      std::optional<TrainedModel> model;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        model.emplace(train_model(name, train, settings, seeds.train.at(name)));
      } catch (const std::exception& e) {
        result.failures.push_back({spec.name, name, "train", e.what()});
        continue;
      }
      result.timings.push_back({spec.name, name, "train", seconds_since(t0)});
      for (std::size_t r = 0; r < cfg.test_rates.size(); ++r) {
        const auto stage = "predict@" + format_real(cfg.test_rates[r]);
        try {
          const auto t1 = std::chrono::steady_clock::now();
          const auto preds =
              predict_chunked(*model, test, plans[r], cfg.chunks, derive_seed(seeds.predict.at(name), r));
          result.timings.push_back({spec.name, name, stage, seconds_since(t1)});
          const auto report = score(spec.kind, preds, test, plans[r], train);
          result.metrics.push_back({spec.name, name, cfg.test_rates[r], report.metric, report.value, report.total});
          scores[name][r][d] = report.value;
        } catch (const std::exception& e) {
          result.failures.push_back({spec.name, name, stage, e.what()});
        }
      }
    }
  }

  for (std::size_t r = 0; r < cfg.test_rates.size(); ++r) {
    std::vector<std::string> models;
    std::vector<std::vector<double>> table;
    for (const auto& m : cfg.models) {
      const auto& row = scores[m][r];
      if (row.empty() || std::any_of(row.begin(), row.end(), [](const auto& v) { return !v; })) continue;
      models.push_back(m);
      std::vector<double> vals;
      for (const auto& v : row) vals.push_back(*v);
      table.push_back(std::move(vals));
    }
    std::vector<std::string> names;
    for (const auto& d : cfg.datasets) names.push_back(d.name);
    if (models.empty() || names.empty()) {
      RankTable empty;
      empty.datasets = names;
      result.ranks.push_back(std::move(empty));
    } else {
      result.ranks.push_back(rank_models(table, models, names));
    }
  }
  return result;
}

void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out) {
  out << "dataset,model,rate,metric,value,M,runtime_s\n";
  for (const auto& r : rows)
    out << r.dataset << ',' << r.model << ',' << format_real(r.rate) << ',' << r.metric << ','
        << format_real(r.value) << ',' << r.count << ",\n";
}

std::vector<std::filesystem::path> emit_reports(const BenchResult& result, const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  std::vector<std::filesystem::path> written;
  auto path = [&](const char* name) {
    written.push_back(outdir / name);
    return written.back();
  };

  {
    auto out = open_out(path("metrics.csv"));
    write_metrics_csv(result.metrics, out);
  }

  std::ostringstream ranks_csv, cd_csv, md;
  ranks_csv << "rate,model,mean_rank";
  for (const auto& d : result.config.datasets) ranks_csv << ",rank_" << d.name;
  ranks_csv << '\n';
  cd_csv << "rate,model,mean_rank,cd\n";
  for (std::size_t r = 0; r < result.ranks.size(); ++r) {
    const RankTable& t = result.ranks[r];
    const std::string rate = format_real(result.rates[r]);
    md << "## Masking rate " << rate << "\n\n";
    if (t.models.empty()) {
      md << "No model was scored on every dataset.\n\n";
      continue;
    }
    std::ostringstream one, cd;
    write_rank_csv(t, one);
    write_cd_data(t, cd);
    prefixed_lines(one.str(), "", rate + ",", false, ranks_csv);
    prefixed_lines(cd.str(), "", rate + ",", false, cd_csv);
    write_rank_markdown(t, md);
    md << '\n';
  }
  {
    auto out = open_out(path("ranks.csv"));
    out << ranks_csv.str();
  }
  {
    auto out = open_out(path("ranks.md"));
    out << "# Mean ranks\n\n" << md.str();
  }
  {
    auto out = open_out(path("cd_data.csv"));
    out << cd_csv.str();
  }
  {
    auto out = open_out(path("timings.csv"));
    out << "dataset,model,stage,seconds\n";
    for (const auto& t : result.timings)
      out << t.dataset << ',' << t.model << ',' << t.stage << ',' << t.seconds << '\n';
  }

  json seeds = json::array();
  for (const auto& s : result.seeds) {
    json predict = json::object();
    for (const auto& [m, base] : s.predict) {
      json per_rate = json::array();
      for (std::size_t r = 0; r < result.rates.size(); ++r) per_rate.push_back(derive_seed(base, r));
      predict[m] = per_rate;
    }
    seeds.push_back({{"dataset", s.dataset}, {"split", s.split}, {"masks", s.masks}, {"train", s.train},
                     {"predict", predict}});
  }
  json timings = json::array();
  for (const auto& t : result.timings)
    timings.push_back({{"dataset", t.dataset}, {"model", t.model}, {"stage", t.stage}, {"seconds", t.seconds}});
  json failures = json::array();
  for (const auto& f : result.failures)
    failures.push_back({{"dataset", f.dataset}, {"model", f.model}, {"stage", f.stage}, {"message", f.message}});
  std::vector<std::string> artifacts;
  for (const auto& p : written) artifacts.push_back(p.filename().string());
  artifacts.push_back("manifest.json");
  json manifest = {{"tool", "tagl"},
                   {"version", TAGL_VERSION_STRING},
                   {"status", result.ok() ? "complete" : "partial"},
                   {"config", json::parse(result.config.to_json())},
                   {"seeds", seeds},
                   {"timings", timings},
                   {"failures", failures},
                   {"artifacts", artifacts}};
  {
    auto out = open_out(path("manifest.json"));
    out << manifest.dump(2) << '\n';
  }
  return written;
}

}  // namespace tagl::bench
