// tagl command-line front end.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "tagl/bench/runner.hpp"
#include "tagl/csv.hpp"
#include "tagl/discretizer.hpp"
#include "tagl/error.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/pl/loglinear.hpp"
#include "tagl/predictor.hpp"
#include "tagl/split.hpp"

namespace fs = std::filesystem;
using namespace tagl;

namespace {

struct Common {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> chunks;
  fs::path out;
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  return in;
}

Dataset load(const fs::path& csv, const std::optional<fs::path>& schema) { return load_csv(csv, schema); }

bench::BenchConfig base_config(const Common& c) {
  bench::BenchConfig cfg = c.config ? bench::BenchConfig::load(*c.config) : bench::BenchConfig{};
  if (c.seed) cfg.seed = *c.seed;
  if (c.chunks) cfg.chunks = *c.chunks;
  return cfg;
}

void add_common(CLI::App* app, Common& c, bool out_required = true) {
  app->add_option("--config", c.config, "JSON benchmark config (schema_version 1)")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--chunks", c.chunks, "prediction chunks")->check(CLI::PositiveNumber);
  auto* o = app->add_option("--out", c.out, "output path");
  if (out_required) o->required();
}

void print_summary(const Dataset& ds) {
  std::size_t missing = 0;
  for (std::size_t i = 0; i < ds.num_rows(); ++i)
    for (std::size_t j = 0; j < ds.num_attributes(); ++j) missing += ds.at(i, j).is_missing();
  std::cout << ds.num_rows() << " rows, " << ds.num_attributes() << " attributes, " << missing
            << " missing cells\n";
  for (const auto& a : ds.schema()) {
    std::cout << "  " << a.name << '\t' << to_string(a.kind);
    if (a.is_categorical()) std::cout << '\t' << a.values.size() << " values";
    std::cout << '\n';
  }
}

// metrics.csv -> per-rate score tables, models and datasets in first-seen order.
std::vector<std::pair<std::string, RankTable>> ranks_from_metrics(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line.rfind("dataset,model,rate,metric,value", 0) != 0) throw SchemaError("not a metrics.csv file");
  std::vector<std::string> rates, models, datasets;
  std::map<std::string, std::map<std::string, std::map<std::string, double>>> v;  // rate, model, dataset
  auto remember = [](std::vector<std::string>& list, const std::string& s) {
    if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(s);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() < 5) throw SchemaError("malformed metrics row: " + line);
    remember(datasets, f[0]);
    remember(models, f[1]);
    remember(rates, f[2]);
    v[f[2]][f[1]][f[0]] = std::stod(f[4]);
  }
  std::vector<std::pair<std::string, RankTable>> out;
  for (const auto& r : rates) {
    std::vector<std::string> ms;
    std::vector<std::vector<double>> scores;
    for (const auto& m : models) {
      std::vector<double> row;
      for (const auto& d : datasets) {
        auto it = v[r][m].find(d);
        if (it == v[r][m].end()) break;
        row.push_back(it->second);
      }
      if (row.size() != datasets.size()) continue;
      ms.push_back(m);
      scores.push_back(std::move(row));
    }
    if (!ms.empty()) out.emplace_back(r, rank_models(scores, ms, datasets));
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> v;
  std::stringstream ss(s);
  for (std::string x; std::getline(ss, x, ',');) v.push_back(std::stoull(x));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target-agnostic tabular imputation toolkit"};
  app.require_subcommand(1);

  // ingest
  Common ingest_c;
  fs::path ingest_in;
  std::optional<fs::path> ingest_schema;
  auto* ingest = app.add_subcommand("ingest", "Parse a CSV, print its schema, write data.csv + schema.json");
  ingest->add_option("input", ingest_in, "CSV file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--schema", ingest_schema, "schema sidecar JSON")->check(CLI::ExistingFile);
  add_common(ingest, ingest_c);

  // split
  Common split_c;
  fs::path split_in;
  std::optional<fs::path> split_schema;
  double split_ratio = 0.8;
  auto* split = app.add_subcommand("split", "Shuffled train/test split");
  split->add_option("input", split_in, "CSV file")->required()->check(CLI::ExistingFile);
  split->add_option("--schema", split_schema)->check(CLI::ExistingFile);
  split->add_option("--ratio", split_ratio, "training fraction")->capture_default_str();
  add_common(split, split_c);

  // discretize
  Common disc_c;
  fs::path disc_in;
  std::optional<fs::path> disc_schema;
  std::size_t disc_bins = 5;
  std::vector<fs::path> disc_apply;
  auto* disc = app.add_subcommand("discretize", "Fit equal-frequency bins on training data");
  disc->add_option("train", disc_in, "training CSV")->required()->check(CLI::ExistingFile);
  disc->add_option("--schema", disc_schema)->check(CLI::ExistingFile);
  disc->add_option("--bins", disc_bins)->capture_default_str();
  disc->add_option("--apply", disc_apply, "further CSVs to bin with the fitted bins")->check(CLI::ExistingFile);
  add_common(disc, disc_c);

  // train
  Common train_c;
  fs::path train_in;
  std::optional<fs::path> train_schema;
  std::string train_model;
  auto* train = app.add_subcommand("train", "Train one model and save it to a directory");
  train->add_option("train", train_in, "training CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--schema", train_schema)->check(CLI::ExistingFile);
  train->add_option("--model", train_model, "most_freq|median|chordal|made|dae")->required();
  add_common(train, train_c);

  // impute
  Common imp_c;
  fs::path imp_model, imp_in;
  std::optional<fs::path> imp_schema, imp_plan;
  std::optional<double> imp_rate;
  auto* impute = app.add_subcommand("impute", "Predict hidden cells with a saved model");
  impute->add_option("--model", imp_model, "model directory")->required()->check(CLI::ExistingDirectory);
  impute->add_option("input", imp_in, "CSV to impute")->required()->check(CLI::ExistingFile);
  impute->add_option("--schema", imp_schema)->check(CLI::ExistingFile);
  auto* plan_opt = impute->add_option("--plan", imp_plan, "mask plan to apply")->check(CLI::ExistingFile);
  impute->add_option("--rate", imp_rate, "draw a fresh mask plan at this rate (written next to --out)")
      ->excludes(plan_opt);
  add_common(impute, imp_c);

  // evaluate
  Common eval_c;
  fs::path eval_pred, eval_truth, eval_plan;
  std::optional<fs::path> eval_train, eval_schema;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions (WAPMC or WNRMSE)");
  evaluate->add_option("--predictions", eval_pred)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", eval_truth, "unmasked CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--plan", eval_plan)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--train", eval_train, "training CSV (deviations for WNRMSE)")->check(CLI::ExistingFile);
  evaluate->add_option("--schema", eval_schema)->check(CLI::ExistingFile);
  add_common(evaluate, eval_c, false);

  // bench
  Common bench_c;
  auto* benchc = app.add_subcommand("bench", "Run the full masking benchmark from a config");
  add_common(benchc, bench_c, false);
  benchc->get_option("--config")->required();

  // ranks
  Common ranks_c;
  fs::path ranks_in;
  auto* ranks = app.add_subcommand("ranks", "Mean ranks, Friedman statistic and CD from metrics.csv");
  ranks->add_option("metrics", ranks_in)->required()->check(CLI::ExistingFile);
  add_common(ranks, ranks_c, false);

  // plt-check
  Common plt_c;
  std::string plt_sizes = "1000,10000,100000";
  std::size_t plt_seeds = 10;
  std::vector<double> plt_theta{0.5, -0.7, 0.3, 0.9, -0.6, 0.4};
  auto* plt = app.add_subcommand("plt-check", "Pseudo-likelihood vs likelihood convergence on a log-linear model");
  plt->add_option("--sizes", plt_sizes, "comma-separated increasing sample sizes")->capture_default_str();
  plt->add_option("--seeds", plt_seeds)->capture_default_str();
  plt->add_option("--theta", plt_theta, "six parameters: 3 main effects, 3 pairwise")->expected(6);
  add_common(plt, plt_c, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      Dataset ds = load(ingest_in, ingest_schema);
      print_summary(ds);
      fs::create_directories(ingest_c.out);
      write_csv(ds, ingest_c.out / "data.csv");
      save_sidecar(sidecar_from_schema(ds.schema()), ingest_c.out / "schema.json");
    } else if (*split) {
      Dataset ds = load(split_in, split_schema);
      auto s = split_train_test(ds, split_ratio, split_c.seed.value_or(0));
      fs::create_directories(split_c.out);
      write_csv(s.train, split_c.out / "train.csv");
      write_csv(s.test, split_c.out / "test.csv");
      save_sidecar(sidecar_from_schema(ds.schema()), split_c.out / "schema.json");
      std::cout << s.train.num_rows() << " train, " << s.test.num_rows() << " test rows\n";
    } else if (*disc) {
      Dataset ds = load(disc_in, disc_schema);
      auto d = Discretizer::fit(ds, disc_bins);
      fs::create_directories(disc_c.out);
      auto o = open_out(disc_c.out / "discretizer.json");
      o << d.to_json() << '\n';
      write_csv(d.apply(ds), disc_c.out / disc_in.filename());
      for (const auto& p : disc_apply) write_csv(d.apply(load(p, disc_schema)), disc_c.out / p.filename());
    } else if (*train) {
      auto cfg = base_config(train_c);
      auto s = cfg.settings;
      s.made.mask_rate = s.dae.mask_rate = cfg.train_mask_rate;
      Dataset ds = load(train_in, train_schema);
      auto m = bench::train_model(train_model, ds, s, cfg.seed);
      m.save(train_c.out);
      std::cout << "saved " << train_model << " to " << train_c.out << '\n';
    } else if (*impute) {
      auto cfg = base_config(imp_c);
      auto model = bench::TrainedModel::load(imp_model);
      Dataset ds = load(imp_in, imp_schema);
      MaskPlan plan;
      if (imp_plan) {
        auto in = open_in(*imp_plan);
        plan = read_mask_plan(in);
      } else if (imp_rate) {
        plan = make_mask_plan(ds.num_rows(), ds.num_attributes(), *imp_rate, cfg.seed);
        auto o = open_out(fs::path(imp_c.out).replace_extension(".plan"));
        write_mask_plan(plan, o);
      } else {
        // Every missing cell is a target.
        plan = MaskPlan(ds.num_rows(), ds.num_attributes(), 0.0, cfg.seed);
        for (std::size_t i = 0; i < ds.num_rows(); ++i) {
          std::vector<std::uint32_t> miss;
          for (std::uint32_t j = 0; j < ds.num_attributes(); ++j)
            if (ds.at(i, j).is_missing()) miss.push_back(j);
          plan.set_masked(i, std::move(miss));
        }
      }
      auto preds = predict_chunked(model, ds, plan, cfg.chunks, cfg.seed);
      auto o = open_out(imp_c.out);
      write_predictions(preds, ds.schema(), o);
      std::cout << preds.size() << " cells imputed\n";
    } else if (*evaluate) {
      Dataset truth = load(eval_truth, eval_schema);
      auto pin = open_in(eval_pred);
      auto preds = read_predictions(pin, truth.schema());
      auto lin = open_in(eval_plan);
      auto plan = read_mask_plan(lin);
      MetricReport r;
      if (truth.all_categorical()) {
        r = wapmc(preds, truth, plan);
      } else if (truth.all_continuous()) {
        if (!eval_train) throw InvalidArgument("WNRMSE needs --train for the attribute deviations");
        r = bench::score(bench::DatasetKind::Continuous, preds, truth, plan, load(*eval_train, eval_schema));
      } else {
        throw InvalidArgument("mixed datasets have no single metric; split the columns by kind");
      }
      std::cout << r.metric << ' ' << format_real(r.value) << " over " << r.total << " cells\n";
      for (const auto& n : r.notes) std::cout << "note: " << n << '\n';
      if (!eval_c.out.empty()) {
        auto o = open_out(eval_c.out);
        write_metric_report(r, o);
      }
    } else if (*benchc) {
      auto cfg = base_config(bench_c);
      if (!bench_c.out.empty()) cfg.output = bench_c.out;
      auto result = bench::run_benchmark(cfg);
      bench::emit_reports(result, cfg.output);
      std::cout << result.metrics.size() << " metric rows written to " << cfg.output << '\n';
      for (const auto& f : result.failures)
        std::cerr << "failed: " << f.dataset << (f.model.empty() ? "" : "/" + f.model) << " at " << f.stage
                  << ": " << f.message << '\n';
      return result.ok() ? 0 : 2;
    } else if (*ranks) {
      auto in = open_in(ranks_in);
      auto tables = ranks_from_metrics(in);
      std::ostringstream md;
      for (const auto& [rate, t] : tables) {
        md << "## Masking rate " << rate << "\n\n";
        write_rank_markdown(t, md);
        md << '\n';
      }
      std::cout << md.str();
      if (!ranks_c.out.empty()) {
        fs::create_directories(ranks_c.out);
        auto o = open_out(ranks_c.out / "ranks.md");
        o << md.str();
        auto cd = open_out(ranks_c.out / "cd_data.csv");
        cd << "rate,model,mean_rank,cd\n";
        for (const auto& [rate, t] : tables) {
          std::ostringstream one;
          write_cd_data(t, one);
          std::istringstream lines(one.str());
          std::string line;
          std::getline(lines, line);
          while (std::getline(lines, line)) cd << rate << ',' << line << '\n';
        }
      }
    } else if (*plt) {
      pl::LogLinearModel truth;
      std::copy(plt_theta.begin(), plt_theta.end(), truth.theta.begin());
      std::vector<std::uint64_t> seeds;
      const std::uint64_t master = plt_c.seed.value_or(0);
      for (std::size_t s = 0; s < plt_seeds; ++s) seeds.push_back(master + s);
      auto report = pl::convergence_report(truth, parse_sizes(plt_sizes), seeds);
      if (!plt_c.out.empty()) {
        auto o = open_out(plt_c.out);
        pl::write_convergence_csv(report, o);
      }
      std::cout << "n\tmedian_pl_err\tmedian_ml_err\tmedian_pl_ml_gap\n";
      for (const auto& m : report.medians)
        std::cout << m.n << '\t' << m.median_pl_err << '\t' << m.median_ml_err << '\t' << m.median_pl_ml_gap
                  << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
