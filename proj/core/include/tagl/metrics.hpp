#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagl/dataset.hpp"
#include "tagl/mask_plan.hpp"

namespace tagl {

struct Prediction {
  std::size_t instance = 0;
  std::uint32_t attribute = 0;
  Cell value;

  bool operator==(const Prediction&) const = default;
};

// Predicted values for masked cells, keyed by (instance, attribute).
class PredictionTable {
 public:
  void add(std::size_t instance, std::uint32_t attribute, Cell value) {
    entries_.push_back({instance, attribute, value});
  }
  void append(const PredictionTable& other);

  const std::vector<Prediction>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Orders entries by (instance, attribute).
  void sort();
  // Shifts every instance id by `offset`.
  void offset_instances(std::size_t offset);

  bool operator==(const PredictionTable&) const = default;

 private:
  std::vector<Prediction> entries_;
};

// CSV with header "instance,attribute,value"; attribute by name, values as
// category labels or reals.
void write_predictions(const PredictionTable& table, const Schema& schema,
                       std::ostream& out);
PredictionTable read_predictions(std::istream& in, const Schema& schema);

struct AttributeMetric {
  std::size_t attribute = 0;
  std::string name;
  std::size_t count = 0;   // M_j: masked, originally observed cells
  std::size_t errors = 0;  // misclassifications (WAPMC only)
  double error = 0.0;      // E_j / M_j, or RMSE_j / sigma_j
  double rmse = 0.0;       // WNRMSE only
  double sigma = 0.0;      // WNRMSE only
  bool included = false;
};

struct MetricReport {
  std::string metric;  // "wapmc" or "wnrmse"
  std::vector<AttributeMetric> per_attribute;
  std::size_t total = 0;  // M over included attributes
  double value = 0.0;
  std::vector<std::string> notes;
};

// Weighted average misclassification over masked, originally observed
// cells: sum_j (M_j / M) * (E_j / M_j). Every target attribute must be
// categorical and every scorable cell must have exactly one prediction.
// Throws UndefinedMetricError when M = 0.
MetricReport wapmc(const PredictionTable& preds, const Dataset& truth,
                   const MaskPlan& plan);

// Weighted RMSE normalised per attribute by the training deviation:
// sum_j (M_j / M) * sqrt(SSE_j / M_j) / sigma_j. Attributes with sigma_j = 0
// are dropped and the weights renormalised (recorded in report.notes).
MetricReport wnrmse(const PredictionTable& preds, const Dataset& truth,
                    const MaskPlan& plan, std::span<const double> train_sigma);

// Plan restricted to attributes satisfying `keep`.
MaskPlan restrict_plan(const MaskPlan& plan,
                       const std::function<bool(std::uint32_t)>& keep);

// One row per attribute: attribute,name,M_j,errors,error,rmse,sigma,included
void write_metric_report(const MetricReport& report, std::ostream& out);

// Models x datasets score matrix, lower is better.
struct RankTable {
  std::vector<std::string> models;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> scores;  // [model][dataset]
  std::vector<std::vector<double>> ranks;   // [model][dataset], ties averaged
  std::vector<double> mean_ranks;
  std::optional<double> friedman_statistic;
  std::optional<double> friedman_p_value;
  std::optional<double> critical_difference;  // Nemenyi, alpha = 0.05
};

// Studentized range quantile q_{0.05,k} / sqrt(2) for 2 <= k <= 10.
std::optional<double> nemenyi_q05(std::size_t k);

// Average-tie ranks within each dataset, mean ranks, the Friedman chi-square
// statistic 12N/(k(k+1)) [sum R_j^2 - k(k+1)^2/4] and the Nemenyi critical
// difference q sqrt(k(k+1)/(6N)). Requires k >= 2 and N >= 2; for k > 10 the
// CD is left empty.
RankTable friedman_ranks(const std::vector<std::vector<double>>& scores,
                         std::vector<std::string> models = {},
                         std::vector<std::string> datasets = {});

// Like friedman_ranks but accepts k >= 1, N >= 1; the test statistics are
// only filled in when k >= 2 and N >= 2.
RankTable rank_models(const std::vector<std::vector<double>>& scores,
                      std::vector<std::string> models,
                      std::vector<std::string> datasets);

// Ranks of one score column with ties averaged (1-based).
std::vector<double> average_ranks(std::span<const double> scores);

// model,mean_rank,rank_<dataset>...
void write_rank_csv(const RankTable& table, std::ostream& out);
void write_rank_markdown(const RankTable& table, std::ostream& out);
// model,mean_rank,cd
void write_cd_data(const RankTable& table, std::ostream& out);

}  // namespace tagl
