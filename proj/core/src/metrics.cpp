#include "tagl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tagl/csv.hpp"
#include "tagl/error.hpp"
#include "tagl/stats.hpp"

namespace tagl {

void PredictionTable::append(const PredictionTable& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

void PredictionTable::sort() {
  std::sort(entries_.begin(), entries_.end(),
            [](const Prediction& a, const Prediction& b) {
              return a.instance != b.instance ? a.instance < b.instance
                                              : a.attribute < b.attribute;
            });
}

void PredictionTable::offset_instances(std::size_t offset) {
  for (auto& e : entries_) e.instance += offset;
}

void write_predictions(const PredictionTable& table, const Schema& schema,
                       std::ostream& out) {
  out << "instance,attribute,value\n";
  for (const auto& e : table.entries()) {
    const Attribute& a = schema.at(e.attribute);
    out << e.instance << ',' << a.name << ',';
    if (e.value.is_missing()) {
      out << '?';
    } else if (e.value.is_categorical()) {
      out << a.values.at(e.value.category());
    } else {
      out << format_real(e.value.value());
    }
    out << '\n';
  }
}

PredictionTable read_predictions(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw StructuralError("predictions: empty file");
  PredictionTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw StructuralError("predictions: malformed line " + std::to_string(line_no));
    }
    const std::size_t instance = std::stoul(line.substr(0, c1));
    const std::string name = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string token = line.substr(c2 + 1);
    auto it = std::find_if(schema.begin(), schema.end(),
                           [&](const Attribute& a) { return a.name == name; });
    if (it == schema.end()) {
      throw SchemaError("predictions: unknown attribute '" + name + "'");
    }
    Cell value;
    if (token == "?") {
      value = Cell::missing();
    } else if (it->is_categorical()) {
      auto idx = it->value_index(token);
      if (!idx) {
        throw SchemaError("predictions: '" + token + "' is not a value of '" +
                          name + "'");
      }
      value = Cell::categorical(*idx);
    } else {
      value = Cell::continuous(std::stod(token));
    }
    table.add(instance, static_cast<std::uint32_t>(it->index), value);
  }
  return table;
}

namespace {

using Key = std::pair<std::size_t, std::uint32_t>;

std::map<Key, Cell> index_predictions(const PredictionTable& preds,
                                      const MaskPlan& plan) {
  std::map<Key, Cell> by_cell;
  for (const auto& e : preds.entries()) {
    if (e.instance >= plan.num_instances() ||
        !plan.is_masked(e.instance, e.attribute)) {
      throw InvalidArgument("prediction for instance " +
                            std::to_string(e.instance) + ", attribute " +
                            std::to_string(e.attribute) +
                            " does not correspond to a masked cell");
    }
    if (!by_cell.emplace(Key{e.instance, e.attribute}, e.value).second) {
      throw InvalidArgument("duplicate prediction for instance " +
                            std::to_string(e.instance) + ", attribute " +
                            std::to_string(e.attribute));
    }
  }
  return by_cell;
}

void check_shapes(const Dataset& truth, const MaskPlan& plan) {
  if (plan.num_instances() != truth.num_rows() ||
      plan.num_attributes() != truth.num_attributes()) {
    throw InvalidArgument("mask plan does not match the truth dataset");
  }
}

const Cell& lookup(const std::map<Key, Cell>& by_cell, std::size_t i,
                   std::uint32_t j) {
  auto it = by_cell.find({i, j});
  if (it == by_cell.end()) {
    throw InvalidArgument("no prediction for masked cell (instance " +
                          std::to_string(i) + ", attribute " +
                          std::to_string(j) + ")");
  }
  return it->second;
}

}  // namespace

MetricReport wapmc(const PredictionTable& preds, const Dataset& truth,
                   const MaskPlan& plan) {
  check_shapes(truth, plan);
  const auto by_cell = index_predictions(preds, plan);
  MetricReport report;
  report.metric = "wapmc";
  report.per_attribute.resize(truth.num_attributes());
  for (std::size_t j = 0; j < truth.num_attributes(); ++j) {
    report.per_attribute[j].attribute = j;
    report.per_attribute[j].name = truth.attribute(j).name;
  }
  for (std::size_t i = 0; i < plan.num_instances(); ++i) {
    for (std::uint32_t j : plan.masked(i)) {
      if (!truth.attribute(j).is_categorical()) {
        throw InvalidArgument("wapmc target '" + truth.attribute(j).name +
                              "' is not categorical");
      }
      const Cell& t = truth.at(i, j);
      if (t.is_missing()) continue;
      const Cell& p = lookup(by_cell, i, j);
      if (!p.is_missing() && !p.is_categorical()) {
        throw InvalidArgument("wapmc prediction is not categorical");
      }
      if (p.is_categorical() && p.category() >= truth.attribute(j).cardinality()) {
        throw InvalidArgument("predicted category outside the value list");
      }
      AttributeMetric& m = report.per_attribute[j];
      ++m.count;
      if (!(p == t)) ++m.errors;
    }
  }
  for (auto& m : report.per_attribute) {
    if (m.count == 0) continue;
    m.included = true;
    m.error = static_cast<double>(m.errors) / static_cast<double>(m.count);
    report.total += m.count;
  }
  if (report.total == 0) {
    throw UndefinedMetricError("wapmc: no masked, observed target cells");
  }
  double value = 0.0;
  for (const auto& m : report.per_attribute) {
    if (!m.included) continue;
    value += static_cast<double>(m.count) / static_cast<double>(report.total) *
             m.error;
  }
  report.value = value;
  return report;
}

MetricReport wnrmse(const PredictionTable& preds, const Dataset& truth,
                    const MaskPlan& plan, std::span<const double> train_sigma) {
  check_shapes(truth, plan);
  if (train_sigma.size() != truth.num_attributes()) {
    throw InvalidArgument("wnrmse needs one sigma per attribute");
  }
  const auto by_cell = index_predictions(preds, plan);
  MetricReport report;
  report.metric = "wnrmse";
  report.per_attribute.resize(truth.num_attributes());
  std::vector<double> sse(truth.num_attributes(), 0.0);
  for (std::size_t j = 0; j < truth.num_attributes(); ++j) {
    report.per_attribute[j].attribute = j;
    report.per_attribute[j].name = truth.attribute(j).name;
    report.per_attribute[j].sigma = train_sigma[j];
  }
  for (std::size_t i = 0; i < plan.num_instances(); ++i) {
    for (std::uint32_t j : plan.masked(i)) {
      if (!truth.attribute(j).is_continuous()) {
        throw InvalidArgument("wnrmse target '" + truth.attribute(j).name +
                              "' is not continuous");
      }
      const Cell& t = truth.at(i, j);
      if (t.is_missing()) continue;
      const Cell& p = lookup(by_cell, i, j);
      if (!p.is_continuous()) {
        throw InvalidArgument("wnrmse prediction is not a real value");
      }
      const double d = t.value() - p.value();
      sse[j] += d * d;
      ++report.per_attribute[j].count;
    }
  }
  for (std::size_t j = 0; j < truth.num_attributes(); ++j) {
    AttributeMetric& m = report.per_attribute[j];
    if (m.count == 0) continue;
    m.rmse = std::sqrt(sse[j] / static_cast<double>(m.count));
    if (!(m.sigma > 0.0)) {
      report.notes.push_back("attribute '" + m.name +
                             "' excluded: zero training deviation");
      continue;
    }
    m.included = true;
    m.error = m.rmse / m.sigma;
    report.total += m.count;
  }
  if (report.total == 0) {
    throw UndefinedMetricError("wnrmse: no masked, observed target cells");
  }
  double value = 0.0;
  for (const auto& m : report.per_attribute) {
    if (!m.included) continue;
    value += static_cast<double>(m.count) / static_cast<double>(report.total) *
             m.error;
  }
  report.value = value;
  return report;
}

MaskPlan restrict_plan(const MaskPlan& plan,
                       const std::function<bool(std::uint32_t)>& keep) {
  MaskPlan out(plan.num_instances(), plan.num_attributes(), plan.rate(),
               plan.seed());
  for (std::size_t i = 0; i < plan.num_instances(); ++i) {
    std::vector<std::uint32_t> m;
    for (auto a : plan.masked(i))
      if (keep(a)) m.push_back(a);
    out.set_masked(i, m);
    if (plan.has_validation()) {
      std::vector<std::uint32_t> v;
      for (auto a : plan.validation(i))
        if (keep(a)) v.push_back(a);
      out.set_validation(i, v);
    }
  }
  return out;
}

void write_metric_report(const MetricReport& report, std::ostream& out) {
  out << "attribute,name,M_j,errors,error,rmse,sigma,included\n";
  for (const auto& m : report.per_attribute) {
    out << m.attribute << ',' << m.name << ',' << m.count << ',' << m.errors
        << ',' << format_real(m.error) << ',' << format_real(m.rmse) << ','
        << format_real(m.sigma) << ',' << (m.included ? 1 : 0) << '\n';
  }
  out << "total," << report.metric << ',' << report.total << ",,"
      << format_real(report.value) << ",,,\n";
}

std::optional<double> nemenyi_q05(std::size_t k) {
  // Studentized range statistic divided by sqrt(2), alpha = 0.05.
  static constexpr double kTable[] = {1.960, 2.343, 2.569, 2.728, 2.850,
                                      2.949, 3.031, 3.102, 3.164};
  if (k < 2 || k > 10) return std::nullopt;
  return kTable[k - 2];
}

std::vector<double> average_ranks(std::span<const double> scores) {
  const std::size_t k = scores.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> ranks(k);
  std::size_t start = 0;
  while (start < k) {
    std::size_t end = start + 1;
    while (end < k && scores[order[end]] == scores[order[start]]) ++end;
    // Positions start..end-1 share ranks start+1..end.
    const double avg = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = avg;
    start = end;
  }
  return ranks;
}

namespace {

RankTable compute_ranks(const std::vector<std::vector<double>>& scores,
                        std::vector<std::string> models,
                        std::vector<std::string> datasets) {
  const std::size_t k = scores.size();
  const std::size_t n = k ? scores[0].size() : 0;
  for (const auto& row : scores) {
    if (row.size() != n) throw InvalidArgument("ragged score matrix");
    for (double s : row)
      if (!std::isfinite(s)) throw InvalidArgument("score matrix has missing values");
  }
  if (models.empty())
    for (std::size_t m = 0; m < k; ++m) models.push_back("model" + std::to_string(m));
  if (datasets.empty())
    for (std::size_t d = 0; d < n; ++d) datasets.push_back("dataset" + std::to_string(d));
  if (models.size() != k || datasets.size() != n) {
    throw InvalidArgument("rank table labels do not match the score matrix");
  }
  RankTable t;
  t.models = std::move(models);
  t.datasets = std::move(datasets);
  t.scores = scores;
  t.ranks.assign(k, std::vector<double>(n, 0.0));
  t.mean_ranks.assign(k, 0.0);
  std::vector<double> column(k);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t m = 0; m < k; ++m) column[m] = scores[m][d];
    auto r = average_ranks(column);
    for (std::size_t m = 0; m < k; ++m) t.ranks[m][d] = r[m];
  }
  for (std::size_t m = 0; m < k; ++m) {
    double sum = 0.0;
    for (double r : t.ranks[m]) sum += r;
    t.mean_ranks[m] = n ? sum / static_cast<double>(n) : 0.0;
  }
  if (k >= 2 && n >= 2) {
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    double sq = 0.0;
    for (double r : t.mean_ranks) sq += r * r;
    const double chi2 =
        12.0 * nn / (kk * (kk + 1.0)) * (sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0);
    // Rounding can push an exact zero slightly negative.
    t.friedman_statistic = std::max(0.0, chi2);
    t.friedman_p_value = chi_square_upper_tail(*t.friedman_statistic, kk - 1.0);
    if (auto q = nemenyi_q05(k)) {
      t.critical_difference = *q * std::sqrt(kk * (kk + 1.0) / (6.0 * nn));
    }
  }
  return t;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

}  // namespace

RankTable friedman_ranks(const std::vector<std::vector<double>>& scores,
                         std::vector<std::string> models,
                         std::vector<std::string> datasets) {
  if (scores.size() < 2) throw InvalidArgument("Friedman test needs k >= 2 models");
  if (scores[0].size() < 2) {
    throw InvalidArgument("Friedman test needs N >= 2 datasets");
  }
  return compute_ranks(scores, std::move(models), std::move(datasets));
}

RankTable rank_models(const std::vector<std::vector<double>>& scores,
                      std::vector<std::string> models,
                      std::vector<std::string> datasets) {
  return compute_ranks(scores, std::move(models), std::move(datasets));
}

void write_rank_csv(const RankTable& t, std::ostream& out) {
  out << "model,mean_rank";
  for (const auto& d : t.datasets) out << ",rank_" << d;
  out << ",friedman_chi2,friedman_p,cd\n";
  for (std::size_t m = 0; m < t.models.size(); ++m) {
    out << t.models[m] << ',' << format_real(t.mean_ranks[m]);
    for (double r : t.ranks[m]) out << ',' << format_real(r);
    out << ',' << fmt_opt(t.friedman_statistic) << ','
        << fmt_opt(t.friedman_p_value) << ',' << fmt_opt(t.critical_difference)
        << '\n';
  }
}

void write_rank_markdown(const RankTable& t, std::ostream& out) {
  out << "| model | mean rank |";
  for (const auto& d : t.datasets) out << ' ' << d << " |";
  out << "\n|---|---|";
  for (std::size_t d = 0; d < t.datasets.size(); ++d) out << "---|";
  out << '\n';
  std::vector<std::size_t> order(t.models.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return t.mean_ranks[a] < t.mean_ranks[b];
  });
  for (std::size_t m : order) {
    std::ostringstream mr;
    mr.precision(4);
    mr << std::fixed << t.mean_ranks[m];
    out << "| " << t.models[m] << " | " << mr.str() << " |";
    for (double s : t.scores[m]) {
      std::ostringstream ss;
      ss.precision(4);
      ss << std::fixed << s;
      out << ' ' << ss.str() << " |";
    }
    out << '\n';
  }
  out << '\n';
  if (t.friedman_statistic) {
    out << "Friedman chi-square = " << format_real(*t.friedman_statistic)
        << " (p = " << format_real(*t.friedman_p_value) << ")\n";
  } else {
    out << "Friedman test not available (needs >= 2 models and >= 2 datasets)\n";
  }
  if (t.critical_difference) {
    out << "Nemenyi CD (alpha = 0.05) = " << format_real(*t.critical_difference)
        << '\n';
  }
}

void write_cd_data(const RankTable& t, std::ostream& out) {
  out << "model,mean_rank,cd\n";
  for (std::size_t m = 0; m < t.models.size(); ++m) {
    out << t.models[m] << ',' << format_real(t.mean_ranks[m]) << ','
        << fmt_opt(t.critical_difference) << '\n';
  }
}

}  // namespace tagl
