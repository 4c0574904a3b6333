#include "tagl/pl/loglinear.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>

#include "tagl/error.hpp"
#include "tagl/rng.hpp"

namespace tagl::pl {

namespace {

constexpr std::size_t kPair[kVars][kVars] = {{0, 3, 4}, {3, 0, 5}, {4, 5, 0}};

double log_sum_exp(const std::array<double, kStates>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log1p_exp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

double eta(const Theta& t, std::size_t j, const BinaryRow& x) {
  double e = t[j];
  for (std::size_t k = 0; k < kVars; ++k)
    if (k != j) e += t[kPair[j][k]] * x[k];
  return e;
}

double inf_norm(const Theta& g) {
  double m = 0.0;
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

void check_non_degenerate(const std::array<double, kStates>& counts) {
  for (std::size_t j = 0; j < kVars; ++j) {
    double ones = 0.0, total = 0.0;
    for (std::size_t s = 0; s < kStates; ++s) {
      total += counts[s];
      if ((s >> j) & 1u) ones += counts[s];
    }
    if (ones == 0.0 || ones == total) {
      throw InvalidArgument("variable " + std::to_string(j) + " takes a single value in the data");
    }
  }
}

using Objective = std::function<double(const Theta&)>;
using Gradient = std::function<Theta(const Theta&)>;

FitResult ascend(const Objective& f, const Gradient& grad, const FitOptions& opts) {
  FitResult r;
  r.theta = opts.initial;
  double value = f(r.theta);
  r.objective.push_back(value);
  double step = 1.0;
  for (; r.iterations < opts.max_iterations; ++r.iterations) {
    Theta g = grad(r.theta);
    for (std::size_t p = 0; p < kParams; ++p)
      if (!opts.free[p]) g[p] = 0.0;
    if (inf_norm(g) < opts.tolerance) {
      r.converged = true;
      break;
    }
    double g2 = 0.0;
    for (double v : g) g2 += v * v;
    step *= 2.0;
    Theta next;
    double next_value;
    for (;;) {
      for (std::size_t p = 0; p < kParams; ++p) next[p] = r.theta[p] + step * g[p];
      next_value = f(next);
      if (next_value >= value + 1e-4 * step * g2) break;
      step *= 0.5;
      if (step < 1e-20) return r;  // no ascent possible at this precision
    }
    r.theta = next;
    value = next_value;
    r.objective.push_back(value);
  }
  return r;
}

}  // namespace

std::array<double, kParams> LogLinearModel::features(const BinaryRow& x) {
  return {double(x[0]), double(x[1]), double(x[2]), double(x[0] * x[1]), double(x[0] * x[2]),
          double(x[1] * x[2])};
}

BinaryRow LogLinearModel::state(std::size_t index) {
  return {std::uint8_t(index & 1u), std::uint8_t((index >> 1) & 1u), std::uint8_t((index >> 2) & 1u)};
}

std::size_t LogLinearModel::index(const BinaryRow& x) {
  return std::size_t(x[0]) | (std::size_t(x[1]) << 1) | (std::size_t(x[2]) << 2);
}

double LogLinearModel::energy(const BinaryRow& x) const {
  const auto f = features(x);
  double e = 0.0;
  for (std::size_t p = 0; p < kParams; ++p) e += theta[p] * f[p];
  return e;
}

double LogLinearModel::log_partition() const {
  std::array<double, kStates> e;
  for (std::size_t s = 0; s < kStates; ++s) e[s] = energy(state(s));
  return log_sum_exp(e);
}

std::array<double, kStates> LogLinearModel::probabilities() const {
  const double z = log_partition();
  std::array<double, kStates> p;
  for (std::size_t s = 0; s < kStates; ++s) p[s] = std::exp(energy(state(s)) - z);
  return p;
}

double LogLinearModel::conditional(std::size_t j, const BinaryRow& x) const {
  if (j >= kVars) throw InvalidArgument("variable index out of range");
  return sigmoid(eta(theta, j, x));
}

BinaryData sample(const LogLinearModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample size must be positive");
  const auto p = model.probabilities();
  std::array<double, kStates> cdf;
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, cdf.back());
  BinaryData out(n);
  for (auto& row : out) {
    const double v = u(rng);
    const auto s = std::size_t(std::upper_bound(cdf.begin(), cdf.end(), v) - cdf.begin());
    row = LogLinearModel::state(std::min(s, kStates - 1));
  }
  return out;
}

std::array<double, kStates> state_counts(const BinaryData& data) {
  std::array<double, kStates> c{};
  for (const auto& row : data) c[LogLinearModel::index(row)] += 1.0;
  return c;
}

double log_likelihood(const Theta& theta, const std::array<double, kStates>& counts) {
  const LogLinearModel m{theta};
  const double z = m.log_partition();
  double ll = 0.0, n = 0.0;
  for (std::size_t s = 0; s < kStates; ++s) {
    ll += counts[s] * (m.energy(LogLinearModel::state(s)) - z);
    n += counts[s];
  }
  return ll / n;
}

Theta log_likelihood_gradient(const Theta& theta, const std::array<double, kStates>& counts) {
  const auto p = LogLinearModel{theta}.probabilities();
  double n = 0.0;
  for (double c : counts) n += c;
  Theta g{};
  for (std::size_t s = 0; s < kStates; ++s) {
    const auto f = LogLinearModel::features(LogLinearModel::state(s));
    for (std::size_t k = 0; k < kParams; ++k) g[k] += (counts[s] / n - p[s]) * f[k];
  }
  return g;
}

double pseudo_log_likelihood(const Theta& theta, const std::array<double, kStates>& counts) {
  double pll = 0.0, n = 0.0;
  for (std::size_t s = 0; s < kStates; ++s) {
    if (counts[s] == 0.0) continue;
    const auto x = LogLinearModel::state(s);
    double term = 0.0;
    for (std::size_t j = 0; j < kVars; ++j) {
      const double e = eta(theta, j, x);
      term += x[j] * e - log1p_exp(e);
    }
    pll += counts[s] * term;
    n += counts[s];
  }
  return pll / n;
}

Theta pseudo_log_likelihood_gradient(const Theta& theta, const std::array<double, kStates>& counts) {
  double n = 0.0;
  for (double c : counts) n += c;
  Theta g{};
  for (std::size_t s = 0; s < kStates; ++s) {
    if (counts[s] == 0.0) continue;
    const auto x = LogLinearModel::state(s);
    for (std::size_t j = 0; j < kVars; ++j) {
      const double r = counts[s] / n * (x[j] - sigmoid(eta(theta, j, x)));
      g[j] += r;
      for (std::size_t k = 0; k < kVars; ++k)
        if (k != j) g[kPair[j][k]] += r * x[k];
    }
  }
  return g;
}

FitResult fit_pseudo_likelihood(const BinaryData& data, const FitOptions& opts) {
  const auto counts = state_counts(data);
  check_non_degenerate(counts);
  return ascend([&](const Theta& t) { return pseudo_log_likelihood(t, counts); },
                [&](const Theta& t) { return pseudo_log_likelihood_gradient(t, counts); }, opts);
}

FitResult fit_mle(const BinaryData& data, const FitOptions& opts) {
  const auto counts = state_counts(data);
  check_non_degenerate(counts);
  return ascend([&](const Theta& t) { return log_likelihood(t, counts); },
                [&](const Theta& t) { return log_likelihood_gradient(t, counts); }, opts);
}

double max_abs_diff(const Theta& a, const Theta& b) {
  double m = 0.0;
  for (std::size_t p = 0; p < kParams; ++p) m = std::max(m, std::abs(a[p] - b[p]));
  return m;
}

namespace {
double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}
}  // namespace

ConvergenceReport convergence_report(const LogLinearModel& truth, const std::vector<std::size_t>& n_grid,
                                     const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw InvalidArgument("convergence report needs at least one seed");
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw InvalidArgument("sample-size grid must be strictly increasing");
  }
  ConvergenceReport report;
  for (std::size_t n : n_grid) {
    std::vector<double> pl, ml, gap;
    for (std::uint64_t seed : seeds) {
      const auto data = sample(truth, n, derive_seed(seed, stream::kSample, n));
      const auto a = fit_pseudo_likelihood(data);
      const auto b = fit_mle(data);
      ConvergenceRow row{n, seed, max_abs_diff(a.theta, truth.theta), max_abs_diff(b.theta, truth.theta),
                         max_abs_diff(a.theta, b.theta)};
      pl.push_back(row.pl_err);
      ml.push_back(row.ml_err);
      gap.push_back(row.pl_ml_gap);
      report.rows.push_back(row);
    }
    report.medians.push_back({n, median(pl), median(ml), median(gap)});
  }
  return report;
}

void write_convergence_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "n,seed,pl_err,ml_err,pl_ml_gap\n";
  out.precision(10);
  for (const auto& r : report.rows)
    out << r.n << ',' << r.seed << ',' << r.pl_err << ',' << r.ml_err << ',' << r.pl_ml_gap << '\n';
  for (const auto& m : report.medians)
    out << m.n << ",median," << m.median_pl_err << ',' << m.median_ml_err << ',' << m.median_pl_ml_gap
        << '\n';
}

}  // namespace tagl::pl
