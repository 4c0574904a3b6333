#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace tagl::pl {

inline constexpr std::size_t kVars = 3;
inline constexpr std::size_t kParams = 6;
inline constexpr std::size_t kStates = 8;

using Theta = std::array<double, kParams>;
using BinaryRow = std::array<std::uint8_t, kVars>;
using BinaryData = std::vector<BinaryRow>;

// P(x) ∝ exp(sum_i t_i x_i + sum_{i<j} t_ij x_i x_j) over three binary
// variables. Parameter order: t_0, t_1, t_2, t_01, t_02, t_12.
struct LogLinearModel {
  Theta theta{};

  static std::array<double, kParams> features(const BinaryRow& x);
  static BinaryRow state(std::size_t index);  // bit j of index is x_j
  static std::size_t index(const BinaryRow& x);

  double energy(const BinaryRow& x) const;
  double log_partition() const;
  std::array<double, kStates> probabilities() const;
  // P(x_j = 1 | the other two).
  double conditional(std::size_t j, const BinaryRow& x) const;
};

BinaryData sample(const LogLinearModel& model, std::size_t n, std::uint64_t seed);

std::array<double, kStates> state_counts(const BinaryData& data);

// Both objectives are averaged over instances.
double log_likelihood(const Theta& theta, const std::array<double, kStates>& counts);
Theta log_likelihood_gradient(const Theta& theta, const std::array<double, kStates>& counts);
double pseudo_log_likelihood(const Theta& theta, const std::array<double, kStates>& counts);
Theta pseudo_log_likelihood_gradient(const Theta& theta, const std::array<double, kStates>& counts);

struct FitOptions {
  double tolerance = 1e-8;  // on the gradient's infinity norm
  std::size_t max_iterations = 100000;
  Theta initial{};
  // Parameters left false stay at their initial value.
  std::array<bool, kParams> free{true, true, true, true, true, true};
};

struct FitResult {
  Theta theta{};
  std::vector<double> objective;
  std::size_t iterations = 0;
  bool converged = false;
};

// Gradient ascent with a backtracking (Armijo) line search. Throws
// InvalidArgument if some variable takes only one value in `data`.
FitResult fit_pseudo_likelihood(const BinaryData& data, const FitOptions& opts = {});
FitResult fit_mle(const BinaryData& data, const FitOptions& opts = {});

double max_abs_diff(const Theta& a, const Theta& b);

struct ConvergenceRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double pl_err = 0.0;
  double ml_err = 0.0;
  double pl_ml_gap = 0.0;
};

struct ConvergenceSummary {
  std::size_t n = 0;
  double median_pl_err = 0.0;
  double median_ml_err = 0.0;
  double median_pl_ml_gap = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceSummary> medians;  // one per n, grid order
};

// Errors are infinity norms. The sample for (n, seed) uses
// derive_seed(seed, kSample, n). Throws InvalidArgument unless n_grid is
// strictly increasing and seeds non-empty.
ConvergenceReport convergence_report(const LogLinearModel& truth, const std::vector<std::size_t>& n_grid,
                                     const std::vector<std::uint64_t>& seeds);

// CSV "n,seed,pl_err,ml_err,pl_ml_gap"; median rows carry seed "median".
void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);

}  // namespace tagl::pl
