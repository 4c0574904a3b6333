#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tagl/error.hpp"
#include "tagl/pl/loglinear.hpp"
#include "tagl/stats.hpp"

using namespace tagl;
using namespace tagl::pl;

namespace {

const Theta kTruth{0.5, -0.7, 0.3, 0.9, -0.6, 0.4};

// Joint by explicit normalisation of unnormalised weights.
std::array<double, kStates> oracle_joint(const Theta& t) {
  std::array<double, kStates> w;
  double z = 0.0;
  for (std::size_t s = 0; s < kStates; ++s) {
    const double a = s & 1, b = (s >> 1) & 1, c = (s >> 2) & 1;
    w[s] = std::exp(t[0] * a + t[1] * b + t[2] * c + t[3] * a * b + t[4] * a * c + t[5] * b * c);
    z += w[s];
  }
  for (auto& v : w) v /= z;
  return w;
}

template <class F>
double fd_rel_error(const Theta& t, const Theta& g, F f) {
  double worst = 0.0;
  for (std::size_t p = 0; p < kParams; ++p) {
    Theta a = t, b = t;
    a[p] += 1e-6;
    b[p] -= 1e-6;
    const double fd = (f(a) - f(b)) / 2e-6;
    worst = std::max(worst, std::abs(fd - g[p]) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

}  // namespace

TEST(LogLinear, ProbabilitiesMatchOracleAndArePositive) {
  auto p = LogLinearModel{kTruth}.probabilities();
  auto q = oracle_joint(kTruth);
  for (std::size_t s = 0; s < kStates; ++s) {
    EXPECT_NEAR(p[s], q[s], 1e-14);
    EXPECT_GT(p[s], 0.0);
  }
  auto big = LogLinearModel{{40, -40, 40, -40, 40, -40}}.probabilities();
  for (double v : big) EXPECT_GT(v, 0.0);
}

TEST(LogLinear, ConditionalIsRatioOfJoint) {
  LogLinearModel m{kTruth};
  auto p = m.probabilities();
  for (std::size_t s = 0; s < kStates; ++s)
    for (std::size_t j = 0; j < kVars; ++j) {
      const std::size_t on = s | (1u << j), off = s & ~(1u << j);
      EXPECT_NEAR(m.conditional(j, LogLinearModel::state(s)), p[on] / (p[on] + p[off]), 1e-14);
    }
}

TEST(LogLinear, UniformSamplePassesGoodnessOfFit) {
  auto data = sample(LogLinearModel{}, 100000, 3);
  auto c = state_counts(data);
  double chi2 = 0.0;
  for (double v : c) chi2 += (v - 12500.0) * (v - 12500.0) / 12500.0;
  EXPECT_GT(chi_square_upper_tail(chi2, 7.0), 0.01);
  EXPECT_EQ(data, sample(LogLinearModel{}, 100000, 3));
}

TEST(LogLinear, PositiveInteractionCorrelates) {
  auto data = sample(LogLinearModel{{-1, -1, 0, 3, 0, 0}}, 20000, 1);
  double m0 = 0, m1 = 0, m01 = 0;
  for (const auto& r : data) {
    m0 += r[0];
    m1 += r[1];
    m01 += r[0] * r[1];
  }
  const double n = double(data.size());
  EXPECT_GT(m01 / n - (m0 / n) * (m1 / n), 0.0);
}

TEST(LogLinear, GradientsMatchFiniteDifferences) {
  auto counts = state_counts(sample(LogLinearModel{kTruth}, 500, 9));
  for (const Theta& t : {Theta{}, kTruth, Theta{-1, 2, 0.5, -0.3, 1.2, -2}}) {
    EXPECT_LT(fd_rel_error(t, pseudo_log_likelihood_gradient(t, counts),
                           [&](const Theta& x) { return pseudo_log_likelihood(x, counts); }),
              1e-6);
    EXPECT_LT(fd_rel_error(t, log_likelihood_gradient(t, counts),
                           [&](const Theta& x) { return log_likelihood(x, counts); }),
              1e-6);
  }
}

TEST(LogLinear, RejectsDegenerateData) {
  BinaryData d(10, BinaryRow{1, 0, 1});
  d[0] = {0, 0, 0};
  EXPECT_THROW(fit_pseudo_likelihood(d), InvalidArgument);
  EXPECT_THROW(fit_mle(d), InvalidArgument);
}

TEST(LogLinear, ZeroTruthRecoveredByBothFits) {
  auto data = sample(LogLinearModel{}, 100000, 12);
  auto a = fit_pseudo_likelihood(data), b = fit_mle(data);
  EXPECT_TRUE(a.converged);
  EXPECT_TRUE(b.converged);
  EXPECT_LT(max_abs_diff(a.theta, Theta{}), 0.05);
  EXPECT_LT(max_abs_diff(b.theta, Theta{}), 0.05);
  for (std::size_t k = 1; k < a.objective.size(); ++k) EXPECT_GE(a.objective[k], a.objective[k - 1]);
  for (std::size_t k = 1; k < b.objective.size(); ++k) EXPECT_GE(b.objective[k], b.objective[k - 1]);
}

TEST(LogLinear, IndependentMarginalsGiveLogOdds) {
  // Product distribution; with pairwise terms pinned at zero both fits
  // reduce to per-variable log-odds.
  auto data = sample(LogLinearModel{{0.8, -0.4, 1.1, 0, 0, 0}}, 5000, 4);
  auto c = state_counts(data);
  FitOptions opts;
  Theta logodds{};
  for (std::size_t j = 0; j < kVars; ++j) {
    double ones = 0;
    for (std::size_t s = 0; s < kStates; ++s)
      if ((s >> j) & 1u) ones += c[s];
    logodds[j] = std::log(ones / (double(data.size()) - ones));
  }
  opts.free = {true, true, true, false, false, false};
  auto ml = fit_mle(data, opts), pl = fit_pseudo_likelihood(data, opts);
  ASSERT_TRUE(ml.converged && pl.converged);
  for (std::size_t j = 0; j < kVars; ++j) {
    EXPECT_NEAR(ml.theta[j], logodds[j], 1e-6);
    EXPECT_NEAR(pl.theta[j], logodds[j], 1e-6);
  }
  // The full PL fit at the same data recovers near-zero interactions.
  auto full = fit_pseudo_likelihood(data);
  for (std::size_t k = 3; k < kParams; ++k) EXPECT_LT(std::abs(full.theta[k]), 0.2);
}

TEST(LogLinear, MleMatchesMoments) {
  auto data = sample(LogLinearModel{kTruth}, 3000, 5);
  auto c = state_counts(data);
  auto fit = fit_mle(data);
  ASSERT_TRUE(fit.converged);
  auto p = LogLinearModel{fit.theta}.probabilities();
  for (std::size_t k = 0; k < kParams; ++k) {
    double emp = 0, model = 0;
    for (std::size_t s = 0; s < kStates; ++s) {
      const double f = LogLinearModel::features(LogLinearModel::state(s))[k];
      emp += c[s] / double(data.size()) * f;
      model += p[s] * f;
    }
    EXPECT_NEAR(emp, model, 1e-6);
  }
}

TEST(LogLinear, FitsAreInitializationIndependent) {
  auto data = sample(LogLinearModel{kTruth}, 3000, 6);
  FitOptions o1, o2;
  o2.initial = {2, -2, 1, -1, 2, -2};
  EXPECT_LT(max_abs_diff(fit_mle(data, o1).theta, fit_mle(data, o2).theta), 1e-5);
  EXPECT_LT(max_abs_diff(fit_pseudo_likelihood(data, o1).theta, fit_pseudo_likelihood(data, o2).theta),
            1e-5);
}

TEST(LogLinear, ReportShapeAndCsv) {
  auto r = convergence_report(LogLinearModel{kTruth}, {200, 400}, {1, 2, 3});
  ASSERT_EQ(r.rows.size(), 6u);
  ASSERT_EQ(r.medians.size(), 2u);
  std::ostringstream out;
  write_convergence_csv(r, out);
  EXPECT_EQ(out.str().rfind("n,seed,pl_err,ml_err,pl_ml_gap\n", 0), 0u);
  EXPECT_NE(out.str().find("400,median,"), std::string::npos);
  EXPECT_THROW(convergence_report(LogLinearModel{}, {400, 200}, {1}), InvalidArgument);
  EXPECT_THROW(convergence_report(LogLinearModel{}, {100}, {}), InvalidArgument);
}
