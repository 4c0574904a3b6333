#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tagl/error.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/stats.hpp"

using namespace tagl;

TEST(MaskPlan, CountsFollowCeilRule) {
  EXPECT_EQ(make_mask_plan(10, 23, 0.2, 1).masked(0).size(), 5u);
  EXPECT_EQ(make_mask_plan(10, 7, 0.2, 1).masked(0).size(), 2u);
  EXPECT_EQ(make_mask_plan(10, 10, 0.8, 1).masked(0).size(), 8u);
  EXPECT_EQ(masked_count(30, 0.1), 3u);
}

TEST(MaskPlan, EveryInstanceKeepsAnObservedAttribute) {
  for (std::size_t J : {2u, 3u, 7u, 23u, 46u}) {
    for (double r : kTestRates) {
      if (masked_count(J, r) >= J) {
        EXPECT_THROW(make_mask_plan(5, J, r, 0), InvalidArgument);
        continue;
      }
      auto p = make_mask_plan(50, J, r, 3);
      for (std::size_t i = 0; i < 50; ++i) {
        auto m = p.masked(i);
        EXPECT_LT(m.size(), J);
        EXPECT_TRUE(std::is_sorted(m.begin(), m.end()));
        EXPECT_EQ(std::adjacent_find(m.begin(), m.end()), m.end());
      }
    }
  }
}

TEST(MaskPlan, RejectsBadRates) {
  EXPECT_THROW(make_mask_plan(5, 4, 0.0, 0), InvalidArgument);
  EXPECT_THROW(make_mask_plan(5, 4, 1.0, 0), InvalidArgument);
  EXPECT_THROW(make_mask_plan(5, 1, 0.2, 0), InvalidArgument);
}

TEST(MaskPlan, PureFunctionOfArguments) {
  EXPECT_EQ(make_mask_plan(100, 12, 0.4, 9), make_mask_plan(100, 12, 0.4, 9));
  EXPECT_NE(make_mask_plan(100, 12, 0.4, 9), make_mask_plan(100, 12, 0.4, 10));
  // A prefix of a longer plan is the shorter plan.
  EXPECT_EQ(make_mask_plan(100, 12, 0.4, 9).slice(0, 40), make_mask_plan(40, 12, 0.4, 9));
}

TEST(MaskPlan, MarginalFrequenciesAreUniform) {
  const std::size_t n = 100000, J = 7;
  auto p = make_mask_plan(n, J, 0.4, 2);
  std::vector<double> counts(J, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (auto a : p.masked(i)) counts[a] += 1.0;
  const double expected = double(n) * double(masked_count(J, 0.4)) / double(J);
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_GT(chi_square_upper_tail(chi2, double(J - 1)), 0.01);
}

TEST(ValidationTargets, CountsFollowCeilRule) {
  for (auto [J, rate, masked, val] : {std::tuple{23u, 0.2, 5u, 2u}, std::tuple{7u, 0.2, 2u, 1u},
                                      std::tuple{10u, 0.8, 8u, 2u}}) {
    auto p = select_validation_targets(make_mask_plan(30, J, rate, 1), 0.25, 4);
    for (std::size_t i = 0; i < 30; ++i) {
      EXPECT_EQ(p.masked(i).size(), masked);
      EXPECT_EQ(p.validation(i).size(), val);
      for (auto v : p.validation(i)) EXPECT_TRUE(p.is_masked(i, v));
    }
  }
}

TEST(Schedule, MaskedCountsPerRate) {
  auto check = [](std::size_t J, std::vector<std::size_t> want) {
    auto plans = test_mask_schedule(4, J, 5);
    ASSERT_EQ(plans.size(), 5u);
    for (std::size_t r = 0; r < 5; ++r) {
      EXPECT_DOUBLE_EQ(plans[r].rate(), kTestRates[r]);
      EXPECT_EQ(plans[r].masked(0).size(), want[r]);
    }
  };
  check(23, {3, 5, 10, 14, 19});
  check(7, {1, 2, 3, 5, 6});
  EXPECT_EQ(test_mask_schedule(20, 7, 5), test_mask_schedule(20, 7, 5));
  EXPECT_THROW(test_mask_schedule(4, 1, 5), InvalidArgument);
}

TEST(Schedule, RatesUseIndependentSeeds) {
  auto plans = test_mask_schedule(1, 10, 5);
  EXPECT_NE(plans[0].seed(), plans[1].seed());
}

TEST(MaskPlanText, RoundTrip) {
  auto p = select_validation_targets(make_mask_plan(25, 9, 0.4, 3), 0.25, 8);
  p.set_masked(3, {});
  p.set_validation(3, {});
  std::stringstream s;
  write_mask_plan(p, s);
  EXPECT_EQ(read_mask_plan(s), p);
  auto q = make_mask_plan(5, 9, 0.6, 1);
  std::stringstream t;
  write_mask_plan(q, t);
  EXPECT_EQ(read_mask_plan(t), q);
}
