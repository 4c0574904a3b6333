#include <gtest/gtest.h>

#include <sstream>

#include "synthetic.hpp"
#include "tagl/baseline.hpp"
#include "tagl/error.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/metrics.hpp"

using namespace tagl;

TEST(Baseline, ModeWithLowestIndexTies) {
  auto s = synth::categorical_schema({2});
  EXPECT_EQ(BaselineModel::fit(synth::from_states(s, {{0}, {0}, {1}})).predict(0), Cell::categorical(0));
  EXPECT_EQ(BaselineModel::fit(synth::from_states(s, {{1}, {0}})).predict(0), Cell::categorical(0));
  EXPECT_EQ(BaselineModel::fit(synth::from_states(s, {{1}, {1}, {-1}, {0}})).predict(0),
            Cell::categorical(1));
}

TEST(Baseline, EvenCountMedianAverages) {
  Dataset ds({synth::continuous("x", 0)});
  for (double v : {4.0, 1.0, 3.0, 2.0}) {
    Cell c = Cell::continuous(v);
    ds.add_row(std::span<const Cell>(&c, 1));
  }
  EXPECT_DOUBLE_EQ(BaselineModel::fit(ds).predict(0).value(), 2.5);
}

TEST(Baseline, AllMissingAttributeIsUnfit) {
  auto ds = synth::from_states(synth::categorical_schema({2, 2}), {{0, -1}, {1, -1}});
  auto m = BaselineModel::fit(ds);
  EXPECT_FALSE(m.constant(1).has_value());
  try {
    m.predict(1);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("a1"), std::string::npos);
  }
}

TEST(Baseline, PredictsConstantForEveryMaskedCell) {
  auto ds = synth::from_states(synth::categorical_schema({3, 2}), {{2, 0}, {2, 1}, {1, 1}});
  auto m = BaselineModel::fit(ds);
  MaskPlan plan(100, 2, 0.5, 0);
  for (std::size_t i = 0; i < 100; ++i) plan.set_masked(i, {0});
  auto t = predict_baseline(m, plan);
  ASSERT_EQ(t.size(), 100u);
  for (const auto& e : t.entries()) EXPECT_EQ(e.value, Cell::categorical(2));
  EXPECT_TRUE(predict_baseline(m, MaskPlan(5, 2, 0.5, 0)).empty());
}

TEST(Baseline, MixedKindsDispatch) {
  Dataset ds({synth::categorical("c", 0, 2), synth::continuous("x", 1)});
  for (auto [c, x] : {std::pair{1u, 1.0}, std::pair{1u, 5.0}, std::pair{0u, 3.0}}) {
    Cell row[] = {Cell::categorical(c), Cell::continuous(x)};
    ds.add_row(row);
  }
  auto m = BaselineModel::fit(ds);
  Cell row[] = {Cell::missing(), Cell::missing()};
  const std::uint32_t masked[] = {0, 1};
  auto out = m.predict_instance(row, masked, 0);
  EXPECT_EQ(out[0], Cell::categorical(1));
  EXPECT_EQ(out[1], Cell::continuous(3.0));
  std::stringstream s;
  m.save(s);
  auto back = BaselineModel::load(s, ds.schema());
  EXPECT_EQ(back.predict(1), m.predict(1));
}

TEST(Baseline, MostFrequentErrorConvergesToOneMinusP) {
  const double p = 0.65;
  Rng rng(12);
  std::bernoulli_distribution top(p);
  std::vector<std::vector<int>> rows(100000);
  for (auto& r : rows) r = {top(rng) ? 0 : 1 + int(rng() % 2), int(rng() % 2)};
  auto ds = synth::from_states(synth::categorical_schema({3, 2}), rows);
  auto plan = make_mask_plan(ds.num_rows(), 2, 0.5, 3);
  plan = restrict_plan(plan, [](std::uint32_t a) { return a == 0; });
  auto m = BaselineModel::fit(ds);
  EXPECT_NEAR(wapmc(predict_baseline(m, plan), ds, plan).value, 1.0 - p, 0.01);
}
