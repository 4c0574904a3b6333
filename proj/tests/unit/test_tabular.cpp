#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthetic.hpp"
#include "tagl/csv.hpp"
#include "tagl/discretizer.hpp"
#include "tagl/encoding.hpp"
#include "tagl/error.hpp"
#include "tagl/mask_plan.hpp"
#include "tagl/split.hpp"

using namespace tagl;

namespace {

Dataset parse(const std::string& text, const SchemaSidecar* sidecar = nullptr) {
  std::istringstream in(text);
  return read_csv(in, sidecar);
}

Dataset reals(const std::vector<double>& values) {
  Dataset ds({synth::continuous("x", 0)});
  for (double v : values) {
    Cell c = Cell::continuous(v);
    ds.add_row(std::span<const Cell>(&c, 1));
  }
  return ds;
}

}  // namespace

TEST(Csv, SingleMissingCell) {
  Dataset ds = parse("a\n?\n");
  EXPECT_EQ(ds.num_rows(), 1u);
  EXPECT_EQ(ds.num_attributes(), 1u);
  EXPECT_TRUE(ds.at(0, 0).is_missing());
}

TEST(Csv, InfersContinuousWithMissing) {
  Dataset ds = parse("x\n1.5\n2\n?\n");
  ASSERT_TRUE(ds.attribute(0).is_continuous());
  EXPECT_DOUBLE_EQ(ds.at(0, 0).value(), 1.5);
  EXPECT_DOUBLE_EQ(ds.at(1, 0).value(), 2.0);
  EXPECT_TRUE(ds.at(2, 0).is_missing());
}

TEST(Csv, InfersCategoricalWithSortedValues) {
  Dataset ds = parse("c,x\nb,1\na,2\nb,3\n");
  ASSERT_TRUE(ds.attribute(0).is_categorical());
  EXPECT_EQ(ds.attribute(0).values, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(ds.at(0, 0).category(), 1u);
  EXPECT_TRUE(ds.attribute(1).is_continuous());
}

TEST(Csv, RaggedRowReportsRowNumber) {
  try {
    parse("a,b\n1,2\n3\n");
    FAIL() << "expected StructuralError";
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
  }
}

TEST(Csv, UndeclaredValueIsSchemaError) {
  SchemaSidecar sc = parse_sidecar(R"({"c": {"kind": "categorical", "values": ["a", "b"]}})");
  EXPECT_THROW(parse("c\na\nz\n", &sc), SchemaError);
  Dataset ok = parse("c\nb\n", &sc);
  EXPECT_EQ(ok.at(0, 0).category(), 1u);
}

TEST(Csv, SidecarOverridesKindAndMissingAliases) {
  SchemaSidecar sc = parse_sidecar(
      R"({"columns": {"n": {"kind": "categorical"}}, "missing": ["?", "NA"]})");
  Dataset ds = parse("n\n1\n2\nNA\n", &sc);
  EXPECT_TRUE(ds.attribute(0).is_categorical());
  EXPECT_TRUE(ds.at(2, 0).is_missing());
}

TEST(Csv, WriteReadRoundTrip) {
  Dataset ds = parse("c,x\nb,1.25\n?,-3\na,?\n");
  std::ostringstream out;
  write_csv(ds, out);
  SchemaSidecar sc = sidecar_from_schema(ds.schema());
  Dataset back = parse(out.str(), &sc);
  EXPECT_EQ(back, ds);
}

TEST(Csv, QuotedFields) {
  Dataset ds = parse("name,x\n\"a,b\",1\n\"c\"\"d\",2\n");
  EXPECT_EQ(ds.attribute(0).values, (std::vector<std::string>{"a,b", "c\"d"}));
}

TEST(Split, FloorSizes) {
  EXPECT_EQ(train_size(8124, 0.8), 6499u);
  Dataset ds = synth::independent_data(8124, 2, 3, 1);
  auto s = split_train_test(ds, 0.8, 7);
  EXPECT_EQ(s.train.num_rows(), 6499u);
  EXPECT_EQ(s.test.num_rows(), 1625u);
}

TEST(Split, FloorRuleHoldsForManySizes) {
  for (std::size_t n = 2; n < 60; ++n) {
    for (double r : {0.1, 0.25, 0.5, 0.7, 0.8, 0.9}) {
      const std::size_t expect = static_cast<std::size_t>(std::floor(r * double(n) + 1e-9));
      EXPECT_EQ(train_size(n, r), expect);
    }
  }
}

TEST(Split, DeterministicDisjointAndComplete) {
  // Row i holds value i in a single categorical column so rows are traceable.
  Schema s{synth::categorical("id", 0, 10)};
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({i});
  Dataset ds = synth::from_states(s, rows);
  auto a = split_train_test(ds, 0.8, 3);
  auto b = split_train_test(ds, 0.8, 3);
  auto c = split_train_test(ds, 0.8, 4);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(c.train.num_rows(), 8u);
  EXPECT_FALSE(a.train == c.train && a.test == c.test);
  std::vector<std::uint32_t> seen;
  for (const Dataset* d : {&a.train, &a.test})
    for (std::size_t i = 0; i < d->num_rows(); ++i) seen.push_back(d->at(i, 0).category());
  std::sort(seen.begin(), seen.end());
  for (std::uint32_t i = 0; i < 10; ++i) EXPECT_EQ(seen[i], i);
}

TEST(Split, RejectsTinyDatasets) {
  Dataset ds = synth::independent_data(1, 2, 2, 0);
  EXPECT_THROW(split_train_test(ds, 0.8, 0), InvalidArgument);
  Dataset two = synth::independent_data(5, 2, 2, 0);
  EXPECT_THROW(split_train_test(two, 1.0, 0), InvalidArgument);
}

TEST(Discretizer, TenValuesFiveBins) {
  auto bins = fit_bins({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 5);
  ASSERT_EQ(bins.num_bins(), 5u);
  const double med[] = {1.5, 3.5, 5.5, 7.5, 9.5};
  for (std::size_t b = 0; b < 5; ++b) {
    EXPECT_DOUBLE_EQ(bins.lower[b], 1.0 + 2.0 * double(b));
    EXPECT_DOUBLE_EQ(bins.upper[b], 2.0 + 2.0 * double(b));
    EXPECT_DOUBLE_EQ(bins.medians[b], med[b]);
  }
  EXPECT_EQ(bins.bin_of(5.5), 2u);
  EXPECT_EQ(bins.bin_of(-100.0), 0u);
  EXPECT_EQ(bins.bin_of(1e9), 4u);
}

TEST(Discretizer, ConstantColumnGetsOneBin) {
  auto bins = fit_bins(std::vector<double>(20, 4.0), 5);
  ASSERT_EQ(bins.num_bins(), 1u);
  EXPECT_DOUBLE_EQ(bins.medians[0], 4.0);
}

TEST(Discretizer, FewDistinctValuesGetOneBinEach) {
  auto bins = fit_bins({1, 1, 2, 2, 2, 3}, 5);
  ASSERT_EQ(bins.num_bins(), 3u);
  EXPECT_EQ(bins.bin_of(2.0), 1u);
}

TEST(Discretizer, EqualFrequencyMatchesSortAndChunk) {
  // Distinct values: the bins must coincide with contiguous chunks of the
  // sorted order whose sizes differ by at most one.
  Rng rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (std::size_t n : {5u, 17u, 100u, 203u}) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    auto bins = fit_bins(v, 5);
    std::sort(v.begin(), v.end());
    ASSERT_EQ(bins.num_bins(), 5u);
    std::vector<std::size_t> counts(5, 0);
    for (double x : v) ++counts[bins.bin_of(x)];
    std::size_t start = 0;
    for (std::size_t b = 0; b < 5; ++b) {
      const std::size_t end = (b + 1) * n / 5;
      EXPECT_EQ(counts[b], end - start);
      EXPECT_DOUBLE_EQ(bins.lower[b], v[start]);
      EXPECT_DOUBLE_EQ(bins.upper[b], v[end - 1]);
      start = end;
    }
    auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    EXPECT_LE(*hi - *lo, 1u);
  }
}

TEST(Discretizer, HundredValuesGiveTwentyPerBin) {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  auto bins = fit_bins(v, 5);
  std::vector<int> counts(5, 0);
  for (double x : v) ++counts[bins.bin_of(x)];
  for (int c : counts) EXPECT_EQ(c, 20);
}

TEST(Discretizer, MediansInsideBinsAndBoundariesOrdered) {
  Rng rng(5);
  std::exponential_distribution<double> e(1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(57);
    for (auto& x : v) x = std::round(e(rng) * 3.0);  // many ties
    auto bins = fit_bins(v, 5);
    for (std::size_t b = 0; b < bins.num_bins(); ++b) {
      EXPECT_LE(bins.lower[b], bins.medians[b]);
      EXPECT_LE(bins.medians[b], bins.upper[b]);
      if (b > 0) EXPECT_LT(bins.upper[b - 1], bins.lower[b]);
    }
  }
}

TEST(Discretizer, ApplyKeepsMissingAndCategorical) {
  Dataset ds = parse("x,c\n1,a\n2,b\n3,a\n4,b\n5,a\n6,b\n7,a\n8,b\n9,a\n10,b\n?,a\n");
  Discretizer d = Discretizer::fit(ds, 5);
  Dataset out = d.apply(ds);
  EXPECT_TRUE(out.attribute(0).is_categorical());
  EXPECT_EQ(out.attribute(0).cardinality(), 5u);
  EXPECT_EQ(out.at(4, 0).category(), 2u);
  EXPECT_TRUE(out.at(10, 0).is_missing());
  EXPECT_EQ(out.at(1, 1), ds.at(1, 1));
  EXPECT_DOUBLE_EQ(d.back_project(0, Cell::categorical(2)).value(), 5.5);
  Discretizer back = Discretizer::from_json(d.to_json());
  EXPECT_EQ(back.apply(ds), out);
}

TEST(Encoding, OneHotSpansAndMasking) {
  Dataset ds = parse("c,x\nb,2.5\na,?\n?,1\n");
  MaskPlan plan(3, 2, 0.5, 0);
  plan.set_masked(0, {0, 1});
  EncodedMatrix m = encode_one_hot(ds);
  ASSERT_EQ(m.values.cols(), 3);
  EXPECT_EQ(m.values(0, 0), 0.0);
  EXPECT_EQ(m.values(0, 1), 1.0);
  EXPECT_EQ(m.values(0, 2), 2.5);
  EXPECT_EQ(m.values(1, 2), 0.0);
  EXPECT_EQ(m.values(2, 0) + m.values(2, 1), 0.0);
  EncodedMatrix masked = encode_one_hot(ds, &plan);
  EXPECT_EQ(masked.values.row(0).sum(), 0.0);
  EXPECT_EQ(masked.values.row(1), m.values.row(1));
}

TEST(Encoding, SpanSumsAreZeroOrOneAndRoundTrip) {
  Dataset ds = synth::independent_data(200, 4, 3, 9);
  OneHotEncoder enc(ds.schema());
  EncodedMatrix m = enc.encode(ds);
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    for (const auto& s : m.spans) {
      const double sum = m.values.row(i).segment(Eigen::Index(s.offset), Eigen::Index(s.width)).sum();
      EXPECT_EQ(sum, 1.0);
    }
  }
  EXPECT_EQ(enc.decode(m), ds);
}

TEST(Encoding, StandardizedRoundTrip) {
  Dataset ds = synth::normal_data(50, 2, 4);
  OneHotEncoder enc = OneHotEncoder::fit_standardized(ds);
  EncodedMatrix m = enc.encode(ds);
  EXPECT_NEAR(m.values.col(0).mean(), 0.0, 1e-12);
  Dataset back = enc.decode(m);
  for (std::size_t i = 0; i < ds.num_rows(); ++i)
    EXPECT_NEAR(back.at(i, 1).value(), ds.at(i, 1).value(), 1e-12);
  OneHotEncoder reloaded = OneHotEncoder::from_json(enc.to_json());
  EXPECT_EQ(reloaded.encode(ds).values, m.values);
}

TEST(Dataset, SampleStddevUsesBesselCorrection) {
  Dataset ds = reals({1, 2, 3, 4});
  EXPECT_NEAR(sample_stddev(ds, 0), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(mean(ds, 0), 2.5);
}

TEST(Dataset, RejectsInvalidCells) {
  Dataset ds(synth::categorical_schema({2}));
  Cell bad = Cell::categorical(5);
  EXPECT_THROW(ds.add_row(std::span<const Cell>(&bad, 1)), SchemaError);
  EXPECT_THROW(Cell::continuous(std::nan("")), InvalidArgument);
}
