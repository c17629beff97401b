#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "botwatch/preprocess.hpp"
#include "botwatch/rng.hpp"

using namespace botwatch;

namespace {

Matrix column(std::initializer_list<double> v) {
  Matrix m(0, 1);
  for (double x : v) m.append_row(std::vector<double>{x});
  return m;
}

Dataset numbered(std::size_t n) {
  Dataset ds;
  ds.X = Matrix(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    ds.X.append_row(std::vector<double>{static_cast<double>(i)});
    ds.y.push_back(i % 2 ? Label::MALICIOUS : Label::BENIGN);
  }
  return ds;
}

}  // namespace

TEST(Scaler, MinMax) {
  const auto m = column({0, 5, 10});
  const auto s = scaler_fit(m);
  const auto t = scaler_transform(s, m);
  EXPECT_EQ(t(0, 0), 0.0);
  EXPECT_EQ(t(1, 0), 0.5);
  EXPECT_EQ(t(2, 0), 1.0);
  EXPECT_EQ(s.transform_value(0, 12), 1.0);
  EXPECT_EQ(s.transform_value(0, -3), 0.0);
}

TEST(Scaler, ConstantColumnMapsToZero) {
  const auto m = column({7, 7, 7});
  const auto t = scaler_transform(scaler_fit(m), m);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(t(r, 0), 0.0);
}

TEST(Scaler, EmptyFitFails) { EXPECT_THROW(scaler_fit(Matrix(0, 3)), DataError); }

TEST(ShuffleSplit, EightyTwenty) {
  const auto [train, test] = shuffle_split(numbered(10), 0.8, 1);
  EXPECT_EQ(train.size(), 8u);
  EXPECT_EQ(test.size(), 2u);
}

TEST(ShuffleSplit, DeterministicPartition) {
  const auto ds = numbered(37);
  const auto a = shuffle_split(ds, 0.8, 9);
  const auto b = shuffle_split(ds, 0.8, 9);
  EXPECT_EQ(a.first.X.data(), b.first.X.data());
  EXPECT_EQ(a.second.X.data(), b.second.X.data());
  std::vector<double> all = a.first.X.data();
  all.insert(all.end(), a.second.X.data().begin(), a.second.X.data().end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], static_cast<double>(i));
  const auto c = shuffle_split(ds, 0.8, 10);
  EXPECT_NE(a.first.X.data(), c.first.X.data());
}

TEST(ShuffleSplit, Errors) {
  EXPECT_THROW(shuffle_split(numbered(1), 0.8, 1), DataError);
  EXPECT_THROW(shuffle_split(numbered(10), 1.0, 1), ConfigError);
  EXPECT_THROW(shuffle_split(numbered(10), 0.0, 1), ConfigError);
}

TEST(Chi2, HandExamples) {
  const std::vector<Label> y{Label::MALICIOUS, Label::BENIGN};
  EXPECT_DOUBLE_EQ(chi2_scores(column({1, 0}), y)[0], 1.0);
  EXPECT_DOUBLE_EQ(chi2_scores(column({3, 3}), y)[0], 0.0);
  EXPECT_EQ(chi2_scores(column({0, 0}), y)[0], 0.0);
  EXPECT_THROW(chi2_scores(column({-1, 0}), y), DataError);
}

TEST(Chi2, MatchesContingencyOracle) {
  // Independent formulation: chi2 over the 2x1 table built with std::map.
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix X(0, 4);
    std::vector<Label> y;
    for (int r = 0; r < 30; ++r) {
      std::vector<double> row(4);
      for (auto& v : row) v = rng.uniform01();
      X.append_row(row);
      y.push_back(r % 3 == 0 ? Label::MALICIOUS : Label::BENIGN);
    }
    const auto got = chi2_scores(X, y);
    for (std::size_t j = 0; j < 4; ++j) {
      std::map<Label, double> obs;
      std::map<Label, double> count;
      double total = 0;
      for (std::size_t r = 0; r < X.rows(); ++r) {
        obs[y[r]] += X(r, j);
        count[y[r]] += 1;
        total += X(r, j);
      }
      double want = 0;
      for (auto c : {Label::BENIGN, Label::MALICIOUS}) {
        const double e = total * count[c] / static_cast<double>(X.rows());
        want += (obs[c] - e) * (obs[c] - e) / e;
      }
      EXPECT_NEAR(got[j], want, 1e-12 * std::max(1.0, want));
    }
  }
}

TEST(SelectKBest, Ordering) {
  const std::vector<double> s{3, 1, 2};
  EXPECT_EQ(select_k_best(s, 2), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(select_k_best(s, 3), (std::vector<std::size_t>{0, 2, 1}));
  const std::vector<double> ties{1, 5, 5, 1};
  EXPECT_EQ(select_k_best(ties, 3), (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_THROW(select_k_best(s, 4), ConfigError);
}

TEST(SelectKBest, PublishedScoresDropLengthExtremes) {
  // Feature order: n_uniq_syn_dst, pkts max, pkts min, pkts mean, n_half_open, len max, len min, len mean.
  const std::vector<double> scores{146.088020, 77.313488, 79.5, 8.317776, 165.130937, 0, 0, 13.700322};
  const auto keep = select_k_best(scores, 6);
  EXPECT_EQ(keep, (std::vector<std::size_t>{4, 0, 2, 1, 7, 3}));
  EXPECT_EQ(std::count(keep.begin(), keep.end(), 5), 0);
  EXPECT_EQ(std::count(keep.begin(), keep.end(), 6), 0);
}

TEST(SelectColumns, PicksInGivenOrder) {
  Matrix X(0, 3);
  X.append_row(std::vector<double>{1, 2, 3});
  const std::vector<std::size_t> cols{2, 0};
  const auto Y = select_columns(X, cols);
  EXPECT_EQ(Y(0, 0), 3);
  EXPECT_EQ(Y(0, 1), 1);
}
