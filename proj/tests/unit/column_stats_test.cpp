#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "core/column_stats.hpp"
#include "core/error.hpp"

using namespace mgower;

namespace {

// Brute force: sort all |x - y| over the other values, take the k-th.
double knn_brute(std::vector<double> values, double x, std::size_t k) {
  auto self = std::find(values.begin(), values.end(), x);
  if (self != values.end()) values.erase(self);
  std::vector<double> d;
  for (double y : values) d.push_back(std::abs(x - y));
  std::sort(d.begin(), d.end());
  return d.at(k - 1);
}

}  // namespace

TEST(ComputeStats, OneToFive) {
  const auto s = compute_stats(std::vector<double>{3, 1, 5, 2, 4});
  EXPECT_EQ(s.n, 5u);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 5.0);
  EXPECT_EQ(s.range, 4.0);
  EXPECT_EQ(s.q25, 2.0);
  EXPECT_EQ(s.q75, 4.0);
  EXPECT_EQ(s.iqr, 2.0);
  EXPECT_EQ(s.sorted_values, (std::vector<double>{1, 2, 3, 4, 5}));
}

TEST(ComputeStats, ConstantColumn) {
  const auto s = compute_stats(std::vector<double>{7, 7, 7});
  EXPECT_EQ(s.range, 0.0);
  EXPECT_EQ(s.iqr, 0.0);
  EXPECT_EQ(s.sd, 0.0);
}

TEST(ComputeStats, AgeRange) {
  const auto s = compute_stats(std::vector<double>{15, 36, 58, 78, 100});
  EXPECT_EQ(s.range, 85.0);
}

TEST(ComputeStats, TypeSevenQuantilesAndSd) {
  // numpy.quantile (linear) and ddof = 1 on the doubled age column.
  const auto s = compute_stats(std::vector<double>{15, 36, 58, 78, 100, 15, 36, 58, 78, 100});
  EXPECT_DOUBLE_EQ(s.q25, 36.0);
  EXPECT_DOUBLE_EQ(s.q75, 78.0);
  EXPECT_NEAR(s.sd, 31.605906620967758, 1e-12);
}

TEST(ComputeStats, IgnoresMissingAndRejectsEmpty) {
  const Column c("x", VariableKind::numeric(), {kMissing, 4, kMissing, 2});
  const auto s = compute_stats(c);
  EXPECT_EQ(s.n, 2u);
  EXPECT_EQ(s.range, 2.0);
  EXPECT_THROW(compute_stats(Column("x", VariableKind::numeric(), {kMissing})), DataError);
  EXPECT_THROW(compute_stats(std::vector<double>{}), DataError);
}

TEST(ComputeStats, InvariantsOnRandomColumns) {
  std::mt19937_64 rng(5);
  std::lognormal_distribution<double> draw(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + t % 37);
    for (auto& x : v) x = draw(rng);
    const auto s = compute_stats(v);
    EXPECT_GE(s.range, 0.0);
    EXPECT_GE(s.iqr, 0.0);
    EXPECT_LE(s.iqr, s.range);
    EXPECT_GE(s.sd, 0.0);

    std::shuffle(v.begin(), v.end(), rng);
    const auto p = compute_stats(v);
    EXPECT_EQ(p.q25, s.q25);
    EXPECT_EQ(p.q75, s.q75);
    EXPECT_EQ(p.range, s.range);
  }
}

TEST(Silverman, ReferenceValue) {
  ColumnStats s;
  s.sd = 20.0;
  s.iqr = 26.8;
  // 1.06 * 20 * 500^(-1/5), evaluated independently in double precision.
  EXPECT_NEAR(silverman_bandwidth(s, 500, kKde1Factor), 6.117047601046586, 1e-12);
  EXPECT_NEAR(silverman_bandwidth(s, 500, kKde2Factor), 5.193719661265969, 1e-12);
}

TEST(Silverman, DegenerateAndGuard) {
  ColumnStats s;
  EXPECT_EQ(silverman_bandwidth(s, 10, 1.06), 0.0);
  s.sd = 3.0;  // IQR 0: sd alone
  EXPECT_DOUBLE_EQ(silverman_bandwidth(s, 32, 1.0), 3.0 / 2.0);
  s.sd = 0.0;
  s.iqr = 1.34 * 4.0;  // sd 0: IQR alone
  EXPECT_DOUBLE_EQ(silverman_bandwidth(s, 32, 1.0), 2.0);
  EXPECT_THROW(silverman_bandwidth(s, 1, 1.0), UsageError);
  EXPECT_THROW(silverman_bandwidth(s, 10, 0.0), UsageError);
}

TEST(Silverman, LinearInFactorAndScale) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> draw(0, 3);
  std::vector<double> v(101);
  for (auto& x : v) x = draw(rng);
  const auto s = compute_stats(v);
  const double h1 = silverman_bandwidth(s, s.n, 1.06);
  const double h2 = silverman_bandwidth(s, s.n, 0.9);
  EXPECT_NEAR(h2 / h1, 0.9 / 1.06, 1e-15);

  std::vector<double> scaled = v;
  for (auto& x : scaled) x *= 4.0;
  const auto t = compute_stats(scaled);
  EXPECT_NEAR(silverman_bandwidth(t, t.n, 1.06), 4.0 * h1, 1e-12);
  EXPECT_NEAR(t.range, 4.0 * s.range, 1e-12);
  EXPECT_NEAR(t.iqr, 4.0 * s.iqr, 1e-12);
  EXPECT_NEAR(t.sd, 4.0 * s.sd, 1e-12);
}

TEST(DefaultK, Examples) {
  EXPECT_EQ(default_k(500), 22u);
  EXPECT_EQ(default_k(1), 1u);
  EXPECT_EQ(default_k(100), 10u);
  EXPECT_EQ(default_k(2), 1u);
}

TEST(KnnThreshold, Examples) {
  const std::vector<double> sorted{1, 2, 3, 10};
  EXPECT_EQ(knn_threshold(sorted, 2, 1), 1.0);
  EXPECT_EQ(knn_threshold(sorted, 10, 2), 8.0);
  EXPECT_EQ(knn_threshold(std::vector<double>{1, 3}, 2, 1), 1.0);
}

TEST(KnnThreshold, Errors) {
  const std::vector<double> sorted{1, 2, 3};
  EXPECT_THROW(knn_threshold(sorted, 2, 3), DataError);
  EXPECT_THROW(knn_threshold(sorted, 2, 0), UsageError);
  EXPECT_NO_THROW(knn_threshold(sorted, 2.5, 3));
}

TEST(KnnThreshold, MatchesBruteForceAndIsMonotoneInK) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> draw(0, 30);  // many ties
  for (int t = 0; t < 300; ++t) {
    std::vector<double> v(2 + t % 25);
    for (auto& x : v) x = draw(rng);
    std::sort(v.begin(), v.end());
    const double x = (t % 3 == 0) ? v[static_cast<std::size_t>(t) % v.size()] : draw(rng) + 0.5;
    const std::size_t avail = knn_available(v, x);
    double prev = -1.0;
    for (std::size_t k = 1; k <= avail; ++k) {
      const double got = knn_threshold(v, x, k);
      EXPECT_EQ(got, knn_brute(v, x, k));
      EXPECT_GE(got, prev);
      prev = got;
    }
  }
}
