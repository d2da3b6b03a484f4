#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "core/dataset.hpp"

namespace mgower {

// Silverman factors for the two kernel windows.
inline constexpr double kKde1Factor = 1.06;
inline constexpr double kKde2Factor = 0.9;

// Frozen summaries of one numeric column, computed from non-missing values.
struct ColumnStats {
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;  // max - min
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;  // q75 - q25
  double sd = 0.0;   // sample standard deviation (n - 1 denominator), 0 when n == 1
  std::optional<double> bandwidth;
  std::vector<double> sorted_values;
};

// Linear interpolation between order statistics: h = (n - 1) p,
// q = x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h]).
double quantile_type7(std::span<const double> sorted, double p);

ColumnStats compute_stats(std::vector<double> observed);
ColumnStats compute_stats(const Column& col);

// c * n^(-1/5) * min(sd, IQR / 1.34). When exactly one of sd and IQR is zero
// the other is used alone.
double silverman_bandwidth(const ColumnStats& stats, std::size_t n, double c);

// round(sqrt(n)), clamped to [1, n - 1] when n >= 2.
std::size_t default_k(std::size_t n);

// Distance from x to its k-th nearest value in `sorted`, skipping one
// occurrence of x itself when present. A value y is one of the k nearest
// neighbours iff |x - y| <= threshold, so ties at the cut all qualify.
double knn_threshold(std::span<const double> sorted, double x, std::size_t k);
double knn_threshold(const ColumnStats& stats, double x, std::size_t k);

// Number of neighbours available to a query at x (n, or n - 1 if x occurs).
std::size_t knn_available(std::span<const double> sorted, double x);

}  // namespace mgower
