#include "core/column_stats.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace mgower {

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

ColumnStats compute_stats(std::vector<double> observed) {
  if (observed.empty()) throw DataError("column statistics need at least one non-missing value");
  std::sort(observed.begin(), observed.end());

  ColumnStats s;
  s.n = observed.size();
  s.min = observed.front();
  s.max = observed.back();
  s.range = s.max - s.min;
  s.q25 = quantile_type7(observed, 0.25);
  s.q75 = quantile_type7(observed, 0.75);
  s.iqr = s.q75 - s.q25;

  if (s.n > 1) {
    double mean = 0.0;
    for (double v : observed) mean += v;
    mean /= static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : observed) ss += (v - mean) * (v - mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  s.sorted_values = std::move(observed);
  return s;
}

ColumnStats compute_stats(const Column& col) {
  if (col.kind.kind != Kind::Numeric) {
    throw UsageError("compute_stats: column '" + col.name + "' is not numeric");
  }
  if (col.n_observed() == 0) throw DataError("compute_stats: column '" + col.name + "' is empty");
  return compute_stats(col.observed());
}

double silverman_bandwidth(const ColumnStats& stats, std::size_t n, double c) {
  if (n < 2) throw UsageError("silverman_bandwidth: need n >= 2");
  if (!(c > 0.0)) throw UsageError("silverman_bandwidth: factor c must be positive");
  const double robust = stats.iqr / 1.34;
  double spread = 0.0;
  if (stats.sd > 0.0 && robust > 0.0) {
    spread = std::min(stats.sd, robust);
  } else {
    spread = std::max(stats.sd, robust);  // heavy ties: keep the non-degenerate estimate
  }
  return c * std::pow(static_cast<double>(n), -0.2) * spread;
}

std::size_t default_k(std::size_t n) {
  if (n < 2) return 1;
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

std::size_t knn_available(std::span<const double> sorted, double x) {
  const bool present = std::binary_search(sorted.begin(), sorted.end(), x);
  return sorted.size() - (present ? 1 : 0);
}

double knn_threshold(std::span<const double> sorted, double x, std::size_t k) {
  if (k < 1) throw UsageError("knn_threshold: k must be >= 1");
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  auto right = static_cast<std::ptrdiff_t>(it - sorted.begin());
  auto left = right - 1;
  const auto n = static_cast<std::ptrdiff_t>(sorted.size());
  if (right < n && sorted[static_cast<std::size_t>(right)] == x) ++right;  // skip self
  const std::size_t available = sorted.size() - static_cast<std::size_t>(right - left - 1);
  if (available < k) {
    throw DataError("knn_threshold: only " + std::to_string(available) + " neighbours available for k = " +
                    std::to_string(k));
  }
  double dist = 0.0;
  for (std::size_t taken = 0; taken < k; ++taken) {
    const double dl = left >= 0 ? x - sorted[static_cast<std::size_t>(left)] : HUGE_VAL;
    const double dr = right < n ? sorted[static_cast<std::size_t>(right)] - x : HUGE_VAL;
    if (dl <= dr) {
      dist = dl;
      --left;
    } else {
      dist = dr;
      ++right;
    }
  }
  return dist;
}

double knn_threshold(const ColumnStats& stats, double x, std::size_t k) {
  return knn_threshold(stats.sorted_values, x, k);
}

}  // namespace mgower
