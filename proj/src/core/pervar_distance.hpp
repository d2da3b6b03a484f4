#pragma once

// Per-variable distance d and validity flag delta for every variable kind.
// All functions are pure; missing cells are passed as std::nullopt.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "core/column_stats.hpp"
#include "core/error.hpp"

namespace mgower {

using Cell = std::optional<double>;

struct PerVarResult {
  double d = 0.0;
  bool valid = false;  // delta; d is 0 whenever this is false

  static PerVarResult excluded() { return {}; }
  static PerVarResult of(double d) { return {d, true}; }
  friend bool operator==(const PerVarResult&, const PerVarResult&) = default;
};

enum class Scaling { Range, Iqr };

enum class NumericMethodKind { Standard, IqrCapped, KdeWindow, KnnWindow };

// How interval/ratio variables are compared. Standard always scales by the
// range and IqrCapped by the IQR; the window methods take either.
struct NumericMethod {
  NumericMethodKind kind = NumericMethodKind::Standard;
  Scaling scaling = Scaling::Range;
  double c = kKde1Factor;  // KdeWindow
  std::size_t k = 0;       // KnnWindow; 0 means default_k(n) of the reference column

  static NumericMethod standard() { return {NumericMethodKind::Standard, Scaling::Range}; }
  static NumericMethod iqr_capped() { return {NumericMethodKind::IqrCapped, Scaling::Iqr}; }
  static NumericMethod kde(double c, Scaling g) { return {NumericMethodKind::KdeWindow, g, c}; }
  static NumericMethod knn(std::size_t k, Scaling g) { return {NumericMethodKind::KnnWindow, g, kKde1Factor, k}; }

  Scaling effective_scaling() const {
    switch (kind) {
      case NumericMethodKind::Standard: return Scaling::Range;
      case NumericMethodKind::IqrCapped: return Scaling::Iqr;
      default: return scaling;
    }
  }
  void validate() const {
    if (kind == NumericMethodKind::KdeWindow && !(c > 0.0)) throw UsageError("kde window factor must be > 0");
  }
  friend bool operator==(const NumericMethod&, const NumericMethod&) = default;
};

std::string_view to_string(Scaling s);
Scaling parse_scaling(std::string_view text);

enum class OrdinalPolicy { KaufmanRousseeuw, Podani };

// |x_i - x_j| / g capped at 1. A zero denominator gives 0 for equal values
// and 1 otherwise.
inline double scaled_manhattan(double a, double g) {
  if (g <= 0.0) return a == 0.0 ? 0.0 : 1.0;
  return a >= g ? 1.0 : a / g;
}

inline void require_binary(Cell x) {
  if (x && *x != 0.0 && *x != 1.0) throw DataError("binary distance: value is not 0/1");
}

// Simple matching.
inline PerVarResult dist_binary_symmetric(Cell xi, Cell xj) {
  require_binary(xi);
  require_binary(xj);
  if (!xi || !xj) return PerVarResult::excluded();
  return PerVarResult::of(*xi == *xj ? 0.0 : 1.0);
}

// Jaccard: a double zero is excluded from the average.
inline PerVarResult dist_binary_asymmetric(Cell xi, Cell xj) {
  require_binary(xi);
  require_binary(xj);
  if (!xi || !xj) return PerVarResult::excluded();
  if (*xi == 0.0 && *xj == 0.0) return PerVarResult::excluded();
  return PerVarResult::of(*xi == 1.0 && *xj == 1.0 ? 0.0 : 1.0);
}

// Cells are 0-based category codes.
inline PerVarResult dist_nominal(Cell xi, Cell xj, std::size_t n_categories) {
  auto check = [n_categories](Cell x) {
    if (x && (*x < 0.0 || *x >= static_cast<double>(n_categories) || *x != std::floor(*x))) {
      throw DataError("nominal distance: undeclared category code");
    }
  };
  check(xi);
  check(xj);
  if (!xi || !xj) return PerVarResult::excluded();
  return PerVarResult::of(*xi == *xj ? 0.0 : 1.0);
}

// Kaufman-Rousseeuw: cells are the [0,1] ratio transforms, so d = |z_i - z_j|.
inline PerVarResult dist_ordinal_ratio(Cell zi, Cell zj) {
  if (!zi || !zj) return PerVarResult::excluded();
  return PerVarResult::of(std::min(1.0, std::abs(*zi - *zj)));
}

// Podani: cells are midranks, `rank_span` = max r - min r over the reference
// column. An all-tied column carries no information and is excluded.
inline PerVarResult dist_ordinal_midrank(Cell ri, Cell rj, double rank_span) {
  if (!ri || !rj || !(rank_span > 0.0)) return PerVarResult::excluded();
  return PerVarResult::of(std::min(1.0, std::abs(*ri - *rj) / rank_span));
}

// Scale parameters frozen for one numeric column.
struct NumericScale {
  double range = 0.0;
  double iqr = 0.0;
  double bandwidth = 0.0;  // h for KdeWindow
};

// Core of the numeric distance once the inputs are known to be present.
// `knn_radius` is the k-nn threshold of x_i (or the larger of the two
// thresholds for symmetrized use); ignored by other methods.
inline double numeric_distance_core(double a, NumericMethodKind kind, double g, double bandwidth, double knn_radius) {
  switch (kind) {
    case NumericMethodKind::Standard:
    case NumericMethodKind::IqrCapped:
      return scaled_manhattan(a, g);
    case NumericMethodKind::KdeWindow:
      if (a <= bandwidth) return 0.0;
      return scaled_manhattan(a, g);
    case NumericMethodKind::KnnWindow:
      if (a <= knn_radius) return 0.0;
      return scaled_manhattan(a, g);
  }
  return 1.0;
}

inline double scale_denominator(const NumericMethod& m, const NumericScale& s) {
  return m.effective_scaling() == Scaling::Range ? s.range : s.iqr;
}

inline PerVarResult dist_numeric(Cell xi, Cell xj, const NumericMethod& method, const NumericScale& scale,
                                 double knn_radius = 0.0) {
  if ((xi && !std::isfinite(*xi)) || (xj && !std::isfinite(*xj))) {
    throw DataError("numeric distance: non-finite value");
  }
  if (!xi || !xj) return PerVarResult::excluded();
  const double a = std::abs(*xi - *xj);
  return PerVarResult::of(
      numeric_distance_core(a, method.kind, scale_denominator(method, scale), scale.bandwidth, knn_radius));
}

// Convenience overload taking full stats; h is taken from stats.bandwidth.
inline PerVarResult dist_numeric(Cell xi, Cell xj, const NumericMethod& method, const ColumnStats& stats,
                                 double knn_radius = 0.0) {
  return dist_numeric(xi, xj, method, NumericScale{stats.range, stats.iqr, stats.bandwidth.value_or(0.0)},
                      knn_radius);
}

}  // namespace mgower
