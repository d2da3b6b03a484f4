#include <cmath>

#include "core/error.hpp"
#include "core/gower.hpp"

namespace mgower {

DummyReport dummy_equivalence_report(const Dataset& data) {
  std::vector<Column> dummies;
  for (std::size_t c = 0; c < data.n_cols(); ++c) {
    const auto& col = data.column(c);
    if (!col.kind.is_categorical()) {
      throw UsageError("dummy report: column '" + col.name + "' is not categorical");
    }
    for (auto& d : dummy_encode(col)) dummies.push_back(std::move(d));
  }

  DummyReport report;
  report.n_dummies = dummies.size();
  auto ratio = [](double x, double dice) { return dice > 0.0 ? std::optional<double>(x / dice) : std::nullopt; };

  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = i + 1; j < data.n_rows(); ++j) {
      DummyPair pair;
      pair.i = i;
      pair.j = j;
      std::size_t mismatches = 0;
      for (std::size_t c = 0; c < data.n_cols(); ++c) {
        const auto& col = data.column(c);
        if (col.is_missing(i) || col.is_missing(j)) continue;
        ++pair.p;
        if (col.values[i] != col.values[j]) ++mismatches;
      }
      double both = 0.0, differ = 0.0;
      for (std::size_t k = 0; k < dummies.size(); ++k) {
        const auto& d = dummies[k];
        if (d.is_missing(i) || d.is_missing(j)) continue;
        const double x = d.values[i];
        const double y = d.values[j];
        if (x == 1.0 && y == 1.0) both += 1.0;
        if (x != y) differ += 1.0;
      }
      pair.manhattan = differ;
      pair.euclidean_sq = differ;  // 0/1 coordinates
      pair.dice = (2.0 * both + differ) > 0.0 ? differ / (2.0 * both + differ) : 0.0;
      pair.simple_matching = pair.p > 0 ? static_cast<double>(mismatches) / static_cast<double>(pair.p) : 0.0;
      pair.manhattan_over_dice = ratio(pair.manhattan, pair.dice);
      pair.euclidean_sq_over_dice = ratio(pair.euclidean_sq, pair.dice);
      pair.sm_p_over_dice = ratio(pair.simple_matching * static_cast<double>(pair.p), pair.dice);
      report.pairs.push_back(pair);
    }
  }
  return report;
}

}  // namespace mgower
