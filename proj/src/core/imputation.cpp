#include "core/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "core/error.hpp"

namespace mgower {

ImputationResult nn_hotdeck(const Dataset& data, const std::string& target, DistanceConfig config,
                            const ImputationOptions& options) {
  const auto target_idx = data.find(target);
  if (!target_idx) throw UsageError("target column '" + target + "' does not exist");
  config.excluded.insert(target);
  config.stats_source = options.pooled_stats ? StatsSource::Pooled : StatsSource::Second;
  if (options.max_uses && *options.max_uses == 0) throw UsageError("max_uses must be >= 1");

  const Column& y = data.column(*target_idx);
  std::vector<std::size_t> recipients, donors;
  for (std::size_t r = 0; r < data.n_rows(); ++r) (y.is_missing(r) ? recipients : donors).push_back(r);
  if (recipients.empty()) throw DataError("target column '" + target + "' has no missing values");
  if (donors.empty()) throw DataError("target column '" + target + "' has no observed values");

  for (std::size_t r : recipients) {
    bool any = false;
    for (const auto& col : data.columns()) {
      if (col.name != target && !config.excluded.count(col.name) && !col.is_missing(r)) any = true;
    }
    if (!any) {
      throw DataError("row " + data.row_ids()[r] + " is missing the target and every distance variable");
    }
  }

  const Dataset rec = data.select_rows(recipients);
  const Dataset don = data.select_rows(donors);
  const GowerEngine engine(rec, don, config);

  ImputationResult result;
  result.recipients = recipients;
  result.donors.resize(recipients.size());
  result.distances.resize(recipients.size());
  result.ties.resize(recipients.size());

  if (!options.max_uses) {
    const MatchResult matches = top_n_matches(engine, 1, config.workers);
    for (std::size_t k = 0; k < recipients.size(); ++k) {
      const auto& rm = matches.recipients[k];
      result.donors[k] = donors[rm.matches.front().donor];
      result.distances[k] = rm.matches.front().distance;
      result.ties[k] = rm.ties_at_cut;
    }
  } else {
    // Capped donor use makes the outcome order dependent: recipients are
    // served in row order.
    std::vector<std::size_t> uses(donors.size(), 0);
    std::vector<double> buf(donors.size());
    for (std::size_t k = 0; k < recipients.size(); ++k) {
      engine.row(k, buf);
      std::vector<std::tuple<double, std::uint64_t, std::size_t>> order;
      for (std::size_t j = 0; j < buf.size(); ++j) {
        if (!std::isnan(buf[j])) order.emplace_back(buf[j], engine.tie_key(k, j), j);
      }
      std::sort(order.begin(), order.end());
      auto it = std::find_if(order.begin(), order.end(),
                             [&](const auto& e) { return uses[std::get<2>(e)] < *options.max_uses; });
      if (it == order.end()) {
        throw UndefinedDistanceError("no available donor for row " + data.row_ids()[recipients[k]]);
      }
      const auto [d, key, j] = *it;
      ++uses[j];
      result.donors[k] = donors[j];
      result.distances[k] = d;
      result.ties[k] = static_cast<std::size_t>(std::count(buf.begin(), buf.end(), d));
    }
  }

  Column filled = y;
  for (std::size_t k = 0; k < recipients.size(); ++k) filled.values[recipients[k]] = y.values[result.donors[k]];
  result.completed = data.replace_column(filled);
  return result;
}

}  // namespace mgower
