#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "core/column_stats.hpp"
#include "core/dataset.hpp"
#include "core/pervar_distance.hpp"

namespace mgower {

// Which rows define the frozen column statistics (range, IQR, bandwidth,
// k-nn neighbour sets, ordinal midranks).
enum class StatsSource { Pooled, First, Second };

struct ConditionalConfig {
  bool enabled = false;
  Scaling scaling = Scaling::Range;  // numeric stage: range-scaled or IQR-capped Manhattan
  bool ordinal_as_numeric = false;   // move ordinal columns from the categorical stage to the numeric one
};

struct DistanceConfig {
  NumericMethod numeric = NumericMethod::standard();
  OrdinalPolicy ordinal = OrdinalPolicy::KaufmanRousseeuw;
  OrdinalScale ordinal_scale = OrdinalScale::DeclaredCategories;
  std::map<std::string, double> weights;  // absent columns weigh 1
  std::map<std::string, NumericMethod> numeric_overrides;
  std::set<std::string> excluded;
  ConditionalConfig conditional;
  bool knn_symmetrize = false;  // d = 0 when either point is in the other's k-neighbourhood
  StatsSource stats_source = StatsSource::Pooled;
  std::uint64_t tie_seed = 0;
  unsigned workers = 1;

  double weight(const std::string& column) const;
  const NumericMethod& method_for(const std::string& column) const;
  // Throws UsageError unless at least one included column carries positive weight.
  void validate(const Dataset& data) const;
};

// Builds a config from the command-line vocabulary:
// method std|iqr|kde1|kde2|knn|cond, scale range|iqr. `std` with `iqr`
// scaling is rejected unless `force` is set, in which case it means IQR capping.
DistanceConfig make_config(const std::string& method, const std::string& scale, bool force = false);

// Dense row-major matrix; NaN marks an undefined distance.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::optional<double> defined(std::size_t i, std::size_t j) const {
    const double v = at(i, j);
    return std::isnan(v) ? std::nullopt : std::optional<double>(v);
  }
};

// Distance engine over two datasets with one schema. Everything data
// dependent (transforms, stats, k-nn radii) is frozen at construction, after
// which every query is a pure const function safe to call concurrently.
// Rows of `a` play x_i (recipients) and rows of `b` play x_j (donors).
class GowerEngine {
 public:
  GowerEngine(const Dataset& a, const Dataset& b, const DistanceConfig& config);

  std::size_t rows() const { return n_a_; }
  std::size_t cols() const { return n_b_; }

  // Weighted Gower over every included column; nullopt when no column is
  // valid for the pair.
  std::optional<double> distance(std::size_t i, std::size_t j) const;

  // Unweighted Gower restricted to the categorical / numeric stage of the
  // conditional distance.
  std::optional<double> categorical_distance(std::size_t i, std::size_t j) const;
  std::optional<double> numeric_distance(std::size_t i, std::size_t j) const;

  // Distances from recipient i to every donor (NaN = undefined), honouring
  // the conditional setting. Returns the escalation level m used by the
  // conditional distance (0 when it is disabled).
  std::size_t row(std::size_t i, std::span<double> out) const;

  std::size_t n_categorical() const { return n_categorical_; }
  std::size_t n_numeric() const { return n_numeric_; }
  const DistanceConfig& config() const { return config_; }

  // Stats of a numeric column as frozen by the engine, if it was included.
  const ColumnStats* stats(const std::string& column) const;

  std::uint64_t tie_key(std::size_t i, std::size_t j) const;

 private:
  enum class Op { BinarySymmetric, BinaryAsymmetric, Nominal, OrdinalRatio, OrdinalMidrank, Numeric };

  struct Prepared {
    std::string name;
    Op op = Op::Numeric;
    double weight = 1.0;
    bool categorical_stage = false;
    std::size_t n_categories = 0;
    double rank_span = 0.0;
    NumericMethodKind method = NumericMethodKind::Standard;
    double g = 0.0;
    double bandwidth = 0.0;
    std::vector<double> a, b;           // transformed cells, NaN = missing
    std::vector<double> radius_a, radius_b;  // k-nn thresholds
    std::optional<ColumnStats> stats;
  };

  PerVarResult eval(const Prepared& p, std::size_t i, std::size_t j) const;
  template <class Pred>
  std::optional<double> aggregate(std::size_t i, std::size_t j, bool weighted, Pred&& take) const;

  DistanceConfig config_;
  std::size_t n_a_ = 0;
  std::size_t n_b_ = 0;
  std::vector<Prepared> columns_;
  std::size_t n_categorical_ = 0;
  std::size_t n_numeric_ = 0;
  std::vector<std::uint64_t> hash_a_, hash_b_;
};

// Weighted Gower distance between row i of `a` and row j of `b` with stats
// frozen per config.stats_source. Builds a throwaway engine; use
// GowerEngine directly for bulk work.
std::optional<double> gower_distance(const Dataset& a, std::size_t i, const Dataset& b, std::size_t j,
                                     const DistanceConfig& config);

struct ConditionalResult {
  DistanceMatrix distances;
  std::vector<std::size_t> level;  // m per recipient: threshold m / p_cat
};

// Two-stage distance: categorical Gower first, numeric Gower only for donors
// within the smallest admissible threshold m / p_cat, 1 for the rest.
ConditionalResult conditional_distance(const Dataset& recipients, const Dataset& donors, DistanceConfig config);

DistanceMatrix distance_matrix(const Dataset& a, const Dataset& b, const DistanceConfig& config);

struct Match {
  std::size_t donor = 0;  // row index into the donor dataset
  double distance = 0.0;
};

struct RecipientMatches {
  std::vector<Match> matches;  // non-decreasing distance
  std::size_t ties_at_cut = 0;  // donors sharing the distance of the last match
};

struct MatchResult {
  std::vector<RecipientMatches> recipients;
};

// n nearest donors per recipient. Exact ties are ordered by a key hashed from
// (seed, recipient id, donor id), i.e. a seeded uniform choice that does not
// depend on row order or scheduling. Undefined distances never match.
MatchResult top_n_matches(const Dataset& recipients, const Dataset& donors, const DistanceConfig& config,
                          std::size_t n);

// Same, reusing an engine.
MatchResult top_n_matches(const GowerEngine& engine, std::size_t n, unsigned workers);

// Per-pair comparison of distances on dummy-coded categorical data.
struct DummyPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double manhattan = 0.0;
  double euclidean_sq = 0.0;
  double dice = 0.0;
  double simple_matching = 0.0;  // mismatches / p on the original variables
  std::size_t p = 0;             // variables observed on both rows
  std::optional<double> manhattan_over_dice;
  std::optional<double> euclidean_sq_over_dice;
  std::optional<double> sm_p_over_dice;
};

struct DummyReport {
  std::size_t n_dummies = 0;
  std::vector<DummyPair> pairs;
};

DummyReport dummy_equivalence_report(const Dataset& data);

}  // namespace mgower
