#include "core/gower.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace mgower {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Tolerance on the m / p_cat threshold: categorical distances are ratios of
// small integers and must not fall off the boundary through rounding.
constexpr double kThresholdEps = 1e-9;

void check_same_schema(const Dataset& a, const Dataset& b) {
  if (a.n_cols() != b.n_cols()) throw UsageError("schema mismatch: different column counts");
  for (std::size_t c = 0; c < a.n_cols(); ++c) {
    const auto& x = a.column(c);
    const auto& y = b.column(c);
    if (x.name != y.name || x.kind != y.kind) {
      throw UsageError("schema mismatch at column " + std::to_string(c) + " ('" + x.name + "' vs '" + y.name + "')");
    }
  }
}

}  // namespace

std::string_view to_string(Scaling s) { return s == Scaling::Range ? "range" : "iqr"; }

Scaling parse_scaling(std::string_view text) {
  if (text == "range") return Scaling::Range;
  if (text == "iqr") return Scaling::Iqr;
  throw UsageError("unknown scaling '" + std::string(text) + "' (expected range|iqr)");
}

// ---------------------------------------------------------------------------
// DistanceConfig

double DistanceConfig::weight(const std::string& column) const {
  auto it = weights.find(column);
  return it == weights.end() ? 1.0 : it->second;
}

const NumericMethod& DistanceConfig::method_for(const std::string& column) const {
  auto it = numeric_overrides.find(column);
  return it == numeric_overrides.end() ? numeric : it->second;
}

void DistanceConfig::validate(const Dataset& data) const {
  numeric.validate();
  for (const auto& [name, w] : weights) {
    if (!data.find(name)) throw UsageError("weight given for unknown column '" + name + "'");
    if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("weight of column '" + name + "' must be finite and >= 0");
  }
  for (const auto& name : excluded) {
    if (!data.find(name)) throw UsageError("excluded column '" + name + "' does not exist");
  }
  for (const auto& [name, m] : numeric_overrides) {
    if (!data.find(name)) throw UsageError("method override for unknown column '" + name + "'");
    m.validate();
  }
  bool any = false;
  for (const auto& col : data.columns()) {
    if (!excluded.count(col.name) && weight(col.name) > 0.0) any = true;
  }
  if (!any) throw UsageError("distance config includes no column with positive weight");
}

DistanceConfig make_config(const std::string& method, const std::string& scale, bool force) {
  DistanceConfig cfg;
  const bool scale_given = !scale.empty();
  const Scaling g = scale_given ? parse_scaling(scale) : Scaling::Range;
  if (method == "std") {
    if (g == Scaling::Iqr) {
      if (!force) throw UsageError("method 'std' scales by the range; use --method iqr or pass --force");
      cfg.numeric = NumericMethod::iqr_capped();
    } else {
      cfg.numeric = NumericMethod::standard();
    }
  } else if (method == "iqr") {
    if (scale_given && g != Scaling::Iqr) throw UsageError("method 'iqr' always scales by the IQR");
    cfg.numeric = NumericMethod::iqr_capped();
  } else if (method == "kde1") {
    cfg.numeric = NumericMethod::kde(kKde1Factor, g);
  } else if (method == "kde2") {
    cfg.numeric = NumericMethod::kde(kKde2Factor, g);
  } else if (method == "knn") {
    cfg.numeric = NumericMethod::knn(0, g);
  } else if (method == "cond") {
    cfg.conditional.enabled = true;
    cfg.conditional.scaling = g;
    cfg.numeric = g == Scaling::Range ? NumericMethod::standard() : NumericMethod::iqr_capped();
  } else {
    throw UsageError("unknown method '" + method + "' (expected std|iqr|kde1|kde2|knn|cond)");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// GowerEngine

GowerEngine::GowerEngine(const Dataset& a, const Dataset& b, const DistanceConfig& config)
    : config_(config), n_a_(a.n_rows()), n_b_(b.n_rows()) {
  check_same_schema(a, b);
  config_.validate(a);
  const bool same = &a == &b;

  auto source_values = [&](std::size_t c) {
    std::vector<double> out;
    auto add = [&](const Column& col) {
      for (double v : col.values) {
        if (!std::isnan(v)) out.push_back(v);
      }
    };
    switch (config_.stats_source) {
      case StatsSource::Pooled:
        add(a.column(c));
        if (!same) add(b.column(c));
        break;
      case StatsSource::First: add(a.column(c)); break;
      case StatsSource::Second: add(b.column(c)); break;
    }
    return out;
  };

  for (std::size_t c = 0; c < a.n_cols(); ++c) {
    const auto& ca = a.column(c);
    const auto& cb = b.column(c);
    if (config_.excluded.count(ca.name)) continue;
    const double w = config_.weight(ca.name);
    if (w <= 0.0) continue;

    Prepared p;
    p.name = ca.name;
    p.weight = w;
    p.a = ca.values;
    p.b = cb.values;

    switch (ca.kind.kind) {
      case Kind::BinarySymmetric:
        p.op = Op::BinarySymmetric;
        p.categorical_stage = true;
        break;
      case Kind::BinaryAsymmetric:
        p.op = Op::BinaryAsymmetric;
        p.categorical_stage = true;
        break;
      case Kind::Nominal:
        p.op = Op::Nominal;
        p.n_categories = ca.kind.categories.size();
        p.categorical_stage = true;
        break;
      case Kind::Ordinal: {
        p.categorical_stage = !config_.conditional.ordinal_as_numeric;
        const auto src = source_values(c);
        const std::size_t n_cat = ca.kind.categories.size();
        if (config_.ordinal == OrdinalPolicy::KaufmanRousseeuw) {
          // Positions o - 1 are the stored codes; g = max(o) - 1.
          p.op = Op::OrdinalRatio;
          double top = static_cast<double>(n_cat);
          if (config_.ordinal_scale == OrdinalScale::ObservedMax) {
            top = 1.0;
            for (double v : src) top = std::max(top, v + 1.0);
          }
          p.g = top - 1.0;
        } else {
          p.op = Op::OrdinalMidrank;
          std::vector<std::size_t> counts(n_cat, 0);
          for (double v : src) ++counts[static_cast<std::size_t>(v)];
          std::vector<double> midrank(n_cat, 0.0);
          std::size_t below = 0;
          double lo = HUGE_VAL, hi = -HUGE_VAL;
          for (std::size_t k = 0; k < n_cat; ++k) {
            midrank[k] = static_cast<double>(below) + (static_cast<double>(counts[k]) + 1.0) / 2.0;
            below += counts[k];
            if (counts[k] > 0) {
              lo = std::min(lo, midrank[k]);
              hi = std::max(hi, midrank[k]);
            }
          }
          p.rank_span = below > 0 ? hi - lo : 0.0;
          for (auto* side : {&p.a, &p.b}) {
            for (double& v : *side) {
              if (!std::isnan(v)) v = midrank[static_cast<std::size_t>(v)];
            }
          }
        }
        break;
      }
      case Kind::Numeric: {
        p.op = Op::Numeric;
        auto src = source_values(c);
        if (src.empty()) throw DataError("column '" + ca.name + "' has no reference values for its statistics");
        ColumnStats st = compute_stats(std::move(src));
        NumericMethod m = config_.method_for(ca.name);
        if (config_.conditional.enabled) {
          m = config_.conditional.scaling == Scaling::Range ? NumericMethod::standard() : NumericMethod::iqr_capped();
        }
        p.method = m.kind;
        p.g = m.effective_scaling() == Scaling::Range ? st.range : st.iqr;
        if (m.kind == NumericMethodKind::KdeWindow) {
          p.bandwidth = st.n >= 2 ? silverman_bandwidth(st, st.n, m.c) : 0.0;
          st.bandwidth = p.bandwidth;
        }
        if (m.kind == NumericMethodKind::KnnWindow) {
          const std::size_t k = m.k > 0 ? m.k : default_k(st.n);
          auto radius = [&](double x) {
            if (std::isnan(x)) return kNaN;
            const std::size_t avail = knn_available(st.sorted_values, x);
            if (avail == 0) return -1.0;
            return knn_threshold(st.sorted_values, x, std::min(k, avail));
          };
          p.radius_a.resize(p.a.size());
          std::transform(p.a.begin(), p.a.end(), p.radius_a.begin(), radius);
          if (config_.knn_symmetrize) {
            p.radius_b.resize(p.b.size());
            std::transform(p.b.begin(), p.b.end(), p.radius_b.begin(), radius);
          }
        }
        p.stats = std::move(st);
        break;
      }
    }
    if (p.categorical_stage) {
      ++n_categorical_;
    } else {
      ++n_numeric_;
    }
    columns_.push_back(std::move(p));
  }

  if (config_.conditional.enabled && n_numeric_ == 0) {
    throw UsageError("conditional distance needs at least one numeric column");
  }

  hash_a_.reserve(n_a_);
  for (const auto& id : a.row_ids()) hash_a_.push_back(fnv1a(id));
  hash_b_.reserve(n_b_);
  for (const auto& id : b.row_ids()) hash_b_.push_back(fnv1a(id));
}

const ColumnStats* GowerEngine::stats(const std::string& column) const {
  for (const auto& p : columns_) {
    if (p.name == column && p.stats) return &*p.stats;
  }
  return nullptr;
}

std::uint64_t GowerEngine::tie_key(std::size_t i, std::size_t j) const {
  std::uint64_t h = splitmix64(config_.tie_seed);
  h = splitmix64(h ^ hash_a_[i]);
  return splitmix64(h ^ (hash_b_[j] * 0x9E3779B97F4A7C15ULL));
}

PerVarResult GowerEngine::eval(const Prepared& p, std::size_t i, std::size_t j) const {
  const double xi = p.a[i];
  const double xj = p.b[j];
  if (std::isnan(xi) || std::isnan(xj)) return PerVarResult::excluded();
  switch (p.op) {
    case Op::BinarySymmetric:
    case Op::Nominal:
      return PerVarResult::of(xi == xj ? 0.0 : 1.0);
    case Op::BinaryAsymmetric:
      if (xi == 0.0 && xj == 0.0) return PerVarResult::excluded();
      return PerVarResult::of(xi == 1.0 && xj == 1.0 ? 0.0 : 1.0);
    case Op::OrdinalRatio:
      return PerVarResult::of(scaled_manhattan(std::abs(xi - xj), p.g));
    case Op::OrdinalMidrank:
      return dist_ordinal_midrank(xi, xj, p.rank_span);
    case Op::Numeric: {
      double radius = 0.0;
      if (p.method == NumericMethodKind::KnnWindow) {
        radius = p.radius_a[i];
        if (!p.radius_b.empty()) radius = std::max(radius, p.radius_b[j]);
      }
      return PerVarResult::of(numeric_distance_core(std::abs(xi - xj), p.method, p.g, p.bandwidth, radius));
    }
  }
  return PerVarResult::excluded();
}

template <class Pred>
std::optional<double> GowerEngine::aggregate(std::size_t i, std::size_t j, bool weighted, Pred&& take) const {
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : columns_) {
    if (!take(p)) continue;
    const PerVarResult r = eval(p, i, j);
    if (!r.valid) continue;
    const double w = weighted ? p.weight : 1.0;
    num += w * r.d;
    den += w;
  }
  if (den <= 0.0) return std::nullopt;
  return std::min(1.0, num / den);
}

std::optional<double> GowerEngine::distance(std::size_t i, std::size_t j) const {
  return aggregate(i, j, true, [](const Prepared&) { return true; });
}

std::optional<double> GowerEngine::categorical_distance(std::size_t i, std::size_t j) const {
  return aggregate(i, j, false, [](const Prepared& p) { return p.categorical_stage; });
}

std::optional<double> GowerEngine::numeric_distance(std::size_t i, std::size_t j) const {
  return aggregate(i, j, false, [](const Prepared& p) { return !p.categorical_stage; });
}

std::size_t GowerEngine::row(std::size_t i, std::span<double> out) const {
  if (out.size() != n_b_) throw UsageError("row buffer has the wrong size");
  if (!config_.conditional.enabled) {
    for (std::size_t j = 0; j < n_b_; ++j) out[j] = distance(i, j).value_or(kNaN);
    return 0;
  }

  const std::size_t p_cat = n_categorical_;
  if (p_cat == 0) {
    for (std::size_t j = 0; j < n_b_; ++j) out[j] = numeric_distance(i, j).value_or(kNaN);
    return 0;
  }

  // Stage 1: categorical distance; an undefined one counts as maximal.
  double best = HUGE_VAL;
  for (std::size_t j = 0; j < n_b_; ++j) {
    out[j] = categorical_distance(i, j).value_or(1.0);
    best = std::min(best, out[j]);
  }
  if (n_b_ == 0) return 0;

  // Smallest m in 1..p_cat with some donor at categorical distance <= m / p_cat.
  const double pc = static_cast<double>(p_cat);
  std::size_t m = 1;
  while (m < p_cat && best * pc > static_cast<double>(m) + kThresholdEps) ++m;

  // Stage 2: numeric Gower for admitted donors, 1 for the rest.
  for (std::size_t j = 0; j < n_b_; ++j) {
    if (out[j] * pc <= static_cast<double>(m) + kThresholdEps) {
      out[j] = numeric_distance(i, j).value_or(kNaN);
    } else {
      out[j] = 1.0;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Batch operations

std::optional<double> gower_distance(const Dataset& a, std::size_t i, const Dataset& b, std::size_t j,
                                     const DistanceConfig& config) {
  GowerEngine engine(a, b, config);
  if (i >= engine.rows() || j >= engine.cols()) throw UsageError("row index out of range");
  if (config.conditional.enabled) {
    std::vector<double> buf(engine.cols());
    engine.row(i, buf);
    return std::isnan(buf[j]) ? std::nullopt : std::optional<double>(buf[j]);
  }
  return engine.distance(i, j);
}

ConditionalResult conditional_distance(const Dataset& recipients, const Dataset& donors, DistanceConfig config) {
  config.conditional.enabled = true;
  if (donors.n_rows() == 0) throw UsageError("conditional distance: no donors");
  GowerEngine engine(recipients, donors, config);
  ConditionalResult out;
  out.distances.rows = engine.rows();
  out.distances.cols = engine.cols();
  out.distances.values.assign(engine.rows() * engine.cols(), 0.0);
  out.level.assign(engine.rows(), 0);
  parallel_for(engine.rows(), config.workers, [&](std::size_t i, unsigned) {
    out.level[i] = engine.row(i, std::span<double>(out.distances.values).subspan(i * engine.cols(), engine.cols()));
  });
  return out;
}

DistanceMatrix distance_matrix(const Dataset& a, const Dataset& b, const DistanceConfig& config) {
  GowerEngine engine(a, b, config);
  DistanceMatrix m;
  m.rows = engine.rows();
  m.cols = engine.cols();
  m.values.assign(m.rows * m.cols, 0.0);
  parallel_for(m.rows, config.workers, [&](std::size_t i, unsigned) {
    engine.row(i, std::span<double>(m.values).subspan(i * m.cols, m.cols));
  });
  return m;
}

MatchResult top_n_matches(const GowerEngine& engine, std::size_t n, unsigned workers) {
  if (n == 0) throw UsageError("top-n: n must be >= 1");
  if (n > engine.cols()) {
    throw UsageError("top-n: n = " + std::to_string(n) + " exceeds the donor count " + std::to_string(engine.cols()));
  }
  MatchResult result;
  result.recipients.resize(engine.rows());
  std::vector<std::vector<double>> scratch(std::max(1u, workers), std::vector<double>(engine.cols()));

  parallel_for(engine.rows(), workers, [&](std::size_t i, unsigned worker) {
    auto& buf = scratch[worker];
    engine.row(i, buf);

    // Bounded max-heap on (distance, tie key): the top is the worst kept donor.
    using Entry = std::tuple<double, std::uint64_t, std::size_t>;
    std::priority_queue<Entry> heap;
    std::size_t defined = 0;
    for (std::size_t j = 0; j < buf.size(); ++j) {
      if (std::isnan(buf[j])) continue;
      ++defined;
      Entry e{buf[j], engine.tie_key(i, j), j};
      if (heap.size() < n) {
        heap.push(e);
      } else if (e < heap.top()) {
        heap.pop();
        heap.push(e);
      }
    }
    if (defined < n) {
      throw UndefinedDistanceError("recipient row " + std::to_string(i) + " has only " + std::to_string(defined) +
                                   " donors at a defined distance (need " + std::to_string(n) + ")");
    }
    auto& rm = result.recipients[i];
    rm.matches.resize(heap.size());
    for (std::size_t k = heap.size(); k-- > 0;) {
      const auto& [d, key, j] = heap.top();
      rm.matches[k] = Match{j, d};
      heap.pop();
    }
    const double cut = rm.matches.back().distance;
    rm.ties_at_cut = static_cast<std::size_t>(std::count(buf.begin(), buf.end(), cut));
  });
  return result;
}

MatchResult top_n_matches(const Dataset& recipients, const Dataset& donors, const DistanceConfig& config,
                          std::size_t n) {
  GowerEngine engine(recipients, donors, config);
  return top_n_matches(engine, n, config.workers);
}

}  // namespace mgower
