#include "core/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>

#include "core/column_stats.hpp"
#include "core/error.hpp"
#include "core/imputation.hpp"
#include "core/parallel.hpp"

namespace mgower::sim {

namespace {

constexpr double kMu = 100.0;
constexpr double kSigma = 20.0;
constexpr std::size_t kLevels = 41;
constexpr const char* kVariables[] = {"Y", "X1", "X2", "X3", "X4", "X5"};

// Neumaier-compensated running sum; deterministic for a fixed input order.
class Sum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

Rng rep_rng(std::uint64_t seed, std::size_t rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(static_cast<std::uint64_t>(rep) >> 32)};
  return Rng(seq);
}

// Partial Fisher-Yates: k distinct indices from [0, n).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

struct RepSummary {
  double mean = 0.0;
  double dq = 0.0;
  double rsdq = 0.0;
};

RepSummary summarize(std::span<const double> completed, std::span<const double> reference) {
  if (reference.size() != kLevels) throw UsageError("reference quantiles must have 41 levels");
  if (completed.empty()) throw DataError("empty replication");
  RepSummary s;
  Sum total;
  for (double v : completed) total.add(v);
  s.mean = total.value() / static_cast<double>(completed.size());
  const auto sorted = sorted_copy(completed);
  const auto levels = quantile_levels();
  Sum diff, sq;
  for (std::size_t k = 0; k < kLevels; ++k) {
    const double d = quantile_type7(sorted, levels[k]) - reference[k];
    diff.add(d);
    sq.add(d * d);
  }
  s.dq = diff.value() / static_cast<double>(kLevels);
  s.rsdq = std::sqrt(sq.value() / static_cast<double>(kLevels));
  return s;
}

MeanMetrics reduce_means(std::span<const double> means, double mu) {
  if (means.empty()) throw UsageError("metrics need at least one replication");
  Sum b, sq;
  for (double m : means) {
    b.add(m - mu);
    sq.add((m - mu) * (m - mu));
  }
  const double reps = static_cast<double>(means.size());
  return {b.value() / reps, std::sqrt(sq.value() / reps)};
}

struct MethodOutcome {
  bool ok = false;
  std::string error;
  std::optional<double> rho;
  RepSummary summary;
};

struct RepOutcome {
  std::vector<MethodOutcome> methods;
};

// Imputes `target` with every method on the same masked data.
std::vector<MethodOutcome> impute_all(const Dataset& masked, const std::string& target,
                                      std::span<const double> truth, std::span<const std::uint8_t> mask,
                                      std::span<const double> reference, const std::vector<SimMethod>& methods) {
  std::vector<MethodOutcome> out(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    try {
      const auto result = nn_hotdeck(masked, target, methods[m].config());
      const auto& completed = result.completed.column(target).values;
      std::vector<double> imputed, original;
      for (std::size_t r = 0; r < mask.size(); ++r) {
        if (mask[r]) {
          imputed.push_back(completed[r]);
          original.push_back(truth[r]);
        }
      }
      out[m].rho = pearson(imputed, original);
      out[m].summary = summarize(completed, reference);
      out[m].ok = true;
    } catch (const Error& e) {
      out[m].error = methods[m].label() + ": " + e.what();
    }
  }
  return out;
}

SimReport collect(const SimScenario& scenario, const std::vector<SimMethod>& methods,
                  const std::vector<RepOutcome>& reps, double mu) {
  SimReport report;
  report.scenario = scenario;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodSummary s;
    s.method = methods[m];
    std::vector<double> means;
    Sum rho, dq, rsdq;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto& o = reps[r].methods[m];
      if (!o.ok) {
        report.partial = true;
        report.errors.push_back("rep " + std::to_string(r) + ": " + o.error);
        continue;
      }
      ++s.reps_completed;
      means.push_back(o.summary.mean);
      dq.add(o.summary.dq);
      rsdq.add(o.summary.rsdq);
      if (o.rho) {
        rho.add(*o.rho);
        ++s.rho_reps;
      }
      if (scenario.trace) s.trace.push_back(RepTrace{r, o.rho, o.summary.mean, o.summary.dq, o.summary.rsdq});
    }
    if (s.reps_completed > 0) {
      const auto mm = reduce_means(means, mu);
      s.sB = mm.sB;
      s.sRMSE = mm.sRMSE;
      s.sDQ = dq.value() / static_cast<double>(s.reps_completed);
      s.sRSDQ = rsdq.value() / static_cast<double>(s.reps_completed);
    }
    s.rho = s.rho_reps > 0 ? rho.value() / static_cast<double>(s.rho_reps) : std::nan("");
    report.methods.push_back(std::move(s));
  }
  return report;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Categorization c) { return c == Categorization::FourCat ? "fourcat" : "threecat"; }

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::MCAR: return "mcar";
    case Mechanism::MAR: return "mar";
    case Mechanism::MNAR: return "mnar";
  }
  return "mcar";
}

Categorization parse_categorization(std::string_view text) {
  if (text == "fourcat") return Categorization::FourCat;
  if (text == "threecat") return Categorization::ThreeCat;
  throw UsageError("unknown scenario '" + std::string(text) + "' (expected fourcat|threecat)");
}

Mechanism parse_mechanism(std::string_view text) {
  if (text == "mcar") return Mechanism::MCAR;
  if (text == "mar") return Mechanism::MAR;
  if (text == "mnar") return Mechanism::MNAR;
  throw UsageError("unknown mechanism '" + std::string(text) + "' (expected mcar|mar|mnar)");
}

void SimScenario::validate() const {
  if (reps < 1) throw UsageError("reps must be >= 1");
  if (n < 4) throw UsageError("n must be >= 4");
  if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0)) throw UsageError("outlier rate must lie in [0, 1]");
  if (!(missing_fraction > 0.0 && missing_fraction < 1.0)) throw UsageError("missing fraction must lie in (0, 1)");
  if (!(outlier_sd >= 0.0)) throw UsageError("outlier sd must be >= 0");
  if (mechanism == Mechanism::MAR && driver.empty()) throw UsageError("MAR needs a driver column");
}

std::string SimMethod::label() const { return name + "/" + std::string(mgower::to_string(scaling)); }

DistanceConfig SimMethod::config() const {
  DistanceConfig cfg;
  if (name == "no.mod") {
    cfg.numeric = scaling == Scaling::Range ? NumericMethod::standard() : NumericMethod::iqr_capped();
  } else if (name == "kde1") {
    cfg.numeric = NumericMethod::kde(kKde1Factor, scaling);
  } else if (name == "kde2") {
    cfg.numeric = NumericMethod::kde(kKde2Factor, scaling);
  } else if (name == "knn") {
    cfg.numeric = NumericMethod::knn(0, scaling);
  } else if (name == "cond.dist") {
    cfg.conditional.enabled = true;
    cfg.conditional.scaling = scaling;
  } else {
    throw UsageError("unknown simulation method '" + name + "'");
  }
  return cfg;
}

std::vector<SimMethod> all_methods() {
  std::vector<SimMethod> out;
  for (Scaling g : {Scaling::Range, Scaling::Iqr}) {
    for (const char* name : {"no.mod", "kde1", "kde2", "knn", "cond.dist"}) out.push_back(SimMethod{name, g});
  }
  return out;
}

SimMethod parse_method(std::string_view text) {
  const auto sep = text.find_first_of(":/");
  SimMethod m;
  m.name = std::string(text.substr(0, sep));
  m.scaling = sep == std::string_view::npos ? Scaling::Range : parse_scaling(text.substr(sep + 1));
  m.config();  // validates the name
  return m;
}

// ---------------------------------------------------------------------------
// Data generation

Eigen::Matrix<double, 6, 6> study_correlation() {
  Eigen::Matrix<double, 6, 6> r;
  // clang-format off
  r << 1.0, 0.8, 0.4, 0.8, 0.4, 0.5,
       0.8, 1.0, 0.2, 0.4, 0.2, 0.3,
       0.4, 0.2, 1.0, 0.2, 0.2, 0.3,
       0.8, 0.4, 0.2, 1.0, 0.2, 0.2,
       0.4, 0.2, 0.2, 0.2, 1.0, 0.2,
       0.5, 0.3, 0.3, 0.2, 0.2, 1.0;
  // clang-format on
  return r;
}

Dataset generate_mvn_sample(std::size_t n, Rng& rng) {
  const Eigen::Matrix<double, 6, 6> cov = kSigma * kSigma * study_correlation();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw DataError("covariance matrix is not positive definite");
  const Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(cov);
  if (llt.info() != Eigen::Success) throw DataError("Cholesky factorization failed");
  const Eigen::Matrix<double, 6, 6> lower = llt.matrixL();

  std::normal_distribution<double> z01(0.0, 1.0);
  std::vector<std::vector<double>> cols(6, std::vector<double>(n));
  Eigen::Matrix<double, 6, 1> z;
  for (std::size_t r = 0; r < n; ++r) {
    for (int v = 0; v < 6; ++v) z(v) = z01(rng);
    const Eigen::Matrix<double, 6, 1> x = lower * z;
    for (int v = 0; v < 6; ++v) cols[static_cast<std::size_t>(v)][r] = kMu + x(v);
  }
  std::vector<Column> columns;
  for (std::size_t v = 0; v < 6; ++v) columns.emplace_back(kVariables[v], VariableKind::numeric(), std::move(cols[v]));
  return Dataset(std::move(columns));
}

Dataset generate_mvn_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return generate_mvn_sample(n, rng);
}

Column categorize_equal_width(const Column& col, std::size_t classes) {
  if (classes < 2) throw UsageError("categorize_equal_width: need at least 2 classes");
  if (col.kind.kind != Kind::Numeric) throw UsageError("categorize_equal_width: column is not numeric");
  const auto obs = col.observed();
  if (obs.empty()) throw DataError("categorize_equal_width: empty column");
  const auto [lo_it, hi_it] = std::minmax_element(obs.begin(), obs.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw DataError("categorize_equal_width: constant column '" + col.name + "'");

  std::vector<double> breaks(classes - 1);
  for (std::size_t i = 1; i < classes; ++i) {
    breaks[i - 1] = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(classes);
  }
  std::vector<std::string> labels;
  for (std::size_t k = 1; k <= classes; ++k) labels.push_back("c" + std::to_string(k));

  Column out(col.name, VariableKind::nominal(std::move(labels)), col.values, col.missing_token);
  for (double& v : out.values) {
    if (std::isnan(v)) continue;
    // class = number of breaks <= v
    v = static_cast<double>(std::upper_bound(breaks.begin(), breaks.end(), v) - breaks.begin());
  }
  return out;
}

std::size_t inject_outliers(Column& col, double rate, double mean, double sd, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw UsageError("inject_outliers: rate must lie in [0, 1]");
  const auto count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(col.size())));
  if (count == 0) return 0;
  std::normal_distribution<double> draw(mean, sd);
  for (std::size_t r : sample_indices(col.size(), count, rng)) col.values[r] = draw(rng);
  return count;
}

std::vector<std::uint8_t> delete_values(const Column& target, Mechanism mechanism, const Column* driver,
                                        double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw UsageError("delete_values: fraction must lie in (0, 1)");
  const std::size_t n = target.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::uint8_t> mask(n, 0);

  if (mechanism == Mechanism::MCAR) {
    for (std::size_t r : sample_indices(n, count, rng)) mask[r] = 1;
    return mask;
  }

  const Column* weights_from = mechanism == Mechanism::MNAR ? &target : driver;
  if (!weights_from) throw UsageError("delete_values: MAR requires a driver column");
  if (weights_from->size() != n) throw UsageError("delete_values: driver length differs from target");
  if (weights_from->kind.kind != Kind::Numeric) throw UsageError("delete_values: driver must be numeric");
  if (weights_from->n_observed() != n) throw DataError("delete_values: driver '" + weights_from->name + "' has missing values");

  const auto& v = weights_from->values;
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;
  // Weighted sampling without replacement (Efraimidis-Spirakis keys).
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, std::size_t>> keys(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double w = span > 0.0 ? (v[r] - lo) + 1e-6 * span : 1.0;
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    keys[r] = {std::log(u) / w, r};
  }
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t k = 0; k < count; ++k) mask[keys[k].second] = 1;
  return mask;
}

// ---------------------------------------------------------------------------
// Metrics

std::vector<double> quantile_levels() {
  std::vector<double> p(kLevels);
  for (std::size_t k = 0; k < kLevels; ++k) p[k] = static_cast<double>(k) / static_cast<double>(kLevels - 1);
  return p;
}

MeanMetrics metric_mean_reproduction(std::span<const std::vector<double>> completed, double mu) {
  if (completed.empty()) throw UsageError("metrics need at least one replication");
  std::vector<double> means;
  for (const auto& rep : completed) {
    if (rep.empty()) throw DataError("empty replication");
    Sum s;
    for (double v : rep) s.add(v);
    means.push_back(s.value() / static_cast<double>(rep.size()));
  }
  return reduce_means(means, mu);
}

QuantileMetrics metric_quantile_reproduction(std::span<const std::vector<double>> completed,
                                             std::span<const std::vector<double>> reference_quantiles) {
  if (completed.empty()) throw UsageError("metrics need at least one replication");
  if (reference_quantiles.size() != completed.size()) throw UsageError("one reference vector per replication");
  Sum dq, rsdq;
  for (std::size_t h = 0; h < completed.size(); ++h) {
    const auto s = summarize(completed[h], reference_quantiles[h]);
    dq.add(s.dq);
    rsdq.add(s.rsdq);
  }
  const double reps = static_cast<double>(completed.size());
  return {dq.value() / reps, rsdq.value() / reps};
}

QuantileMetrics metric_quantile_reproduction(std::span<const std::vector<double>> completed,
                                             std::span<const double> reference_quantiles) {
  std::vector<std::vector<double>> refs(completed.size(),
                                        std::vector<double>(reference_quantiles.begin(), reference_quantiles.end()));
  return metric_quantile_reproduction(completed, std::span<const std::vector<double>>(refs));
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

const MethodSummary& SimReport::find(const SimMethod& m) const {
  for (const auto& s : methods) {
    if (s.method == m) return s;
  }
  throw UsageError("method " + m.label() + " is not in the report");
}

// ---------------------------------------------------------------------------
// Studies

SimReport run_study(const SimScenario& scenario, const std::vector<SimMethod>& methods) {
  scenario.validate();
  if (methods.empty()) throw UsageError("no methods to compare");
  if (scenario.target != "Y") throw UsageError("the artificial study imputes Y");
  if (scenario.mechanism == Mechanism::MAR &&
      std::find(std::begin(kVariables) + 1, std::end(kVariables), scenario.driver) == std::end(kVariables)) {
    throw UsageError("MAR driver must be one of X1..X5");
  }

  const boost::math::normal_distribution<double> theory(kMu, kSigma);
  const auto levels = quantile_levels();

  std::vector<RepOutcome> reps(scenario.reps);
  parallel_for(scenario.reps, scenario.workers, [&](std::size_t rep, unsigned) {
    Rng rng = rep_rng(scenario.seed, rep);
    const Dataset raw = generate_mvn_sample(scenario.n, rng);

    std::vector<Column> cols = raw.columns();
    const std::vector<std::pair<std::size_t, std::size_t>> cuts =
        scenario.categorization == Categorization::FourCat
            ? std::vector<std::pair<std::size_t, std::size_t>>{{2, 4}, {3, 6}, {4, 2}, {5, 4}}
            : std::vector<std::pair<std::size_t, std::size_t>>{{3, 6}, {4, 2}, {5, 4}};
    for (const auto& [v, classes] : cuts) cols[v] = categorize_equal_width(raw.column(v), classes);
    if (scenario.outliers) {
      inject_outliers(cols[1], scenario.outlier_rate, scenario.outlier_mean, scenario.outlier_sd, rng);
    }

    const Column& y = cols[0];
    const Column* driver = nullptr;
    Column driver_col;
    if (scenario.mechanism == Mechanism::MAR) {
      const auto idx = *raw.find(scenario.driver);
      driver_col = cols[idx].kind.kind == Kind::Numeric ? cols[idx] : raw.column(idx);
      driver = &driver_col;
    }
    const auto mask = delete_values(y, scenario.mechanism, driver, scenario.missing_fraction, rng);

    // Reference quantiles: sample extremes at p = 0 and 1, theory inside.
    const auto y_sorted = sorted_copy(y.values);
    std::vector<double> reference(kLevels);
    for (std::size_t k = 0; k < kLevels; ++k) {
      if (k == 0) {
        reference[k] = y_sorted.front();
      } else if (k + 1 == kLevels) {
        reference[k] = y_sorted.back();
      } else {
        reference[k] = boost::math::quantile(theory, levels[k]);
      }
    }

    const std::vector<double> truth = y.values;
    Column y_masked = y;
    for (std::size_t r = 0; r < mask.size(); ++r) {
      if (mask[r]) y_masked.values[r] = kMissing;
    }
    cols[0] = std::move(y_masked);
    const Dataset masked(std::move(cols));
    reps[rep].methods = impute_all(masked, "Y", truth, mask, reference, methods);
  });

  auto report = collect(scenario, methods, reps, kMu);
  return report;
}

SimReport run_study(const SimScenario& scenario, const std::vector<SimMethod>& methods, const Dataset& data) {
  scenario.validate();
  if (methods.empty()) throw UsageError("no methods to compare");
  const auto t_idx = data.find(scenario.target);
  if (!t_idx) throw UsageError("target column '" + scenario.target + "' does not exist");
  if (data.column(*t_idx).kind.kind != Kind::Numeric) throw UsageError("target column must be numeric");

  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    if (!data.column(*t_idx).is_missing(r)) keep.push_back(r);
  }
  if (keep.size() < 4) throw DataError("too few rows with the target observed");
  const Dataset complete = data.select_rows(keep);
  const Column& y = complete.column(*t_idx);

  const Column* driver = nullptr;
  if (scenario.mechanism == Mechanism::MAR) {
    const auto d_idx = complete.find(scenario.driver);
    if (!d_idx) throw UsageError("driver column '" + scenario.driver + "' does not exist");
    driver = &complete.column(*d_idx);
  }

  Sum total;
  for (double v : y.values) total.add(v);
  const double mu = total.value() / static_cast<double>(y.size());
  const auto y_sorted = sorted_copy(y.values);
  std::vector<double> reference;
  for (double p : quantile_levels()) reference.push_back(quantile_type7(y_sorted, p));

  std::vector<RepOutcome> reps(scenario.reps);
  parallel_for(scenario.reps, scenario.workers, [&](std::size_t rep, unsigned) {
    Rng rng = rep_rng(scenario.seed, rep);
    const auto mask = delete_values(y, scenario.mechanism, driver, scenario.missing_fraction, rng);
    Column y_masked = y;
    for (std::size_t r = 0; r < mask.size(); ++r) {
      if (mask[r]) y_masked.values[r] = kMissing;
    }
    const Dataset masked = complete.replace_column(y_masked);
    reps[rep].methods = impute_all(masked, scenario.target, y.values, mask, reference, methods);
  });

  auto report = collect(scenario, methods, reps, mu);
  report.user_data = true;
  return report;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const SimReport& report) {
  const auto& s = report.scenario;
  nlohmann::json scenario = {
      {"source", report.user_data ? "user" : "artificial"},
      {"n", s.n},
      {"reps", s.reps},
      {"categorization", to_string(s.categorization)},
      {"outliers", s.outliers},
      {"outlier_rate", s.outlier_rate},
      {"outlier_mean", s.outlier_mean},
      {"outlier_sd", s.outlier_sd},
      {"missing_fraction", s.missing_fraction},
      {"mechanism", to_string(s.mechanism)},
      {"driver", s.driver},
      {"target", s.target},
      {"seed", s.seed},
  };
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : report.methods) {
    nlohmann::json entry = {
        {"method", m.method.name},
        {"scaling", mgower::to_string(m.method.scaling)},
        {"rho", number_or_null(m.rho)},
        {"rho_reps", m.rho_reps},
        {"sB", m.sB},
        {"sRMSE", m.sRMSE},
        {"sDQ", m.sDQ},
        {"sRSDQ", m.sRSDQ},
        {"reps_completed", m.reps_completed},
    };
    if (s.trace) {
      nlohmann::json trace = nlohmann::json::array();
      for (const auto& t : m.trace) {
        trace.push_back({{"rep", t.rep},
                         {"rho", t.rho ? nlohmann::json(*t.rho) : nlohmann::json(nullptr)},
                         {"mean", t.mean},
                         {"dq", t.dq},
                         {"rsdq", t.rsdq}});
      }
      entry["trace"] = std::move(trace);
    }
    methods.push_back(std::move(entry));
  }
  return {{"scenario", scenario}, {"methods", methods}, {"partial", report.partial}, {"errors", report.errors}};
}

SimScenario scenario_from_json(const nlohmann::json& j) {
  SimScenario s;
  try {
    if (j.contains("n")) s.n = j.at("n").get<std::size_t>();
    if (j.contains("reps")) s.reps = j.at("reps").get<std::size_t>();
    if (j.contains("scenario")) s.categorization = parse_categorization(j.at("scenario").get<std::string>());
    if (j.contains("outliers")) s.outliers = j.at("outliers").get<bool>();
    if (j.contains("outlier_rate")) s.outlier_rate = j.at("outlier_rate").get<double>();
    if (j.contains("outlier_mean")) s.outlier_mean = j.at("outlier_mean").get<double>();
    if (j.contains("outlier_sd")) s.outlier_sd = j.at("outlier_sd").get<double>();
    if (j.contains("missing_fraction")) s.missing_fraction = j.at("missing_fraction").get<double>();
    if (j.contains("mechanism")) s.mechanism = parse_mechanism(j.at("mechanism").get<std::string>());
    if (j.contains("driver")) s.driver = j.at("driver").get<std::string>();
    if (j.contains("target")) s.target = j.at("target").get<std::string>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) s.workers = j.at("workers").get<unsigned>();
    if (j.contains("trace")) s.trace = j.at("trace").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad scenario field: ") + e.what());
  }
  return s;
}

}  // namespace mgower::sim
