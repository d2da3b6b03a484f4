#pragma once

// Monte Carlo evaluation of the distance variants in a donor-imputation
// setting: data generation, categorization, outliers, missingness,
// imputation with every method on the same masked data, and the summary
// metrics (rho, sB, sRMSE, sDQ, sRSDQ).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "core/dataset.hpp"
#include "core/gower.hpp"
#include "json.hpp"

namespace mgower::sim {

using Rng = std::mt19937_64;

enum class Categorization { FourCat, ThreeCat };
enum class Mechanism { MCAR, MAR, MNAR };

std::string_view to_string(Categorization c);
std::string_view to_string(Mechanism m);
Categorization parse_categorization(std::string_view text);
Mechanism parse_mechanism(std::string_view text);

struct SimScenario {
  std::size_t n = 500;
  std::size_t reps = 1000;
  Categorization categorization = Categorization::FourCat;
  bool outliers = false;
  double outlier_rate = 0.02;
  double outlier_mean = 200.0;
  double outlier_sd = 20.0;
  double missing_fraction = 1.0 / 3.0;
  Mechanism mechanism = Mechanism::MCAR;
  std::string driver;       // MAR driver column
  std::string target = "Y";  // imputed variable
  std::uint64_t seed = 0;
  unsigned workers = 1;  // not part of the report: results do not depend on it
  bool trace = false;

  void validate() const;
};

// One column of the result table: a numeric treatment x a scaling.
struct SimMethod {
  std::string name;  // no.mod | kde1 | kde2 | knn | cond.dist
  Scaling scaling = Scaling::Range;

  std::string label() const;
  DistanceConfig config() const;
  friend bool operator==(const SimMethod&, const SimMethod&) = default;
};

// The ten columns: five treatments under range scaling, then under IQR.
std::vector<SimMethod> all_methods();
// "kde1:iqr", "no.mod:range", ...; a bare name means range scaling.
SimMethod parse_method(std::string_view text);

// Correlation matrix of (Y, X1, ..., X5).
Eigen::Matrix<double, 6, 6> study_correlation();

// n draws of (Y, X1..X5), each N(100, 20^2) with study_correlation().
// Throws if the covariance is not positive definite.
Dataset generate_mvn_sample(std::size_t n, Rng& rng);
Dataset generate_mvn_sample(std::size_t n, std::uint64_t seed);

// Equal-width classes on [min, max]: breaks at min + i (max - min) / classes,
// intervals closed on the left, the last one closed on both ends. Labels
// c1..cK.
Column categorize_equal_width(const Column& col, std::size_t classes);

// Replaces round(rate n) uniformly chosen cells with N(mean, sd^2) draws.
// Returns the number of replaced cells.
std::size_t inject_outliers(Column& col, double rate, double mean, double sd, Rng& rng);

// Mask (1 = deleted) with exactly round(fraction n) entries set. MCAR samples
// uniformly; MAR and MNAR sample without replacement with probability
// proportional to the shifted driver value (MNAR: the target itself).
std::vector<std::uint8_t> delete_values(const Column& target, Mechanism mechanism, const Column* driver,
                                        double fraction, Rng& rng);

// Probability levels 0, 0.025, ..., 1.
std::vector<double> quantile_levels();

struct MeanMetrics {
  double sB = 0.0;
  double sRMSE = 0.0;
};

struct QuantileMetrics {
  double sDQ = 0.0;
  double sRSDQ = 0.0;
};

// Each element of `completed` is the target (observed + imputed) of one replication.
MeanMetrics metric_mean_reproduction(std::span<const std::vector<double>> completed, double mu);
QuantileMetrics metric_quantile_reproduction(std::span<const std::vector<double>> completed,
                                             std::span<const std::vector<double>> reference_quantiles);
QuantileMetrics metric_quantile_reproduction(std::span<const std::vector<double>> completed,
                                             std::span<const double> reference_quantiles);

std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct RepTrace {
  std::size_t rep = 0;
  std::optional<double> rho;
  double mean = 0.0;
  double dq = 0.0;
  double rsdq = 0.0;
};

struct MethodSummary {
  SimMethod method;
  double rho = 0.0;
  std::size_t rho_reps = 0;  // replications where rho was defined
  double sB = 0.0;
  double sRMSE = 0.0;
  double sDQ = 0.0;
  double sRSDQ = 0.0;
  std::size_t reps_completed = 0;
  std::vector<RepTrace> trace;
};

struct SimReport {
  SimScenario scenario;
  bool user_data = false;
  std::vector<MethodSummary> methods;
  bool partial = false;
  std::vector<std::string> errors;

  const MethodSummary& find(const SimMethod& m) const;
};

// Artificial-data study.
SimReport run_study(const SimScenario& scenario, const std::vector<SimMethod>& methods);

// Same procedure on a user dataset: rows with the target missing are
// dropped, then each replication deletes and re-imputes target values.
SimReport run_study(const SimScenario& scenario, const std::vector<SimMethod>& methods, const Dataset& data);

nlohmann::json to_json(const SimReport& report);
SimScenario scenario_from_json(const nlohmann::json& j);

}  // namespace mgower::sim
