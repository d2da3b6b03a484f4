// mgower: command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mgower/mgower.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Carries an exit status out of a subcommand.
struct Failure {
  int code;
  std::string message;
};

void check(mg_status st) {
  if (st == MG_OK) return;
  throw Failure{st == MG_ERR_USAGE ? kExitUsage : kExitData, mg_last_error()};
}

struct DatasetPtr {
  mg_dataset* p = nullptr;
  DatasetPtr() = default;
  DatasetPtr(const DatasetPtr&) = delete;
  DatasetPtr& operator=(const DatasetPtr&) = delete;
  ~DatasetPtr() { mg_dataset_free(p); }
};

struct ConfigPtr {
  mg_config* p = nullptr;
  ConfigPtr() = default;
  ConfigPtr(const ConfigPtr&) = delete;
  ConfigPtr& operator=(const ConfigPtr&) = delete;
  ~ConfigPtr() { mg_config_free(p); }
};

struct OwnedString {
  char* p = nullptr;
  OwnedString() = default;
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;
  ~OwnedString() { mg_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitData, "cannot open " + path};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitData, "cannot write " + path};
  out << text;
  if (!out.flush()) throw Failure{kExitData, "cannot write " + path};
}

void load(DatasetPtr& d, const std::string& csv, const std::string& schema) {
  check(mg_dataset_load_file(csv.c_str(), schema.c_str(), &d.p));
}

// Flags shared by every distance-based subcommand.
struct DistanceFlags {
  std::string method = "std";
  std::string scale;
  bool force = false;
  std::string weights;
  std::vector<std::string> exclude;
  std::string ordinal = "kr";
  std::string ordinal_scale = "declared";
  bool ordinal_as_numeric = false;
  std::size_t k = 0;
  bool knn_symmetrize = false;
  std::string stats_source;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  void add_to(CLI::App* app, bool with_stats_source) {
    app->add_option("--method", method, "std | iqr | kde1 | kde2 | knn | cond")
        ->check(CLI::IsMember({"std", "iqr", "kde1", "kde2", "knn", "cond"}))
        ->capture_default_str();
    app->add_option("--scale", scale, "range | iqr (default: the method's own)")->check(CLI::IsMember({"range", "iqr"}));
    app->add_flag("--force", force, "allow --method std with --scale iqr (capped IQR distance)");
    app->add_option("--weights", weights, "JSON file {\"column\": weight}")->check(CLI::ExistingFile);
    app->add_option("--exclude", exclude, "column to leave out of the distance (repeatable)");
    app->add_option("--ordinal", ordinal, "ordinal treatment: kr (category positions) | podani (midranks)")
        ->check(CLI::IsMember({"kr", "podani"}))
        ->capture_default_str();
    app->add_option("--ordinal-scale", ordinal_scale, "declared | observed: top category used by kr")
        ->check(CLI::IsMember({"declared", "observed"}))
        ->capture_default_str();
    app->add_flag("--ordinal-as-numeric", ordinal_as_numeric, "cond: treat ordinals in the numeric stage");
    app->add_option("--k", k, "neighbours for --method knn (0 = round(sqrt(n)))")->capture_default_str();
    app->add_flag("--knn-symmetrize", knn_symmetrize, "knn: zero distance if either point is in the other's window");
    if (with_stats_source) {
      app->add_option("--stats-source", stats_source, "rows defining column stats: pooled | recipients | donors")
          ->check(CLI::IsMember({"pooled", "recipients", "donors"}));
    }
    app->add_option("--seed", seed, "tie-break seed")->capture_default_str();
    app->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  }

  void build(ConfigPtr& cfg) const {
    check(mg_config_create(method.c_str(), scale.empty() ? nullptr : scale.c_str(), force ? 1 : 0, &cfg.p));
    if (!weights.empty()) check(mg_config_set_weights_json(cfg.p, read_file(weights).c_str()));
    for (const auto& col : exclude) check(mg_config_exclude(cfg.p, col.c_str()));
    check(mg_config_set_ordinal_policy(cfg.p, ordinal.c_str()));
    check(mg_config_set_ordinal_scale(cfg.p, ordinal_scale.c_str()));
    check(mg_config_set_ordinal_as_numeric(cfg.p, ordinal_as_numeric ? 1 : 0));
    if (k > 0) check(mg_config_set_k(cfg.p, k));
    check(mg_config_set_knn_symmetrize(cfg.p, knn_symmetrize ? 1 : 0));
    if (!stats_source.empty()) check(mg_config_set_stats_source(cfg.p, stats_source.c_str()));
    check(mg_config_set_seed(cfg.p, seed));
    check(mg_config_set_workers(cfg.p, workers));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-type Gower distances, donor matching, hotdeck imputation and simulation"};
  app.set_config("--config", "", "TOML file with default flag values; command-line flags override it");
  app.require_subcommand(1);
  app.set_version_flag("--version", mg_version());

  std::function<void()> run;

  // stats
  std::string stats_data, stats_schema, stats_out;
  auto* stats = app.add_subcommand("stats", "Column statistics of every numeric column as JSON");
  stats->add_option("--data", stats_data, "input CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--schema", stats_schema, "schema JSON")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stats_out, "output JSON (default: stdout)");
  stats->callback([&] {
    run = [&] {
      DatasetPtr d;
      load(d, stats_data, stats_schema);
      OwnedString s;
      check(mg_stats_json(d.p, &s.p));
      emit(stats_out, s.str());
    };
  });

  // dist
  std::string dist_rec, dist_don, dist_schema, dist_out;
  DistanceFlags dist_flags;
  auto* dist = app.add_subcommand("dist", "Distance matrix between recipients and donors as CSV");
  dist->add_option("--recipients", dist_rec, "recipient CSV (matrix rows)")->required()->check(CLI::ExistingFile);
  dist->add_option("--donors", dist_don, "donor CSV (matrix columns; default: the recipients)")
      ->check(CLI::ExistingFile);
  dist->add_option("--schema", dist_schema, "schema JSON")->required()->check(CLI::ExistingFile);
  dist->add_option("--out", dist_out, "output CSV (default: stdout)");
  dist_flags.add_to(dist, true);
  dist->callback([&] {
    run = [&] {
      DatasetPtr a, b;
      load(a, dist_rec, dist_schema);
      if (!dist_don.empty()) load(b, dist_don, dist_schema);
      ConfigPtr cfg;
      dist_flags.build(cfg);
      OwnedString s;
      check(mg_distance_matrix_csv(a.p, b.p ? b.p : a.p, cfg.p, &s.p));
      emit(dist_out, s.str());
    };
  });

  // match
  std::string match_rec, match_don, match_schema, match_out;
  std::size_t top_n = 1;
  DistanceFlags match_flags;
  auto* match = app.add_subcommand("match", "Top-n nearest donors per recipient as CSV");
  match->add_option("--recipients", match_rec, "recipient CSV")->required()->check(CLI::ExistingFile);
  match->add_option("--donors", match_don, "donor CSV")->required()->check(CLI::ExistingFile);
  match->add_option("--schema", match_schema, "schema JSON")->required()->check(CLI::ExistingFile);
  match->add_option("--top-n", top_n, "donors per recipient")->check(CLI::PositiveNumber)->capture_default_str();
  match->add_option("--out", match_out, "output CSV (default: stdout)");
  match_flags.add_to(match, true);
  match->callback([&] {
    run = [&] {
      DatasetPtr a, b;
      load(a, match_rec, match_schema);
      load(b, match_don, match_schema);
      ConfigPtr cfg;
      match_flags.build(cfg);
      mg_matches* m = nullptr;
      check(mg_match(a.p, b.p, cfg.p, top_n, &m));
      std::unique_ptr<mg_matches, void (*)(mg_matches*)> guard(m, mg_matches_free);
      OwnedString s;
      check(mg_matches_to_csv(m, &s.p));
      emit(match_out, s.str());
    };
  });

  // impute
  std::string imp_data, imp_schema, imp_target, imp_out, imp_map;
  std::size_t max_uses = 0;
  bool pooled = false;
  DistanceFlags imp_flags;
  auto* impute = app.add_subcommand("impute", "Nearest-neighbour hotdeck imputation of one column");
  impute->add_option("--data", imp_data, "input CSV")->required()->check(CLI::ExistingFile);
  impute->add_option("--schema", imp_schema, "schema JSON")->required()->check(CLI::ExistingFile);
  impute->add_option("--target", imp_target, "column to impute")->required();
  impute->add_option("--out", imp_out, "completed CSV (default: stdout)");
  impute->add_option("--donor-map", imp_map, "CSV of recipient_id, donor_id, distance");
  impute->add_option("--max-uses", max_uses, "times a donor may be used (0 = unlimited)")->capture_default_str();
  impute->add_flag("--pooled-stats", pooled, "column stats from all rows instead of donors only");
  imp_flags.add_to(impute, false);
  impute->callback([&] {
    run = [&] {
      DatasetPtr d, completed;
      load(d, imp_data, imp_schema);
      ConfigPtr cfg;
      imp_flags.build(cfg);
      OwnedString map, csv;
      check(mg_impute(d.p, imp_target.c_str(), cfg.p, max_uses, pooled ? 1 : 0, &completed.p,
                      imp_map.empty() ? nullptr : &map.p));
      check(mg_dataset_to_csv(completed.p, &csv.p));
      emit(imp_out, csv.str());
      if (!imp_map.empty()) emit(imp_map, map.str());
    };
  });

  // simulate
  std::string sim_scenario = "fourcat", sim_mechanism = "mcar", sim_driver, sim_methods, sim_data, sim_schema,
              sim_target = "Y", sim_out;
  bool sim_outliers = false, sim_trace = false;
  std::size_t sim_reps = 1000, sim_n = 500;
  std::uint64_t sim_seed = 0;
  unsigned sim_workers = 1;
  double sim_fraction = 1.0 / 3.0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo comparison of the distance variants");
  simulate->add_option("--scenario", sim_scenario, "fourcat | threecat")
      ->check(CLI::IsMember({"fourcat", "threecat"}))
      ->capture_default_str();
  simulate->add_flag("--outliers", sim_outliers, "replace 2% of X1 with N(200, 20^2) draws");
  simulate->add_option("--mechanism", sim_mechanism, "mcar | mar | mnar")
      ->check(CLI::IsMember({"mcar", "mar", "mnar"}))
      ->capture_default_str();
  simulate->add_option("--driver", sim_driver, "column driving MAR deletion");
  simulate->add_option("--reps", sim_reps, "replications")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--n", sim_n, "rows per generated sample")->capture_default_str();
  simulate->add_option("--missing-fraction", sim_fraction, "share of target values deleted")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "master seed")->capture_default_str();
  simulate->add_option("--methods", sim_methods, "comma list such as no.mod:range,kde1:iqr (default: all ten)");
  simulate->add_option("--data", sim_data, "user CSV instead of generated data")->check(CLI::ExistingFile);
  simulate->add_option("--schema", sim_schema, "schema JSON for --data")->check(CLI::ExistingFile);
  simulate->add_option("--target", sim_target, "column deleted and imputed")->capture_default_str();
  simulate->add_flag("--trace", sim_trace, "include per-replication metrics");
  simulate->add_option("--workers", sim_workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--out", sim_out, "report JSON (default: stdout)");
  simulate->callback([&] {
    run = [&] {
      if (!sim_data.empty() && sim_schema.empty()) throw Failure{kExitUsage, "--data requires --schema"};
      if (sim_data.empty() && !sim_schema.empty()) throw Failure{kExitUsage, "--schema requires --data"};
      nlohmann::json scenario = {{"n", sim_n},
                                 {"reps", sim_reps},
                                 {"scenario", sim_scenario},
                                 {"outliers", sim_outliers},
                                 {"missing_fraction", sim_fraction},
                                 {"mechanism", sim_mechanism},
                                 {"driver", sim_driver},
                                 {"target", sim_target},
                                 {"seed", sim_seed},
                                 {"workers", sim_workers},
                                 {"trace", sim_trace}};
      DatasetPtr d;
      if (!sim_data.empty()) load(d, sim_data, sim_schema);
      OwnedString s;
      check(mg_simulate(scenario.dump().c_str(), sim_methods.c_str(), d.p, &s.p));
      emit(sim_out, s.str());
    };
  });

  // dummy-report
  std::string dr_data, dr_schema, dr_out;
  auto* dummy = app.add_subcommand("dummy-report", "Dummy-coded distance ratios on categorical data as JSON");
  dummy->add_option("--data", dr_data, "input CSV")->required()->check(CLI::ExistingFile);
  dummy->add_option("--schema", dr_schema, "schema JSON")->required()->check(CLI::ExistingFile);
  dummy->add_option("--out", dr_out, "output JSON (default: stdout)");
  dummy->callback([&] {
    run = [&] {
      DatasetPtr d;
      load(d, dr_data, dr_schema);
      OwnedString s;
      check(mg_dummy_report_json(d.p, &s.p));
      emit(dr_out, s.str());
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run) run();
  } catch (const Failure& f) {
    std::cerr << "mgower: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "mgower: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
