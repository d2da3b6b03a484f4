#include "mgower/mgower.h"

#include <cmath>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "core/column_stats.hpp"
#include "core/csv.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/gower.hpp"
#include "core/imputation.hpp"
#include "core/simulation.hpp"
#include "json.hpp"

struct mg_dataset {
  mgower::Dataset data;
};

struct mg_config {
  mgower::DistanceConfig config;
};

struct mg_matches {
  mgower::MatchResult result;
  std::size_t per_recipient = 0;
  std::vector<std::string> recipient_ids;
  std::vector<std::string> donor_ids;
};

namespace {

thread_local std::string last_error;

mg_status fail(mg_status code, const char* what) {
  last_error = what;
  return code;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
mg_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return MG_OK;
  } catch (const mgower::UsageError& e) {
    return fail(MG_ERR_USAGE, e.what());
  } catch (const mgower::SchemaError& e) {
    return fail(MG_ERR_SCHEMA, e.what());
  } catch (const mgower::UndefinedDistanceError& e) {
    return fail(MG_ERR_UNDEFINED, e.what());
  } catch (const mgower::DataError& e) {
    return fail(MG_ERR_DATA, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(MG_ERR_USAGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MG_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw mgower::UsageError(std::string(what) + " must not be NULL");
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

extern "C" {

const char* mg_last_error(void) { return last_error.c_str(); }

const char* mg_version(void) { return "0.1.0"; }

void mg_string_free(char* s) { delete[] s; }

// ---------------------------------------------------------------------------

mg_status mg_dataset_load(const char* csv_text, const char* schema_json, mg_dataset** out) {
  return guarded([&] {
    require(csv_text, "csv_text");
    require(schema_json, "schema_json");
    require(out, "out");
    *out = nullptr;
    const auto schema = mgower::Schema::from_json(schema_json);
    *out = new mg_dataset{mgower::load_dataset(std::string_view(csv_text), schema)};
  });
}

mg_status mg_dataset_load_file(const char* csv_path, const char* schema_path, mg_dataset** out) {
  return guarded([&] {
    require(csv_path, "csv_path");
    require(schema_path, "schema_path");
    require(out, "out");
    *out = nullptr;
    const auto schema = mgower::Schema::from_file(schema_path);
    *out = new mg_dataset{mgower::load_dataset_file(csv_path, schema)};
  });
}

void mg_dataset_free(mg_dataset* data) { delete data; }

size_t mg_dataset_rows(const mg_dataset* data) { return data ? data->data.n_rows() : 0; }

size_t mg_dataset_cols(const mg_dataset* data) { return data ? data->data.n_cols() : 0; }

mg_status mg_dataset_cell(const mg_dataset* data, size_t row, size_t col, double* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    if (col >= data->data.n_cols() || row >= data->data.n_rows()) throw mgower::UsageError("cell index out of range");
    *out = data->data.column(col).values[row];
  });
}

mg_status mg_dataset_to_csv(const mg_dataset* data, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = dup_string(mgower::to_csv(data->data));
  });
}

mg_status mg_stats_json(const mg_dataset* data, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    nlohmann::json columns = nlohmann::json::array();
    for (const auto& col : data->data.columns()) {
      if (col.kind.kind != mgower::Kind::Numeric) continue;
      if (col.n_observed() == 0) {
        columns.push_back({{"column", col.name}, {"n", 0}});
        continue;
      }
      const auto s = mgower::compute_stats(col);
      std::optional<double> h1, h2;
      if (s.n >= 2) {
        h1 = mgower::silverman_bandwidth(s, s.n, mgower::kKde1Factor);
        h2 = mgower::silverman_bandwidth(s, s.n, mgower::kKde2Factor);
      }
      columns.push_back({{"column", col.name},
                         {"n", s.n},
                         {"min", s.min},
                         {"max", s.max},
                         {"R", s.range},
                         {"q25", s.q25},
                         {"q75", s.q75},
                         {"IQR", s.iqr},
                         {"sd", s.sd},
                         {"h_kde1", optional_number(h1)},
                         {"h_kde2", optional_number(h2)},
                         {"k", mgower::default_k(s.n)}});
    }
    const nlohmann::json report = {{"rows", data->data.n_rows()}, {"columns", columns}};
    *out = dup_string(report.dump(2) + "\n");
  });
}

// ---------------------------------------------------------------------------

mg_status mg_config_create(const char* method, const char* scale, int force, mg_config** out) {
  return guarded([&] {
    require(method, "method");
    require(out, "out");
    *out = nullptr;
    *out = new mg_config{mgower::make_config(method, scale ? scale : "", force != 0)};
  });
}

void mg_config_free(mg_config* cfg) { delete cfg; }

mg_status mg_config_set_weight(mg_config* cfg, const char* column, double weight) {
  return guarded([&] {
    require(cfg, "cfg");
    require(column, "column");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw mgower::UsageError("weights must be finite and >= 0");
    cfg->config.weights[column] = weight;
  });
}

mg_status mg_config_set_weights_json(mg_config* cfg, const char* json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(json, "json");
    const auto j = nlohmann::json::parse(json);
    if (!j.is_object()) throw mgower::UsageError("weights must be a JSON object of column -> weight");
    std::map<std::string, double> weights;
    for (const auto& [name, w] : j.items()) {
      if (!w.is_number()) throw mgower::UsageError("weight of '" + name + "' is not a number");
      const double v = w.get<double>();
      if (!(v >= 0.0) || !std::isfinite(v)) throw mgower::UsageError("weights must be finite and >= 0");
      weights[name] = v;
    }
    for (const auto& [name, v] : weights) cfg->config.weights[name] = v;
  });
}

mg_status mg_config_exclude(mg_config* cfg, const char* column) {
  return guarded([&] {
    require(cfg, "cfg");
    require(column, "column");
    cfg->config.excluded.insert(column);
  });
}

mg_status mg_config_set_seed(mg_config* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->config.tie_seed = seed;
  });
}

mg_status mg_config_set_workers(mg_config* cfg, unsigned workers) {
  return guarded([&] {
    require(cfg, "cfg");
    if (workers < 1) throw mgower::UsageError("workers must be >= 1");
    cfg->config.workers = workers;
  });
}

mg_status mg_config_set_ordinal_policy(mg_config* cfg, const char* policy) {
  return guarded([&] {
    require(cfg, "cfg");
    require(policy, "policy");
    const std::string p = policy;
    if (p == "kr") {
      cfg->config.ordinal = mgower::OrdinalPolicy::KaufmanRousseeuw;
    } else if (p == "podani") {
      cfg->config.ordinal = mgower::OrdinalPolicy::Podani;
    } else {
      throw mgower::UsageError("unknown ordinal policy '" + p + "' (expected kr|podani)");
    }
  });
}

mg_status mg_config_set_ordinal_scale(mg_config* cfg, const char* scale) {
  return guarded([&] {
    require(cfg, "cfg");
    require(scale, "scale");
    const std::string s = scale;
    if (s == "declared") {
      cfg->config.ordinal_scale = mgower::OrdinalScale::DeclaredCategories;
    } else if (s == "observed") {
      cfg->config.ordinal_scale = mgower::OrdinalScale::ObservedMax;
    } else {
      throw mgower::UsageError("unknown ordinal scale '" + s + "' (expected declared|observed)");
    }
  });
}

mg_status mg_config_set_ordinal_as_numeric(mg_config* cfg, int enabled) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->config.conditional.ordinal_as_numeric = enabled != 0;
  });
}

mg_status mg_config_set_k(mg_config* cfg, size_t k) {
  return guarded([&] {
    require(cfg, "cfg");
    if (cfg->config.numeric.kind != mgower::NumericMethodKind::KnnWindow) {
      throw mgower::UsageError("k only applies to the knn method");
    }
    cfg->config.numeric.k = k;
  });
}

mg_status mg_config_set_knn_symmetrize(mg_config* cfg, int enabled) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->config.knn_symmetrize = enabled != 0;
  });
}

mg_status mg_config_set_stats_source(mg_config* cfg, const char* source) {
  return guarded([&] {
    require(cfg, "cfg");
    require(source, "source");
    const std::string s = source;
    if (s == "pooled") {
      cfg->config.stats_source = mgower::StatsSource::Pooled;
    } else if (s == "recipients") {
      cfg->config.stats_source = mgower::StatsSource::First;
    } else if (s == "donors") {
      cfg->config.stats_source = mgower::StatsSource::Second;
    } else {
      throw mgower::UsageError("unknown stats source '" + s + "' (expected pooled|recipients|donors)");
    }
  });
}

// ---------------------------------------------------------------------------

mg_status mg_distance_matrix(const mg_dataset* a, const mg_dataset* b, const mg_config* cfg, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(cfg, "cfg");
    require(out, "out");
    const auto m = mgower::distance_matrix(a->data, b->data, cfg->config);
    std::copy(m.values.begin(), m.values.end(), out);
  });
}

mg_status mg_distance_matrix_csv(const mg_dataset* a, const mg_dataset* b, const mg_config* cfg, char** out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(cfg, "cfg");
    require(out, "out");
    const auto m = mgower::distance_matrix(a->data, b->data, cfg->config);
    std::ostringstream os;
    std::vector<std::string> row{"id"};
    for (const auto& id : b->data.row_ids()) row.push_back(id);
    mgower::csv::write_row(os, row);
    for (std::size_t i = 0; i < m.rows; ++i) {
      row.assign(1, a->data.row_ids()[i]);
      for (std::size_t j = 0; j < m.cols; ++j) {
        const auto d = m.defined(i, j);
        row.push_back(d ? mgower::csv::format_fixed6(*d) : "NA");
      }
      mgower::csv::write_row(os, row);
    }
    *out = dup_string(os.str());
  });
}

mg_status mg_match(const mg_dataset* recipients, const mg_dataset* donors, const mg_config* cfg, size_t n,
                   mg_matches** out) {
  return guarded([&] {
    require(recipients, "recipients");
    require(donors, "donors");
    require(cfg, "cfg");
    require(out, "out");
    *out = nullptr;
    auto m = new mg_matches{mgower::top_n_matches(recipients->data, donors->data, cfg->config, n), n,
                            recipients->data.row_ids(), donors->data.row_ids()};
    *out = m;
  });
}

void mg_matches_free(mg_matches* m) { delete m; }

size_t mg_matches_recipients(const mg_matches* m) { return m ? m->result.recipients.size() : 0; }

size_t mg_matches_per_recipient(const mg_matches* m) { return m ? m->per_recipient : 0; }

mg_status mg_matches_get(const mg_matches* m, size_t recipient, size_t rank, size_t* donor, double* distance) {
  return guarded([&] {
    require(m, "m");
    if (recipient >= m->result.recipients.size() || rank >= m->per_recipient) {
      throw mgower::UsageError("match index out of range");
    }
    const auto& match = m->result.recipients[recipient].matches[rank];
    if (donor) *donor = match.donor;
    if (distance) *distance = match.distance;
  });
}

size_t mg_matches_ties(const mg_matches* m, size_t recipient) {
  if (!m || recipient >= m->result.recipients.size()) return 0;
  return m->result.recipients[recipient].ties_at_cut;
}

mg_status mg_matches_to_csv(const mg_matches* m, char** out) {
  return guarded([&] {
    require(m, "m");
    require(out, "out");
    std::ostringstream os;
    mgower::csv::write_row(os, {"recipient_id", "rank", "donor_id", "distance"});
    for (std::size_t r = 0; r < m->result.recipients.size(); ++r) {
      const auto& list = m->result.recipients[r].matches;
      for (std::size_t k = 0; k < list.size(); ++k) {
        mgower::csv::write_row(os, {m->recipient_ids[r], std::to_string(k + 1), m->donor_ids[list[k].donor],
                                    mgower::csv::format_fixed6(list[k].distance)});
      }
    }
    *out = dup_string(os.str());
  });
}

// ---------------------------------------------------------------------------

mg_status mg_impute(const mg_dataset* data, const char* target, const mg_config* cfg, size_t max_uses, int pooled,
                    mg_dataset** completed, char** donor_map) {
  return guarded([&] {
    require(data, "data");
    require(target, "target");
    require(cfg, "cfg");
    require(completed, "completed");
    *completed = nullptr;
    if (donor_map) *donor_map = nullptr;
    mgower::ImputationOptions options;
    if (max_uses > 0) options.max_uses = max_uses;
    options.pooled_stats = pooled != 0;
    auto result = mgower::nn_hotdeck(data->data, target, cfg->config, options);

    std::string map_text;
    if (donor_map) {
      const auto& ids = data->data.row_ids();
      std::ostringstream os;
      mgower::csv::write_row(os, {"recipient_id", "donor_id", "distance"});
      for (std::size_t k = 0; k < result.recipients.size(); ++k) {
        mgower::csv::write_row(os, {ids[result.recipients[k]], ids[result.donors[k]],
                                    mgower::csv::format_fixed6(result.distances[k])});
      }
      map_text = os.str();
    }
    auto* handle = new mg_dataset{std::move(result.completed)};
    if (donor_map) *donor_map = dup_string(map_text);
    *completed = handle;
  });
}

mg_status mg_simulate(const char* scenario_json, const char* methods, const mg_dataset* data, char** report_json) {
  return guarded([&] {
    require(report_json, "report_json");
    *report_json = nullptr;
    const auto j = scenario_json && *scenario_json ? nlohmann::json::parse(scenario_json) : nlohmann::json::object();
    const auto scenario = mgower::sim::scenario_from_json(j);

    std::vector<mgower::sim::SimMethod> list;
    if (methods && *methods) {
      std::string_view rest = methods;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = rest.substr(0, comma);
        if (!item.empty()) list.push_back(mgower::sim::parse_method(item));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
      if (list.empty()) throw mgower::UsageError("empty method list");
    } else {
      list = mgower::sim::all_methods();
    }

    const auto report = data ? mgower::sim::run_study(scenario, list, data->data)
                             : mgower::sim::run_study(scenario, list);
    *report_json = dup_string(mgower::sim::to_json(report).dump(2) + "\n");
  });
}

mg_status mg_dummy_report_json(const mg_dataset* data, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    const auto report = mgower::dummy_equivalence_report(data->data);
    const auto& ids = data->data.row_ids();
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : report.pairs) {
      pairs.push_back({{"i", ids[p.i]},
                       {"j", ids[p.j]},
                       {"p", p.p},
                       {"dice", p.dice},
                       {"manhattan", p.manhattan},
                       {"euclidean_sq", p.euclidean_sq},
                       {"simple_matching", p.simple_matching},
                       {"manhattan_over_dice", optional_number(p.manhattan_over_dice)},
                       {"euclidean_sq_over_dice", optional_number(p.euclidean_sq_over_dice)},
                       {"sm_p_over_dice", optional_number(p.sm_p_over_dice)}});
    }
    const nlohmann::json j = {{"n_dummies", report.n_dummies}, {"pairs", pairs}};
    *out = dup_string(j.dump(2) + "\n");
  });
}

}  // extern "C"
