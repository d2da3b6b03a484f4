#ifndef MGOWER_MGOWER_H
#define MGOWER_MGOWER_H

/* C interface to the mixed-type Gower distance engine.
 *
 * Every function returning mg_status reports failures through the return
 * value; mg_last_error() then holds a message for the calling thread.
 * Strings handed out by the library are released with mg_string_free,
 * handles with their matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MGOWER_BUILDING_LIBRARY)
#    define MG_API __declspec(dllexport)
#  else
#    define MG_API __declspec(dllimport)
#  endif
#else
#  define MG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mg_status {
  MG_OK = 0,
  MG_ERR_USAGE = 1,     /* bad argument or configuration */
  MG_ERR_DATA = 2,      /* input violates a data contract */
  MG_ERR_SCHEMA = 3,    /* malformed schema or CSV header mismatch */
  MG_ERR_UNDEFINED = 4, /* no defined distance where one is required */
  MG_ERR_INTERNAL = 5
} mg_status;

typedef struct mg_dataset mg_dataset;
typedef struct mg_config mg_config;
typedef struct mg_matches mg_matches;

MG_API const char* mg_last_error(void);
MG_API const char* mg_version(void);
MG_API void mg_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

/* schema_json: {"col": {"kind": ..., "categories": [...], "missing_token": ...}, ...} */
MG_API mg_status mg_dataset_load(const char* csv_text, const char* schema_json, mg_dataset** out);
MG_API mg_status mg_dataset_load_file(const char* csv_path, const char* schema_path, mg_dataset** out);
MG_API void mg_dataset_free(mg_dataset* data);
MG_API size_t mg_dataset_rows(const mg_dataset* data);
MG_API size_t mg_dataset_cols(const mg_dataset* data);
/* Cell as stored: numeric value, 0/1, or 0-based category index; NaN if missing. */
MG_API mg_status mg_dataset_cell(const mg_dataset* data, size_t row, size_t col, double* out);
MG_API mg_status mg_dataset_to_csv(const mg_dataset* data, char** out);

/* Per numeric column: n, min, max, R, q25, q75, IQR, sd, h (c = 1.06 and 0.9), k. */
MG_API mg_status mg_stats_json(const mg_dataset* data, char** out);

/* ---- distance configuration -------------------------------------------- */

/* method: std | iqr | kde1 | kde2 | knn | cond; scale: range | iqr (NULL = method default).
 * force lets std run with iqr scaling, which then means the capped IQR distance. */
MG_API mg_status mg_config_create(const char* method, const char* scale, int force, mg_config** out);
MG_API void mg_config_free(mg_config* cfg);
MG_API mg_status mg_config_set_weight(mg_config* cfg, const char* column, double weight);
/* {"col": weight, ...} */
MG_API mg_status mg_config_set_weights_json(mg_config* cfg, const char* json);
MG_API mg_status mg_config_exclude(mg_config* cfg, const char* column);
MG_API mg_status mg_config_set_seed(mg_config* cfg, uint64_t seed);
MG_API mg_status mg_config_set_workers(mg_config* cfg, unsigned workers);
/* kr | podani */
MG_API mg_status mg_config_set_ordinal_policy(mg_config* cfg, const char* policy);
/* declared | observed */
MG_API mg_status mg_config_set_ordinal_scale(mg_config* cfg, const char* scale);
MG_API mg_status mg_config_set_ordinal_as_numeric(mg_config* cfg, int enabled);
/* k for the k-nn window; 0 = round(sqrt(n)). */
MG_API mg_status mg_config_set_k(mg_config* cfg, size_t k);
MG_API mg_status mg_config_set_knn_symmetrize(mg_config* cfg, int enabled);
/* pooled | recipients | donors */
MG_API mg_status mg_config_set_stats_source(mg_config* cfg, const char* source);

/* ---- distances and matching --------------------------------------------- */

/* out: rows(a) * rows(b) doubles, row-major; NaN marks an undefined distance. */
MG_API mg_status mg_distance_matrix(const mg_dataset* a, const mg_dataset* b, const mg_config* cfg, double* out);
/* Header "id,<donor ids>", one line per recipient, 6 decimals, NA when undefined. */
MG_API mg_status mg_distance_matrix_csv(const mg_dataset* a, const mg_dataset* b, const mg_config* cfg,
                                        char** out);

MG_API mg_status mg_match(const mg_dataset* recipients, const mg_dataset* donors, const mg_config* cfg, size_t n,
                          mg_matches** out);
MG_API void mg_matches_free(mg_matches* m);
MG_API size_t mg_matches_recipients(const mg_matches* m);
MG_API size_t mg_matches_per_recipient(const mg_matches* m);
MG_API mg_status mg_matches_get(const mg_matches* m, size_t recipient, size_t rank, size_t* donor, double* distance);
MG_API size_t mg_matches_ties(const mg_matches* m, size_t recipient);
/* recipient_id,rank,donor_id,distance; rank starts at 1. */
MG_API mg_status mg_matches_to_csv(const mg_matches* m, char** out);

/* ---- imputation ---------------------------------------------------------- */

/* Nearest-neighbour hotdeck on `target`. max_uses = 0 means unlimited; pooled
 * computes column stats on all rows instead of donors only. donor_map (may be
 * NULL) receives recipient_id,donor_id,distance. */
MG_API mg_status mg_impute(const mg_dataset* data, const char* target, const mg_config* cfg, size_t max_uses,
                           int pooled, mg_dataset** completed, char** donor_map);

/* ---- simulation and diagnostics ----------------------------------------- */

/* scenario_json keys: n, reps, scenario (fourcat|threecat), outliers, outlier_rate,
 * outlier_mean, outlier_sd, missing_fraction, mechanism (mcar|mar|mnar), driver,
 * target, seed, workers, trace. methods: comma separated "kde1:iqr" style list,
 * NULL or "" for all ten. data: NULL for the artificial study. */
MG_API mg_status mg_simulate(const char* scenario_json, const char* methods, const mg_dataset* data,
                             char** report_json);

MG_API mg_status mg_dummy_report_json(const mg_dataset* data, char** out);

#ifdef __cplusplus
}
#endif

#endif
