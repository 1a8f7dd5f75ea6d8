/*
 * rpcscreen: variable screening for high-dimensional linear regression.
 *
 * C interface over the screening core. All functions returning rpcs_status
 * report failure via a nonzero code; rpcs_last_error() gives a one-line
 * message for the calling thread's most recent failure. Handles are opaque
 * and owned by the caller through the matching destroy function.
 *
 * Matrix arguments are dense column-major doubles.
 */
#ifndef RPCSCREEN_H
#define RPCSCREEN_H

#include <stdint.h>

#if defined(__GNUC__) || defined(__clang__)
#define RPCS_API __attribute__((visibility("default")))
#else
#define RPCS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rpcs_status {
  RPCS_OK = 0,
  RPCS_ERROR_INVALID_ARGUMENT = 1, /* caller broke a precondition            */
  RPCS_ERROR_DATA = 2,             /* unusable data (constant column, ...)    */
  RPCS_ERROR_NUMERIC = 3,          /* factorization or round-off breakdown    */
  RPCS_ERROR_CONFIG = 4,           /* malformed plan / settings document      */
  RPCS_ERROR_NOMEM = 5,
  RPCS_ERROR_INTERNAL = 6
} rpcs_status;

RPCS_API const char* rpcs_version(void);

/* Message for the calling thread's most recent error; empty string if none. */
RPCS_API const char* rpcs_last_error(void);

/*
 * Dataset: raw x (n rows, p columns, column-major) and y (length n).
 * Construction centers and scales columns to unit sample standard deviation
 * and centers y; constant columns are rejected (RPCS_ERROR_DATA).
 */
typedef struct rpcs_dataset rpcs_dataset;

RPCS_API rpcs_status rpcs_dataset_create(const double* x, int64_t n, int64_t p, const double* y,
                                         rpcs_dataset** out);
RPCS_API void rpcs_dataset_destroy(rpcs_dataset* ds);
RPCS_API int64_t rpcs_dataset_rows(const rpcs_dataset* ds);
RPCS_API int64_t rpcs_dataset_cols(const rpcs_dataset* ds);

/* The three standard ridge levels for (n, p): p/n, n*ln(n)/p, n/p. */
RPCS_API rpcs_status rpcs_lambda_presets(int64_t n, int64_t p, double out[3]);

/*
 * Screening result: the selected column indices (0-based, ranked best first)
 * and, for score-based methods, the per-column score vector of length p.
 * rpcs_result_scores returns NULL for union results (their members were
 * ranked, the union itself is just a set). Results are immutable; identical
 * inputs produce identical results regardless of the threads argument.
 */
typedef struct rpcs_result rpcs_result;

RPCS_API void rpcs_result_destroy(rpcs_result* r);
RPCS_API int64_t rpcs_result_size(const rpcs_result* r);
RPCS_API const int64_t* rpcs_result_selected(const rpcs_result* r);
RPCS_API const double* rpcs_result_scores(const rpcs_result* r);

/* threads: worker count for the column-parallel loops; 0 picks a default
 * (RPC_THREADS environment variable, then hardware). */
RPCS_API rpcs_status rpcs_screen_rpc(const rpcs_dataset* ds, double lambda, int64_t k,
                                     int threads, rpcs_result** out);
RPCS_API rpcs_status rpcs_screen_rpc_union(const rpcs_dataset* ds, const double* lambdas,
                                           int64_t n_lambdas, int64_t k, int threads,
                                           rpcs_result** out);
RPCS_API rpcs_status rpcs_screen_holp(const rpcs_dataset* ds, double lambda, int64_t k,
                                      int threads, rpcs_result** out);
RPCS_API rpcs_status rpcs_screen_sis(const rpcs_dataset* ds, int64_t k, rpcs_result** out);
/* Forward regression needs k <= min(n-2, p). */
RPCS_API rpcs_status rpcs_screen_fr(const rpcs_dataset* ds, int64_t k, rpcs_result** out);

/*
 * Run a benchmark plan document (a JSON object or array of them: see the
 * bundled plans). Outputs are NUL-terminated strings allocated by the
 * library; release each with rpcs_free_string. Any output pointer may be
 * NULL if that rendering is not wanted. When has_seed_override is nonzero,
 * seed_override replaces every plan's base seed.
 */
RPCS_API rpcs_status rpcs_simulate_plan_json(const char* plan_json, int threads,
                                             uint64_t seed_override, int has_seed_override,
                                             char** metrics_json_out, char** table_text_out,
                                             char** table_csv_out);
RPCS_API void rpcs_free_string(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RPCSCREEN_H */
