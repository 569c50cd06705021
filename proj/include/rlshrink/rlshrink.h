/* C interface to the rlshrink library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns an rls_status; on failure a message for the
 * calling thread is available from rls_last_error(). Matrices cross the
 * boundary as column-major double arrays.
 */
#ifndef RLSHRINK_H
#define RLSHRINK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RLS_BUILDING_LIBRARY)
#    define RLS_API __declspec(dllexport)
#  else
#    define RLS_API __declspec(dllimport)
#  endif
#else
#  define RLS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rls_status {
    RLS_OK = 0,
    RLS_ERR_DIMENSION = 1,
    RLS_ERR_COVARIANCE = 2,
    RLS_ERR_RIDGE = 3,
    RLS_ERR_DEGENERATE = 4,
    RLS_ERR_DIVIDED_DIFFERENCE = 5,
    RLS_ERR_SETTING = 6,
    RLS_ERR_CONFIG = 7,
    RLS_ERR_IO = 8,
    RLS_ERR_UNKNOWN_ESTIMATOR = 9,
    RLS_ERR_INVALID_ARGUMENT = 10,
    RLS_ERR_INTERNAL = 99
} rls_status;

typedef enum rls_ridge_mode {
    RLS_RIDGE_CONSTANT = 0,
    RLS_RIDGE_TRACE = 1
} rls_ridge_mode;

typedef enum rls_sigma_kind {
    RLS_SIGMA_IDENTITY = 0,
    RLS_SIGMA_DIAGONAL = 1, /* p variances */
    RLS_SIGMA_FULL = 2      /* p x p, column-major */
} rls_sigma_kind;

typedef enum rls_minimax_status {
    RLS_MINIMAX = 0,
    RLS_NOT_COVERED = 1,
    RLS_VIOLATES_KNOWN_BOUND = 2
} rls_minimax_status;

typedef struct rls_data rls_data;
typedef struct rls_estimate rls_estimate;
typedef struct rls_experiment rls_experiment;
typedef struct rls_risk_table rls_risk_table;

RLS_API const char* rls_version(void);
RLS_API const char* rls_status_string(rls_status status);
/* Message of the last failed call on this thread; "" if none. */
RLS_API const char* rls_last_error(void);

/* ---- data ---------------------------------------------------------- */

RLS_API rls_status rls_data_create(const double* values, size_t p, size_t n, rls_sigma_kind sigma_kind,
                                   const double* sigma, rls_data** out);
/* sigma_path may be NULL (identity). */
RLS_API rls_status rls_data_load_csv(const char* matrix_path, const char* sigma_path, rls_data** out);
RLS_API void rls_data_destroy(rls_data* data);
RLS_API rls_status rls_data_dims(const rls_data* data, size_t* p, size_t* n);
/* Writes min(cap, m) singular values of the centered, whitened data. */
RLS_API rls_status rls_data_spectrum(const rls_data* data, double* sv, size_t cap, size_t* m, double* trW);

/* ---- estimation ---------------------------------------------------- */

typedef struct rls_estimate_options {
    const char* estimator;     /* S1, S2, D1, D2, S2plus, D2plus, em, em2, emplus, em2plus, js, jsplus, gd, identity, rls */
    rls_ridge_mode ridge_mode; /* used by rls; S*, D* fix their own mode */
    int has_c;                 /* 0: estimator default */
    double c;
    double a, b;               /* weights for rls */
    int positive_part;         /* rls only */
} rls_estimate_options;

RLS_API void rls_estimate_options_init(rls_estimate_options* opts);
RLS_API rls_status rls_estimate_run(const rls_data* data, const rls_estimate_options* opts, rls_estimate** out);
RLS_API void rls_estimate_destroy(rls_estimate* est);

typedef struct rls_estimate_summary {
    size_t p, n;
    size_t factor_count;
    int has_weights;
    double a, b;
    double alpha_hat;
    int has_sure;
    double sure_delta;
    int transposed;
    size_t warning_count;
} rls_estimate_summary;

RLS_API rls_status rls_estimate_summary_get(const rls_estimate* est, rls_estimate_summary* out);
/* p*n column-major values of the estimated mean. */
RLS_API rls_status rls_estimate_theta(const rls_estimate* est, double* out, size_t cap);
RLS_API rls_status rls_estimate_factors(const rls_estimate* est, double* out, size_t cap);
/* NULL when i is out of range. */
RLS_API const char* rls_estimate_warning(const rls_estimate* est, size_t i);
RLS_API rls_status rls_estimate_write_csv(const rls_estimate* est, const char* path);
RLS_API rls_status rls_estimate_write_sidecar(const rls_estimate* est, const char* path);

/* ---- risk estimate and minimaxity ---------------------------------- */

/* Unbiased estimate of np * (risk - risk of X) for the ridge estimator with
 * weights (a, b). Negative means an improvement on X. */
RLS_API rls_status rls_sure_delta(const rls_data* data, rls_ridge_mode mode, double c, double a, double b,
                                  double* out);
/* SURE-minimizing weights; b is 0 unless double_shrink. */
RLS_API rls_status rls_sure_weights(const rls_data* data, rls_ridge_mode mode, double c, int double_shrink,
                                    double* a, double* b, double* alpha_hat);

typedef struct rls_minimax_result {
    int minimax;
    rls_minimax_status status;
    char condition_id[32];
    double margin; /* NaN when no clause applies */
} rls_minimax_result;

RLS_API rls_status rls_minimax_known(size_t n, size_t p, rls_ridge_mode mode, double c, double a, double b,
                                     rls_minimax_result* out);
RLS_API rls_status rls_minimax_estimated(size_t n, size_t p, rls_ridge_mode mode, double c, int double_shrink,
                                         rls_minimax_result* out);

/* ---- simulation ---------------------------------------------------- */

RLS_API rls_status rls_experiment_load(const char* config_path, rls_experiment** out);
RLS_API rls_status rls_experiment_parse(const char* json_text, rls_experiment** out);
RLS_API void rls_experiment_destroy(rls_experiment* exp);
RLS_API rls_status rls_experiment_set_seed(rls_experiment* exp, uint64_t seed);
RLS_API rls_status rls_experiment_set_reps(rls_experiment* exp, size_t reps);
/* workers = 0 uses the hardware concurrency. Output does not depend on it. */
RLS_API rls_status rls_experiment_run(const rls_experiment* exp, unsigned workers, rls_risk_table** out);

RLS_API void rls_risk_table_destroy(rls_risk_table* table);
RLS_API size_t rls_risk_table_total_reps(const rls_risk_table* table);
RLS_API rls_status rls_risk_table_cell(const rls_risk_table* table, size_t row, size_t col, double* mean,
                                       double* se, size_t* failures);
RLS_API rls_status rls_risk_table_write_csv(const rls_risk_table* table, const char* path);
RLS_API rls_status rls_risk_table_write_text(const rls_risk_table* table, const char* path);
/* Pointer valid until the table is destroyed. */
RLS_API const char* rls_risk_table_text(const rls_risk_table* table);

/* ---- random matrix checks ------------------------------------------ */

/* ns and ps have `count` entries; c <= 0 means 1/p at each size. Writes
 * n,p,gamma,gap_a,gap_b,seed rows to csv_path. The median gaps per size are
 * stored in median_gap_a / median_gap_b when these are non-NULL. */
RLS_API rls_status rls_rmt_sweep(const size_t* ns, const size_t* ps, size_t count, size_t seeds, uint64_t seed,
                                 double c, unsigned workers, const char* csv_path, double* median_gap_a,
                                 double* median_gap_b);
RLS_API rls_status rls_mp_stieltjes(double gamma, double x, double* out);

#ifdef __cplusplus
}
#endif

#endif /* RLSHRINK_H */
