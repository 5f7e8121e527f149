/* C API for the lena optimization library: opaque handles + error codes.
 * Every function returning int yields LENA_OK (0) on success or a
 * lena_status error code; lena_last_error() describes the most recent
 * failure on the calling thread. Handles are freed with the matching
 * *_free function; NULL is always safe to free. */

#ifndef LENA_H
#define LENA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LENA_API __declspec(dllexport)
#else
#define LENA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lena_status {
  LENA_OK = 0,
  LENA_ERR_INVALID_ARGUMENT = 1,
  LENA_ERR_UNSUPPORTED = 2,
  LENA_ERR_NUMERIC = 3,
  LENA_ERR_IO = 4,
  LENA_ERR_CONFIG = 5
} lena_status;

typedef enum lena_estimator {
  LENA_ESTIMATOR_SPIDER = 0,
  LENA_ESTIMATOR_STORM = 1
} lena_estimator;

typedef enum lena_algorithm {
  LENA_ALGO_LENA_SPIDER = 0,
  LENA_ALGO_LENA_STORM = 1,
  LENA_ALGO_SGD = 2,
  LENA_ALGO_PERTURBED_SGD = 3,
  LENA_ALGO_SPIDER = 4
} lena_algorithm;

typedef enum lena_run_status {
  LENA_RUN_CONVERGED = 0,
  LENA_RUN_BUDGET_EXHAUSTED = 1
} lena_run_status;

typedef struct lena_problem lena_problem;
typedef struct lena_params lena_params;
typedef struct lena_result lena_result;
typedef struct lena_config lena_config;
typedef struct lena_report lena_report;

typedef struct lena_certificate {
  double grad_norm;
  double min_eig;
  double eps;
  double eps_h;
  double residual;
  double slack;
  int32_t pass;
  int32_t iterations;
} lena_certificate;

LENA_API const char *lena_version(void);
LENA_API const char *lena_status_name(int status);
/* Thread-local message for the last failing call on this thread. */
LENA_API const char *lena_last_error(void);
LENA_API void lena_string_free(char *s);

/* ------------------------------------------------------------------ */
/* problems                                                            */

LENA_API int lena_matrix_sensing_create(int32_t d, int32_t r, int32_t n, uint64_t seed,
                                        lena_problem **out);
LENA_API int lena_saddle_quartic_create(const double *lambda, int32_t dim, double sigma,
                                        int32_t noise_pairs, uint64_t noise_seed,
                                        lena_problem **out);
LENA_API void lena_problem_free(lena_problem *p);
LENA_API int lena_problem_dim(const lena_problem *p, int32_t *out);
/* Effective constants over the operating ball; any output may be NULL. */
LENA_API int lena_problem_constants(const lena_problem *p, double *smoothness,
                                    double *hessian_lipschitz, double *noise_bound);
LENA_API int lena_problem_value(const lena_problem *p, const double *x, int32_t dim, double *out);
LENA_API int lena_problem_gradient(const lena_problem *p, const double *x, int32_t dim,
                                   double *out);
LENA_API int lena_problem_save(const lena_problem *p, const char *path);
LENA_API int lena_problem_load(const char *path, lena_problem **out);
/* Matrix sensing only. A negative alpha selects the default scale;
 * alpha = 0 is the literal zero start. */
LENA_API int lena_matrix_sensing_saddle_init(const lena_problem *p, double alpha, uint64_t seed,
                                             double *x0, int32_t dim);
LENA_API int lena_matrix_sensing_relative_error(const lena_problem *p, const double *x,
                                                int32_t dim, double *out);

/* ------------------------------------------------------------------ */
/* hyperparameters                                                     */

LENA_API int lena_params_derive(int estimator, double eps, double eps_h, double delta,
                                double sigma, double smoothness, double hessian_lipschitz,
                                double value_gap, int32_t dim, lena_params **out);
/* Blank manual parameter set (fill via lena_params_set). */
LENA_API int lena_params_manual(int estimator, double eps, double eps_h, double delta,
                                lena_params **out);
LENA_API void lena_params_free(lena_params *p);
/* Keys: eps, eps_h, delta, sigma, L, rho, Delta, dim, eta, eta_h, r,
 * t_thres, dbar, B, b, q, a, a_raw, C, budget, sgd_step, sgd_batch,
 * noise_period. */
LENA_API int lena_params_get(const lena_params *p, const char *key, double *out);
LENA_API int lena_params_set(lena_params *p, const char *key, double value);
/* Multi-line "name = value" dump; free with lena_string_free. */
LENA_API int lena_params_describe(const lena_params *p, char **out);

/* ------------------------------------------------------------------ */
/* single runs                                                         */

/* Runs one trial from x0 (NULL = origin). trace_path NULL skips the trace
 * file. Baseline algorithms read sgd_step / sgd_batch / noise_period from
 * the params handle; perturbed SGD takes r as its noise radius and plain
 * SPIDER uses eta/B/b/q with eps as its stop gate. */
LENA_API int lena_optimize(const lena_problem *problem, const lena_params *params, int algorithm,
                           uint64_t seed, const double *x0, int32_t dim, const char *trace_path,
                           int32_t log_every, lena_result **out);
LENA_API void lena_result_free(lena_result *r);
LENA_API int lena_result_status(const lena_result *r, int32_t *out);
LENA_API int lena_result_evals(const lena_result *r, int64_t *out);
LENA_API int lena_result_steps(const lena_result *r, int64_t *out);
LENA_API int lena_result_point(const lena_result *r, double *x, int32_t dim);

/* ------------------------------------------------------------------ */
/* certification                                                       */

LENA_API int lena_certify(const lena_problem *problem, const double *x, int32_t dim, double eps,
                          double eps_h, double tol, uint64_t seed, lena_certificate *out);

/* ------------------------------------------------------------------ */
/* configs and experiments                                             */

LENA_API int lena_config_load(const char *path, lena_config **out);
LENA_API int lena_config_parse(const char *text, lena_config **out);
LENA_API void lena_config_free(lena_config *c);
/* key is "section.key", e.g. "algorithm.name". */
LENA_API int lena_config_override(lena_config *c, const char *key, const char *value);
LENA_API int lena_config_serialize(const lena_config *c, char **out);
/* Derives (theorem mode) or assembles (manual mode) the driver parameters
 * the config describes. */
LENA_API int lena_params_from_config(const lena_config *c, lena_params **out);

/* Runs every configured trial, writing traces/points/summary under the
 * config's out_dir. */
LENA_API int lena_experiment_run(const lena_config *c, lena_report **out);
LENA_API void lena_report_free(lena_report *r);
LENA_API int lena_report_count(const lena_report *r, int32_t *out);
/* Fields: seed, status, final_objective, relative_error (-1 when absent),
 * sgrad_evals, steps, wall_time_s, cert_pass (-1 when absent), grad_norm,
 * min_eig. */
LENA_API int lena_report_get(const lena_report *r, int32_t index, const char *field, double *out);
/* Returned pointers live as long as the report. */
LENA_API const char *lena_report_trace_path(const lena_report *r, int32_t index);
LENA_API const char *lena_report_error(const lena_report *r, int32_t index);
LENA_API const char *lena_report_summary_path(const lena_report *r);

/* Certify a point against the config's problem at (eps, eps_h). */
LENA_API int lena_certify_from_config(const lena_config *c, const char *point_path,
                                      lena_certificate *out);

/* ------------------------------------------------------------------ */
/* plots                                                               */

/* Writes the plot-data CSV (and an SVG when svg_path is non-NULL). */
LENA_API int lena_plot_emit(const char *const *trace_paths, int32_t count, const char *data_path,
                            const char *svg_path);

#ifdef __cplusplus
}
#endif

#endif /* LENA_H */
