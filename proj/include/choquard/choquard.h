#ifndef CHOQUARD_H
#define CHOQUARD_H

/* C interface to the Choquard solver library.
 *
 * Every call returns a chq_status; on failure chq_last_error() describes the
 * problem for the calling thread. Strings handed out by the library are
 * released with chq_string_free, handles with their own *_free function.
 * A context is not safe for concurrent use; distinct contexts are independent. */

#include <stddef.h>

#if defined(_WIN32)
#define CHQ_API __declspec(dllexport)
#else
#define CHQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  CHQ_OK = 0,
  CHQ_ERR_USAGE = 1,
  CHQ_ERR_CONFIG = 2,
  CHQ_ERR_NONCONVERGENCE = 3,
  CHQ_ERR_INVARIANT = 4,
  CHQ_ERR_INVALID_ARGUMENT = 5,
  CHQ_ERR_NO_ROOTS = 6,
  CHQ_ERR_IO = 7,
  CHQ_ERR_INTERNAL = 8
} chq_status;

typedef enum { CHQ_BRANCH_PLUS = 0, CHQ_BRANCH_MINUS = 1 } chq_branch;

typedef struct chq_context chq_context;
typedef struct chq_extremal chq_extremal;
typedef struct chq_solution chq_solution;
typedef struct chq_sweep chq_sweep;

CHQ_API const char* chq_version(void);
CHQ_API const char* chq_last_error(void);
CHQ_API const char* chq_status_name(chq_status status);
CHQ_API void chq_string_free(char* s);

/* Config JSON with blocks grid, params, solver and rng_seed; NULL or "" gives the defaults. */
CHQ_API chq_status chq_context_create(const char* config_json, chq_context** out);
CHQ_API chq_status chq_context_load(const char* path, chq_context** out);
CHQ_API void chq_context_free(chq_context* ctx);
/* Resolved config in canonical form. */
CHQ_API chq_status chq_context_config_json(const chq_context* ctx, char** out);

/* The result is cached in the context and reused by relative lambda inputs.
 * On CHQ_ERR_NONCONVERGENCE *out still receives the best partial result. */
CHQ_API chq_status chq_extremal_compute(chq_context* ctx, chq_extremal** out);
CHQ_API double chq_extremal_lambda_n(const chq_extremal* ex);
CHQ_API double chq_extremal_lambda_e(const chq_extremal* ex);
CHQ_API double chq_extremal_el_residual(const chq_extremal* ex);
CHQ_API int chq_extremal_converged(const chq_extremal* ex);
CHQ_API chq_status chq_extremal_to_json(const chq_extremal* ex, char** out);
CHQ_API void chq_extremal_free(chq_extremal* ex);

/* lambda is absolute, or a fraction of lambda_n when relative is nonzero.
 * lambda = 0 is accepted for CHQ_BRANCH_MINUS only. */
CHQ_API chq_status chq_solve(chq_context* ctx, double lambda, int relative, chq_branch branch, chq_solution** out);
CHQ_API double chq_solution_lambda(const chq_solution* s);
CHQ_API double chq_solution_energy(const chq_solution* s);
CHQ_API double chq_solution_norm(const chq_solution* s);
CHQ_API double chq_solution_residual(const chq_solution* s);
/* Copies up to cap node values into values; returns the node count. */
CHQ_API size_t chq_solution_values(const chq_solution* s, double* values, size_t cap);
CHQ_API chq_status chq_solution_to_json(const chq_solution* s, char** out);
CHQ_API void chq_solution_free(chq_solution* s);

/* steps >= 2 equally spaced values on [lambda_min, lambda_max].
 * Returns CHQ_ERR_NONCONVERGENCE with *out set when some rows failed. */
CHQ_API chq_status chq_sweep_run(chq_context* ctx, double lambda_min, double lambda_max, int steps, int relative,
                                 chq_sweep** out);
CHQ_API size_t chq_sweep_rows(const chq_sweep* sw);
CHQ_API size_t chq_sweep_failed_rows(const chq_sweep* sw);
/* Row i: lambda, E1, E2 (NaN for a failed branch). */
CHQ_API chq_status chq_sweep_row(const chq_sweep* sw, size_t i, double* lambda, double* e1, double* e2);
CHQ_API chq_status chq_sweep_to_csv(const chq_sweep* sw, char** out);
CHQ_API void chq_sweep_free(chq_sweep* sw);

/* Fibering table t,Qn,Qe of a named seed profile ("gaussian", "exp_poly",
 * "wide_gaussian") or "extremal". t_max <= 0 means t_zero; *clipped is set
 * when the range was cut back to (0, t_zero]. */
CHQ_API chq_status chq_fibering_csv(chq_context* ctx, const char* profile, double t_min, double t_max, int samples,
                                    char** out, int* clipped);

/* One line per criterion; CHQ_ERR_INVARIANT when any fails. */
CHQ_API chq_status chq_verify(chq_context* ctx, const char* suite, char** report);

CHQ_API double chq_cpq(double p, double q);
CHQ_API double chq_cpq_tilde(double p, double q);

#ifdef __cplusplus
}
#endif

#endif
