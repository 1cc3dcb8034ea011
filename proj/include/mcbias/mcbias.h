#ifndef MCBIAS_MCBIAS_H
#define MCBIAS_MCBIAS_H

/* C interface to the mcbias library.
 *
 * Every function returns an mcb_status. Errors leave a message retrievable
 * with mcb_context_last_error; strings returned by the library stay valid
 * until the owning object is destroyed or the next call on the same
 * context. A context must not be used from two threads at once. */

#include <stddef.h>
#include <stdint.h>

#if defined(MCBIAS_BUILDING_LIBRARY)
#define MCBIAS_API __attribute__((visibility("default")))
#else
#define MCBIAS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcb_status {
  MCB_OK = 0,
  MCB_ERR_CONFIG = 1,    /* invalid input or configuration */
  MCB_ERR_NUMERICAL = 2, /* eigensolver or quadrature failure */
  MCB_ERR_INTERNAL = 3   /* anything else, including null arguments */
} mcb_status;

typedef struct mcb_context mcb_context;
typedef struct mcb_result mcb_result;

MCBIAS_API const char* mcb_version(void);

MCBIAS_API mcb_status mcb_context_create(mcb_context** out);
MCBIAS_API void mcb_context_destroy(mcb_context* ctx);
/* Worker threads used when a config does not name "workers" (0 = all cores). */
MCBIAS_API mcb_status mcb_context_set_workers(mcb_context* ctx, size_t workers);
/* Message of the most recent failure on ctx, "" if none. */
MCBIAS_API const char* mcb_context_last_error(const mcb_context* ctx);

/* Runs a JSON config (see docs/config.md). On success *out owns the
 * artifact and summary and must be released with mcb_result_destroy. */
MCBIAS_API mcb_status mcb_run(mcb_context* ctx, const char* config_json, mcb_result** out);
/* Canonical form of a config, with defaults filled in, as the artifact of *out. */
MCBIAS_API mcb_status mcb_normalize_config(mcb_context* ctx, const char* config_json, mcb_result** out);

MCBIAS_API const char* mcb_result_artifact(const mcb_result* r);
MCBIAS_API size_t mcb_result_artifact_size(const mcb_result* r);
MCBIAS_API const char* mcb_result_summary(const mcb_result* r);
/* "csv" or "json". */
MCBIAS_API const char* mcb_result_format(const mcb_result* r);
MCBIAS_API void mcb_result_destroy(mcb_result* r);

typedef struct mcb_bias_report {
  double psi;
  double phi;
  double target_variance;
  double relbias_current;
  double relbias_alternative;
  double mean_variance_gap;
} mcb_bias_report;

/* Analytic bias quantities of a scalar scenario given as JSON:
 * {"model": ..., "y_dist": ..., "s_dist": ..., "j": J, "q": Q}. */
MCBIAS_API mcb_status mcb_bias_report_json(mcb_context* ctx, const char* scenario_json, mcb_bias_report* out);

/* k(y) = E[y^S] for S ~ Unif[1 - alpha, 1 + alpha]. */
MCBIAS_API mcb_status mcb_exponential_k(mcb_context* ctx, double y, double alpha, double* out);

/* Eigendecomposition of a symmetric n x n row-major matrix. Eigenvalues go
 * to values[n] in descending order, eigenvectors to the columns of the
 * row-major vectors[n * n]. */
MCBIAS_API mcb_status mcb_sym_eigen(mcb_context* ctx, const double* matrix, size_t n, double* values,
                                    double* vectors);

#ifdef __cplusplus
}
#endif

#endif
