/* C interface to the Newton-series / indefinite-sum engines. All numeric
 * values cross this boundary as decimal strings at the configured precision;
 * returned strings are heap-allocated and must be released with
 * newsum_string_free. Handles are opaque and freed with their *_free call.
 * Every function reports success through newsum_status; on failure,
 * newsum_last_error() holds a thread-local message. */

#ifndef NEWSUM_H
#define NEWSUM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    NEWSUM_OK = 0,
    NEWSUM_ERR_INVALID = 1,  /* structurally invalid request */
    NEWSUM_ERR_PARSE = 2,    /* bad expression / unknown registry name */
    NEWSUM_ERR_DOMAIN = 3,   /* outside the mathematical domain */
    NEWSUM_ERR_INTERNAL = 4,
} newsum_status;

typedef struct newsum_fn newsum_fn;
typedef struct newsum_expansion newsum_expansion;

const char* newsum_version(void);
const char* newsum_last_error(void);
void newsum_string_free(char* s);

/* --- function handles ------------------------------------------------- */

/* spec: registry name with optional parameters, e.g. "power_base[c=0.5]" */
newsum_status newsum_fn_lookup(const char* spec, newsum_fn** out);
/* arithmetic expression in x, e.g. "-ln(x)/x"; domain is x > 0 */
newsum_status newsum_fn_from_expr(const char* expr, newsum_fn** out);
void newsum_fn_free(newsum_fn* fn);
const char* newsum_fn_name(const newsum_fn* fn);
newsum_status newsum_fn_eval(const newsum_fn* fn, const char* x, long precision,
                             char** out_value);

/* --- Newton expansions ------------------------------------------------- */

newsum_status newsum_expand(const newsum_fn* fn, const char* anchor, long order,
                            long precision, newsum_expansion** out);
void newsum_expansion_free(newsum_expansion* e);
long newsum_expansion_order(const newsum_expansion* e);
/* coefficient Delta^k f(a) */
newsum_status newsum_expansion_coefficient(const newsum_expansion* e, long k,
                                           char** out_value);
/* 1 when every tabulated coefficient is numerically zero */
int newsum_expansion_zero_table(const newsum_expansion* e);

typedef struct {
    char* value;
    char* remainder_bound; /* NULL without a certificate */
    char* b_used;          /* NULL without a certificate */
    long terms_used;
    int identically_zero_series;
    const char* status; /* converged_bounded | converged_heuristic |
                           finite_exact | diverged | max_terms */
} newsum_eval_report;

/* b and q (q >= 0) enable the certified remainder bound; pass b = NULL and
 * q = -1 to run on the term-size heuristics alone. */
newsum_status newsum_eval(const newsum_expansion* e, const char* x,
                          const char* tolerance, long max_terms, const char* b,
                          long q, newsum_eval_report* out);
void newsum_eval_report_clear(newsum_eval_report* r);

/* --- principal indefinite sums ----------------------------------------- */

typedef struct {
    char* value;
    char* successive_delta;
    char* richardson;             /* NULL unless requested and measurable */
    char* normalization_residual; /* |f_n[g](1)| at the final n */
    long p_used;
    long n_final;
    double empirical_rate; /* NaN when not measured */
    const char* status;    /* converged | max_n | p_rejected */
} newsum_sigma_result;

newsum_status newsum_sigma(const newsum_fn* fn, const char* x, long p,
                           const char* tolerance, long n_max, long precision,
                           int extrapolate, newsum_sigma_result* out);
void newsum_sigma_result_clear(newsum_sigma_result* r);

/* |Sigma g(x+1) - Sigma g(x) - g(x)| at the given tolerance */
newsum_status newsum_diffeq_residual(const newsum_fn* fn, const char* x,
                                     const char* tolerance, long n_max,
                                     long precision, char** out_residual);

newsum_status newsum_stern(const char* x, const char* tolerance, long max_terms,
                           long precision, char** out_value, long* out_terms,
                           int* out_converged);

/* --- convexity classification ------------------------------------------ */

/* Result is a JSON document (schema in the README): per-order signs,
 * monotonicity labels, difference-to-zero evidence. tolerance may be NULL
 * for the precision-derived default. */
newsum_status newsum_classify(const newsum_fn* fn, long orders,
                              const char* window_lo, const char* window_hi,
                              long samples, const char* tolerance, long precision,
                              uint64_t seed, char** out_json);

/* --- falling-factorial ratio tables ------------------------------------ */

newsum_status newsum_ratio_table(const char* x, const char* a, const char* b,
                                 const long* n_values, size_t count, long precision,
                                 double* out_log_magnitude, int* out_sign);
newsum_status newsum_ratio_slope(const char* x, const char* a, const char* b,
                                 long n_lo, long n_hi, long precision,
                                 double* out_slope);

/* --- reference oracles -------------------------------------------------- */

newsum_status newsum_log_gamma(const char* x, long precision, char** out);
newsum_status newsum_digamma(const char* x, long precision, char** out);
newsum_status newsum_harmonic(const char* x, long precision, char** out);
newsum_status newsum_euler_gamma(long precision, char** out);

/* --- self-verification --------------------------------------------------- */

typedef void (*newsum_line_callback)(const char* line, void* user);

/* suite: all | newton | sigma | classify | oracle. Streams one line per
 * check through the callback; *out_failures counts failed criteria. */
newsum_status newsum_verify(const char* suite, newsum_line_callback cb, void* user,
                            int* out_failures);

#ifdef __cplusplus
}
#endif

#endif
