/*
 * C interface to the ulil library: degenerate pair-sum statistics,
 * their iterated-logarithm normalizations, bilinear-form norms and
 * concentration-bound calculators.
 *
 * Conventions:
 *   - every function returns ulil_status; results go to out-parameters
 *   - 0 means success; on failure ulil_last_error() describes the cause
 *   - objects returned through ** out-params are owned by the caller
 *     and released with the matching _destroy function
 *   - all randomness is counter-based: (seed, stream, index) determines
 *     a draw, so results are reproducible across runs and thread counts
 */
#ifndef ULIL_H
#define ULIL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ULIL_API __declspec(dllexport)
#else
#define ULIL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    ULIL_OK = 0,
    ULIL_ERR_ARGUMENT = 2,
    ULIL_ERR_NUMERIC = 3
} ulil_status;

/* Message for the most recent failure on this thread. */
ULIL_API const char* ulil_last_error(void);
ULIL_API const char* ulil_version(void);

/* ---- input laws ---- */

typedef struct ulil_dist ulil_dist;

/* name: "rademacher" | "uniform01" | "gaussian01" */
ULIL_API ulil_status ulil_dist_create(const char* name, ulil_dist** out);
ULIL_API ulil_status ulil_dist_create_discrete(const double* values, const double* weights,
                                               size_t n, ulil_dist** out);
ULIL_API void ulil_dist_destroy(ulil_dist* d);
ULIL_API ulil_status ulil_sample_stream(const ulil_dist* d, uint64_t seed, uint64_t stream,
                                        size_t n, double* out);
ULIL_API ulil_status ulil_dist_quantile(const ulil_dist* d, double p, double* out);

/* ---- kernels ---- */

typedef struct ulil_kernel ulil_kernel;

ULIL_API ulil_status ulil_kernel_create_product(const ulil_dist* d, double scale,
                                                ulil_kernel** out);
ULIL_API ulil_status ulil_kernel_create_sum(const ulil_dist* d, double scale, ulil_kernel** out);
ULIL_API ulil_status ulil_kernel_create_zero(const ulil_dist* d, ulil_kernel** out);
/* Indicator-block kernel over uniform01: amplitudes a, support lengths b. */
ULIL_API ulil_status ulil_kernel_create_block(const ulil_dist* d, const double* a,
                                              const double* b, size_t blocks, double scale,
                                              ulil_kernel** out);
/* Constant-amplitude block family with b_n = exp(-exp(a*a*n/b)). */
ULIL_API ulil_status ulil_kernel_create_block_doubleexp(const ulil_dist* d, double a, double b,
                                                        double scale, ulil_kernel** out);
/* Finite-rank expansion; phi_family: "legendre" | "hermite" | "identity" | "auto". */
ULIL_API ulil_status ulil_kernel_create_finite_rank(const ulil_dist* d, const double* lambdas,
                                                    size_t rank, const char* phi_family,
                                                    double scale, ulil_kernel** out);
ULIL_API void ulil_kernel_destroy(ulil_kernel* k);
ULIL_API ulil_status ulil_kernel_eval(const ulil_kernel* k, double x, double y, double* out);
/* Block truncation index of the doubly-exponential family; -1 otherwise. */
ULIL_API ulil_status ulil_kernel_truncated_at(const ulil_kernel* k, int* out);
ULIL_API int ulil_kernel_has_separable(const ulil_kernel* k);

/* One line per catalog family. */
ULIL_API ulil_status ulil_catalog_text(char* buf, size_t cap, size_t* needed);

/* ---- pair sums ---- */

typedef enum {
    ULIL_SUM_PLAIN = 0,                /* sum over i != j of h(x_i, x_j) */
    ULIL_SUM_RANDOMIZED = 1,           /* signs eps_i eps_j, i != j */
    ULIL_SUM_DECOUPLED = 2,            /* all (i, j) of h(x_i, y_j) */
    ULIL_SUM_DECOUPLED_RANDOMIZED = 3  /* signs eps_i eps2_j, all (i, j) */
} ulil_sum_variant;

/* Pass NULL/0 for arrays a variant does not use. */
ULIL_API ulil_status ulil_sum_exact(const ulil_kernel* k, ulil_sum_variant variant,
                                    const double* x, size_t nx, const double* y, size_t ny,
                                    const double* eps, size_t neps, const double* eps2,
                                    size_t neps2, double* out);
ULIL_API ulil_status ulil_sum_separable(const ulil_kernel* k, ulil_sum_variant variant,
                                        const double* x, size_t nx, const double* y, size_t ny,
                                        const double* eps, size_t neps, const double* eps2,
                                        size_t neps2, double* out);

/* ---- projections ---- */

typedef struct ulil_projection ulil_projection;

ULIL_API ulil_status ulil_projection_create(const ulil_kernel* k, const ulil_dist* d, size_t m,
                                            uint64_t seed, ulil_projection** out);
ULIL_API void ulil_projection_destroy(ulil_projection* p);
ULIL_API ulil_status ulil_projection_mean(const ulil_projection* p, double* out);
ULIL_API ulil_status ulil_projection_pi1(const ulil_projection* p, double x, double* out);
ULIL_API ulil_status ulil_projection_pi2(const ulil_projection* p, double x, double y,
                                         double* out);
ULIL_API int ulil_projection_analytic(const ulil_projection* p);

/* ---- constrained bilinear norm ---- */

typedef struct {
    double value;
    int restarts_used;
    int converged;
} ulil_chaos_result;

/* entries: row-major rows x cols. b_out/c_out are optional witness
 * buffers of length rows / cols. */
ULIL_API ulil_status ulil_chaos_norm(const double* entries, size_t rows, size_t cols, double t,
                                     int restarts, ulil_chaos_result* out, double* b_out,
                                     double* c_out);
ULIL_API ulil_status ulil_chaos_norm_oracle(const double* entries, size_t rows, size_t cols,
                                            double t, double grid_step, double* out);

/* ---- tail bounds ---- */

ULIL_API ulil_status ulil_talagrand_bound(double t, double u, double v, double k, double* out);
ULIL_API ulil_status ulil_talagrand_bound_weak_variance(double t, double u, double sigma2,
                                                        double ez_abs, double k, double* out);
ULIL_API ulil_status ulil_prohorov_bound(double t, double u, double sigma2, double* out);
ULIL_API ulil_status ulil_bernstein_bound(double t, double u, double sigma2, double* out);

typedef struct {
    double probability;
    double threshold;
    double se;
    int holds;
} ulil_latala_result;

ULIL_API ulil_status ulil_latala_lower_check(const double* entries, size_t rows, size_t cols,
                                             double t, double c, int exhaustive, size_t samples,
                                             uint64_t seed, ulil_latala_result* out);
/* All 2^(rows+cols) signed chaos values; out must hold that many. */
ULIL_API ulil_status ulil_chaos_sign_values(const double* entries, size_t rows, size_t cols,
                                            double* out);

/* ---- condition estimators ---- */

/* Arrays are parallel to u; any of values/se/ratio may be NULL. */
ULIL_API ulil_status ulil_truncated_moment_curve(const ulil_kernel* k, const ulil_dist* d,
                                                 const double* u, size_t n, size_t mc_samples,
                                                 uint64_t seed, double* values, double* se,
                                                 double* ratio, double* limsup, int* analytic);

typedef struct {
    double value;
    int method; /* 0 analytic, 1 empirical, 2 schur */
    size_t sample_m;
    double lo, hi;
    int bootstrap_resamples;
} ulil_opnorm_result;

ULIL_API ulil_status ulil_operator_norm(const ulil_kernel* k, const ulil_dist* d, size_t m,
                                        uint64_t seed, ulil_opnorm_result* out);
ULIL_API ulil_status ulil_operator_norm_empirical(const ulil_kernel* k, const ulil_dist* d,
                                                  size_t m, uint64_t seed, int bootstrap,
                                                  ulil_opnorm_result* out);
ULIL_API ulil_status ulil_schur_bound(const ulil_kernel* k, const ulil_dist* d, size_t probe_m,
                                      uint64_t seed, double* bound);

/* f/g are row-major (levels x probes); c has one entry per level. */
ULIL_API ulil_status ulil_truncation_profile(const ulil_kernel* k, const ulil_dist* d, int n_lo,
                                             int n_hi, const double* probes, size_t n_probes,
                                             size_t mc_samples, uint64_t seed, double* f,
                                             double* g, double* c);

typedef struct ulil_report ulil_report;

ULIL_API ulil_status ulil_certify(const ulil_kernel* k, const ulil_dist* d, size_t probe_count,
                                  size_t mc_samples, size_t operator_m, uint64_t seed,
                                  ulil_report** out);
ULIL_API void ulil_report_destroy(ulil_report* r);
/* keys: canonical.pass, canonical.certified, canonical.max_abs,
 * canonical.threshold, cond_b.limsup, cond_b.certified, cond_b.grid_top,
 * cond_c.value, cond_c.method, cond_c.ci_lo, cond_c.ci_hi, schur.upper */
ULIL_API ulil_status ulil_report_value(const ulil_report* r, const char* key, double* out);
ULIL_API ulil_status ulil_report_text(const ulil_report* r, char* buf, size_t cap,
                                      size_t* needed);

/* ---- trajectory simulator ---- */

typedef struct ulil_trajectory ulil_trajectory;

typedef struct {
    int k;
    uint64_t n;
    double raw_sum;
    double norm_nl2n;       /* raw / (n L2 n) */
    double norm_2nl2n;      /* raw / (2 n L2 n) */
    double intrablock_sup;  /* separable engine only, NaN otherwise */
} ulil_checkpoint;

/* engine: 0 generic (max_exponent <= 14), 1 separable (<= 26). */
ULIL_API ulil_status ulil_run_trajectory(const ulil_kernel* k, const ulil_dist* d,
                                         ulil_sum_variant variant, int engine, int max_exponent,
                                         uint64_t seed, ulil_trajectory** out);
ULIL_API void ulil_trajectory_destroy(ulil_trajectory* t);
ULIL_API size_t ulil_trajectory_size(const ulil_trajectory* t);
ULIL_API ulil_status ulil_trajectory_row(const ulil_trajectory* t, size_t index,
                                         ulil_checkpoint* out);
ULIL_API int ulil_trajectory_overflow(const ulil_trajectory* t);
ULIL_API int ulil_default_burn_in(int max_exponent);

typedef struct {
    double median_nl2n, iqr_nl2n;
    double median_2nl2n, iqr_2nl2n;
} ulil_limsup_result;

/* per_seed buffers are optional (length = count). */
ULIL_API ulil_status ulil_limsup_estimate(const ulil_trajectory* const* trajectories,
                                          size_t count, int burn_in, ulil_limsup_result* out,
                                          double* per_seed_nl2n, double* per_seed_2nl2n);

typedef struct {
    double hull_lo, hull_hi;
    int has_predicted;
    double predicted_lo, predicted_hi;
    size_t point_count;
} ulil_limit_set_result;

/* Two-call pattern: points may be NULL to query point_count first. */
ULIL_API ulil_status ulil_limit_set_estimate(const ulil_trajectory* const* trajectories,
                                             size_t count, int burn_in, const ulil_kernel* k,
                                             const ulil_dist* d, size_t gram_m,
                                             uint64_t gram_seed, ulil_limit_set_result* out,
                                             double* points, size_t points_cap);

ULIL_API ulil_status ulil_numerical_range(const ulil_kernel* k, const ulil_dist* d,
                                          size_t gram_m, uint64_t seed, double* lo, double* hi);

/* certified = operator_norm + sqrt(max(trunc_limsup, 0)); ratio compares
 * the empirical limsup against it (1 when both vanish). */
ULIL_API ulil_status ulil_sandwich(double operator_norm, double trunc_limsup, double empirical,
                                   double* certified, double* ratio, int* flagged);

#ifdef __cplusplus
}
#endif

#endif /* ULIL_H */
