#ifndef KERNEL_ROOTS_H
#define KERNEL_ROOTS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KR_API __declspec(dllexport)
#elif defined(KR_BUILDING_LIBRARY)
#define KR_API __attribute__((visibility("default")))
#else
#define KR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The CLI maps them to exit codes: INVALID_ARGUMENT -> 2,
   UNSUPPORTED -> 3, everything else nonzero -> 1. */
typedef enum kr_status {
    KR_OK = 0,
    KR_INVALID_ARGUMENT = 1,
    KR_UNSUPPORTED = 2,
    KR_UNDEFINED = 3,
    KR_INTERNAL = 4
} kr_status;

/* Message of the last failed call on this thread ("" if none). */
KR_API const char* kr_last_error(void);
KR_API const char* kr_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
KR_API void kr_string_free(char* s);

/* ---- spaces ---- */

typedef struct kr_space kr_space;

/* exponents: num_terms * n row-major; c2: num_terms positive values. */
KR_API kr_status kr_space_create(int n, size_t num_terms, const int64_t* exponents, const double* c2,
                                 kr_space** out);
KR_API kr_status kr_space_from_json(const char* json, kr_space** out);
KR_API kr_status kr_space_to_json(const kr_space* s, char** out);
KR_API void kr_space_destroy(kr_space* s);

KR_API int kr_space_dim(const kr_space* s);
KR_API size_t kr_space_num_terms(const kr_space* s);
/* Terms are sorted lexicographically by exponent. exponent: n entries. */
KR_API kr_status kr_space_term(const kr_space* s, size_t index, int64_t* exponent, double* c2);

KR_API kr_status kr_space_kostlan(int n, kr_space** out);
KR_API kr_status kr_space_product(const kr_space* a, const kr_space* b, kr_space** out);
KR_API kr_status kr_space_power(const kr_space* s, int d, kr_space** out);
/* Hull vertices, sorted; n <= 3. Call with vertices == NULL to get the
   count, then with room for *count * n entries. */
KR_API kr_status kr_space_hull(const kr_space* s, int64_t* vertices, size_t* count);

/* ---- kernel geometry; x has n entries ---- */

KR_API kr_status kr_log_kernel_norm(const kr_space* s, const double* x, double* out);
KR_API kr_status kr_momentum(const kr_space* s, const double* x, double* out);
/* out: n * n row-major. */
KR_API kr_status kr_metric(const kr_space* s, const double* x, double* out);

/* ---- convex geometry ---- */

KR_API double kr_ball_volume(int n);
KR_API double kr_projective_volume(int n);
KR_API kr_status kr_tech_identity_residual(int n, double* out);

/* shapes: n matrices of n * n entries each (row-major, symmetric PSD).
   grid: 0 for the default route, see the README. */
KR_API kr_status kr_mixed_volume_ellipsoids(int n, const double* shapes, int grid, double* out);
KR_API kr_status kr_expected_abs_det(int n, const double* covariances, int grid, double* out);

/* ---- expected roots ---- */

typedef struct kr_quad_config {
    int nodes_per_axis;
    int subdivisions;
    int mv_grid;
} kr_quad_config;

KR_API kr_quad_config kr_quad_config_default(void);

/* A box union: num_boxes boxes, lo/hi hold num_boxes * n values. */
typedef struct kr_domain {
    int n;
    size_t num_boxes;
    const double* lo;
    const double* hi;
} kr_domain;

typedef struct kr_estimate {
    double value;
    double error_estimate;
} kr_estimate;

KR_API kr_status kr_density(const kr_space* const* spaces, int n, const double* x, const kr_quad_config* cfg,
                            double* out);
KR_API kr_status kr_expected_roots(const kr_space* const* spaces, int n, const kr_domain* domain,
                                   const kr_quad_config* cfg, kr_estimate* out);
/* Sum over all 2^n sign conditions, with `log_region` giving log|X| for
   every orthant. */
KR_API kr_status kr_expected_roots_signed(const kr_space* const* spaces, int n, const kr_domain* log_region,
                                          const kr_quad_config* cfg, kr_estimate* out);
KR_API kr_status kr_veronese_volume(const kr_space* s, const kr_domain* domain, const kr_quad_config* cfg,
                                    kr_estimate* out);

/* Generic root count in the complex torus, n <= 3. */
KR_API kr_status kr_generic_count(const kr_space* const* spaces, int n, int64_t* out);
/* points[i] holds counts[i] * n coordinates; the hull is taken. */
KR_API kr_status kr_generic_count_points(int n, const int64_t* const* points, const size_t* counts, int64_t* out);

/* ---- Monte Carlo ---- */

typedef struct kr_mc_estimate {
    double mean;
    double standard_error;
    uint64_t samples;
    uint64_t flagged_samples;
    uint32_t flags;
} kr_mc_estimate;

/* cells: grid cells per axis for the 1D / 2D root counters, 0 for default. */
KR_API kr_status kr_mc_expected_roots(const kr_space* const* spaces, int n, const kr_domain* domain, uint64_t samples,
                                      uint64_t seed, int cells, kr_mc_estimate* out);
KR_API kr_status kr_mc_expected_roots_signed(const kr_space* const* spaces, int n, const kr_domain* log_region,
                                             uint64_t samples, uint64_t seed, int cells, kr_mc_estimate* out);
KR_API kr_status kr_mc_abs_det(int n, const double* covariances, uint64_t samples, uint64_t seed,
                               kr_mc_estimate* out);

/* ---- verification suites ---- */

/* suite: identities, additivity, scaling, subadd, vitale. size <= 0 picks
   the default. *report receives canonical JSON. */
KR_API kr_status kr_verify(const char* suite, uint64_t seed, int size, char** report, int* passed);

#ifdef __cplusplus
}
#endif

#endif
