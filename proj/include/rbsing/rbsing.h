#ifndef RBSING_H
#define RBSING_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RBSING_API __declspec(dllexport)
#else
#define RBSING_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rbsing_status {
    RBSING_OK = 0,
    RBSING_E_INVALID = 1,     /* bad argument or parameter */
    RBSING_E_BUDGET = 2,      /* memory / enumeration budget exceeded */
    RBSING_E_DEGENERATE = 3,  /* degenerate nullspace */
    RBSING_E_PROPERTY = 4,    /* internal property check failed */
    RBSING_E_STATE = 5,       /* call out of order (e.g. output before run) */
    RBSING_E_INTERNAL = 6
} rbsing_status;

/* Opaque experiment handle: configuration, fixtures and the finished result. */
typedef struct rbsing_experiment rbsing_experiment;

RBSING_API const char* rbsing_version(void);

/* Message of the last failing call on this thread; empty string if none. */
RBSING_API const char* rbsing_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
RBSING_API void rbsing_string_free(char* s);

/* Number of experiments and their names ("enum-singularity", ...). */
RBSING_API size_t rbsing_experiment_count(void);
RBSING_API const char* rbsing_experiment_name(size_t index);

RBSING_API rbsing_status rbsing_experiment_create(const char* name, rbsing_experiment** out);
RBSING_API void rbsing_experiment_destroy(rbsing_experiment* e);

/* Keys: n p s delta nu eps L trials seed workers pilot model grid budget bound.
   Lists (n, grid) are comma separated; rationals accept "1/2" or "0.5". */
RBSING_API rbsing_status rbsing_experiment_set(rbsing_experiment* e, const char* key, const char* value);

/* Whole pinned-constants document (JSON object keyed by experiment name). */
RBSING_API rbsing_status rbsing_experiment_load_fixtures(rbsing_experiment* e, const char* json_text);

RBSING_API rbsing_status rbsing_experiment_run(rbsing_experiment* e);

RBSING_API rbsing_status rbsing_experiment_json(const rbsing_experiment* e, char** out);
RBSING_API rbsing_status rbsing_experiment_csv(const rbsing_experiment* e, char** out);
/* JSON array of the point objects only. */
RBSING_API rbsing_status rbsing_experiment_points_json(const rbsing_experiment* e, char** out);
/* rounding-suite: JSON array of the certificates found. */
RBSING_API rbsing_status rbsing_experiment_archive_json(const rbsing_experiment* e, char** out);

/* Evaluates the assertion criteria. *passed is 1 when all pass; *report has one PASS/FAIL line each. */
RBSING_API rbsing_status rbsing_experiment_check(const rbsing_experiment* e, int* passed, char** report);

/* Loaded fixtures with this run's pinned entry replaced (pilot runs). */
RBSING_API rbsing_status rbsing_experiment_updated_fixtures(const rbsing_experiment* e, char** out);

/* Direct operations. */

/* Exact determinant of a row-major n x n integer matrix, as a decimal string. */
RBSING_API rbsing_status rbsing_det_exact(const int64_t* data, size_t n, char** out);

/* Exact singularity probability of the n x n Bernoulli(p) (model "bernoulli") or sign matrix; n <= 4. */
RBSING_API rbsing_status rbsing_enum_singularity(size_t n, const char* p, const char* model, char** out_rational);

/* L(sum b_i x_i, t) for integer x and b_i ~ Bernoulli(p). */
RBSING_API rbsing_status rbsing_levy_integer(const int64_t* x, size_t n, const char* p, double t, double* out);

/* Threshold T_p(x, L) for a real vector x (n <= 25). */
RBSING_API rbsing_status rbsing_threshold(const double* x, size_t n, const char* p, double L, double* out);

#ifdef __cplusplus
}
#endif

#endif
