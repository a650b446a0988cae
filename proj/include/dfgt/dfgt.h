/* C interface to the dynamic Gaussian transform library.
 *
 * A dfgt_handle owns a weighted point set in R^dim and answers additive-eps
 * approximations of G(t) = sum_j q_j * exp(-||t - s_j||^2 / delta) under
 * inserts and deletes. All functions return DFGT_OK on success; on failure
 * the handle's last-error message (dfgt_last_error) describes the problem.
 *
 * Concurrency: concurrent dfgt_kde_query calls on one handle are safe; every
 * other operation needs exclusive access to the handle.
 */
#ifndef DFGT_H
#define DFGT_H

#include <stddef.h>

#if defined(_WIN32)
#define DFGT_API
#elif defined(DFGT_BUILDING)
#define DFGT_API __attribute__((visibility("default")))
#else
#define DFGT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct dfgt_handle dfgt_handle;

typedef enum dfgt_status {
  DFGT_OK = 0,
  DFGT_ERROR_INVALID_ARGUMENT = 1, /* bad sizes or out-of-range parameters */
  DFGT_ERROR_INVALID_DATA = 2,     /* non-finite values, malformed files */
  DFGT_ERROR_NOT_FOUND = 3,        /* delete of an unregistered point */
  DFGT_ERROR_ACCURACY = 4,         /* eps unattainable within parameter caps */
  DFGT_ERROR_STATE = 5,            /* operation needs state that is absent */
  DFGT_ERROR_IO = 6,               /* file open/read/write failure */
  DFGT_ERROR_INTERNAL = 7
} dfgt_status;

/* Derived and configured parameters of a handle. */
typedef struct dfgt_info {
  size_t dim;
  double delta;
  double eps;
  double r;
  double side;          /* grid box side length, r * sqrt(2*delta) */
  int order;            /* expansion order p; order^dim coefficients per box */
  int radius;           /* neighbor radius k in boxes */
  double charge_budget; /* sum|q| the parameters are valid for */
  size_t count;         /* registered points */
  double abs_charge;    /* current sum|q| */
} dfgt_info;

/* Builds a structure over `count` points of `dim` coordinates each
 * (points laid out row-major: point j at points[j*dim..j*dim+dim)).
 * Requirements: 1 <= dim <= 8, delta > 0, 0 < eps < 1, 0 < r <= 0.5,
 * capacity >= 0 (pre-sizes the charge budget; 0 means size to the data).
 * On success *out owns the structure; free it with dfgt_destroy. */
DFGT_API dfgt_status dfgt_create(size_t dim, double delta, double eps, double r,
                                 double capacity, const double* points,
                                 const double* charges, size_t count,
                                 dfgt_handle** out);

DFGT_API void dfgt_destroy(dfgt_handle* handle);

DFGT_API dfgt_status dfgt_insert(dfgt_handle* handle, const double* point, double charge);

/* Removes the most recently inserted registry entry whose coordinates match
 * `point` bitwise. */
DFGT_API dfgt_status dfgt_delete(dfgt_handle* handle, const double* point);

DFGT_API dfgt_status dfgt_kde_query(dfgt_handle* handle, const double* target,
                                    double* out_value);

/* Approximate K*q over the registered points, insertion order. `charges` and
 * `out_values` hold dfgt_size(handle) entries. Does not modify the registered
 * charges; retains a session for dfgt_matvec_delta. */
DFGT_API dfgt_status dfgt_matvec(dfgt_handle* handle, const double* charges,
                                 size_t count, double* out_values);

/* Applies `n_changes` sparse charge updates (indices into the matvec vector)
 * to the retained session and reports every product entry that can change.
 * out_indices/out_values receive up to `capacity` entries; *out_count is set
 * to the number needed. Fails with DFGT_ERROR_INVALID_ARGUMENT if capacity is
 * too small (*out_count still reports the required size) and with
 * DFGT_ERROR_STATE if no session exists. */
DFGT_API dfgt_status dfgt_matvec_delta(dfgt_handle* handle, const size_t* indices,
                                       const double* new_charges, size_t n_changes,
                                       size_t* out_indices, double* out_values,
                                       size_t capacity, size_t* out_count);

DFGT_API dfgt_status dfgt_rebuild(dfgt_handle* handle);

DFGT_API dfgt_status dfgt_size(const dfgt_handle* handle, size_t* out_count);
DFGT_API dfgt_status dfgt_get_info(const dfgt_handle* handle, dfgt_info* out_info);

/* Exact (brute force) transform over the registered points; the oracle the
 * approximation is measured against. O(count) per call. */
DFGT_API dfgt_status dfgt_exact_kde(const dfgt_handle* handle, const double* target,
                                    double* out_value);

DFGT_API dfgt_status dfgt_save(const dfgt_handle* handle, const char* path);
DFGT_API dfgt_status dfgt_load(const char* path, dfgt_handle** out);

/* Static name of a status code, e.g. "DFGT_ERROR_NOT_FOUND". */
DFGT_API const char* dfgt_status_name(dfgt_status status);

/* Message of the most recent failure on the handle. With handle == NULL,
 * the most recent dfgt_create/dfgt_load failure on this thread. The pointer
 * is valid until the next failing call. */
DFGT_API const char* dfgt_last_error(const dfgt_handle* handle);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DFGT_H */
