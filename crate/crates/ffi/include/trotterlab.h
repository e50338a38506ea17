/* C interface for the trotterlab exact splitting laboratory.
 *
 * Hand-maintained to match crates/ffi/src/lib.rs; a test in
 * crates/ffi/tests/capi.rs fails if the two drift apart.
 *
 * Conventions:
 *   - every handle type is opaque; create through the out-pointer
 *     constructors and release with the matching tl_*_free;
 *   - every fallible call returns a TlStatus; nonzero values mirror the
 *     trotterlab CLI exit codes (2 hypothesis violated, 3 decomposition
 *     failed, 4 term explosion, 5 invalid argument) plus 6 for null
 *     pointers and 7 for a panic caught at the boundary;
 *   - after a failure, tl_last_error_message() returns a description
 *     for the calling thread; free it with tl_string_free().
 */

#ifndef TROTTERLAB_H
#define TROTTERLAB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum TlStatus {
  TL_OK = 0,
  TL_HYPOTHESIS_VIOLATED = 2,
  TL_DECOMPOSITION_FAILED = 3,
  TL_TERM_EXPLOSION = 4,
  TL_INVALID_ARGUMENT = 5,
  TL_NULL_POINTER = 6,
  TL_PANIC = 7,
} TlStatus;

/* Opaque handles. */
typedef struct TlMatrix TlMatrix;
typedef struct TlDecomposition TlDecomposition;
typedef struct TlOperator TlOperator;
typedef struct TlFunction TlFunction;

/* Library version as a static NUL-terminated string; do not free. */
const char *tl_version(void);

/* Message from the most recent failed call on this thread, or NULL.
 * Caller frees with tl_string_free(). */
char *tl_last_error_message(void);

/* Release a string returned by this library. NULL is a no-op. */
void tl_string_free(char *s);

/* Create an n-by-n matrix from row-major entries. */
TlStatus tl_matrix_new(size_t n, const double *entries, TlMatrix **out);
void tl_matrix_free(TlMatrix *m);

/* Eigendecompose a matrix with the given tolerance. */
TlStatus tl_decompose(const TlMatrix *m, double tol, TlDecomposition **out);
size_t tl_decomposition_n(const TlDecomposition *d);
/* Copy the eigenvalues, ascending, into out (length >= n). */
TlStatus tl_decomposition_eigenvalues(const TlDecomposition *d, double *out);
void tl_decomposition_free(TlDecomposition *d);

/* Check the eigenvalue-gap hypothesis; an unsatisfied gap is still TL_OK. */
TlStatus tl_check_gap(const TlMatrix *a, const TlMatrix *b, double tol,
                      double *gap_out, bool *satisfied_out);

/* Exact solution operator at time t for the decomposed system. */
TlStatus tl_semigroup_operator(const TlDecomposition *d, double t,
                               TlOperator **out);

/* Exact splitting product [S(t/m) T(t/m)]^m. */
TlStatus tl_trotter_operator(const TlDecomposition *da,
                             const TlDecomposition *db, double t, size_t m,
                             TlOperator **out);

/* Compose two operators: the result acts as a after b. */
TlStatus tl_operator_compose(const TlOperator *a, const TlOperator *b,
                             TlOperator **out);

size_t tl_operator_term_count(const TlOperator *op);
size_t tl_operator_n(const TlOperator *op);

/* Support certificate: inputs vanishing on x <= a map to outputs
 * vanishing on x <= *out. */
TlStatus tl_operator_vanishing_edge(const TlOperator *op, double a,
                                    double *out);

/* Two-sided operator-norm bracket on the sup-normed function space. */
TlStatus tl_operator_norm_bounds(const TlOperator *op, size_t restarts,
                                 uint64_t seed, double *lower_out,
                                 double *upper_out);

/* Term-matched sup distance between two operators. */
TlStatus tl_operator_distance(const TlOperator *a, const TlOperator *b,
                              double *out);

/* Apply an operator to a function, producing a new function. */
TlStatus tl_operator_apply(const TlOperator *op, const TlFunction *f,
                           TlFunction **out);
void tl_operator_free(TlOperator *op);

/* Unit bump input aligned with the decomposition's top eigenvector. */
TlStatus tl_bump_direction(const TlDecomposition *d, TlFunction **out);

size_t tl_function_n(const TlFunction *f);
/* Evaluate at x, writing n components into out. */
TlStatus tl_function_eval(const TlFunction *f, double x, double *out);
void tl_function_free(TlFunction *f);

/* Run the divergence experiment; *out receives the JSON report (no
 * timestamp, byte-deterministic). Caller frees with tl_string_free(). */
TlStatus tl_divergence_report_json(const TlMatrix *a, const TlMatrix *b,
                                   double t, const size_t *m_list,
                                   size_t m_len, size_t points_per_unit,
                                   size_t restarts, uint64_t seed, double tol,
                                   char **out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TROTTERLAB_H */
