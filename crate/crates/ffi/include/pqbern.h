#ifndef PQBERN_H
#define PQBERN_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call. Nonzero values leave the out-pointers untouched.
 */
typedef enum PqbStatus {
  PQB_STATUS_OK = 0,
  PQB_STATUS_NULL_POINTER = 1,
  /*
   `0 < q < p <= 1` violated.
   */
  PQB_STATUS_INVALID_PAIR = 2,
  PQB_STATUS_INVALID_PARAMETER = 3,
  /*
   Argument outside the domain, e.g. `x` outside `[0, 1]` or a moment order above 4.
   */
  PQB_STATUS_DOMAIN = 4,
  PQB_STATUS_INDEX_OUT_OF_RANGE = 5,
  PQB_STATUS_PARSE = 6,
  /*
   The target function failed at a node, e.g. `sqrt` of a negative number.
   */
  PQB_STATUS_EVAL = 7,
  PQB_STATUS_BUFFER_TOO_SMALL = 8,
  PQB_STATUS_INTERNAL = 9,
} PqbStatus;

/*
 A target function of `(x, y)`: corpus entry or parsed expression.
 */
typedef struct PqbFunction PqbFunction;

/*
 A bivariate operator with fixed degrees and parameter pairs.
 */
typedef struct PqbOperator PqbOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or NULL. Valid until the next
 failing call on the same thread.
 */
const char *pqb_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *pqb_version(void);

/*
 `[n]_{p,q}`.

 # Safety
 `out` must be NULL or valid for writing one `double`.
 */
enum PqbStatus pqb_pq_integer(uint32_t n, double p, double q, double *out);

/*
 The (p,q)-binomial coefficient `[n over k]_{p,q}`.

 # Safety
 `out` must be NULL or valid for writing one `double`.
 */
enum PqbStatus pqb_pq_binomial(uint32_t n, uint32_t k, double p, double q, double *out);

/*
 Basis weight `R_{n,k}(x)`.

 # Safety
 `out` must be NULL or valid for writing one `double`.
 */
enum PqbStatus pqb_uni_basis(uint32_t n, uint32_t k, double x, double p, double q, double *out);

/*
 All `n + 1` basis weights at `x` into `out[0..len]`; `len` must be at least `n + 1`.

 # Safety
 `out` must be NULL or valid for writing `len` doubles.
 */
enum PqbStatus pqb_uni_basis_row(uint32_t n, double x, double p, double q, double *out, size_t len);

/*
 Image of `t^i`, `i <= 4`, under the univariate operator.

 # Safety
 `out` must be NULL or valid for writing one `double`.
 */
enum PqbStatus pqb_uni_moment(uint32_t i, uint32_t n, double x, double p, double q, double *out);

/*
 Image of `(t - x)^r`, `r <= 4`, under the univariate operator.

 # Safety
 `out` must be NULL or valid for writing one `double`.
 */
enum PqbStatus pqb_uni_central_moment(uint32_t r,
                                      uint32_t n,
                                      double x,
                                      double p,
                                      double q,
                                      double *out);

/*
 `(p_n, q_n)` of a named schedule: `i`, `ii`, `iii` or `fixed:P,Q`.

 # Safety
 `schedule` must be NULL or a NUL-terminated string; `p` and `q` NULL or writable.
 */
enum PqbStatus pqb_schedule_pair(const char *schedule, uint32_t n, double *p, double *q);

/*
 Parses an expression in `x` and `y`.

 # Safety
 `expr` must be NULL or a NUL-terminated string; `out` NULL or writable.
 */
enum PqbStatus pqb_function_parse(const char *expr, struct PqbFunction **out);

/*
 Looks up a corpus function by name.

 # Safety
 `name` must be NULL or a NUL-terminated string; `out` NULL or writable.
 */
enum PqbStatus pqb_function_builtin(const char *name, struct PqbFunction **out);

/*
 # Safety
 `f` must be NULL or a live handle; `out` NULL or writable.
 */
enum PqbStatus pqb_function_eval(const struct PqbFunction *f, double x, double y, double *out);

/*
 Releases a function handle. NULL is ignored.

 # Safety
 `f` must be NULL or a handle from this library that has not been freed.
 */
void pqb_function_free(struct PqbFunction *f);

/*
 Operator of degrees `(n, m)` with pairs `(p1, q1)` in `x` and `(p2, q2)` in `y`.

 # Safety
 `out` must be NULL or writable.
 */
enum PqbStatus pqb_operator_new(uint32_t n,
                                uint32_t m,
                                double p1,
                                double q1,
                                double p2,
                                double q2,
                                struct PqbOperator **out);

/*
 `B_{n,m} f(x, y)`.

 # Safety
 `op` and `f` must be NULL or live handles; `out` NULL or writable.
 */
enum PqbStatus pqb_operator_apply(const struct PqbOperator *op,
                                  const struct PqbFunction *f,
                                  double x,
                                  double y,
                                  double *out);

/*
 Releases an operator handle. NULL is ignored.

 # Safety
 `op` must be NULL or a handle from this library that has not been freed.
 */
void pqb_operator_free(struct PqbOperator *op);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PQBERN_H */
