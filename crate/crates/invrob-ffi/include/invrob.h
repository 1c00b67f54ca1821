#ifndef INVROB_H
#define INVROB_H

/* Generated by cbindgen from the invrob-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status of an interface call.
typedef enum InvrobStatus {
  // The call succeeded.
  INVROB_STATUS_OK = 0,
  // The solver ran and failed to converge or to evaluate the model.
  INVROB_STATUS_ERR_SOLVER = 1,
  // The instance admits no feasible decision, or a checked point is
  // infeasible.
  INVROB_STATUS_ERR_INFEASIBLE = 2,
  // Malformed input: JSON, dimensions, budgets, or an undersized buffer.
  INVROB_STATUS_ERR_INPUT = 3,
  // A panic was caught at the boundary; state may be stale but memory is
  // intact.
  INVROB_STATUS_ERR_PANIC = 4,
  // A required pointer was null.
  INVROB_STATUS_ERR_NULL = 5,
} InvrobStatus;

// Opaque handle for a loaded problem instance.
typedef struct InvrobProblem InvrobProblem;

// Opaque handle for a solve outcome.
typedef struct InvrobResult InvrobResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failing call on this thread. The pointer
// stays valid until the next failing call on the same thread. Never null;
// empty before any failure.
const char *invrob_last_error(void);

// Parses a problem file (JSON) into a solver instance. `margin` bounds any
// unbounded scenario or decision coordinate; pass 0 or a negative value
// for the built-in default. On success `*out` owns the instance; release
// it with invrob_problem_free().
enum InvrobStatus invrob_problem_from_json(const char *json,
                                           double margin,
                                           struct InvrobProblem **out);

// Replaces the instance's budget vector with `eps[0..len]`.
enum InvrobStatus invrob_problem_set_eps(struct InvrobProblem *problem,
                                         const double *eps,
                                         uintptr_t len);

// Solves the instance with default settings. On success `*out` owns the
// result; release it with invrob_result_free().
enum InvrobStatus invrob_solve(const struct InvrobProblem *problem, struct InvrobResult **out);

// Optimal coverage value of a result, or NaN for a null handle.
double invrob_result_value(const struct InvrobResult *result);

// Copies the optimal decision vector into `buf` (capacity `cap`). The
// required length lands in `*written` when non-null; pass a null `buf` to
// query the length alone.
enum InvrobStatus invrob_result_decision(const struct InvrobResult *result,
                                         double *buf,
                                         uintptr_t cap,
                                         uintptr_t *written);

// Copies the optimal coverage-set coordinates into `buf`; same contract as
// invrob_result_decision().
enum InvrobStatus invrob_result_design(const struct InvrobResult *result,
                                       double *buf,
                                       uintptr_t cap,
                                       uintptr_t *written);

// Serializes the full result as JSON. On success `*out` owns the string;
// release it with invrob_string_free().
enum InvrobStatus invrob_result_json(const struct InvrobResult *result, char **out);

// Releases a problem handle. Null is a no-op.
void invrob_problem_free(struct InvrobProblem *problem);

// Releases a result handle. Null is a no-op.
void invrob_result_free(struct InvrobResult *result);

// Releases a string returned by invrob_result_json(). Null is a no-op.
void invrob_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVROB_H */
