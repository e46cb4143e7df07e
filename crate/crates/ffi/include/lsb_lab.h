#ifndef LSB_LAB_H
#define LSB_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LsbStatus {
  LSB_STATUS_OK = 0,
  LSB_STATUS_NULL_POINTER = 1,
  LSB_STATUS_INVALID_UTF8 = 2,
  LSB_STATUS_INVALID_CONFIG = 3,
  LSB_STATUS_GROUP_MISMATCH = 4,
  LSB_STATUS_DOMAIN = 5,
  LSB_STATUS_UNSUPPORTED = 6,
  LSB_STATUS_SINGULAR = 7,
  LSB_STATUS_CONSTRAINT_VIOLATION = 8,
  LSB_STATUS_DIVERGED = 9,
  LSB_STATUS_POLE = 10,
  LSB_STATUS_DEGENERATE = 11,
  LSB_STATUS_OUT_OF_RANGE = 12,
  LSB_STATUS_PANIC = 13,
} LsbStatus;

typedef enum LsbGroup {
  LSB_GROUP_SO3 = 0,
  LSB_GROUP_SU2 = 1,
  LSB_GROUP_SL2R = 2,
  LSB_GROUP_SO21 = 3,
} LsbGroup;

typedef struct LsbReport LsbReport;

typedef struct LsbScenario LsbScenario;

typedef struct LsbTrajectory LsbTrajectory;

/**
 * One verification entry. `name` is borrowed from the report.
 */
typedef struct LsbCheck {
  const char *name;
  double max_residual;
  double tolerance;
  bool passed;
} LsbCheck;

typedef struct LsbComplex {
  double re;
  double im;
} LsbComplex;

/**
 * Parameters of the symmetric closed-form solution.
 */
typedef struct LsbSymmetricParams {
  double inertia;
  double inertia_zero;
  double connection[3];
  struct LsbComplex xi_zero;
  struct LsbComplex xi_plus0;
  struct LsbComplex xi_minus0;
} LsbSymmetricParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Valid until the next failing
 * call on the same thread; empty if nothing failed yet.
 */
const char *lsb_last_error_message(void);

/**
 * Library version, static storage.
 */
const char *lsb_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void lsb_string_free(char *s);

/**
 * Parses a scenario document and applies `n_overrides` dotted-path
 * overrides (`keys[i] = values[i]`, values as JSON text).
 *
 * # Safety
 * String arguments must be NUL-terminated; `keys` and `values` must point
 * to `n_overrides` strings each (they may be null when `n_overrides` is 0).
 */
enum LsbStatus lsb_scenario_load(const char *json,
                                 const char *const *keys,
                                 const char *const *values,
                                 size_t n_overrides,
                                 struct LsbScenario **out_scenario);

/**
 * # Safety
 * `s` must come from [`lsb_scenario_load`] or be null.
 */
void lsb_scenario_free(struct LsbScenario *s);

/**
 * Hex SHA-256 of the normalized scenario document.
 *
 * # Safety
 * `s` must be a live scenario handle; `out_digest` must be writable.
 */
enum LsbStatus lsb_scenario_digest(const struct LsbScenario *s, char **out_digest);

/**
 * Integrates the scenario. On divergence the status is
 * `LSB_STATUS_DIVERGED`, `*out_trajectory` holds the samples before the
 * escape and `*out_escape_time` (if non-null) the estimated escape time;
 * otherwise the escape time is NaN.
 *
 * # Safety
 * `s` must be a live scenario handle; `out_trajectory` must be writable.
 */
enum LsbStatus lsb_scenario_simulate(const struct LsbScenario *s,
                                     struct LsbTrajectory **out_trajectory,
                                     double *out_escape_time);

/**
 * Simulates and runs the scenario's checks. A failing check is not an
 * error: inspect the report.
 *
 * # Safety
 * `s` must be a live scenario handle; `out_report` must be writable.
 */
enum LsbStatus lsb_scenario_verify(const struct LsbScenario *s, struct LsbReport **out_report);

/**
 * # Safety
 * `t` must come from this library or be null.
 */
void lsb_trajectory_free(struct LsbTrajectory *t);

/**
 * # Safety
 * `t` must be a live trajectory handle; `out_len` must be writable.
 */
enum LsbStatus lsb_trajectory_len(const struct LsbTrajectory *t, size_t *out_len);

/**
 * Number of columns of the tabular view, `t` included.
 *
 * # Safety
 * `t` must be a live trajectory handle; `out_columns` must be writable.
 */
enum LsbStatus lsb_trajectory_columns(const struct LsbTrajectory *t, size_t *out_columns);

/**
 * Column name, borrowed from the handle. Null when out of range.
 *
 * # Safety
 * `t` must be a live trajectory handle.
 */
const char *lsb_trajectory_column_name(const struct LsbTrajectory *t, size_t column);

/**
 * # Safety
 * `t` must be a live trajectory handle; `out_value` must be writable.
 */
enum LsbStatus lsb_trajectory_value(const struct LsbTrajectory *t,
                                    size_t row,
                                    size_t column,
                                    double *out_value);

/**
 * # Safety
 * `t` must be a live trajectory handle; `out_csv` must be writable.
 */
enum LsbStatus lsb_trajectory_to_csv(const struct LsbTrajectory *t, char **out_csv);

/**
 * # Safety
 * `r` must come from this library or be null.
 */
void lsb_report_free(struct LsbReport *r);

/**
 * # Safety
 * `r` must be a live report handle; `out_passed` must be writable.
 */
enum LsbStatus lsb_report_passed(const struct LsbReport *r, bool *out_passed);

/**
 * # Safety
 * `r` must be a live report handle; `out_count` must be writable.
 */
enum LsbStatus lsb_report_check_count(const struct LsbReport *r, size_t *out_count);

/**
 * # Safety
 * `r` must be a live report handle; `out_check` must be writable. The name
 * pointer stays valid while the report lives.
 */
enum LsbStatus lsb_report_check(const struct LsbReport *r,
                                size_t index,
                                struct LsbCheck *out_check);

/**
 * # Safety
 * `r` must be a live report handle; `out_json` must be writable.
 */
enum LsbStatus lsb_report_to_json(const struct LsbReport *r, char **out_json);

/**
 * Group exponential of `xi` (3 coefficients), written row-major into
 * `out_matrix`, which must hold `n*n` entries (`n` = 3 for SO(3), else 2).
 *
 * # Safety
 * `xi` must point to 3 values and `out_matrix` to `out_len` writable ones.
 */
enum LsbStatus lsb_exp_map(enum LsbGroup group,
                           const struct LsbComplex *xi,
                           struct LsbComplex *out_matrix,
                           size_t out_len);

/**
 * Symmetric closed-form `(x(t), p(t))`.
 *
 * # Safety
 * `params` must be readable; `out_x` and `out_p` writable.
 */
enum LsbStatus lsb_closed_form_symmetric(enum LsbGroup group,
                                         const struct LsbSymmetricParams *params,
                                         double t,
                                         struct LsbComplex *out_x,
                                         struct LsbComplex *out_p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LSB_LAB_H */
