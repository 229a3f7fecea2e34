#ifndef CONLEY_LAB_H
#define CONLEY_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ClClassification {
  CL_CLASSIFICATION_ATTRACTOR = 0,
  CL_CLASSIFICATION_REPELLER = 1,
  CL_CLASSIFICATION_NEITHER = 2,
} ClClassification;

typedef enum ClShapeKind {
  CL_SHAPE_KIND_FULL = 0,
  CL_SHAPE_KIND_RECT = 1,
  CL_SHAPE_KIND_DISC = 2,
  CL_SHAPE_KIND_ANNULUS = 3,
} ClShapeKind;

typedef enum ClStatus {
  CL_STATUS_OK = 0,
  CL_STATUS_NULL_POINTER = 1,
  CL_STATUS_INVALID_ARGUMENT = 2,
  CL_STATUS_PARSE_ERROR = 3,
  CL_STATUS_FIELD_ERROR = 4,
  CL_STATUS_BLOCK_ERROR = 5,
  CL_STATUS_ANALYSIS_ERROR = 6,
  CL_STATUS_VERIFIER_FAILED = 7,
  CL_STATUS_PANIC = 8,
} ClStatus;

/**
 * Opaque vector field handle.
 */
typedef struct ClField ClField;

/**
 * Opaque Conley index report handle.
 */
typedef struct ClReport ClReport;

typedef struct ClRect {
  double x_min;
  double x_max;
  double y_min;
  double y_max;
} ClRect;

/**
 * `rect` is read for `Rect`, `radius` for `Disc`, `r0`/`r1` for `Annulus`;
 * `center_*` for both curved shapes.
 */
typedef struct ClShape {
  enum ClShapeKind kind;
  struct ClRect rect;
  double center_x;
  double center_y;
  double radius;
  double r0;
  double r1;
} ClShape;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cl_version(void);

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * library call on the same thread.
 */
const char *cl_last_error_message(void);

/**
 * Writes the location attached to the last failure (tangency points) and
 * returns 1, or returns 0 when there is none.
 *
 * # Safety
 * `out` must point to two writable doubles.
 */
int32_t cl_last_error_location(double *out);

/**
 * Catalogue field by name (`saddle`, `zpow2`, ...). `has_lambda` selects
 * whether `lambda` is bound; families require it.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ClStatus cl_field_from_catalogue(const char *name,
                                      double lambda,
                                      bool has_lambda,
                                      struct ClField **out);

/**
 * Field `(p, q)` from two expressions in `x`, `y` and `lambda`.
 *
 * # Safety
 * `p` and `q` must be NUL-terminated strings and `out` a writable pointer.
 */
enum ClStatus cl_field_from_expressions(const char *p,
                                        const char *q,
                                        double lambda,
                                        bool has_lambda,
                                        struct ClField **out);

/**
 * # Safety
 * `field` must come from a `cl_field_*` constructor (or be NULL) and not be
 * used afterwards.
 */
void cl_field_free(struct ClField *field);

/**
 * Writes `F(x, y)` into `out[0..2]`.
 *
 * # Safety
 * `field` must be a live handle and `out` point to two writable doubles.
 */
enum ClStatus cl_field_eval(const struct ClField *field, double x, double y, double *out);

/**
 * Winding index of the field along the circle of `radius` about
 * `(center_x, center_y)`.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum ClStatus cl_winding_index(const struct ClField *field,
                               double center_x,
                               double center_y,
                               double radius,
                               int64_t *out);

/**
 * Builds an isolating block and its index triple, and computes the
 * homology Conley index. On `BlockError` a tangency location may be
 * available from `cl_last_error_location`.
 *
 * # Safety
 * `field`, `domain` and `shape` must be valid pointers and `out` writable.
 */
enum ClStatus cl_conley_index(const struct ClField *field,
                              const struct ClRect *domain,
                              uint8_t depth,
                              const struct ClShape *shape,
                              struct ClReport **out);

/**
 * # Safety
 * `report` must come from `cl_conley_index` (or be NULL) and not be used
 * afterwards.
 */
void cl_report_free(struct ClReport *report);

/**
 * Rational Betti numbers of `(N, L⁺)` into `out[0..3]`.
 *
 * # Safety
 * `report` must be a live handle and `out` point to three writable values.
 */
enum ClStatus cl_report_betti(const struct ClReport *report, uint64_t *out);

/**
 * Poincaré index `p(-1)`, or 0 for a NULL handle.
 *
 * # Safety
 * `report` must be a live handle or NULL.
 */
int64_t cl_report_ind_p(const struct ClReport *report);

/**
 * # Safety
 * `report` must be a live handle or NULL (which yields `Neither`).
 */
enum ClClassification cl_report_classification(const struct ClReport *report);

/**
 * Runs a CLI command (`"index"`, `"verify"`, ...) on INI config text and
 * returns the JSON report through `json_out` (free with
 * [`cl_string_free`]) and the CLI exit code through `exit_code`. The
 * status is `VerifierFailed` for exit code 1 and an error status for 2; the
 * report is produced in every case.
 *
 * # Safety
 * `config_text` and `command` must be NUL-terminated strings; `json_out`
 * and `exit_code` writable (either may be NULL to discard).
 */
enum ClStatus cl_run(const char *config_text,
                     const char *command,
                     char **json_out,
                     int32_t *exit_code);

/**
 * # Safety
 * `s` must be a string returned by this library (or NULL) and not be used
 * afterwards.
 */
void cl_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CONLEY_LAB_H */
