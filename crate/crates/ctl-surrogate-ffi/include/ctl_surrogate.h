#ifndef CTL_SURROGATE_H
#define CTL_SURROGATE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Error codes shared with the generated header.
 */
#define CTLS_OK 0

#define CTLS_ERR_NULL_ARGUMENT 1

#define CTLS_ERR_INVALID_UTF8 2

#define CTLS_ERR_PARSE 3

/**
 * Opaque CTL formula handle.
 */
typedef struct CtlsFormula CtlsFormula;

/**
 * Opaque Kripke structure handle.
 */
typedef struct CtlsKripke CtlsKripke;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ctls_last_error(void);

/**
 * Parses the Kripke text format into a new handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
int ctls_kripke_parse(const char *text, struct CtlsKripke **out);

/**
 * Parses a CTL formula into a new handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
int ctls_formula_parse(const char *text, struct CtlsFormula **out);

/**
 * Runs the exact check. On success writes 1 (holds) or 0 into
 * `holds_out` and the labeling time in nanoseconds into `elapsed_ns_out`
 * (which may be null).
 *
 * # Safety
 * Handles must come from the corresponding parse functions.
 */
int ctls_check(const struct CtlsKripke *k,
               const struct CtlsFormula *phi,
               int *holds_out,
               uint64_t *elapsed_ns_out);

/**
 * Canonical text of a structure. Free with `ctls_string_free`.
 *
 * # Safety
 * `k` must be a live handle.
 */
char *ctls_kripke_serialize(const struct CtlsKripke *k);

/**
 * Canonical fully parenthesized formula text. Free with
 * `ctls_string_free`.
 *
 * # Safety
 * `phi` must be a live handle.
 */
char *ctls_formula_format(const struct CtlsFormula *phi);

/**
 * SMV module text for the pair. Free with `ctls_string_free`.
 *
 * # Safety
 * Both handles must be live.
 */
char *ctls_export_smv(const struct CtlsKripke *k, const struct CtlsFormula *phi);

/**
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void ctls_string_free(char *s);

/**
 * # Safety
 * `k` must come from `ctls_kripke_parse` and not have been freed already.
 */
void ctls_kripke_free(struct CtlsKripke *k);

/**
 * # Safety
 * `phi` must come from `ctls_formula_parse` and not have been freed
 * already.
 */
void ctls_formula_free(struct CtlsFormula *phi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTL_SURROGATE_H */
