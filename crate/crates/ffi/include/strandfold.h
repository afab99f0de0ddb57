#ifndef STRANDFOLD_H
#define STRANDFOLD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Allow G-U / G-T pairs.
 */
#define SF_FLAG_WOBBLE 1

/**
 * Bounded candidate storage during the search.
 */
#define SF_FLAG_LOW_MEM 2

typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_ARGUMENT = 1,
  SF_STATUS_INVALID_UTF8 = 2,
  SF_STATUS_PARSE_ERROR = 3,
  SF_STATUS_PARAMS_ERROR = 4,
  SF_STATUS_INFEASIBLE = 5,
  SF_STATUS_SEARCH_FAILED = 6,
  SF_STATUS_PANIC = 7,
} SfStatus;

/**
 * Energy parameters.
 */
typedef struct SfParams SfParams;

/**
 * Symmetry-corrected optimum with its witness structure.
 */
typedef struct SfResult SfResult;

/**
 * A parsed strand system.
 */
typedef struct SfSystem SfSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *sf_last_error(void);

/**
 * Library version, static storage.
 */
const char *sf_version(void);

/**
 * Parses a strand system (`name sequence count` lines).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_system_parse(const char *text_ptr, struct SfSystem **out);

/**
 * # Safety
 * `system` must come from `sf_system_parse` (or be null) and not be used afterwards.
 */
void sf_system_free(struct SfSystem *system);

/**
 * Number of distinct circular orderings; 0 for a null handle.
 *
 * # Safety
 * `system` must be a live handle or null.
 */
size_t sf_system_ordering_count(const struct SfSystem *system);

/**
 * Parses `key=value` energy parameters over the built-in defaults.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_params_parse(const char *text_ptr, struct SfParams **out);

/**
 * # Safety
 * `params` must come from `sf_params_parse` (or be null) and not be used afterwards.
 */
void sf_params_free(struct SfParams *params);

/**
 * Symmetry-corrected MFE over every ordering. `params` may be null for the
 * built-in model; `flags` combines `SF_FLAG_*`.
 *
 * # Safety
 * Handles must be live; `out` must be a valid pointer.
 */
enum SfStatus sf_mfe(const struct SfSystem *system,
                     const struct SfParams *params,
                     uint32_t flags,
                     struct SfResult **out);

/**
 * Symmetry-naive minimum over every ordering, in 0.01 kcal/mol.
 *
 * # Safety
 * Handles must be live; `out` must be a valid pointer.
 */
enum SfStatus sf_snmfe(const struct SfSystem *system,
                       const struct SfParams *params,
                       uint32_t flags,
                       int32_t *out);

/**
 * # Safety
 * `result` must come from `sf_mfe` (or be null) and not be used afterwards.
 */
void sf_result_free(struct SfResult *result);

/**
 * Total free energy in 0.01 kcal/mol, symmetry term included; NaN for null.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
double sf_result_energy(const struct SfResult *result);

/**
 * Loop energy sum in 0.01 kcal/mol.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
int32_t sf_result_loops(const struct SfResult *result);

/**
 * Association penalty in 0.01 kcal/mol.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
int32_t sf_result_association(const struct SfResult *result);

/**
 * Symmetry-naive minimum of the winning ordering.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
int32_t sf_result_snmfe(const struct SfResult *result);

/**
 * Rotational symmetry degree R of the witness; 0 for null.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
size_t sf_result_symmetry(const struct SfResult *result);

/**
 * Witness in dot-bracket notation; free with `sf_string_free`.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
char *sf_result_structure(const struct SfResult *result);

/**
 * Label of the winning ordering; free with `sf_string_free`.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
char *sf_result_ordering(const struct SfResult *result);

/**
 * Full result as JSON; free with `sf_string_free`.
 *
 * # Safety
 * `result` must be a live handle or null.
 */
char *sf_result_json(const struct SfResult *result);

/**
 * # Safety
 * `s` must come from this library (or be null) and not be used afterwards.
 */
void sf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRANDFOLD_H */
