#ifndef CSA_TOWER_H
#define CSA_TOWER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The first four match the CLI exit statuses.
 */
typedef enum CsaStatus {
  CSA_STATUS_OK = 0,
  /**
   * A property check found a violation.
   */
  CSA_STATUS_VIOLATION = 1,
  /**
   * Bad input: syntax, unknown letter, stage violation, invalid spec.
   */
  CSA_STATUS_USAGE = 2,
  /**
   * The answer lies beyond the configured search bounds.
   */
  CSA_STATUS_UNDECIDED = 3,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  CSA_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The engine panicked; the handle should be discarded.
   */
  CSA_STATUS_INTERNAL = 5,
} CsaStatus;

/**
 * Opaque tower handle.
 */
typedef struct CsaTower CsaTower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a tower with default bounds. `variant` is `"cyclic-root"` or
 * `"rational-root"`.
 *
 * # Safety
 * `variant` must be a NUL-terminated string and `out` writable.
 */
enum CsaStatus csa_tower_new(const char *variant, uint32_t base_rank, struct CsaTower **out);

/**
 * Build a tower from `key = value` configuration text.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` writable.
 */
enum CsaStatus csa_tower_from_config(const char *config, struct CsaTower **out);

/**
 * # Safety
 * `tower` must come from a constructor here and not be used afterwards.
 */
void csa_tower_free(struct CsaTower *tower);

/**
 * Reduced form of `word`. `stage` 0 picks the least stage containing it.
 *
 * # Safety
 * `tower` must be a live handle, `word` NUL-terminated, `out` writable.
 */
enum CsaStatus csa_tower_normal_form(const struct CsaTower *tower,
                                     uint32_t stage,
                                     const char *word,
                                     char **out);

/**
 * Decide `a = b`.
 *
 * # Safety
 * `tower` must be a live handle, `a` and `b` NUL-terminated, `out` writable.
 */
enum CsaStatus csa_tower_equal(const struct CsaTower *tower,
                               uint32_t stage,
                               const char *a,
                               const char *b,
                               bool *out);

/**
 * Find `x` with `x^-1 g x = h` at the higher of the two stages. `*out` is
 * set to null when they are not conjugate.
 *
 * # Safety
 * `tower` must be a live handle, `g` and `h` NUL-terminated, `out` writable.
 */
enum CsaStatus csa_tower_conjugate(const struct CsaTower *tower,
                                   uint32_t stage,
                                   const char *g,
                                   const char *h,
                                   char **out);

/**
 * An `n`-th root of `word` in the union of the tower, verified before it is
 * returned. `out_stage` receives the stage the root lives in.
 *
 * # Safety
 * `tower` must be a live handle, `word` NUL-terminated, outputs writable.
 */
enum CsaStatus csa_tower_root(const struct CsaTower *tower,
                              const char *word,
                              uint64_t n,
                              char **out,
                              uint32_t *out_stage);

/**
 * Conjugacy class rep `index` of `stage`.
 *
 * # Safety
 * `tower` must be a live handle and `out` writable.
 */
enum CsaStatus csa_tower_class_rep(const struct CsaTower *tower,
                                   uint32_t stage,
                                   size_t index,
                                   char **out);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call.
 */
const char *csa_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void csa_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSA_TOWER_H */
