#ifndef FIXFREE_H
#define FIXFREE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum FfStatus {
  FF_STATUS_OK = 0,
  FF_STATUS_NULL_POINTER = 1,
  FF_STATUS_INVALID_UTF8 = 2,
  FF_STATUS_PARSE = 3,
  FF_STATUS_INVALID_ARGUMENT = 4,
  FF_STATUS_UNSUPPORTED = 5,
  FF_STATUS_INTERNAL = 6,
  FF_STATUS_PANIC = 7,
} FfStatus;

/**
 * Outcome of construct and search.
 */
typedef enum FfVerdict {
  FF_VERDICT_FOUND = 0,
  FF_VERDICT_NONEXISTENT = 1,
  FF_VERDICT_UNKNOWN = 2,
} FfVerdict;

/**
 * A finite set of words.
 */
typedef struct FfCode FfCode;

/**
 * Codeword counts per length over an alphabet of size q.
 */
typedef struct FfProfile FfProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Release with
 * `ff_string_free`.
 */
char *ff_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ff_string_free(char *s);

/**
 * Parses `q=<int> alpha=<c1>,<c2>,...`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum FfStatus ff_profile_parse(const char *text, struct FfProfile **out);

/**
 * Builds a profile from `len` counts, index 0 being length 1.
 *
 * # Safety
 * `counts` must point to `len` values (or be null when `len` is 0).
 */
enum FfStatus ff_profile_new(uint32_t q,
                             const uint64_t *counts,
                             size_t len,
                             struct FfProfile **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, not yet freed.
 */
void ff_profile_free(struct FfProfile *p);

/**
 * Text form of a profile.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum FfStatus ff_profile_to_string(const struct FfProfile *p, char **out);

/**
 * Kraft sum as a reduced fraction `a/b`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum FfStatus ff_profile_kraft(const struct FfProfile *p, char **out);

/**
 * Runs the constructor dispatcher. On `FF_VERDICT_FOUND` a code handle is
 * written to `out_code`; otherwise `out_code` receives null.
 *
 * # Safety
 * `p` must be a live handle; both out-parameters must be writable.
 */
enum FfStatus ff_construct(const struct FfProfile *p,
                           uint64_t budget,
                           enum FfVerdict *out_verdict,
                           struct FfCode **out_code);

/**
 * Exhaustive search with a node budget. Same out-parameter contract as
 * `ff_construct`.
 *
 * # Safety
 * `p` must be a live handle; both out-parameters must be writable.
 */
enum FfStatus ff_search(const struct FfProfile *p,
                        uint64_t budget,
                        size_t jobs,
                        enum FfVerdict *out_verdict,
                        struct FfCode **out_code);

/**
 * Parses code text: a `q=<int>` header line, then one word per line.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum FfStatus ff_code_parse(const char *text, struct FfCode **out);

/**
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void ff_code_free(struct FfCode *c);

/**
 * Number of words, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t ff_code_len(const struct FfCode *c);

/**
 * Code text form.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum FfStatus ff_code_to_text(const struct FfCode *c, char **out);

/**
 * Whether no word is a proper prefix or suffix of another.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum FfStatus ff_code_is_fix_free(const struct FfCode *c, bool *out);

/**
 * Whether the code has exactly the counts of `p`.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum FfStatus ff_code_fits(const struct FfCode *c, const struct FfProfile *p, bool *out);

/**
 * Profile with Kraft sum in `(3/4, 3/4 + eps]` that no fix-free code fits,
 * with `eps = eps_num / eps_den`.
 *
 * # Safety
 * `out` must be writable.
 */
enum FfStatus ff_counterexample(uint32_t q,
                                uint64_t eps_num,
                                uint64_t eps_den,
                                struct FfProfile **out);

/**
 * su and ne of comma-separated binary lengths, as fractions.
 *
 * # Safety
 * `lengths` must be a NUL-terminated string; both out-parameters writable.
 */
enum FfStatus ff_sune(const char *lengths, char **out_su, char **out_ne);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIXFREE_H */
