#ifndef MODULI_BETTI_H
#define MODULI_BETTI_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MbStatus {
  MB_STATUS_OK = 0,
  MB_STATUS_NOT_COPRIME = 1,
  MB_STATUS_INVALID_ARGUMENT = 2,
  MB_STATUS_WINDOW_EXHAUSTED = 3,
  MB_STATUS_MATH = 4,
  MB_STATUS_NULL_POINTER = 5,
  MB_STATUS_OVERFLOW = 6,
  MB_STATUS_NOT_FOUND = 7,
  MB_STATUS_PANIC = 8,
} MbStatus;

/**
 * Opaque table of `b_2N(M(r, aH, c_2))`.
 */
typedef struct MbBettiTable MbBettiTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *mb_status_message(enum MbStatus status);

/**
 * Copies the last error message of this thread into `buf` (NUL terminated,
 * truncated to `len`). Returns the full length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t mb_last_error(char *buf, size_t len);

/**
 * Builds the table for `N <= n_max` and `c_2 <= c2_max`. A `window` of zero
 * selects `n_max + 2 r^2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MbStatus mb_betti_table_new(uint32_t r,
                                 int64_t a,
                                 uint32_t n_max,
                                 int64_t c2_max,
                                 uint32_t window,
                                 struct MbBettiTable **out);

/**
 * # Safety
 * `table` must be null or come from [`mb_betti_table_new`], freed once.
 */
void mb_betti_table_free(struct MbBettiTable *table);

/**
 * Number of `(c_2, N, b)` rows, or zero for a null table.
 *
 * # Safety
 * `table` must be null or a live table.
 */
size_t mb_betti_table_len(const struct MbBettiTable *table);

/**
 * Row `index` in `(c_2, N)` order.
 *
 * # Safety
 * `table` must be a live table and the out pointers valid for writes.
 */
enum MbStatus mb_betti_table_row(const struct MbBettiTable *table,
                                 size_t index,
                                 int64_t *c2,
                                 uint32_t *n,
                                 int64_t *b);

/**
 * `b_2N` at `c_2`.
 *
 * # Safety
 * `table` must be a live table and `b` valid for writes.
 */
enum MbStatus mb_betti_table_get(const struct MbBettiTable *table,
                                 int64_t c2,
                                 uint32_t n,
                                 int64_t *b);

/**
 * Observed stabilization onset of `b_2N` within the table's horizon.
 *
 * # Safety
 * `table` must be a live table and `c2` valid for writes.
 */
enum MbStatus mb_betti_table_onset(const struct MbBettiTable *table, uint32_t n, int64_t *c2);

/**
 * Writes the stable values `b_0, ..., b_{2 n_max}` into `out[0..=n_max]`.
 *
 * # Safety
 * `out` must be valid for `len` writes, with `len > n_max`.
 */
enum MbStatus mb_stable_limit(uint32_t n_max, uint64_t *out, size_t len);

/**
 * Generic and refined stabilization constants `C` for `M(r, aH, c_2)`.
 *
 * # Safety
 * `c` and `c_refined` must be valid for writes.
 */
enum MbStatus mb_bound_c(uint32_t r, int64_t a, int64_t *c, int64_t *c_refined);

/**
 * Refined `C_0` for the class `alpha E + beta F` as `num / den`.
 *
 * # Safety
 * `num` and `den` must be valid for writes.
 */
enum MbStatus mb_refined_c0(uint32_t r, int64_t alpha, int64_t beta, int64_t *num, int64_t *den);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODULI_BETTI_H */
