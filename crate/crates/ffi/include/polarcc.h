/* C interface to the polarcc polar-code toolkit. */

#ifndef POLARCC_H
#define POLARCC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PolarccStatus {
  POLARCC_STATUS_OK = 0,
  POLARCC_STATUS_NULL_POINTER = 1,
  POLARCC_STATUS_DOMAIN = 2,
  POLARCC_STATUS_PARSE = 3,
  POLARCC_STATUS_NUMERICAL = 4,
  POLARCC_STATUS_STATE = 5,
  POLARCC_STATUS_IO = 6,
  POLARCC_STATUS_INVALID_UTF8 = 7,
  POLARCC_STATUS_BUFFER_TOO_SMALL = 8,
  POLARCC_STATUS_PANIC = 9,
} PolarccStatus;

typedef enum PolarccMethod {
  POLARCC_METHOD_PCC0 = 0,
  POLARCC_METHOD_PCC1 = 1,
  POLARCC_METHOD_PCC2 = 2,
  POLARCC_METHOD_PCC3 = 3,
} PolarccMethod;

/**
 * Opaque code handle.
 */
typedef struct PolarccCode PolarccCode;

/**
 * Opaque decoder handle, reusable for any code of its length.
 */
typedef struct PolarccDecoder PolarccDecoder;

/**
 * Parameters of the constructions that take any.
 */
typedef struct PolarccConstructOptions {
  /**
   * Alphabet size of the transition-matrix construction.
   */
  uint32_t mu;
  /**
   * Monte-Carlo trials of the genie construction.
   */
  uint64_t mc_size;
  uint64_t seed;
  uint32_t threads;
} PolarccConstructOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *polarcc_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *polarcc_last_error(void);

struct PolarccConstructOptions polarcc_construct_options_default(void);

/**
 * Builds an `(n, k)` code with the given construction at `design_snr_db`.
 * `options` may be NULL for the defaults.
 *
 * # Safety
 * `options` must be NULL or valid; `out` must be a valid pointer.
 */
enum PolarccStatus polarcc_code_construct(enum PolarccMethod method,
                                          size_t n,
                                          size_t k,
                                          double design_snr_db,
                                          const struct PolarccConstructOptions *options,
                                          struct PolarccCode **out);

/**
 * Code of length `n` with an explicit frozen set.
 *
 * # Safety
 * `frozen` must point to `count` readable values; `out` must be valid.
 */
enum PolarccStatus polarcc_code_from_frozen(size_t n,
                                            const size_t *frozen,
                                            size_t count,
                                            struct PolarccCode **out);

/**
 * Reads a `.pcf` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid.
 */
enum PolarccStatus polarcc_code_read_pcf(const char *path, struct PolarccCode **out);

/**
 * Writes a `.pcf` file.
 *
 * # Safety
 * `code` must be a live handle; `path` a NUL-terminated string.
 */
enum PolarccStatus polarcc_code_write_pcf(const struct PolarccCode *code, const char *path);

/**
 * Block length, or 0 for NULL.
 *
 * # Safety
 * `code` must be NULL or a live handle.
 */
size_t polarcc_code_n(const struct PolarccCode *code);

/**
 * Information length, or 0 for NULL.
 *
 * # Safety
 * `code` must be NULL or a live handle.
 */
size_t polarcc_code_k(const struct PolarccCode *code);

/**
 * Copies the ascending frozen indices into `out[0..cap]`. `count` receives
 * `N - K` even when the buffer is too small.
 *
 * # Safety
 * `code` must be a live handle, `out` writable for `cap` values, `count` valid.
 */
enum PolarccStatus polarcc_code_frozen(const struct PolarccCode *code,
                                       size_t *out,
                                       size_t cap,
                                       size_t *count);

/**
 * # Safety
 * `code` must be NULL or a handle not yet freed.
 */
void polarcc_code_free(struct PolarccCode *code);

/**
 * Encodes `K` message bits (values 0/1) into `N` codeword bits.
 *
 * # Safety
 * Buffers must be valid for their stated lengths.
 */
enum PolarccStatus polarcc_encode(const struct PolarccCode *code,
                                  const uint8_t *u,
                                  size_t u_len,
                                  uint8_t *x,
                                  size_t x_len);

/**
 * Successive-cancellation decoder for length `n`.
 *
 * # Safety
 * `out` must be valid.
 */
enum PolarccStatus polarcc_decoder_new(size_t n, struct PolarccDecoder **out);

/**
 * Decodes `N` channel LLRs (positive favours 0) into `K` message bits.
 *
 * # Safety
 * Handles must be live and buffers valid for their stated lengths.
 */
enum PolarccStatus polarcc_decode(struct PolarccDecoder *decoder,
                                  const struct PolarccCode *code,
                                  const double *llr,
                                  size_t llr_len,
                                  uint8_t *u_hat,
                                  size_t u_len);

/**
 * # Safety
 * `decoder` must be NULL or a handle not yet freed.
 */
void polarcc_decoder_free(struct PolarccDecoder *decoder);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLARCC_H */
