/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CIMQUBO_H
#define CIMQUBO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CqStatus {
  CQ_STATUS_OK = 0,
  CQ_STATUS_NULL_POINTER = 1,
  CQ_STATUS_INVALID_ARGUMENT = 2,
  CQ_STATUS_PARSE = 3,
  CQ_STATUS_VALIDATION = 4,
  CQ_STATUS_DIMENSION = 5,
  CQ_STATUS_CAPACITY = 6,
  CQ_STATUS_OVERFLOW = 7,
  CQ_STATUS_SAMPLING = 8,
  CQ_STATUS_CONFIG = 9,
  CQ_STATUS_IO = 10,
  CQ_STATUS_PANIC = 11,
} CqStatus;

typedef enum CqFormat {
  CQ_FORMAT_TEXT = 0,
  CQ_FORMAT_JSON = 1,
} CqFormat;

typedef enum CqMode {
  CQ_MODE_INEQUALITY = 0,
  CQ_MODE_DQUBO = 1,
} CqMode;

typedef struct CqDquboModel CqDquboModel;

typedef struct CqFilter CqFilter;

typedef struct CqInequalityModel CqInequalityModel;

typedef struct CqInstance CqInstance;

typedef struct CqFilterDecision {
  bool feasible;
  double working_ml;
  double replica_ml;
} CqFilterDecision;

typedef struct CqRunSummary {
  int64_t best_energy;
  int64_t best_qkp_value;
  bool best_feasible;
  uint64_t filter_rejections;
  uint64_t evaluations;
} CqRunSummary;

/**
 * Penalty fields are 0 (`dqubo_available == false`) when that matrix cannot be built.
 */
typedef struct CqOverhead {
  size_t n;
  int64_t capacity;
  uint32_t ineq_bits;
  uint64_t ineq_cells;
  bool dqubo_available;
  size_t dqubo_dim;
  uint32_t dqubo_bits;
  uint64_t dqubo_cells;
  double saving_fraction;
} CqOverhead;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *cq_last_error(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cq_string_free(char *s);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum CqStatus cq_instance_parse(const char *text, enum CqFormat format, struct CqInstance **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum CqStatus cq_instance_generate(size_t n,
                                   double density,
                                   int64_t wmax,
                                   int64_t pmax,
                                   double cap_ratio,
                                   uint64_t seed,
                                   struct CqInstance **out);

/**
 * # Safety
 * `inst` must be NULL or a live handle.
 */
void cq_instance_free(struct CqInstance *inst);

/**
 * Number of items; 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t cq_instance_n(const struct CqInstance *inst);

/**
 * Capacity; 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
int64_t cq_instance_capacity(const struct CqInstance *inst);

/**
 * Serializes to a new string; free it with [`cq_string_free`].
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum CqStatus cq_instance_serialize(const struct CqInstance *inst,
                                    enum CqFormat format,
                                    char **out);

/**
 * Unconstrained objective `Σ p_ij x_i x_j`.
 *
 * # Safety
 * `inst` must be a live handle, `bits` must hold `len` bytes, `out` must be writable.
 */
enum CqStatus cq_instance_objective(const struct CqInstance *inst,
                                    const uint8_t *bits,
                                    size_t len,
                                    int64_t *out);

/**
 * Exhaustive optimum. `out_config` may be NULL or hold `n` bytes.
 *
 * # Safety
 * Pointers must be valid as documented.
 */
enum CqStatus cq_oracle(const struct CqInstance *inst,
                        int64_t *out_value,
                        uint8_t *out_config,
                        uint64_t *out_feasible_count);

/**
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum CqStatus cq_inequality_build(const struct CqInstance *inst, struct CqInequalityModel **out);

/**
 * # Safety
 * `m` must be NULL or a live handle.
 */
void cq_inequality_free(struct CqInequalityModel *m);

/**
 * Constrained energy: `xᵀQx` when feasible, 0 otherwise.
 *
 * # Safety
 * `m` must be a live handle, `bits` must hold `len` bytes, `out` must be writable.
 */
enum CqStatus cq_inequality_energy(const struct CqInequalityModel *m,
                                   const uint8_t *bits,
                                   size_t len,
                                   int64_t *out);

/**
 * Crossbar bit width; 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
uint32_t cq_inequality_bits(const struct CqInequalityModel *m);

/**
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum CqStatus cq_dqubo_build(const struct CqInstance *inst,
                             int64_t alpha,
                             int64_t beta,
                             struct CqDquboModel **out);

/**
 * # Safety
 * `m` must be NULL or a live handle.
 */
void cq_dqubo_free(struct CqDquboModel *m);

/**
 * Matrix dimension `n + C`; 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
size_t cq_dqubo_dim(const struct CqDquboModel *m);

/**
 * Crossbar bit width; 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
uint32_t cq_dqubo_bits(const struct CqDquboModel *m);

/**
 * Penalty energy over all `n + C` bits.
 *
 * # Safety
 * `m` must be a live handle, `bits` must hold `len` bytes, `out` must be writable.
 */
enum CqStatus cq_dqubo_energy(const struct CqDquboModel *m,
                              const uint8_t *bits,
                              size_t len,
                              int64_t *out);

/**
 * Filter with default geometry; `noise_sigma` 0 is exact.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum CqStatus cq_filter_build(const struct CqInstance *inst,
                              size_t rows,
                              uint32_t levels,
                              double vdd,
                              double noise_sigma,
                              struct CqFilter **out);

/**
 * # Safety
 * `f` must be NULL or a live handle.
 */
void cq_filter_free(struct CqFilter *f);

/**
 * Classifies `bits`; `seed` drives the noise draw when the filter is noisy.
 *
 * # Safety
 * `f` must be a live handle, `bits` must hold `len` bytes, `out` must be writable.
 */
enum CqStatus cq_filter_check(const struct CqFilter *f,
                              const uint8_t *bits,
                              size_t len,
                              uint64_t seed,
                              struct CqFilterDecision *out);

/**
 * One annealing run from the seeded initial configuration 0 with the
 * default schedule. `cim` selects the noiseless behavioral backend.
 * `out_config` may be NULL or hold the model dimension in bytes.
 *
 * # Safety
 * Pointers must be valid as documented.
 */
enum CqStatus cq_anneal(const struct CqInstance *inst,
                        enum CqMode mode,
                        size_t iterations,
                        uint64_t seed,
                        bool cim,
                        struct CqRunSummary *out,
                        uint8_t *out_config);

/**
 * Bit-width and cell-count comparison with a `rows`-row filter.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum CqStatus cq_overhead(const struct CqInstance *inst,
                          size_t rows,
                          int64_t alpha,
                          int64_t beta,
                          struct CqOverhead *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIMQUBO_H */
