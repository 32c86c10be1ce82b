#ifndef GROVER_COST_H
#define GROVER_COST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GcStatus {
  GC_STATUS_OK = 0,
  GC_STATUS_INVALID_ARGUMENT = 1,
  GC_STATUS_NULL_POINTER = 2,
  /**
   * The quantity does not exist, e.g. no crossover on this list.
   */
  GC_STATUS_NO_VALUE = 3,
  GC_STATUS_PARSE = 4,
  GC_STATUS_IO = 5,
  GC_STATUS_INTERNAL = 6,
} GcStatus;

typedef enum GcVariant {
  GC_VARIANT_SIMPLE = 0,
  GC_VARIANT_STEEP = 1,
} GcVariant;

typedef enum GcMode {
  GC_MODE_CLASSICAL = 0,
  GC_MODE_QUANTUM_EXACT = 1,
  GC_MODE_QUANTUM_SAMPLED = 2,
} GcMode;

/**
 * Weighted MAX-k-SAT instance.
 */
typedef struct GcInstance GcInstance;

/**
 * Query ledger of one climber run.
 */
typedef struct GcLedger GcLedger;

typedef struct GcLedgerSummary {
  double total_classical;
  double total_quantum;
  uint64_t steps;
  uint64_t soft_failures;
  double initial_objective;
  double final_objective;
  double satisfied_fraction;
  double epsilon_step;
  uint64_t peak_memory_entries;
  bool converged;
  bool budget_exceeded;
} GcLedgerSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *gc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gc_version(void);

/**
 * Expected oracle queries of the unbounded search, `1 <= marked <= list_size`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_f_upper(uint64_t list_size, uint64_t marked, double *out);

/**
 * Expected oracle queries of the timed-out Grover runs.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_e_grover_upper(uint64_t list_size, uint64_t marked, double c_q, double *out);

/**
 * Expected queries to `g` of the bounded search.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_e_qsearch(uint64_t list_size,
                           uint64_t marked,
                           uint64_t n_samples,
                           double epsilon,
                           double c_q,
                           double *out);

/**
 * Worst-case queries to `g` of the bounded search.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_w_qsearch(uint64_t list_size,
                           uint64_t n_samples,
                           double epsilon,
                           double c_q,
                           double *out);

/**
 * Worst-case queries of the exact-search variant.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_w_qsearch_zalka(uint64_t list_size, double epsilon, double c_q, double *out);

/**
 * `1/f0` where classical sampling and Grover cost the same. Returns
 * `GC_STATUS_NO_VALUE` when Grover never wins on this list.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_crossover(uint64_t list_size, double c_q, double *out);

/**
 * Classical sample budget minimising the averaged search cost.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_optimal_n_samples(uint64_t list_size, double c_q, uint64_t *out);

/**
 * Expected queries of unbounded maximum finding (exact sum).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_qmax_inf_sum(uint64_t list_size, double c_q, double *out);

/**
 * Loose closed form for unbounded maximum finding.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_qmax_loose(uint64_t list_size, double c_q, double *out);

/**
 * Tight closed form for unbounded maximum finding, `list_size >= 17`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_qmax_tight(uint64_t list_size, double c_q, double *out);

/**
 * Random instance: `round(r n)` clauses of `k` distinct variables.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcStatus gc_instance_generate(size_t n,
                                   size_t k,
                                   double r,
                                   uint64_t seed,
                                   struct GcInstance **out);

/**
 * Instance from `m` clauses of `k` signed 1-based literals each, laid out
 * row by row in `literals`, and `m` weights.
 *
 * # Safety
 * `literals` must point to `m * k` values and `weights` to `m` values.
 */
enum GcStatus gc_instance_from_literals(size_t n,
                                        size_t k,
                                        size_t m,
                                        const int64_t *literals,
                                        const double *weights,
                                        struct GcInstance **out);

/**
 * Reads an instance file in the `p wknf` text format.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum GcStatus gc_instance_read(const char *path, struct GcInstance **out);

/**
 * Releases an instance; null is ignored.
 *
 * # Safety
 * `instance` must come from this library and not be used afterwards.
 */
void gc_instance_free(struct GcInstance *instance);

/**
 * Writes the variable count, clause count and clause width.
 *
 * # Safety
 * `instance` must be a live handle; out pointers valid for writes.
 */
enum GcStatus gc_instance_shape(const struct GcInstance *instance, size_t *n, size_t *m, size_t *k);

/**
 * Weighted satisfied clauses of `values` (one byte per variable, nonzero is
 * true).
 *
 * # Safety
 * `values` must point to `len` bytes; `out` valid for writes.
 */
enum GcStatus gc_instance_objective(const struct GcInstance *instance,
                                    const uint8_t *values,
                                    size_t len,
                                    double *out);

/**
 * Runs a hill climber from a seeded random start. `epsilon_total` is the
 * failure budget over the whole run, `c_q` the oracle cost.
 *
 * # Safety
 * `instance` must be a live handle; `out` valid for writes.
 */
enum GcStatus gc_climb(const struct GcInstance *instance,
                       enum GcVariant variant,
                       enum GcMode mode,
                       uint64_t seed,
                       double epsilon_total,
                       double c_q,
                       struct GcLedger **out);

/**
 * Totals and end state of a climber run.
 *
 * # Safety
 * `ledger` must be a live handle; `out` valid for writes.
 */
enum GcStatus gc_ledger_summary(const struct GcLedger *ledger, struct GcLedgerSummary *out);

/**
 * Per-step quantum charges, copied into `buf` up to `cap` entries. `len`
 * receives the full step count, including the final confirmation.
 *
 * # Safety
 * `ledger` must be a live handle; `buf` valid for `cap` writes (or null with
 * `cap == 0`); `len` valid for writes.
 */
enum GcStatus gc_ledger_step_costs(const struct GcLedger *ledger,
                                   double *buf,
                                   size_t cap,
                                   size_t *len);

/**
 * Releases a ledger; null is ignored.
 *
 * # Safety
 * `ledger` must come from this library and not be used afterwards.
 */
void gc_ledger_free(struct GcLedger *ledger);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROVER_COST_H */
