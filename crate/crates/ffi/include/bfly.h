/* Generated by cbindgen from src/lib.rs; do not edit. */

#ifndef BFLY_H
#define BFLY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BflyAlgorithm {
  BFLY_ALGORITHM_IBS = 0,
  BFLY_ALGORITHM_VP = 1,
  BFLY_ALGORITHM_VPP = 2,
} BflyAlgorithm;

typedef enum BflyScheduleMode {
  BFLY_SCHEDULE_MODE_DYNAMIC = 0,
  BFLY_SCHEDULE_MODE_STATIC = 1,
} BflyScheduleMode;

typedef enum BflyStatus {
  BFLY_STATUS_OK = 0,
  BFLY_STATUS_NULL_POINTER = 1,
  BFLY_STATUS_INVALID_ARGUMENT = 2,
  BFLY_STATUS_PARSE = 3,
  BFLY_STATUS_IO = 4,
  BFLY_STATUS_OVERFLOW = 5,
  BFLY_STATUS_CONFIG = 6,
  BFLY_STATUS_INCONSISTENT = 7,
  BFLY_STATUS_BUFFER_TOO_SMALL = 8,
  BFLY_STATUS_PANIC = 9,
} BflyStatus;

typedef enum BflyStrategy {
  BFLY_STRATEGY_PRIORITY = 0,
  BFLY_STRATEGY_RANDOM = 1,
  BFLY_STRATEGY_HEURISTIC = 2,
} BflyStrategy;

/**
 * Opaque graph handle.
 */
typedef struct BflyGraph BflyGraph;

/**
 * Count plus instrumentation. The 128-bit count is split into two halves:
 * `butterflies = butterflies_hi * 2^64 + butterflies_lo`.
 */
typedef struct BflyCountReport {
  uint64_t butterflies_lo;
  uint64_t butterflies_hi;
  uint64_t wedges_processed;
  uint64_t start_accesses;
  uint64_t middle_accesses;
  uint64_t end_accesses;
  uint64_t elapsed_ns;
} BflyCountReport;

/**
 * Block-transfer counters of an out-of-core run.
 */
typedef struct BflyIoStats {
  uint64_t blocks_read;
  uint64_t blocks_written;
  uint64_t pairs_emitted;
  uint64_t merge_passes;
} BflyIoStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bfly_last_error(void);

/**
 * Static description of a status code.
 */
const char *bfly_status_str(enum BflyStatus status);

/**
 * Reads an edge-list file ("upper lower" per line, '%' or '#' comments).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BflyStatus bfly_graph_parse_file(const char *path, struct BflyGraph **out);

/**
 * Builds a graph from `len` label pairs `(upper[i], lower[i])`. Duplicate
 * pairs are dropped.
 *
 * # Safety
 * `upper` and `lower` must point to `len` readable values (or be NULL when
 * `len` is 0); `out` must be writable.
 */
enum BflyStatus bfly_graph_from_edges(const uint64_t *upper,
                                      const uint64_t *lower,
                                      size_t len,
                                      struct BflyGraph **out);

/**
 * Releases a graph. NULL is ignored.
 *
 * # Safety
 * `g` must come from this library and must not be used afterwards.
 */
void bfly_graph_free(struct BflyGraph *g);

/**
 * Layer sizes and edge count; any output pointer may be NULL.
 *
 * # Safety
 * `g` must be a live handle; non-NULL outputs must be writable.
 */
enum BflyStatus bfly_graph_size(const struct BflyGraph *g,
                                size_t *upper,
                                size_t *lower,
                                size_t *edges);

/**
 * Labels of edge `index`, in the order used by `bfly_count_per_edge`.
 *
 * # Safety
 * `g` must be a live handle; outputs must be writable.
 */
enum BflyStatus bfly_graph_edge(const struct BflyGraph *g,
                                size_t index,
                                uint64_t *upper,
                                uint64_t *lower);

/**
 * Exact count with one engine.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum BflyStatus bfly_count(const struct BflyGraph *g,
                           enum BflyAlgorithm algorithm,
                           struct BflyCountReport *out);

/**
 * Multi-threaded exact count.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum BflyStatus bfly_count_parallel(const struct BflyGraph *g,
                                    size_t threads,
                                    enum BflyScheduleMode mode,
                                    enum BflyStrategy strategy,
                                    uint64_t seed,
                                    struct BflyCountReport *out);

/**
 * Butterflies per edge, written to `counts[0..m]` in edge order (see
 * `bfly_graph_edge`). Returns `BFLY_STATUS_BUFFER_TOO_SMALL` if `capacity`
 * is below the edge count.
 *
 * # Safety
 * `g` must be a live handle; `counts` must have room for `capacity` values.
 */
enum BflyStatus bfly_count_per_edge(const struct BflyGraph *g, uint64_t *counts, size_t capacity);

/**
 * `4·butterflies / caterpillars`. `*defined` is set to false (and
 * `*coefficient` to 0) when the graph has no three-paths.
 *
 * # Safety
 * `g` must be a live handle; outputs must be writable.
 */
enum BflyStatus bfly_clustering_coefficient(const struct BflyGraph *g,
                                            double *coefficient,
                                            bool *defined);

/**
 * Sparsification estimate over `trials` samples with edge probability `p`.
 * `variance` may be NULL.
 *
 * # Safety
 * `g` must be a live handle; `mean` must be writable.
 */
enum BflyStatus bfly_estimate(const struct BflyGraph *g,
                              double p,
                              size_t trials,
                              uint64_t seed,
                              double *mean,
                              double *variance);

/**
 * Out-of-core count of the edge-list file at `path`. `scratch_dir` may be
 * NULL for the system temporary directory; `io` may be NULL.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum BflyStatus bfly_em_count(const char *path,
                              size_t memory_budget,
                              size_t block_size,
                              const char *scratch_dir,
                              struct BflyCountReport *out,
                              struct BflyIoStats *io);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BFLY_H */
