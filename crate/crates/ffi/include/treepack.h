#ifndef TREEPACK_H
#define TREEPACK_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  TP_STATUS_OK = 0,
  TP_STATUS_NULL_POINTER = 1,
  TP_STATUS_INVALID_ARGUMENT = 2,
  TP_STATUS_INVALID_GRAPH = 3,
  TP_STATUS_IO = 4,
  TP_STATUS_PARSE = 5,
  TP_STATUS_OUT_OF_RANGE = 6,
  TP_STATUS_BUFFER_TOO_SMALL = 7,
  TP_STATUS_INTERNAL = 99,
} TpStatus;

typedef struct TpGraph TpGraph;

typedef struct TpPacking TpPacking;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *tp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tp_version(void);

/**
 * Builds a simple graph on `n` vertices from `edge_count` pairs stored flat in `edges`.
 *
 * # Safety
 * `edges` must point to `2 * edge_count` readable values (or may be NULL when
 * `edge_count` is 0) and `out` must be writable.
 */
TpStatus tp_graph_new(size_t n, const uint32_t *edges, size_t edge_count, TpGraph **out);

/**
 * Reads the text edge-list format. Non-numeric labels are renumbered in order of first appearance.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
TpStatus tp_graph_read(const char *path, TpGraph **out);

/**
 * Samples `G(n, p)` with the library's deterministic generator.
 *
 * # Safety
 * `out` must be writable.
 */
TpStatus tp_sample_gnp(size_t n, double p, uint64_t seed, TpGraph **out);

/**
 * # Safety
 * `graph` must come from this library and not be freed already, or be NULL.
 */
void tp_graph_free(TpGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or NULL (which yields 0).
 */
size_t tp_graph_vertex_count(const TpGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or NULL (which yields 0).
 */
size_t tp_graph_edge_count(const TpGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
TpStatus tp_graph_min_degree(const TpGraph *graph, size_t *out);

/**
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
TpStatus tp_graph_max_degree(const TpGraph *graph, size_t *out);

/**
 * Maximum packing with its trees and, below the trivial upper bound, a certificate partition.
 *
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
TpStatus tp_max_packing(const TpGraph *graph, TpPacking **out);

/**
 * # Safety
 * `packing` must come from [`tp_max_packing`] and not be freed already, or be NULL.
 */
void tp_packing_free(TpPacking *packing);

/**
 * # Safety
 * `packing` must be a live handle or NULL (which yields 0).
 */
size_t tp_packing_sigma(const TpPacking *packing);

/**
 * Writes the `n - 1` edges of tree `index` as flat pairs into `buf`, which
 * holds `buf_len` values. `written` receives the number of values needed.
 *
 * # Safety
 * `buf` must have room for `buf_len` values; `packing` and `written` must be valid.
 */
TpStatus tp_packing_tree_edges(const TpPacking *packing,
                               size_t index,
                               uint32_t *buf,
                               size_t buf_len,
                               size_t *written);

/**
 * Whether the packing carries a certificate partition.
 *
 * # Safety
 * `packing` must be a live handle or NULL.
 */
bool tp_packing_has_certificate(const TpPacking *packing);

/**
 * Writes the certificate as a block index per vertex into `labels`
 * (`n` values) and the block count into `blocks`.
 *
 * # Safety
 * `labels` must have room for `labels_len` values; other pointers must be valid.
 */
TpStatus tp_packing_certificate_labels(const TpPacking *packing,
                                       uint32_t *labels,
                                       size_t labels_len,
                                       size_t *blocks);

/**
 * Whether the graph has `k` edge-disjoint spanning trees.
 *
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
TpStatus tp_has_k_spanning_trees(const TpGraph *graph, size_t k, bool *out);

/**
 * Packing number by enumerating all partitions; `n` must be in `2..=12`.
 *
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
TpStatus tp_brute_sigma(const TpGraph *graph, size_t *out);

/**
 * Seed of one campaign trial, identical to the one the experiment harness uses.
 *
 * # Safety
 * `experiment_id` must be a NUL-terminated UTF-8 string of at most 255 bytes; `out` writable.
 */
TpStatus tp_derive_trial_seed(uint64_t master,
                              const char *experiment_id,
                              uint64_t n,
                              uint32_t p_index,
                              uint64_t trial,
                              uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TREEPACK_H */
