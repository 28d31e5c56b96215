#ifndef CCM_H
#define CCM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of a library call.
typedef enum CcmStatus {
  CCM_STATUS_OK = 0,
  // A required pointer argument was null.
  CCM_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  CCM_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON, edge list or other text input.
  CCM_STATUS_PARSE = 3,
  // A distribution or function parameter is out of range.
  CCM_STATUS_INVALID_PARAMETER = 4,
  // The model or run configuration is inconsistent.
  CCM_STATUS_VALIDATION = 5,
  // A node index or buffer size is out of range.
  CCM_STATUS_OUT_OF_RANGE = 6,
  // An enumeration was refused as too large.
  CCM_STATUS_TOO_LARGE = 7,
  // File system failure.
  CCM_STATUS_IO = 8,
  // The sampler could not start or continue (e.g. no supported state).
  CCM_STATUS_RUNTIME = 9,
  // An internal error; please report it.
  CCM_STATUS_INTERNAL = 10,
} CcmStatus;

// A simple undirected graph.
typedef struct CcmGraph CcmGraph;

// Result of a sampler run.
typedef struct CcmSample CcmSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a
// successful call. Valid until the next library call on this thread.
const char *ccm_last_error_message(void);

// Library version, e.g. `"0.1.0"`. Static storage.
const char *ccm_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a pointer returned by this library as `char *`, not
// yet freed.
void ccm_string_free(char *s);

// Parses a JSON run configuration and runs the sampler.
//
// `base_dir` resolves relative paths inside the config and may be null
// (current directory). When `override_seed` is non-zero, `seed` replaces
// the configured seed. On success `*out` receives a handle to release with
// [`ccm_sample_free`].
//
// # Safety
// `config_json` and `base_dir` (if non-null) must be NUL-terminated
// strings; `out` must be a valid pointer.
enum CcmStatus ccm_sample_run(const char *config_json,
                              const char *base_dir,
                              int32_t override_seed,
                              uint64_t seed,
                              struct CcmSample **out);

// Releases a sample. Null is ignored.
//
// # Safety
// `sample` must be null or a live handle from [`ccm_sample_run`].
void ccm_sample_free(struct CcmSample *sample);

// Number of recorded rows; 0 for a null handle.
//
// # Safety
// `sample` must be null or a live handle.
uintptr_t ccm_sample_rows(const struct CcmSample *sample);

// Number of statistic columns; 0 for a null handle.
//
// # Safety
// `sample` must be null or a live handle.
uintptr_t ccm_sample_columns(const struct CcmSample *sample);

// Name of column `index`, or null when out of range. Borrowed from the
// handle.
//
// # Safety
// `sample` must be null or a live handle.
const char *ccm_sample_column_name(const struct CcmSample *sample, uintptr_t index);

// Copies the statistics row-major into `buffer`, which must hold
// `rows * columns` doubles.
//
// # Safety
// `sample` must be a live handle and `buffer` must point to `len`
// writable doubles.
enum CcmStatus ccm_sample_copy_stats(const struct CcmSample *sample, double *buffer, uintptr_t len);

// Metropolis-Hastings acceptance rate of the run; NaN for a null handle.
//
// # Safety
// `sample` must be null or a live handle.
double ccm_sample_acceptance_rate(const struct CcmSample *sample);

// Copies the final state of the chain into a new graph handle.
//
// # Safety
// `sample` must be a live handle and `out` a valid pointer.
enum CcmStatus ccm_sample_final_graph(const struct CcmSample *sample, struct CcmGraph **out);

// Builds a graph on `nodes` nodes from `edge_count` pairs stored as
// `edges[2 * i], edges[2 * i + 1]`. Duplicate pairs toggle the dyad back.
//
// # Safety
// `edges` must point to `2 * edge_count` values (it may be null when
// `edge_count` is 0); `out` must be a valid pointer.
enum CcmStatus ccm_graph_from_edges(uintptr_t nodes,
                                    const uint32_t *edges,
                                    uintptr_t edge_count,
                                    struct CcmGraph **out);

// Parses an edge list (`n <count>` header, then one `u v` pair per line).
//
// # Safety
// `source` must be a NUL-terminated string and `out` a valid pointer.
enum CcmStatus ccm_graph_from_edge_list(const char *source, struct CcmGraph **out);

// Releases a graph. Null is ignored.
//
// # Safety
// `graph` must be null or a live graph handle.
void ccm_graph_free(struct CcmGraph *graph);

// Number of nodes; 0 for a null handle.
//
// # Safety
// `graph` must be null or a live graph handle.
uintptr_t ccm_graph_node_count(const struct CcmGraph *graph);

// Number of edges; 0 for a null handle.
//
// # Safety
// `graph` must be null or a live graph handle.
uintptr_t ccm_graph_edge_count(const struct CcmGraph *graph);

// Copies the sorted edge list as `u, v` pairs with `u < v` into `buffer`,
// which must hold `2 * edge_count` values.
//
// # Safety
// `graph` must be a live graph handle and `buffer` must point to `len`
// writable values.
enum CcmStatus ccm_graph_copy_edges(const struct CcmGraph *graph, uint32_t *buffer, uintptr_t len);

// Serializes the graph as an edge list; release with [`ccm_string_free`].
//
// # Safety
// `graph` must be a live graph handle and `out` a valid pointer.
enum CcmStatus ccm_graph_to_edge_list(const struct CcmGraph *graph, char **out);

// Exact class sizes of every graph on `nodes` nodes. `properties_json` is a
// JSON array of properties in the config schema, e.g.
// `["edges"]` or `[{"kind": "degreedist", "max_degree": 3}]`. The result is
// a JSON object whose `entries` map comma-joined statistic counts to
// decimal class sizes; release it with [`ccm_string_free`].
//
// # Safety
// `properties_json` must be a NUL-terminated string and `out` a valid
// pointer.
enum CcmStatus ccm_enumerate_json(uintptr_t nodes, const char *properties_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CCM_H */
