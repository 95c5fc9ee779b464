#ifndef PILLOW_H
#define PILLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PillowStatus {
  PILLOW_STATUS_OK = 0,
  PILLOW_STATUS_NULL_POINTER = 1,
  PILLOW_STATUS_INVALID_ARGUMENT = 2,
  PILLOW_STATUS_CAPACITY = 3,
  PILLOW_STATUS_FORMAT = 4,
  PILLOW_STATUS_IO = 5,
  PILLOW_STATUS_CONSISTENCY = 6,
  PILLOW_STATUS_BUFFER_TOO_SMALL = 7,
  PILLOW_STATUS_PANIC = 8,
} PillowStatus;

typedef enum PillowSide {
  PILLOW_SIDE_LEFT = 0,
  PILLOW_SIDE_RIGHT = 1,
  PILLOW_SIDE_BOTTOM = 2,
  PILLOW_SIDE_TOP = 3,
} PillowSide;

/**
 * Opaque replacement graph.
 */
typedef struct PillowGraph PillowGraph;

/**
 * Certified modulus bounds.
 */
typedef struct PillowModulus {
  double value_lower;
  double value_upper;
  size_t iterations;
  bool converged;
} PillowModulus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static nul-terminated string.
 */
const char *pillow_version(void);

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library on this thread.
 */
const char *pillow_last_error(void);

/**
 * Builds `G_level`. `central_edges` selects the central-edge policy.
 *
 * # Safety
 * `out_graph` must be null or writable.
 */
enum PillowStatus pillow_graph_build(uint32_t level,
                                     bool central_edges,
                                     struct PillowGraph **out_graph);

/**
 * Loads a graph file in either format.
 *
 * # Safety
 * `path` must be null or nul-terminated; `out_graph` null or writable.
 */
enum PillowStatus pillow_graph_load(const char *path, struct PillowGraph **out_graph);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void pillow_graph_free(struct PillowGraph *g);

/**
 * # Safety
 * `g` must be a live handle or null; `n` null or writable.
 */
enum PillowStatus pillow_graph_vertex_count(const struct PillowGraph *g, size_t *n);

/**
 * # Safety
 * `g` must be a live handle or null; `n` null or writable.
 */
enum PillowStatus pillow_graph_edge_count(const struct PillowGraph *g, size_t *n);

/**
 * Hop distance between two vertices.
 *
 * # Safety
 * `g` must be a live handle or null; `d` null or writable.
 */
enum PillowStatus pillow_graph_distance(const struct PillowGraph *g,
                                        size_t u,
                                        size_t v,
                                        uint32_t *d);

/**
 * Writes the word of vertex `u` into `buf` with a trailing nul. `needed`
 * receives the buffer size required, nul included.
 *
 * # Safety
 * `buf` must be null or hold `len` bytes; `needed` null or writable.
 */
enum PillowStatus pillow_graph_word(const struct PillowGraph *g,
                                    size_t u,
                                    char *buf,
                                    size_t len,
                                    size_t *needed);

/**
 * Index of the vertex with the given word.
 *
 * # Safety
 * `word` must be null or nul-terminated; `u` null or writable.
 */
enum PillowStatus pillow_graph_index_of(const struct PillowGraph *g, const char *word, size_t *u);

/**
 * Certified p-modulus of the curves joining two sides. `tolerance` of 0
 * selects the default.
 *
 * # Safety
 * `g` must be a live handle or null; `result` null or writable.
 */
enum PillowStatus pillow_graph_modulus(const struct PillowGraph *g,
                                       enum PillowSide from,
                                       enum PillowSide to,
                                       double p,
                                       double tolerance,
                                       struct PillowModulus *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PILLOW_H */
