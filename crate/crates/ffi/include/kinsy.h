#ifndef KINSY_H
#define KINSY_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum KinsyMode {
  KINSY_MODE_SEMI_YAO = 0,
  KINSY_MODE_ANN = 1,
  KINSY_MODE_EPS_ANN = 2,
} KinsyMode;

typedef enum KinsyStatus {
  KINSY_STATUS_OK = 0,
  KINSY_STATUS_NULL_POINTER = 1,
  KINSY_STATUS_INVALID_ARGUMENT = 2,
  KINSY_STATUS_PARSE = 3,
  // The configuration cannot be built (bad angle, epsilon or mode).
  KINSY_STATUS_CONFIG = 4,
  // A root solver or event handler failed.
  KINSY_STATUS_MOTION = 5,
  // The outputs disagree with the brute-force oracle.
  KINSY_STATUS_DIVERGENCE = 6,
  KINSY_STATUS_UNKNOWN_POINT = 7,
  // The requested output is not maintained in this mode.
  KINSY_STATUS_UNAVAILABLE = 8,
  KINSY_STATUS_PANIC = 9,
} KinsyStatus;

// Opaque simulation handle.
typedef struct KinsySimulation KinsySimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *kinsy_last_error(void);

// Parses `scenario` (NUL-terminated text) and builds every structure at time
// 0. `theta` and `eps` override the scenario header when positive.
//
// # Safety
// `scenario` must be a valid C string and `out` a valid pointer.
enum KinsyStatus kinsy_simulation_new(const char *scenario,
                                      enum KinsyMode mode,
                                      double theta,
                                      double eps,
                                      struct KinsySimulation **out);

// Releases a simulation. Null is ignored.
//
// # Safety
// `sim` must come from `kinsy_simulation_new` and not be used afterwards.
void kinsy_simulation_free(struct KinsySimulation *sim);

// Processes every event up to the exact time `num / den`.
//
// # Safety
// `sim` must be a live handle.
enum KinsyStatus kinsy_simulation_advance(struct KinsySimulation *sim, int64_t num, int64_t den);

// Current time, rounded to a double.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum KinsyStatus kinsy_simulation_time(const struct KinsySimulation *sim, double *out);

// Number of points.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum KinsyStatus kinsy_simulation_point_count(const struct KinsySimulation *sim, size_t *out);

// Number of cones in the partition.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum KinsyStatus kinsy_simulation_cone_count(const struct KinsySimulation *sim, size_t *out);

// Total number of events processed so far.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum KinsyStatus kinsy_simulation_event_count(const struct KinsySimulation *sim, uint64_t *out);

// Nearest neighbour of `point` (ann mode). `*found` is false when the point
// has no other point to compare with.
//
// # Safety
// `sim` must be a live handle; `found` and `out` valid pointers.
enum KinsyStatus kinsy_simulation_nearest(const struct KinsySimulation *sim,
                                          uint64_t point,
                                          bool *found,
                                          uint64_t *out);

// A (1+eps)-approximate nearest neighbour of `point` (eps-ann mode).
//
// # Safety
// `sim` must be a live handle; `found` and `out` valid pointers.
enum KinsyStatus kinsy_simulation_eps_nearest(const struct KinsySimulation *sim,
                                              uint64_t point,
                                              bool *found,
                                              uint64_t *out);

// Semi-Yao target of `point` in `cone` (semi-yao and ann modes).
//
// # Safety
// `sim` must be a live handle; `found` and `out` valid pointers.
enum KinsyStatus kinsy_simulation_target(const struct KinsySimulation *sim,
                                         uint64_t point,
                                         size_t cone,
                                         bool *found,
                                         uint64_t *out);

// Compares all outputs with brute force and audits every structure at the
// current time. Returns `KINSY_STATUS_DIVERGENCE` on any disagreement.
//
// # Safety
// `sim` must be a live handle.
enum KinsyStatus kinsy_simulation_verify(const struct KinsySimulation *sim);

// Library version as a static C string.
const char *kinsy_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KINSY_H */
