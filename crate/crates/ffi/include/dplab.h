#ifndef DPLAB_H
#define DPLAB_H

/* Generated by cbindgen from the dplab-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// ABI revision reported by [`dplab_abi_version`]. Bumped on any breaking
// change to the exported symbols or their semantics.
#define DPLAB_ABI_VERSION 1

// Result of every fallible call in this ABI.
typedef enum DplabStatus {
  // The call succeeded.
  DPLAB_STATUS_OK = 0,
  // A required pointer argument was null.
  DPLAB_STATUS_NULL_POINTER = 1,
  // A numeric or structural parameter is outside its documented domain.
  DPLAB_STATUS_INVALID_ARGUMENT = 2,
  // The object cannot accept this call in its current state (for
  // example, stepping a monitor past its horizon or after it halted).
  DPLAB_STATUS_INVALID_STATE = 3,
  // An I/O failure surfaced by the underlying library.
  DPLAB_STATUS_IO = 4,
  // A panic was caught at the language boundary.
  DPLAB_STATUS_PANIC = 5,
} DplabStatus;

// Opaque streaming counter (binary-tree mechanism or the all-zero control).
typedef struct DplabCounter DplabCounter;

// Opaque mirror state: a never-halting ⊥/⊤ responder whose ⊤-probability
// climbs a fixed ladder once the running count of 1s exceeds its delay.
typedef struct DplabMirror DplabMirror;

// Opaque threshold monitor: answers ⊥ (continue) or ⊤ (halt) per step.
typedef struct DplabMonitor DplabMonitor;

// Opaque online predictor for point functions over an unbounded domain.
typedef struct DplabPredictor DplabPredictor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static name for a status code: `"ok"`, `"null_pointer"`,
// `"invalid_argument"`, `"invalid_state"`, `"io"`, `"panic"`, or
// `"unknown"` for anything else. Never null; do not free the result.
const char *dplab_status_name(int status);

// Message describing the most recent failure on the calling thread, as a
// NUL-terminated UTF-8 string. Empty until the first failure. Never null;
// do not free the result. The pointer stays valid until the next failing
// `dplab_*` call on the same thread.
const char *dplab_last_error_message(void);

// ABI revision of this library. Bindings should check it once at load
// time and refuse to run against a major revision they were not built for.
uint32_t dplab_abi_version(void);

// Create a binary-tree counter over horizon `t` with privacy parameter
// `eps`. `zero_noise` of 1 replaces every Laplace draw with 0 (a
// deterministic test mode); 0 gives the real seeded mechanism. On success
// `*out` owns the handle; release it with [`dplab_counter_free`].
//
// # Safety
// `out` must point to writable memory for one pointer.
enum DplabStatus dplab_counter_new_tree(size_t t,
                                        double eps,
                                        uint8_t zero_noise,
                                        uint64_t seed,
                                        struct DplabCounter **out);

// Create the all-zero control counter over horizon `t`: it answers 0 at
// every step regardless of the stream. On success `*out` owns the handle.
//
// # Safety
// `out` must point to writable memory for one pointer.
enum DplabStatus dplab_counter_new_zero(size_t t, struct DplabCounter **out);

// Feed the next update bit (0 or 1) and write the counter's estimate of
// the running prefix sum to `*estimate_out`. Fails with `invalid_state`
// once `t` steps have been consumed.
//
// # Safety
// `counter` must be a live handle from a `dplab_counter_new_*` call;
// `estimate_out` must point to writable memory for one double.
enum DplabStatus dplab_counter_step(struct DplabCounter *counter,
                                    uint8_t bit,
                                    double *estimate_out);

// Write the number of steps consumed so far to `*out`.
//
// # Safety
// `counter` must be a live handle; `out` must point to writable memory for
// one `size_t`.
enum DplabStatus dplab_counter_steps_taken(const struct DplabCounter *counter, size_t *out);

// Free a counter handle. Passing null is a no-op.
//
// # Safety
// `counter` must be null or a pointer returned by a `dplab_counter_new_*`
// call that has not already been freed.
void dplab_counter_free(struct DplabCounter *counter);

// Create a sparse-vector threshold monitor over horizon `t` with threshold
// level `k` and privacy parameter `eps`. `zero_noise` of 1 disables the
// Laplace noise (deterministic test mode). On success `*out` owns the
// handle; release it with [`dplab_monitor_free`].
//
// # Safety
// `out` must point to writable memory for one pointer.
enum DplabStatus dplab_monitor_new_svt(size_t t,
                                       uint64_t k,
                                       double eps,
                                       uint8_t zero_noise,
                                       uint64_t seed,
                                       struct DplabMonitor **out);

// Create a sampling monitor over horizon `t` with threshold level `k`:
// each 1-update is retained independently with probability `delta` and the
// monitor halts once the retained count reaches its internal trigger.
//
// # Safety
// `out` must point to writable memory for one pointer.
enum DplabStatus dplab_monitor_new_sampling(size_t t,
                                            uint64_t k,
                                            double delta,
                                            uint64_t seed,
                                            struct DplabMonitor **out);

// Create a monitor that thresholds a binary-tree counter's estimate.
// `zero_noise` of 1 disables the Laplace noise (deterministic test mode).
//
// # Safety
// `out` must point to writable memory for one pointer.
enum DplabStatus dplab_monitor_new_tree(size_t t,
                                        uint64_t k,
                                        double eps,
                                        uint8_t zero_noise,
                                        uint64_t seed,
                                        struct DplabMonitor **out);

// Create the exact (non-private) reference monitor: it halts precisely
// when the true running count reaches its trigger. Deterministic.
//
// # Safety
// `out` must point to writable memory for one pointer.
enum DplabStatus dplab_monitor_new_exact(size_t t, uint64_t k, struct DplabMonitor **out);

// Feed the next update bit (0 or 1); `*halt_out` receives 1 if the monitor
// answered ⊤ (halted) and 0 for ⊥. Fails with `invalid_state` after the
// monitor halts or its horizon is exhausted.
//
// # Safety
// `monitor` must be a live handle from a `dplab_monitor_new_*` call;
// `halt_out` must point to writable memory for one byte.
enum DplabStatus dplab_monitor_step(struct DplabMonitor *monitor, uint8_t bit, uint8_t *halt_out);

// Write 1 to `*out` if the monitor has emitted ⊤, else 0.
//
// # Safety
// `monitor` must be a live handle; `out` must point to writable memory for
// one byte.
enum DplabStatus dplab_monitor_halted(const struct DplabMonitor *monitor, uint8_t *out);

// Write the number of steps consumed so far to `*out`.
//
// # Safety
// `monitor` must be a live handle; `out` must point to writable memory for
// one `size_t`.
enum DplabStatus dplab_monitor_steps_taken(const struct DplabMonitor *monitor, size_t *out);

// Write the monitor's horizon `T` to `*out`.
//
// # Safety
// `monitor` must be a live handle; `out` must point to writable memory for
// one `size_t`.
enum DplabStatus dplab_monitor_horizon(const struct DplabMonitor *monitor, size_t *out);

// Free a monitor handle. Passing null is a no-op.
//
// # Safety
// `monitor` must be null or a pointer returned by a `dplab_monitor_new_*`
// call that has not already been freed.
void dplab_monitor_free(struct DplabMonitor *monitor);

// Create a mirror with per-rung privacy parameters (`eps_prime`,
// `delta_prime`) and delay parameter `k >= 1`. The rung ladder is built
// internally from the privacy parameters. On success `*out` owns the
// handle; release it with [`dplab_mirror_free`].
//
// # Safety
// `out` must point to writable memory for one pointer.
enum DplabStatus dplab_mirror_new(double eps_prime,
                                  double delta_prime,
                                  uint64_t k,
                                  uint64_t seed,
                                  struct DplabMirror **out);

// Feed the next update bit (0 or 1); `*top_out` receives 1 if the mirror
// answered ⊤ and 0 for ⊥. The mirror never halts, so this can be called
// indefinitely.
//
// # Safety
// `mirror` must be a live handle from [`dplab_mirror_new`]; `top_out` must
// point to writable memory for one byte.
enum DplabStatus dplab_mirror_step(struct DplabMirror *mirror, uint8_t bit, uint8_t *top_out);

// Write the ladder length `2L` (the number of noisy rungs) to `*out`.
//
// # Safety
// `mirror` must be a live handle; `out` must point to writable memory for
// one `size_t`.
enum DplabStatus dplab_mirror_two_l(const struct DplabMirror *mirror, size_t *out);

// Write the current rung index, `max(ones - k, 0)`, to `*out`.
//
// # Safety
// `mirror` must be a live handle; `out` must point to writable memory for
// one `uint64_t`.
enum DplabStatus dplab_mirror_rung(const struct DplabMirror *mirror, uint64_t *out);

// Write the number of 1-updates consumed so far to `*out`.
//
// # Safety
// `mirror` must be a live handle; `out` must point to writable memory for
// one `uint64_t`.
enum DplabStatus dplab_mirror_ones(const struct DplabMirror *mirror, uint64_t *out);

// Free a mirror handle. Passing null is a no-op.
//
// # Safety
// `mirror` must be null or a pointer returned by [`dplab_mirror_new`] that
// has not already been freed.
void dplab_mirror_free(struct DplabMirror *mirror);

// Create a predictor with privacy budget (`eps`, `delta`). `zero_noise`
// of 1 disables the internal noise (deterministic test mode). On success
// `*out` owns the handle; release it with [`dplab_predictor_free`].
//
// # Safety
// `out` must point to writable memory for one pointer.
enum DplabStatus dplab_predictor_new(double eps,
                                     double delta,
                                     uint8_t zero_noise,
                                     uint64_t seed,
                                     struct DplabPredictor **out);

// Predict the label of the next example `x`; `*label_out` receives 0 or 1.
// Every call must be followed by [`dplab_predictor_feed_label`] with the
// true label before the next prediction.
//
// # Safety
// `predictor` must be a live handle from [`dplab_predictor_new`];
// `label_out` must point to writable memory for one byte.
enum DplabStatus dplab_predictor_predict(struct DplabPredictor *predictor,
                                         uint64_t x,
                                         uint8_t *label_out);

// Reveal the true label (0 or 1) of the example most recently passed to
// [`dplab_predictor_predict`].
//
// # Safety
// `predictor` must be a live handle from [`dplab_predictor_new`].
enum DplabStatus dplab_predictor_feed_label(struct DplabPredictor *predictor, uint8_t y);

// Write the predictor's internal threshold level `k` to `*out`.
//
// # Safety
// `predictor` must be a live handle; `out` must point to writable memory
// for one `uint64_t`.
enum DplabStatus dplab_predictor_k(const struct DplabPredictor *predictor, uint64_t *out);

// Write the predictor's delay parameter `K` to `*out`.
//
// # Safety
// `predictor` must be a live handle; `out` must point to writable memory
// for one `uint64_t`.
enum DplabStatus dplab_predictor_delay(const struct DplabPredictor *predictor, uint64_t *out);

// Write the internal ladder length `2L` to `*out`.
//
// # Safety
// `predictor` must be a live handle; `out` must point to writable memory
// for one `size_t`.
enum DplabStatus dplab_predictor_two_l(const struct DplabPredictor *predictor, size_t *out);

// Write the current phase flag (0 collect, 1 watch, 2 echo, 3 dead) to
// `*out`.
//
// # Safety
// `predictor` must be a live handle; `out` must point to writable memory
// for one byte.
enum DplabStatus dplab_predictor_flag(const struct DplabPredictor *predictor, uint8_t *out);

// Free a predictor handle. Passing null is a no-op.
//
// # Safety
// `predictor` must be null or a pointer returned by
// [`dplab_predictor_new`] that has not already been freed.
void dplab_predictor_free(struct DplabPredictor *predictor);

// Evaluate the accuracy lower bound `e^eps * (beta0 + 2*k*delta) /
// (1 - e^eps / 2)` and write it to `*out`. Requires `e^eps < 2`.
//
// # Safety
// `out` must point to writable memory for one double.
enum DplabStatus dplab_theorem_bound(double eps,
                                     double delta,
                                     uint32_t k,
                                     double beta0,
                                     double *out);

// Write the horizon `T = 2^(k+1) - 2` of the adversarial hard instance at
// threshold level `k` to `*out`.
//
// # Safety
// `out` must point to writable memory for one `size_t`.
enum DplabStatus dplab_hard_instance_horizon(uint32_t k, size_t *out);

// Run the exact joint-privacy audit of the mirror with target budget
// (`eps`, `delta`), delay parameter `k`, and horizon `t`. Each non-null
// out-pointer receives its field: the maximum hockey-stick divergence at
// `eps` over all neighboring streams, the per-rung `delta_prime` the
// ladder was built with, and 1/0 for whether the divergence stays within
// `delta`.
//
// # Safety
// Each out-pointer must be null or point to writable memory for one value
// of its type.
enum DplabStatus dplab_jdp_audit(double eps,
                                 double delta,
                                 uint64_t k,
                                 size_t t,
                                 double *max_divergence_out,
                                 double *delta_prime_out,
                                 uint8_t *pass_out);

// Write the rung count `2L` of the ladder built from (`eps_prime`,
// `delta_prime`) to `*out`.
//
// # Safety
// `out` must point to writable memory for one `size_t`.
enum DplabStatus dplab_ladder_two_l(double eps_prime, double delta_prime, size_t *out);

// Write the ⊤-probability at rung `i` of the ladder built from
// (`eps_prime`, `delta_prime`) to `*out`. Rung 0 is 0, rungs `1..=2L`
// climb the ladder, and every higher rung is 1.
//
// # Safety
// `out` must point to writable memory for one double.
enum DplabStatus dplab_ladder_prob(double eps_prime, double delta_prime, uint64_t i, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DPLAB_H */
