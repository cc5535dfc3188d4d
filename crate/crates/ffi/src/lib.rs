//! C ABI for the `dplab` library.
//!
//! One calling convention everywhere: every fallible function returns a
//! [`DplabStatus`] code, results travel through out-pointers, and stateful
//! objects live behind opaque handles that the caller frees exactly once
//! with the matching `*_free` function. A human-readable description of the
//! most recent failure on the current thread is available through
//! [`dplab_last_error_message`].
//!
//! The surface covers the streaming mechanisms (counters, threshold
//! monitors, the mirror, the point-function predictor) plus the cheap
//! one-shot analyses (lower-bound threshold, ladder construction, the exact
//! divergence audit). The richer report-producing experiments stay behind
//! the `dplab` CLI, which already serializes them to plain text any language
//! can parse.
//!
//! The matching C header is committed at `include/dplab.h` and regenerated
//! with
//!
//! ```text
//! cbindgen --config cbindgen.toml --crate dplab-ffi --output include/dplab.h
//! ```
//!
//! run from this crate's directory.

#![deny(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dplab::adversary::{hard_instance_horizon, theorem_bound};
use dplab::mechanisms::{BinaryTreeCounter, Counter, Monitor, MonitorSpec, Verdict, ZeroCounter};
use dplab::mirror::{audit_jdp, build_pi_ladder, MirrorOutput, MirrorState};
use dplab::params::NoiseMode;
use dplab::predictor::PredictorState;
use dplab::rng::RandomSource;
use dplab::Error;

/// ABI revision reported by [`dplab_abi_version`]. Bumped on any breaking
/// change to the exported symbols or their semantics.
pub const DPLAB_ABI_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Status codes and the per-thread error message
// ---------------------------------------------------------------------------

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DplabStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A numeric or structural parameter is outside its documented domain.
    InvalidArgument = 2,
    /// The object cannot accept this call in its current state (for
    /// example, stepping a monitor past its horizon or after it halted).
    InvalidState = 3,
    /// An I/O failure surfaced by the underlying library.
    Io = 4,
    /// A panic was caught at the language boundary.
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    // Interior NULs cannot occur in our messages, but a lossy fallback keeps
    // this infallible either way.
    let owned = CString::new(msg).unwrap_or_else(|_| CString::new("invalid message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
}

/// Record `err` as the thread's last error and translate it to a status.
fn fail(err: &Error) -> DplabStatus {
    set_last_error(&err.to_string());
    match err {
        Error::Parameter(_) => DplabStatus::InvalidArgument,
        Error::State(_) => DplabStatus::InvalidState,
        Error::Io(_) => DplabStatus::Io,
    }
}

/// Run `f`, converting a panic into [`DplabStatus::Panic`] instead of
/// letting it unwind across the C boundary.
fn guarded(f: impl FnOnce() -> DplabStatus) -> DplabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("panic caught at the C boundary");
            DplabStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_last_error(concat!(stringify!($ptr), " must not be null"));
            return DplabStatus::NullPointer;
        }
    };
}

/// Static name for a status code: `"ok"`, `"null_pointer"`,
/// `"invalid_argument"`, `"invalid_state"`, `"io"`, `"panic"`, or
/// `"unknown"` for anything else. Never null; do not free the result.
#[no_mangle]
pub extern "C" fn dplab_status_name(status: c_int) -> *const c_char {
    let name: &'static std::ffi::CStr = match status {
        0 => c"ok",
        1 => c"null_pointer",
        2 => c"invalid_argument",
        3 => c"invalid_state",
        4 => c"io",
        5 => c"panic",
        _ => c"unknown",
    };
    name.as_ptr()
}

/// Message describing the most recent failure on the calling thread, as a
/// NUL-terminated UTF-8 string. Empty until the first failure. Never null;
/// do not free the result. The pointer stays valid until the next failing
/// `dplab_*` call on the same thread.
#[no_mangle]
pub extern "C" fn dplab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// ABI revision of this library. Bindings should check it once at load
/// time and refuse to run against a major revision they were not built for.
#[no_mangle]
pub extern "C" fn dplab_abi_version() -> u32 {
    DPLAB_ABI_VERSION
}

fn noise_mode(zero_noise: u8) -> NoiseMode {
    if zero_noise != 0 {
        NoiseMode::Zero
    } else {
        NoiseMode::Seeded
    }
}

// ---------------------------------------------------------------------------
// Counters
// ---------------------------------------------------------------------------

/// Opaque streaming counter (binary-tree mechanism or the all-zero control).
pub struct DplabCounter {
    inner: Box<dyn Counter + Send>,
}

/// Create a binary-tree counter over horizon `t` with privacy parameter
/// `eps`. `zero_noise` of 1 replaces every Laplace draw with 0 (a
/// deterministic test mode); 0 gives the real seeded mechanism. On success
/// `*out` owns the handle; release it with [`dplab_counter_free`].
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dplab_counter_new_tree(
    t: usize,
    eps: f64,
    zero_noise: u8,
    seed: u64,
    out: *mut *mut DplabCounter,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        match BinaryTreeCounter::new(t, eps, noise_mode(zero_noise), RandomSource::new(seed, 0)) {
            Ok(counter) => {
                let handle = Box::new(DplabCounter { inner: Box::new(counter) });
                unsafe { *out = Box::into_raw(handle) };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Create the all-zero control counter over horizon `t`: it answers 0 at
/// every step regardless of the stream. On success `*out` owns the handle.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dplab_counter_new_zero(
    t: usize,
    out: *mut *mut DplabCounter,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        match ZeroCounter::new(t) {
            Ok(counter) => {
                let handle = Box::new(DplabCounter { inner: Box::new(counter) });
                unsafe { *out = Box::into_raw(handle) };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Feed the next update bit (0 or 1) and write the counter's estimate of
/// the running prefix sum to `*estimate_out`. Fails with `invalid_state`
/// once `t` steps have been consumed.
///
/// # Safety
/// `counter` must be a live handle from a `dplab_counter_new_*` call;
/// `estimate_out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn dplab_counter_step(
    counter: *mut DplabCounter,
    bit: u8,
    estimate_out: *mut f64,
) -> DplabStatus {
    guarded(|| {
        non_null!(counter);
        non_null!(estimate_out);
        let handle = unsafe { &mut *counter };
        match handle.inner.step(bit) {
            Ok(estimate) => {
                unsafe { *estimate_out = estimate };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Write the number of steps consumed so far to `*out`.
///
/// # Safety
/// `counter` must be a live handle; `out` must point to writable memory for
/// one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_counter_steps_taken(
    counter: *const DplabCounter,
    out: *mut usize,
) -> DplabStatus {
    guarded(|| {
        non_null!(counter);
        non_null!(out);
        let handle = unsafe { &*counter };
        unsafe { *out = handle.inner.steps_taken() };
        DplabStatus::Ok
    })
}

/// Free a counter handle. Passing null is a no-op.
///
/// # Safety
/// `counter` must be null or a pointer returned by a `dplab_counter_new_*`
/// call that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn dplab_counter_free(counter: *mut DplabCounter) {
    if !counter.is_null() {
        drop(unsafe { Box::from_raw(counter) });
    }
}

// ---------------------------------------------------------------------------
// Threshold monitors
// ---------------------------------------------------------------------------

/// Opaque threshold monitor: answers ⊥ (continue) or ⊤ (halt) per step.
pub struct DplabMonitor {
    inner: Box<dyn Monitor + Send>,
}

fn monitor_from_spec(
    spec: MonitorSpec,
    seed: u64,
    out: *mut *mut DplabMonitor,
) -> DplabStatus {
    match spec.build(RandomSource::new(seed, 0)) {
        Ok(monitor) => {
            let handle = Box::new(DplabMonitor { inner: monitor });
            // Callers validated `out` before building the variant.
            unsafe { *out = Box::into_raw(handle) };
            DplabStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// Create a sparse-vector threshold monitor over horizon `t` with threshold
/// level `k` and privacy parameter `eps`. `zero_noise` of 1 disables the
/// Laplace noise (deterministic test mode). On success `*out` owns the
/// handle; release it with [`dplab_monitor_free`].
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_new_svt(
    t: usize,
    k: u64,
    eps: f64,
    zero_noise: u8,
    seed: u64,
    out: *mut *mut DplabMonitor,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        let spec = MonitorSpec::Svt { t, k, eps, mode: noise_mode(zero_noise) };
        monitor_from_spec(spec, seed, out)
    })
}

/// Create a sampling monitor over horizon `t` with threshold level `k`:
/// each 1-update is retained independently with probability `delta` and the
/// monitor halts once the retained count reaches its internal trigger.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_new_sampling(
    t: usize,
    k: u64,
    delta: f64,
    seed: u64,
    out: *mut *mut DplabMonitor,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        monitor_from_spec(MonitorSpec::Sampling { t, k, delta }, seed, out)
    })
}

/// Create a monitor that thresholds a binary-tree counter's estimate.
/// `zero_noise` of 1 disables the Laplace noise (deterministic test mode).
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_new_tree(
    t: usize,
    k: u64,
    eps: f64,
    zero_noise: u8,
    seed: u64,
    out: *mut *mut DplabMonitor,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        let spec = MonitorSpec::TreeCounterMonitor { t, k, eps, mode: noise_mode(zero_noise) };
        monitor_from_spec(spec, seed, out)
    })
}

/// Create the exact (non-private) reference monitor: it halts precisely
/// when the true running count reaches its trigger. Deterministic.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_new_exact(
    t: usize,
    k: u64,
    out: *mut *mut DplabMonitor,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        monitor_from_spec(MonitorSpec::Exact { t, k }, 0, out)
    })
}

/// Feed the next update bit (0 or 1); `*halt_out` receives 1 if the monitor
/// answered ⊤ (halted) and 0 for ⊥. Fails with `invalid_state` after the
/// monitor halts or its horizon is exhausted.
///
/// # Safety
/// `monitor` must be a live handle from a `dplab_monitor_new_*` call;
/// `halt_out` must point to writable memory for one byte.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_step(
    monitor: *mut DplabMonitor,
    bit: u8,
    halt_out: *mut u8,
) -> DplabStatus {
    guarded(|| {
        non_null!(monitor);
        non_null!(halt_out);
        let handle = unsafe { &mut *monitor };
        match handle.inner.step(bit) {
            Ok(verdict) => {
                unsafe { *halt_out = u8::from(verdict == Verdict::Halt) };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Write 1 to `*out` if the monitor has emitted ⊤, else 0.
///
/// # Safety
/// `monitor` must be a live handle; `out` must point to writable memory for
/// one byte.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_halted(
    monitor: *const DplabMonitor,
    out: *mut u8,
) -> DplabStatus {
    guarded(|| {
        non_null!(monitor);
        non_null!(out);
        let handle = unsafe { &*monitor };
        unsafe { *out = u8::from(handle.inner.halted()) };
        DplabStatus::Ok
    })
}

/// Write the number of steps consumed so far to `*out`.
///
/// # Safety
/// `monitor` must be a live handle; `out` must point to writable memory for
/// one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_steps_taken(
    monitor: *const DplabMonitor,
    out: *mut usize,
) -> DplabStatus {
    guarded(|| {
        non_null!(monitor);
        non_null!(out);
        let handle = unsafe { &*monitor };
        unsafe { *out = handle.inner.steps_taken() };
        DplabStatus::Ok
    })
}

/// Write the monitor's horizon `T` to `*out`.
///
/// # Safety
/// `monitor` must be a live handle; `out` must point to writable memory for
/// one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_horizon(
    monitor: *const DplabMonitor,
    out: *mut usize,
) -> DplabStatus {
    guarded(|| {
        non_null!(monitor);
        non_null!(out);
        let handle = unsafe { &*monitor };
        unsafe { *out = handle.inner.horizon() };
        DplabStatus::Ok
    })
}

/// Free a monitor handle. Passing null is a no-op.
///
/// # Safety
/// `monitor` must be null or a pointer returned by a `dplab_monitor_new_*`
/// call that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn dplab_monitor_free(monitor: *mut DplabMonitor) {
    if !monitor.is_null() {
        drop(unsafe { Box::from_raw(monitor) });
    }
}

// ---------------------------------------------------------------------------
// Mirror
// ---------------------------------------------------------------------------

/// Opaque mirror state: a never-halting ⊥/⊤ responder whose ⊤-probability
/// climbs a fixed ladder once the running count of 1s exceeds its delay.
pub struct DplabMirror {
    inner: MirrorState,
}

/// Create a mirror with per-rung privacy parameters (`eps_prime`,
/// `delta_prime`) and delay parameter `k >= 1`. The rung ladder is built
/// internally from the privacy parameters. On success `*out` owns the
/// handle; release it with [`dplab_mirror_free`].
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dplab_mirror_new(
    eps_prime: f64,
    delta_prime: f64,
    k: u64,
    seed: u64,
    out: *mut *mut DplabMirror,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        let ladder = match build_pi_ladder(eps_prime, delta_prime) {
            Ok(ladder) => ladder,
            Err(err) => return fail(&err),
        };
        match MirrorState::new(ladder, k, RandomSource::new(seed, 0)) {
            Ok(state) => {
                let handle = Box::new(DplabMirror { inner: state });
                unsafe { *out = Box::into_raw(handle) };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Feed the next update bit (0 or 1); `*top_out` receives 1 if the mirror
/// answered ⊤ and 0 for ⊥. The mirror never halts, so this can be called
/// indefinitely.
///
/// # Safety
/// `mirror` must be a live handle from [`dplab_mirror_new`]; `top_out` must
/// point to writable memory for one byte.
#[no_mangle]
pub unsafe extern "C" fn dplab_mirror_step(
    mirror: *mut DplabMirror,
    bit: u8,
    top_out: *mut u8,
) -> DplabStatus {
    guarded(|| {
        non_null!(mirror);
        non_null!(top_out);
        let handle = unsafe { &mut *mirror };
        match handle.inner.step(bit) {
            Ok(output) => {
                unsafe { *top_out = u8::from(output == MirrorOutput::Top) };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Write the ladder length `2L` (the number of noisy rungs) to `*out`.
///
/// # Safety
/// `mirror` must be a live handle; `out` must point to writable memory for
/// one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_mirror_two_l(
    mirror: *const DplabMirror,
    out: *mut usize,
) -> DplabStatus {
    guarded(|| {
        non_null!(mirror);
        non_null!(out);
        let handle = unsafe { &*mirror };
        unsafe { *out = handle.inner.ladder().two_l() };
        DplabStatus::Ok
    })
}

/// Write the current rung index, `max(ones - k, 0)`, to `*out`.
///
/// # Safety
/// `mirror` must be a live handle; `out` must point to writable memory for
/// one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_mirror_rung(
    mirror: *const DplabMirror,
    out: *mut u64,
) -> DplabStatus {
    guarded(|| {
        non_null!(mirror);
        non_null!(out);
        let handle = unsafe { &*mirror };
        unsafe { *out = handle.inner.rung() };
        DplabStatus::Ok
    })
}

/// Write the number of 1-updates consumed so far to `*out`.
///
/// # Safety
/// `mirror` must be a live handle; `out` must point to writable memory for
/// one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_mirror_ones(
    mirror: *const DplabMirror,
    out: *mut u64,
) -> DplabStatus {
    guarded(|| {
        non_null!(mirror);
        non_null!(out);
        let handle = unsafe { &*mirror };
        unsafe { *out = handle.inner.ones() };
        DplabStatus::Ok
    })
}

/// Free a mirror handle. Passing null is a no-op.
///
/// # Safety
/// `mirror` must be null or a pointer returned by [`dplab_mirror_new`] that
/// has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn dplab_mirror_free(mirror: *mut DplabMirror) {
    if !mirror.is_null() {
        drop(unsafe { Box::from_raw(mirror) });
    }
}

// ---------------------------------------------------------------------------
// Predictor
// ---------------------------------------------------------------------------

/// Opaque online predictor for point functions over an unbounded domain.
pub struct DplabPredictor {
    inner: PredictorState,
}

/// Create a predictor with privacy budget (`eps`, `delta`). `zero_noise`
/// of 1 disables the internal noise (deterministic test mode). On success
/// `*out` owns the handle; release it with [`dplab_predictor_free`].
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dplab_predictor_new(
    eps: f64,
    delta: f64,
    zero_noise: u8,
    seed: u64,
    out: *mut *mut DplabPredictor,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        match PredictorState::new(eps, delta, noise_mode(zero_noise), RandomSource::new(seed, 0)) {
            Ok(state) => {
                let handle = Box::new(DplabPredictor { inner: state });
                unsafe { *out = Box::into_raw(handle) };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Predict the label of the next example `x`; `*label_out` receives 0 or 1.
/// Every call must be followed by [`dplab_predictor_feed_label`] with the
/// true label before the next prediction.
///
/// # Safety
/// `predictor` must be a live handle from [`dplab_predictor_new`];
/// `label_out` must point to writable memory for one byte.
#[no_mangle]
pub unsafe extern "C" fn dplab_predictor_predict(
    predictor: *mut DplabPredictor,
    x: u64,
    label_out: *mut u8,
) -> DplabStatus {
    guarded(|| {
        non_null!(predictor);
        non_null!(label_out);
        let handle = unsafe { &mut *predictor };
        match handle.inner.predict(x) {
            Ok(label) => {
                unsafe { *label_out = label };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Reveal the true label (0 or 1) of the example most recently passed to
/// [`dplab_predictor_predict`].
///
/// # Safety
/// `predictor` must be a live handle from [`dplab_predictor_new`].
#[no_mangle]
pub unsafe extern "C" fn dplab_predictor_feed_label(
    predictor: *mut DplabPredictor,
    y: u8,
) -> DplabStatus {
    guarded(|| {
        non_null!(predictor);
        let handle = unsafe { &mut *predictor };
        match handle.inner.feed_label(y) {
            Ok(()) => DplabStatus::Ok,
            Err(err) => fail(&err),
        }
    })
}

/// Write the predictor's internal threshold level `k` to `*out`.
///
/// # Safety
/// `predictor` must be a live handle; `out` must point to writable memory
/// for one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_predictor_k(
    predictor: *const DplabPredictor,
    out: *mut u64,
) -> DplabStatus {
    guarded(|| {
        non_null!(predictor);
        non_null!(out);
        let handle = unsafe { &*predictor };
        unsafe { *out = handle.inner.k() };
        DplabStatus::Ok
    })
}

/// Write the predictor's delay parameter `K` to `*out`.
///
/// # Safety
/// `predictor` must be a live handle; `out` must point to writable memory
/// for one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_predictor_delay(
    predictor: *const DplabPredictor,
    out: *mut u64,
) -> DplabStatus {
    guarded(|| {
        non_null!(predictor);
        non_null!(out);
        let handle = unsafe { &*predictor };
        unsafe { *out = handle.inner.delay() };
        DplabStatus::Ok
    })
}

/// Write the internal ladder length `2L` to `*out`.
///
/// # Safety
/// `predictor` must be a live handle; `out` must point to writable memory
/// for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_predictor_two_l(
    predictor: *const DplabPredictor,
    out: *mut usize,
) -> DplabStatus {
    guarded(|| {
        non_null!(predictor);
        non_null!(out);
        let handle = unsafe { &*predictor };
        unsafe { *out = handle.inner.two_l() };
        DplabStatus::Ok
    })
}

/// Write the current phase flag (0 collect, 1 watch, 2 echo, 3 dead) to
/// `*out`.
///
/// # Safety
/// `predictor` must be a live handle; `out` must point to writable memory
/// for one byte.
#[no_mangle]
pub unsafe extern "C" fn dplab_predictor_flag(
    predictor: *const DplabPredictor,
    out: *mut u8,
) -> DplabStatus {
    guarded(|| {
        non_null!(predictor);
        non_null!(out);
        let handle = unsafe { &*predictor };
        unsafe { *out = handle.inner.flag() };
        DplabStatus::Ok
    })
}

/// Free a predictor handle. Passing null is a no-op.
///
/// # Safety
/// `predictor` must be null or a pointer returned by
/// [`dplab_predictor_new`] that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn dplab_predictor_free(predictor: *mut DplabPredictor) {
    if !predictor.is_null() {
        drop(unsafe { Box::from_raw(predictor) });
    }
}

// ---------------------------------------------------------------------------
// One-shot analyses
// ---------------------------------------------------------------------------

/// Evaluate the accuracy lower bound `e^eps * (beta0 + 2*k*delta) /
/// (1 - e^eps / 2)` and write it to `*out`. Requires `e^eps < 2`.
///
/// # Safety
/// `out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn dplab_theorem_bound(
    eps: f64,
    delta: f64,
    k: u32,
    beta0: f64,
    out: *mut f64,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        match theorem_bound(eps, delta, k, beta0) {
            Ok(bound) => {
                unsafe { *out = bound };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Write the horizon `T = 2^(k+1) - 2` of the adversarial hard instance at
/// threshold level `k` to `*out`.
///
/// # Safety
/// `out` must point to writable memory for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_hard_instance_horizon(
    k: u32,
    out: *mut usize,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        match hard_instance_horizon(k) {
            Ok(horizon) => {
                unsafe { *out = horizon };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Run the exact joint-privacy audit of the mirror with target budget
/// (`eps`, `delta`), delay parameter `k`, and horizon `t`. Each non-null
/// out-pointer receives its field: the maximum hockey-stick divergence at
/// `eps` over all neighboring streams, the per-rung `delta_prime` the
/// ladder was built with, and 1/0 for whether the divergence stays within
/// `delta`.
///
/// # Safety
/// Each out-pointer must be null or point to writable memory for one value
/// of its type.
#[no_mangle]
pub unsafe extern "C" fn dplab_jdp_audit(
    eps: f64,
    delta: f64,
    k: u64,
    t: usize,
    max_divergence_out: *mut f64,
    delta_prime_out: *mut f64,
    pass_out: *mut u8,
) -> DplabStatus {
    guarded(|| match audit_jdp(eps, delta, k, t) {
        Ok(report) => {
            if !max_divergence_out.is_null() {
                unsafe { *max_divergence_out = report.max_divergence };
            }
            if !delta_prime_out.is_null() {
                unsafe { *delta_prime_out = report.delta_prime };
            }
            if !pass_out.is_null() {
                unsafe { *pass_out = u8::from(report.pass) };
            }
            DplabStatus::Ok
        }
        Err(err) => fail(&err),
    })
}

/// Write the rung count `2L` of the ladder built from (`eps_prime`,
/// `delta_prime`) to `*out`.
///
/// # Safety
/// `out` must point to writable memory for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn dplab_ladder_two_l(
    eps_prime: f64,
    delta_prime: f64,
    out: *mut usize,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        match build_pi_ladder(eps_prime, delta_prime) {
            Ok(ladder) => {
                unsafe { *out = ladder.two_l() };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Write the ⊤-probability at rung `i` of the ladder built from
/// (`eps_prime`, `delta_prime`) to `*out`. Rung 0 is 0, rungs `1..=2L`
/// climb the ladder, and every higher rung is 1.
///
/// # Safety
/// `out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn dplab_ladder_prob(
    eps_prime: f64,
    delta_prime: f64,
    i: u64,
    out: *mut f64,
) -> DplabStatus {
    guarded(|| {
        non_null!(out);
        match build_pi_ladder(eps_prime, delta_prime) {
            Ok(ladder) => {
                unsafe { *out = ladder.probs(i) };
                DplabStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;
    use std::ptr;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(dplab_last_error_message()) }
            .to_str()
            .expect("error message is UTF-8")
            .to_owned()
    }

    fn status_name(code: c_int) -> &'static str {
        unsafe { CStr::from_ptr(dplab_status_name(code)) }
            .to_str()
            .expect("status name is UTF-8")
    }

    #[test]
    fn status_names_are_stable_and_distinct() {
        let names: Vec<&str> = (0..6).map(status_name).collect();
        assert_eq!(
            names,
            ["ok", "null_pointer", "invalid_argument", "invalid_state", "io", "panic"]
        );
        assert_eq!(status_name(-1), "unknown");
        assert_eq!(status_name(99), "unknown");
        println!("[PASS] status names cover every code");
    }

    #[test]
    fn abi_version_is_reported() {
        assert_eq!(dplab_abi_version(), DPLAB_ABI_VERSION);
        println!("[PASS] abi version reported");
    }

    #[test]
    fn null_out_pointers_are_rejected_with_a_named_message() {
        let status = unsafe { dplab_counter_new_tree(8, 1.0, 0, 7, ptr::null_mut()) };
        assert_eq!(status, DplabStatus::NullPointer);
        assert!(last_error().contains("out"), "message names the argument: {}", last_error());

        let status = unsafe { dplab_monitor_step(ptr::null_mut(), 0, ptr::null_mut()) };
        assert_eq!(status, DplabStatus::NullPointer);

        let status = unsafe { dplab_ladder_two_l(1.0, 0.05, ptr::null_mut()) };
        assert_eq!(status, DplabStatus::NullPointer);
        println!("[PASS] null pointers are rejected");
    }

    #[test]
    fn parameter_errors_map_to_invalid_argument() {
        let mut handle: *mut DplabCounter = ptr::null_mut();
        let status = unsafe { dplab_counter_new_tree(8, -1.0, 0, 7, &mut handle) };
        assert_eq!(status, DplabStatus::InvalidArgument);
        assert!(handle.is_null());
        assert!(last_error().contains("eps"), "message mentions eps: {}", last_error());
        println!("[PASS] parameter errors map to invalid_argument");
    }

    #[test]
    fn noiseless_tree_counter_tracks_the_exact_prefix_sum() {
        let mut handle: *mut DplabCounter = ptr::null_mut();
        let status = unsafe { dplab_counter_new_tree(6, 1.0, 1, 0, &mut handle) };
        assert_eq!(status, DplabStatus::Ok);

        let bits = [1u8, 0, 1, 1, 0, 1];
        let mut exact = 0.0_f64;
        for &bit in &bits {
            let mut estimate = f64::NAN;
            let status = unsafe { dplab_counter_step(handle, bit, &mut estimate) };
            assert_eq!(status, DplabStatus::Ok);
            exact += f64::from(bit);
            assert_eq!(estimate, exact);
        }

        let mut steps = 0usize;
        assert_eq!(unsafe { dplab_counter_steps_taken(handle, &mut steps) }, DplabStatus::Ok);
        assert_eq!(steps, 6);

        // The horizon is exhausted: one more step is a state error.
        let mut estimate = 0.0;
        let status = unsafe { dplab_counter_step(handle, 0, &mut estimate) };
        assert_eq!(status, DplabStatus::InvalidState);

        unsafe { dplab_counter_free(handle) };
        println!("[PASS] noiseless tree counter is exact through the ABI");
    }

    #[test]
    fn zero_counter_always_answers_zero() {
        let mut handle: *mut DplabCounter = ptr::null_mut();
        assert_eq!(unsafe { dplab_counter_new_zero(4, &mut handle) }, DplabStatus::Ok);
        for bit in [1u8, 1, 1, 1] {
            let mut estimate = f64::NAN;
            assert_eq!(unsafe { dplab_counter_step(handle, bit, &mut estimate) }, DplabStatus::Ok);
            assert_eq!(estimate, 0.0);
        }
        unsafe { dplab_counter_free(handle) };
        println!("[PASS] zero counter answers zero");
    }

    #[test]
    fn exact_monitor_halts_at_its_trigger_and_rejects_further_steps() {
        // k = 4 gives trigger ceil(3k/4) = 3.
        let mut handle: *mut DplabMonitor = ptr::null_mut();
        assert_eq!(unsafe { dplab_monitor_new_exact(10, 4, &mut handle) }, DplabStatus::Ok);

        let mut horizon = 0usize;
        assert_eq!(unsafe { dplab_monitor_horizon(handle, &mut horizon) }, DplabStatus::Ok);
        assert_eq!(horizon, 10);

        let mut halts = Vec::new();
        for bit in [1u8, 1, 0, 1] {
            let mut halt = 2u8;
            assert_eq!(unsafe { dplab_monitor_step(handle, bit, &mut halt) }, DplabStatus::Ok);
            halts.push(halt);
        }
        assert_eq!(halts, [0, 0, 0, 1], "halts exactly when the third 1 arrives");

        let mut halted = 0u8;
        assert_eq!(unsafe { dplab_monitor_halted(handle, &mut halted) }, DplabStatus::Ok);
        assert_eq!(halted, 1);

        let mut halt = 0u8;
        assert_eq!(
            unsafe { dplab_monitor_step(handle, 0, &mut halt) },
            DplabStatus::InvalidState,
            "stepping a halted monitor is a state error"
        );

        unsafe { dplab_monitor_free(handle) };
        println!("[PASS] exact monitor halts at its trigger");
    }

    #[test]
    fn seeded_svt_monitor_is_reproducible_across_handles() {
        let run = || {
            let mut handle: *mut DplabMonitor = ptr::null_mut();
            let status = unsafe { dplab_monitor_new_svt(64, 6, 0.8, 0, 99, &mut handle) };
            assert_eq!(status, DplabStatus::Ok);
            let mut outputs = Vec::new();
            for i in 0..64usize {
                let mut halted = 0u8;
                assert_eq!(unsafe { dplab_monitor_halted(handle, &mut halted) }, DplabStatus::Ok);
                if halted == 1 {
                    break;
                }
                let bit = u8::from(i % 2 == 1);
                let mut halt = 0u8;
                assert_eq!(unsafe { dplab_monitor_step(handle, bit, &mut halt) }, DplabStatus::Ok);
                outputs.push(halt);
            }
            unsafe { dplab_monitor_free(handle) };
            outputs
        };
        assert_eq!(run(), run(), "same seed, same transcript");
        println!("[PASS] seeded svt monitor is reproducible");
    }

    #[test]
    fn mirror_stays_bot_before_the_delay_and_saturates_to_top() {
        let eps_prime = std::f64::consts::LN_2;
        let mut handle: *mut DplabMirror = ptr::null_mut();
        assert_eq!(
            unsafe { dplab_mirror_new(eps_prime, 0.05, 2, 5, &mut handle) },
            DplabStatus::Ok
        );

        let mut two_l = 0usize;
        assert_eq!(unsafe { dplab_mirror_two_l(handle, &mut two_l) }, DplabStatus::Ok);
        assert_eq!(two_l, 8, "the worked ladder has eight noisy rungs");

        // Two 1s only reach the delay: rung 0 answers ⊥ with certainty.
        for _ in 0..2 {
            let mut top = 9u8;
            assert_eq!(unsafe { dplab_mirror_step(handle, 1, &mut top) }, DplabStatus::Ok);
            assert_eq!(top, 0);
        }
        let mut rung = 99u64;
        assert_eq!(unsafe { dplab_mirror_rung(handle, &mut rung) }, DplabStatus::Ok);
        assert_eq!(rung, 0);

        // Climb past the top of the ladder: rung > 2L answers ⊤ with
        // certainty.
        for _ in 0..(two_l as u64 + 1) {
            let mut top = 9u8;
            assert_eq!(unsafe { dplab_mirror_step(handle, 1, &mut top) }, DplabStatus::Ok);
        }
        let mut top = 9u8;
        assert_eq!(unsafe { dplab_mirror_step(handle, 1, &mut top) }, DplabStatus::Ok);
        assert_eq!(top, 1, "above the ladder the mirror always answers ⊤");

        let mut ones = 0u64;
        assert_eq!(unsafe { dplab_mirror_ones(handle, &mut ones) }, DplabStatus::Ok);
        assert_eq!(ones, 2 + two_l as u64 + 1 + 1);

        unsafe { dplab_mirror_free(handle) };
        println!("[PASS] mirror endpoints are deterministic through the ABI");
    }

    #[test]
    fn predictor_round_trips_and_enforces_the_label_protocol() {
        let mut handle: *mut DplabPredictor = ptr::null_mut();
        assert_eq!(
            unsafe { dplab_predictor_new(1.0, 0.05, 0, 11, &mut handle) },
            DplabStatus::Ok
        );

        let mut k = 0u64;
        let mut delay = 0u64;
        let mut two_l = 0usize;
        let mut flag = 9u8;
        assert_eq!(unsafe { dplab_predictor_k(handle, &mut k) }, DplabStatus::Ok);
        assert_eq!(unsafe { dplab_predictor_delay(handle, &mut delay) }, DplabStatus::Ok);
        assert_eq!(unsafe { dplab_predictor_two_l(handle, &mut two_l) }, DplabStatus::Ok);
        assert_eq!(unsafe { dplab_predictor_flag(handle, &mut flag) }, DplabStatus::Ok);
        assert_eq!((k, delay, two_l, flag), (15, 300, 532, 0), "fresh predictors collect");

        // Labels may only follow predictions.
        assert_eq!(
            unsafe { dplab_predictor_feed_label(handle, 1) },
            DplabStatus::InvalidState
        );

        let mut label = 9u8;
        assert_eq!(unsafe { dplab_predictor_predict(handle, 42, &mut label) }, DplabStatus::Ok);
        assert!(label <= 1);
        assert_eq!(unsafe { dplab_predictor_feed_label(handle, 2) }, DplabStatus::InvalidArgument);
        assert_eq!(unsafe { dplab_predictor_feed_label(handle, 1) }, DplabStatus::Ok);

        unsafe { dplab_predictor_free(handle) };
        println!("[PASS] predictor protocol is enforced through the ABI");
    }

    #[test]
    fn one_shot_analyses_match_the_library() {
        let mut bound = f64::NAN;
        assert_eq!(
            unsafe { dplab_theorem_bound(0.5, 1.0 / 800.0, 8, 0.25, &mut bound) },
            DplabStatus::Ok
        );
        assert_eq!(bound, theorem_bound(0.5, 1.0 / 800.0, 8, 0.25).unwrap());

        assert_eq!(
            unsafe { dplab_theorem_bound(1.0, 0.0, 8, 0.25, &mut bound) },
            DplabStatus::InvalidArgument,
            "e^eps >= 2 is outside the bound's domain"
        );

        let mut horizon = 0usize;
        assert_eq!(unsafe { dplab_hard_instance_horizon(3, &mut horizon) }, DplabStatus::Ok);
        assert_eq!(horizon, 14);

        let mut max_divergence = f64::NAN;
        let mut delta_prime = f64::NAN;
        let mut pass = 0u8;
        let status = unsafe {
            dplab_jdp_audit(1.0, 0.05, 1, 12, &mut max_divergence, &mut delta_prime, &mut pass)
        };
        assert_eq!(status, DplabStatus::Ok);
        assert_eq!(delta_prime, 0.0125);
        // The sweep hits delta_prime up to accumulated rounding.
        assert!((max_divergence - 0.0125).abs() < 1e-12, "got {max_divergence}");
        assert_eq!(pass, 1);

        // Out-pointers are individually optional.
        let status =
            unsafe { dplab_jdp_audit(1.0, 0.05, 1, 12, ptr::null_mut(), ptr::null_mut(), &mut pass) };
        assert_eq!(status, DplabStatus::Ok);
        assert_eq!(pass, 1);

        let mut prob = f64::NAN;
        assert_eq!(
            unsafe { dplab_ladder_prob(std::f64::consts::LN_2, 0.05, 0, &mut prob) },
            DplabStatus::Ok
        );
        assert_eq!(prob, 0.0, "below the ladder the probability is 0");
        assert_eq!(
            unsafe { dplab_ladder_prob(std::f64::consts::LN_2, 0.05, 1, &mut prob) },
            DplabStatus::Ok
        );
        assert_eq!(prob, 0.05, "the first noisy rung sits at delta_prime");
        assert_eq!(
            unsafe { dplab_ladder_prob(std::f64::consts::LN_2, 0.05, 100, &mut prob) },
            DplabStatus::Ok
        );
        assert_eq!(prob, 1.0, "far above the ladder the probability is 1");
        println!("[PASS] one-shot analyses agree with the library");
    }

    #[test]
    fn free_functions_accept_null() {
        unsafe {
            dplab_counter_free(ptr::null_mut());
            dplab_monitor_free(ptr::null_mut());
            dplab_mirror_free(ptr::null_mut());
            dplab_predictor_free(ptr::null_mut());
        }
        println!("[PASS] free(NULL) is a no-op");
    }
}
