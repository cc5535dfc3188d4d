//! Online mechanisms for counting and threshold monitoring.
//!
//! Two interaction shapes share the update-stream input:
//!
//! * A **counter** answers every step with an estimate of the running count
//!   `n_t`.
//! * A **threshold monitor** for level `k` answers every step with ⊥ or ⊤
//!   and stops at its first ⊤. A run is *successful* when it answered ⊥ at
//!   every step with `n_t < k/2`, and had already answered ⊤ by the first
//!   step with `n_t >= k` (anything goes inside the free zone
//!   `k/2 <= n_t < k`).
//!
//! The monitors here bracket the problem: a Laplace-noised threshold test
//! and a subsampling monitor are differentially private; an exact monitor is
//! maximally useful but not private at all; and a generic reduction turns
//! any counter into a monitor. Deliberately simple test doubles with
//! closed-form halting behavior live in [`doubles`].

pub mod counter;
pub mod doubles;
pub mod monitor;
pub mod success;

pub use counter::{BinaryTreeCounter, ZeroCounter};
pub use doubles::{HaltAtFirstOne, NeverHalt};
pub use monitor::{
    sampling_transcript_distribution, CounterMonitor, ExactMonitor, SamplingMonitor, SvtMonitor,
};
pub use success::{evaluate_success, run_is_successful};

use crate::error::{param_err, state_err, Result};
use crate::params::{NoiseMode, PrivacyParams};
use crate::rng::RandomSource;
use crate::stream::UpdateStream;

// ---------------------------------------------------------------------------
// Interaction traits
// ---------------------------------------------------------------------------

/// A monitor's per-step answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// ⊥ — keep watching.
    Continue,
    /// ⊤ — the threshold has been reached; the monitor halts.
    Halt,
}

/// An online counter over a fixed horizon `T`.
pub trait Counter {
    /// Feed the next update bit, receive the estimate of `n_t`.
    fn step(&mut self, bit: u8) -> Result<f64>;
    /// Horizon `T`.
    fn horizon(&self) -> usize;
    /// Steps consumed so far.
    fn steps_taken(&self) -> usize;
}

/// An online threshold monitor over a fixed horizon `T`. Stepping after ⊤
/// or past the horizon is a state error: the protocol has no such moves.
pub trait Monitor {
    /// Feed the next update bit, receive ⊥ or ⊤.
    fn step(&mut self, bit: u8) -> Result<Verdict>;
    /// Horizon `T`.
    fn horizon(&self) -> usize;
    /// Steps consumed so far.
    fn steps_taken(&self) -> usize;
    /// Whether ⊤ has been emitted.
    fn halted(&self) -> bool;
}

/// Validate one update bit and the step budget; shared by every mechanism.
pub(crate) fn check_step(bit: u8, steps_taken: usize, horizon: usize, halted: bool) -> Result<()> {
    if bit > 1 {
        param_err!("update bit must be 0 or 1, got {bit}");
    }
    if halted {
        state_err!("monitor already emitted ⊤; no further steps are allowed");
    }
    if steps_taken >= horizon {
        state_err!("horizon {horizon} exhausted");
    }
    Ok(())
}

/// Drive `monitor` over `stream` until it halts or the stream ends. Returns
/// the 1-indexed halting step, or `None` when the monitor never said ⊤.
pub fn run_monitor(monitor: &mut dyn Monitor, stream: &UpdateStream) -> Result<Option<usize>> {
    if stream.len() != monitor.horizon() {
        param_err!(
            "stream length {} does not match monitor horizon {}",
            stream.len(),
            monitor.horizon()
        );
    }
    for t in 1..=stream.len() {
        if monitor.step(stream.bit(t))? == Verdict::Halt {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Drive `counter` over the whole stream and collect its estimates.
pub fn run_counter(counter: &mut dyn Counter, stream: &UpdateStream) -> Result<Vec<f64>> {
    if stream.len() != counter.horizon() {
        param_err!(
            "stream length {} does not match counter horizon {}",
            stream.len(),
            counter.horizon()
        );
    }
    (1..=stream.len()).map(|t| counter.step(stream.bit(t))).collect()
}

// ---------------------------------------------------------------------------
// Monitor configurations
// ---------------------------------------------------------------------------

/// A buildable monitor configuration: the closed set of monitors the
/// adversarial experiments and the CLI can name. `build` instantiates a
/// fresh monitor with its own randomness; the spec itself is immutable, so
/// one spec can seed any number of independent trials.
#[derive(Debug, Clone, PartialEq)]
pub enum MonitorSpec {
    /// Laplace-noised threshold test: per-step noise on the count, a noisy
    /// threshold drawn once. `(eps, 0)`-DP.
    Svt { t: usize, k: u64, eps: f64, mode: NoiseMode },
    /// Keep each 1-update with probability `delta`; halt once the retained
    /// count reaches `max(1, ceil(3k/4 * delta))`. `(0, delta)`-DP.
    Sampling { t: usize, k: u64, delta: f64 },
    /// Binary-tree counter thresholded at `3k/4`. `(eps, 0)`-DP.
    TreeCounterMonitor { t: usize, k: u64, eps: f64, mode: NoiseMode },
    /// The all-zero counter thresholded at `3k/4` (never halts for `k >= 1`).
    /// Perfectly private, perfectly useless.
    ZeroCounterMonitor { t: usize, k: u64 },
    /// Halts exactly when `n_t >= 3k/4`. Not private.
    Exact { t: usize, k: u64 },
    /// Test double: never halts.
    NeverHalt { t: usize },
    /// Test double: at the first 1-update, halts with probability `q`;
    /// otherwise never halts.
    HaltAtFirstOne { t: usize, q: f64 },
}

impl MonitorSpec {
    /// Horizon `T`.
    pub fn horizon(&self) -> usize {
        match *self {
            MonitorSpec::Svt { t, .. }
            | MonitorSpec::Sampling { t, .. }
            | MonitorSpec::TreeCounterMonitor { t, .. }
            | MonitorSpec::ZeroCounterMonitor { t, .. }
            | MonitorSpec::Exact { t, .. }
            | MonitorSpec::NeverHalt { t }
            | MonitorSpec::HaltAtFirstOne { t, .. } => t,
        }
    }

    /// Threshold level `k`, when the monitor has one.
    pub fn threshold(&self) -> Option<u64> {
        match *self {
            MonitorSpec::Svt { k, .. }
            | MonitorSpec::Sampling { k, .. }
            | MonitorSpec::TreeCounterMonitor { k, .. }
            | MonitorSpec::ZeroCounterMonitor { k, .. }
            | MonitorSpec::Exact { k, .. } => Some(k),
            MonitorSpec::NeverHalt { .. } | MonitorSpec::HaltAtFirstOne { .. } => None,
        }
    }

    /// The `(eps, delta)` budget this mechanism claims, or `None` for
    /// mechanisms that make no privacy claim.
    pub fn claimed_privacy(&self) -> Option<PrivacyParams> {
        match *self {
            MonitorSpec::Svt { eps, .. } => PrivacyParams::pure(eps).ok(),
            MonitorSpec::Sampling { delta, .. } => PrivacyParams::new(0.0, delta).ok(),
            MonitorSpec::TreeCounterMonitor { eps, .. } => PrivacyParams::pure(eps).ok(),
            // Constant-output mechanisms are (0,0)-DP.
            MonitorSpec::ZeroCounterMonitor { .. } | MonitorSpec::NeverHalt { .. } => {
                PrivacyParams::pure(0.0).ok()
            }
            MonitorSpec::Exact { .. } | MonitorSpec::HaltAtFirstOne { .. } => None,
        }
    }

    /// Instantiate a fresh monitor drawing its noise from `rng`.
    pub fn build(&self, rng: RandomSource) -> Result<Box<dyn Monitor + Send>> {
        match *self {
            MonitorSpec::Svt { t, k, eps, mode } => {
                Ok(Box::new(SvtMonitor::new(t, k, eps, mode, rng)?))
            }
            MonitorSpec::Sampling { t, k, delta } => {
                Ok(Box::new(SamplingMonitor::new(t, k, delta, rng)?))
            }
            MonitorSpec::TreeCounterMonitor { t, k, eps, mode } => {
                let counter = BinaryTreeCounter::new(t, eps, mode, rng)?;
                Ok(Box::new(CounterMonitor::new(Box::new(counter), k)?))
            }
            MonitorSpec::ZeroCounterMonitor { t, k } => {
                let counter = ZeroCounter::new(t)?;
                Ok(Box::new(CounterMonitor::new(Box::new(counter), k)?))
            }
            MonitorSpec::Exact { t, k } => Ok(Box::new(ExactMonitor::new(t, k)?)),
            MonitorSpec::NeverHalt { t } => Ok(Box::new(NeverHalt::new(t)?)),
            MonitorSpec::HaltAtFirstOne { t, q } => Ok(Box::new(HaltAtFirstOne::new(t, q, rng)?)),
        }
    }
}
