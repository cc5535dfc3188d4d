//! Halting-time distributions and the oracles that produce them.
//!
//! The adversarial construction consumes a monitor only through one
//! interface: "given a stream, what is the distribution of your first ⊤?"
//! [`HaltDistribution`] carries that answer together with a per-entry
//! confidence radius — zero for closed-form backends, a Hoeffding width for
//! Monte-Carlo estimation — so downstream accounting can propagate honest
//! error bars instead of pretending estimates are exact.

use crate::dist::FiniteDistribution;
use crate::error::{param_err, Result};
use crate::mechanisms::doubles::{HaltAtFirstOne, NeverHalt};
use crate::mechanisms::monitor::sampling_transcript_distribution;
use crate::mechanisms::{run_monitor, MonitorSpec};
use crate::rng::{mix2, RandomSource};
use crate::stream::UpdateStream;
use rayon::prelude::*;

/// Distribution of a monitor's halting step on one fixed stream.
#[derive(Debug, Clone)]
pub struct HaltDistribution {
    /// `probs[t-1]` = Pr[first ⊤ at step `t`], `t = 1..=T`.
    probs: Vec<f64>,
    /// Pr[no ⊤ within the horizon].
    never: f64,
    /// Half-width of the confidence interval around each entry (0 = exact).
    radius: f64,
}

impl HaltDistribution {
    /// Wrap per-step probabilities and the never-halt mass. Total mass must
    /// be 1 within 1e-6 (Monte-Carlo counts are exact fractions, so only
    /// float accumulation error shows up here).
    pub fn new(probs: Vec<f64>, never: f64, radius: f64) -> Result<Self> {
        if probs.is_empty() {
            param_err!("halting distribution needs a positive horizon");
        }
        if !(radius >= 0.0) {
            param_err!("radius must be non-negative, got {radius}");
        }
        let mass: f64 = probs.iter().sum::<f64>() + never;
        if probs.iter().chain([&never]).any(|&p| !(0.0..=1.0 + 1e-9).contains(&p)) {
            param_err!("halting probabilities must lie in [0,1]");
        }
        if (mass - 1.0).abs() > 1e-6 {
            param_err!("halting masses sum to {mass}, want 1");
        }
        Ok(HaltDistribution { probs, never, radius })
    }

    /// Reinterpret a transcript distribution (outcome 0 = never halts,
    /// outcome `t` = first ⊤ at `t`) over horizon `t_len` as exact.
    pub fn from_transcript(d: &FiniteDistribution, t_len: usize) -> Result<Self> {
        let probs = (1..=t_len as u64).map(|t| d.prob(t)).collect();
        HaltDistribution::new(probs, d.prob(0), 0.0)
    }

    /// Horizon `T`.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Never true — the constructor requires a positive horizon.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Pr[first ⊤ at step `t`] (1-indexed).
    pub fn prob(&self, t: usize) -> f64 {
        self.probs[t - 1]
    }

    /// Pr[no ⊤ within the horizon].
    pub fn never(&self) -> f64 {
        self.never
    }

    /// Per-entry confidence radius.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `Σ_{t in [lo, hi]} Pr[halt at t]`; empty when `lo > hi`.
    pub fn interval_sum(&self, lo: usize, hi: usize) -> f64 {
        if lo > hi {
            return 0.0;
        }
        self.probs[lo - 1..=hi - 1].iter().sum()
    }

    /// Pr[halt strictly before step `t`] = `Σ_{j < t} Pr[halt at j]`.
    pub fn prob_before(&self, t: usize) -> f64 {
        self.probs[..(t - 1).min(self.probs.len())].iter().sum()
    }
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Anything that can report a monitor's halting distribution per stream.
pub trait HaltOracle: Sync {
    fn halt_distribution(&self, stream: &UpdateStream) -> Result<HaltDistribution>;
    fn horizon(&self) -> usize;
}

/// Confidence radius used for Monte-Carlo halting estimates: a Hoeffding
/// half-width that survives a union bound over all `T` step probabilities
/// plus the never-halt mass (two-sided, overall confidence 99%).
pub fn monte_carlo_radius(t: usize, trials: u64) -> f64 {
    ((2.0 * t as f64 / 0.01).ln() / (2.0 * trials as f64)).sqrt()
}

/// Estimate the halting distribution of `spec` on `stream` from `trials`
/// fresh runs. Trial `i` uses the substream `rng.derive(i)`; the caller is
/// expected to hand an `rng` already salted per stream (see
/// [`MonteCarloHaltOracle`]), so repeated estimation of the same stream is
/// reproducible and different streams decorrelate.
pub fn estimate_halt_distribution(
    spec: &MonitorSpec,
    stream: &UpdateStream,
    trials: u64,
    rng: &RandomSource,
) -> Result<HaltDistribution> {
    if trials == 0 {
        param_err!("need at least one trial");
    }
    if stream.len() != spec.horizon() {
        param_err!(
            "stream length {} does not match monitor horizon {}",
            stream.len(),
            spec.horizon()
        );
    }
    let t_len = stream.len();
    let counts = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Vec<u64>> {
            let mut monitor = spec.build(rng.derive(i))?;
            let mut counts = vec![0u64; t_len + 1];
            match run_monitor(monitor.as_mut(), stream)? {
                Some(t) => counts[t] += 1,
                None => counts[0] += 1,
            }
            Ok(counts)
        })
        .try_reduce(
            || vec![0u64; t_len + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    let n = trials as f64;
    let probs = (1..=t_len).map(|t| counts[t] as f64 / n).collect();
    HaltDistribution::new(probs, counts[0] as f64 / n, monte_carlo_radius(t_len, trials))
}

/// Monte-Carlo oracle: estimates by running the monitor `trials` times per
/// query. Each query salts the master source with the stream digest, so the
/// oracle is a pure, replayable function of the stream.
pub struct MonteCarloHaltOracle {
    spec: MonitorSpec,
    trials: u64,
    rng: RandomSource,
}

impl MonteCarloHaltOracle {
    pub fn new(spec: MonitorSpec, trials: u64, rng: RandomSource) -> Result<Self> {
        if trials == 0 {
            param_err!("need at least one trial");
        }
        Ok(MonteCarloHaltOracle { spec, trials, rng })
    }
}

impl HaltOracle for MonteCarloHaltOracle {
    fn halt_distribution(&self, stream: &UpdateStream) -> Result<HaltDistribution> {
        let per_stream = self.rng.derive(mix2(0x0a11, stream.digest()));
        estimate_halt_distribution(&self.spec, stream, self.trials, &per_stream)
    }

    fn horizon(&self) -> usize {
        self.spec.horizon()
    }
}

/// Closed-form oracle for the monitors whose halting distribution has an
/// exact expression. Used to validate the whole adversarial pipeline with
/// zero statistical slack.
pub struct ExactHaltOracle {
    spec: MonitorSpec,
}

impl ExactHaltOracle {
    /// Wrap `spec` if its halting distribution is available in closed form.
    pub fn for_spec(spec: &MonitorSpec) -> Option<Self> {
        match spec {
            MonitorSpec::NeverHalt { .. }
            | MonitorSpec::HaltAtFirstOne { .. }
            | MonitorSpec::Sampling { .. }
            | MonitorSpec::Exact { .. }
            | MonitorSpec::ZeroCounterMonitor { .. } => {
                Some(ExactHaltOracle { spec: spec.clone() })
            }
            MonitorSpec::Svt { .. } | MonitorSpec::TreeCounterMonitor { .. } => None,
        }
    }
}

impl HaltOracle for ExactHaltOracle {
    fn halt_distribution(&self, stream: &UpdateStream) -> Result<HaltDistribution> {
        let t_len = stream.len();
        if t_len != self.spec.horizon() {
            param_err!(
                "stream length {} does not match monitor horizon {}",
                t_len,
                self.spec.horizon()
            );
        }
        match self.spec {
            MonitorSpec::NeverHalt { .. } | MonitorSpec::ZeroCounterMonitor { .. } => {
                let d = NeverHalt::transcript_distribution(t_len)?;
                HaltDistribution::from_transcript(&d, t_len)
            }
            MonitorSpec::HaltAtFirstOne { q, .. } => {
                let d = HaltAtFirstOne::transcript_distribution(stream, q)?;
                HaltDistribution::from_transcript(&d, t_len)
            }
            MonitorSpec::Sampling { k, delta, .. } => {
                let d = sampling_transcript_distribution(stream, k, delta)?;
                HaltDistribution::from_transcript(&d, t_len)
            }
            MonitorSpec::Exact { k, .. } => {
                let counts = stream.prefix_counts();
                let cut = 0.75 * k as f64;
                let halt_at = (1..=t_len).find(|&t| counts[t - 1] as f64 >= cut);
                let probs = (1..=t_len)
                    .map(|t| if halt_at == Some(t) { 1.0 } else { 0.0 })
                    .collect();
                HaltDistribution::new(probs, if halt_at.is_none() { 1.0 } else { 0.0 }, 0.0)
            }
            _ => param_err!("no closed form for this monitor"),
        }
    }

    fn horizon(&self) -> usize {
        self.spec.horizon()
    }
}
