//! Accounting checks and the end-to-end attack report.
//!
//! Two facts connect the interval-halving construction to an impossibility
//! statement, and both are checkable at desk scale:
//!
//! 1. **Bookkeeping**: `c_total` equals the chance that a fresh run on the
//!    final stream halts before step `ℓ` ([`claim1_check`] estimates the
//!    right-hand side and compares).
//! 2. **Privacy contraction**: if the monitor is `(eps, delta)`-DP with
//!    `e^eps < 2`, then `c_total <= e^eps (beta_0 + 2 k delta) / (1 - e^eps/2)`
//!    where `beta_0` is its failure probability on the all-zero stream
//!    ([`theorem_bound`] evaluates the right-hand side).
//!
//! A monitor that is correct (halts before `ℓ` whenever the threshold is
//! genuinely crossed before `ℓ`) must push `c_total` toward `1 - beta`, so a
//! small bound forces large failure probability on one of the two streams —
//! the content of [`attack_report`]'s `min_success` field.

use crate::adversary::halt::{estimate_halt_distribution, MonteCarloHaltOracle};
use crate::adversary::hard::{build_hard_instance, hard_instance_horizon, HardInstance};
use crate::error::{param_err, Result};
use crate::mechanisms::{evaluate_success, MonitorSpec};
use crate::params::PrivacyParams;
use crate::rng::RandomSource;
use crate::stream::UpdateStream;

/// Two-sided 99%-confidence Hoeffding radius for a single estimated
/// frequency over `trials` runs.
pub fn frequency_radius(trials: u64) -> f64 {
    ((200.0f64).ln() / (2.0 * trials as f64)).sqrt()
}

/// Outcome of checking the bookkeeping identity on one hard instance.
#[derive(Debug, Clone)]
pub struct Claim1Report {
    pub k: u32,
    pub t: usize,
    pub trials: u64,
    /// `c_total` as accumulated by the construction.
    pub c_total: f64,
    /// Statistical slack carried by `c_total` (0 for exact oracles).
    pub c_tolerance: f64,
    /// Fresh estimate of Pr[run on the final stream halts before step `ℓ`].
    pub p_hat: f64,
    /// Hoeffding radius of `p_hat`.
    pub p_radius: f64,
    pub pass: bool,
}

/// Re-estimate the halting-before-`ℓ` probability of `spec` on the hard
/// stream over `trials` fresh runs and compare against the accumulated
/// `c_total`. Passes iff the gap is explained by the two statistical slacks.
pub fn claim1_check(
    spec: &MonitorSpec,
    hard: &HardInstance,
    trials: u64,
    rng: &RandomSource,
) -> Result<Claim1Report> {
    if spec.horizon() != hard.t {
        param_err!(
            "monitor horizon {} does not match hard-instance horizon {}",
            spec.horizon(),
            hard.t
        );
    }
    let dist = estimate_halt_distribution(spec, &hard.stream, trials, rng)?;
    let p_hat = dist.prob_before(hard.ell);
    let p_radius = frequency_radius(trials);
    let pass = (p_hat - hard.c_total).abs() <= hard.c_tolerance + p_radius;
    Ok(Claim1Report {
        k: hard.k,
        t: hard.t,
        trials,
        c_total: hard.c_total,
        c_tolerance: hard.c_tolerance,
        p_hat,
        p_radius,
        pass,
    })
}

/// The privacy-contraction upper bound on `c_total`:
/// `e^eps (beta0 + 2 k delta) / (1 - e^eps / 2)`.
///
/// Only meaningful for `e^eps < 2`; beyond that the contraction argument
/// gives nothing and the parameters are rejected.
pub fn theorem_bound(eps: f64, delta: f64, k: u32, beta0: f64) -> Result<f64> {
    if !(eps >= 0.0) || eps.exp() >= 2.0 {
        param_err!("bound requires 0 <= eps < ln 2, got {eps}");
    }
    if !(0.0..1.0).contains(&delta) {
        param_err!("delta must lie in [0, 1), got {delta}");
    }
    if !(0.0..=1.0).contains(&beta0) {
        param_err!("beta0 must lie in [0, 1], got {beta0}");
    }
    if k == 0 {
        param_err!("threshold k must be positive");
    }
    let e = eps.exp();
    Ok(e * (beta0 + 2.0 * k as f64 * delta) / (1.0 - 0.5 * e))
}

/// Everything the attack measures about one monitor family.
#[derive(Debug, Clone)]
pub struct AttackReport {
    pub k: u32,
    pub t: usize,
    pub trials: u64,
    /// Privacy the monitor family claims for itself, if any.
    pub claimed: Option<PrivacyParams>,
    /// Estimated failure probability on the all-zero stream.
    pub beta0_hat: f64,
    pub success_d0: f64,
    pub success_dk: f64,
    pub min_success: f64,
    pub c_total: f64,
    pub c_tolerance: f64,
    pub p_hat: f64,
    pub p_radius: f64,
    pub claim1_pass: bool,
    /// The contraction bound evaluated at `beta0_hat`, when the claimed
    /// parameters admit it (`e^eps < 2`).
    pub bound: Option<f64>,
    /// `Some(true)` iff `c_total` exceeds the bound by more than every
    /// statistical slack — evidence the privacy claim is false. `None` when
    /// no bound applies.
    pub violation: Option<bool>,
    /// The adversarial stream, for replay.
    pub hard_stream: UpdateStream,
    pub ell: usize,
}

/// Run the full attack against `spec` at threshold `k`: measure baseline
/// success on the all-zero stream, build the hard instance through a
/// Monte-Carlo halting oracle at `trials` runs per call, re-check the
/// bookkeeping identity, measure success on the hard stream, and evaluate
/// the contraction bound if the family claims usable privacy parameters.
pub fn attack_report(
    spec: &MonitorSpec,
    k: u32,
    trials: u64,
    rng: &RandomSource,
) -> Result<AttackReport> {
    let t = hard_instance_horizon(k)?;
    if spec.horizon() != t {
        param_err!(
            "monitor horizon {} does not match T = 2^(k+1) - 2 = {t}",
            spec.horizon()
        );
    }

    let zeros = UpdateStream::zeros(t)?;
    let success_d0 = evaluate_success(spec, &zeros, trials, &rng.derive(1))?;
    let beta0_hat = 1.0 - success_d0;

    let oracle = MonteCarloHaltOracle::new(spec.clone(), trials, rng.derive(2))?;
    let hard = build_hard_instance(&oracle, k)?;
    let claim1 = claim1_check(spec, &hard, trials, &rng.derive(3))?;
    let success_dk = evaluate_success(spec, &hard.stream, trials, &rng.derive(4))?;

    let claimed = spec.claimed_privacy();
    let beta_radius = frequency_radius(trials);
    let (bound, violation) = match claimed {
        Some(p) if p.eps.exp() < 2.0 => {
            let bound = theorem_bound(p.eps, p.delta, k, beta0_hat)?;
            // Flag only when no honest statistical fluctuation can explain
            // the excess: inflate beta0 by its radius and deflate c_total by
            // its accumulated tolerance.
            let safe_bound = theorem_bound(p.eps, p.delta, k, (beta0_hat + beta_radius).min(1.0))?;
            let violation = hard.c_total - hard.c_tolerance > safe_bound;
            (Some(bound), Some(violation))
        }
        _ => (None, None),
    };

    Ok(AttackReport {
        k,
        t,
        trials,
        claimed,
        beta0_hat,
        success_d0,
        success_dk,
        min_success: success_d0.min(success_dk),
        c_total: hard.c_total,
        c_tolerance: hard.c_tolerance,
        p_hat: claim1.p_hat,
        p_radius: claim1.p_radius,
        claim1_pass: claim1.pass,
        bound,
        violation,
        hard_stream: hard.stream,
        ell: hard.ell,
    })
}
