//! The π probability ladder: a staircase of Bernoulli success probabilities
//! climbing from δ' to 1 − δ' in which every consecutive pair is purely
//! ε'-indistinguishable.
//!
//! Construction: geometric ascent `probs(i) = δ' e^{(i-1) ε'}` capped at
//! `cap = 1 / (1 + e^{ε'})`, followed by the mirror-image descent
//! `probs(2L + 1 - i) = 1 - probs(i)`. The cap is exactly the largest
//! success probability `p` for which the *complement* ratio
//! `(1 - p) <= e^{ε'} (1 - e^{ε'} p)` still holds, so the ascent stays
//! ε'-indistinguishable on both outcomes; the junction pair
//! `(cap, 1 - cap)` satisfies `1 - cap = e^{ε'} cap` with equality, and the
//! descent inherits everything by symmetry. Rung 0 is hard 0 and rungs
//! beyond 2L are hard 1, so a walker entering from below must spend the
//! whole staircase — 2L = O((1/ε') log(1/δ')) steps — in the noisy zone.

use crate::dist::{check_indistinguishable, FiniteDistribution, FLOAT_GUARD};
use crate::error::{param_err, Result};

/// Largest ladder half-length this module will materialize (~40 MB of
/// rungs). Parameters that would exceed it are rejected rather than
/// silently approximated.
pub const MAX_HALF_LENGTH: usize = 5_000_000;

/// The ladder: half-length `L`, rungs `probs(0..=2L)` stored densely, and
/// `probs(i) = 1` for every `i > 2L`.
#[derive(Debug, Clone)]
pub struct PiLadder {
    eps_prime: f64,
    delta_prime: f64,
    cap: f64,
    /// `rungs[i] = probs(i)` for `0 <= i <= 2L`.
    rungs: Vec<f64>,
}

impl PiLadder {
    /// Success probability at rung `i` (any non-negative index).
    pub fn probs(&self, i: u64) -> f64 {
        match usize::try_from(i) {
            Ok(i) if i < self.rungs.len() => self.rungs[i],
            _ => 1.0,
        }
    }

    /// Half-length `L`; the noisy rungs are `1..=2L`.
    pub fn half_length(&self) -> usize {
        (self.rungs.len() - 1) / 2
    }

    /// `2L`, the number of noisy rungs.
    pub fn two_l(&self) -> usize {
        self.rungs.len() - 1
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn delta_prime(&self) -> f64 {
        self.delta_prime
    }

    /// `1 / (1 + e^{ε'})`, the largest probability the ascent may reach.
    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Wrap raw rungs without any validation — exists so that
    /// [`verify_pi_ladder`] can be exercised against corrupted ladders.
    pub fn from_raw_rungs(eps_prime: f64, delta_prime: f64, rungs: Vec<f64>) -> Self {
        let cap = 1.0 / (1.0 + eps_prime.exp());
        PiLadder { eps_prime, delta_prime, cap, rungs }
    }
}

/// Build the ladder for `(eps_prime, delta_prime)`.
///
/// Requires `delta_prime < cap = 1/(1 + e^{eps_prime})`; otherwise the
/// first rung could not equal `delta_prime`, which downstream accounting
/// depends on.
pub fn build_pi_ladder(eps_prime: f64, delta_prime: f64) -> Result<PiLadder> {
    if !(eps_prime > 0.0) || !eps_prime.is_finite() {
        param_err!("eps_prime must be positive and finite, got {eps_prime}");
    }
    if !(delta_prime > 0.0 && delta_prime < 0.1) {
        param_err!("delta_prime must lie in (0, 0.1), got {delta_prime}");
    }
    let cap = 1.0 / (1.0 + eps_prime.exp());
    if delta_prime >= cap {
        param_err!(
            "delta_prime {delta_prime} must be below the ladder cap {cap} \
             (eps_prime {eps_prime} is too large for this delta_prime)"
        );
    }
    if (cap / delta_prime).ln() / eps_prime > MAX_HALF_LENGTH as f64 {
        param_err!(
            "ladder for eps_prime {eps_prime}, delta_prime {delta_prime} would \
             exceed {MAX_HALF_LENGTH} rungs"
        );
    }

    // Ascent: delta' * e^{(i-1) eps'} for i = 1..=L, where L is minimal
    // with the uncapped value reaching cap.
    let mut ascent = vec![delta_prime];
    while *ascent.last().expect("non-empty") < cap {
        let next = ascent.last().expect("non-empty") * eps_prime.exp();
        ascent.push(next.min(cap));
    }
    let l = ascent.len();

    // rungs[0] = 0, rungs[1..=L] = ascent, rungs[L+1..=2L] = mirrored.
    let mut rungs = Vec::with_capacity(2 * l + 1);
    rungs.push(0.0);
    rungs.extend_from_slice(&ascent);
    for i in (1..=l).rev() {
        rungs.push(1.0 - ascent[i - 1]);
    }
    Ok(PiLadder { eps_prime, delta_prime, cap, rungs })
}

/// Check every ladder invariant, with the rung indistinguishability
/// evaluated exactly via the hockey-stick divergence at `(eps_prime, 0)`.
pub fn verify_pi_ladder(ladder: &PiLadder) -> bool {
    let two_l = ladder.two_l();
    let l = ladder.half_length();
    let d = ladder.delta_prime;

    // Structure: odd rung count (0 plus 2L), exact endpoints and extremes.
    if two_l == 0 || !two_l.is_multiple_of(2) {
        return false;
    }
    if ladder.probs(0) != 0.0 || ladder.probs(1) != d {
        return false;
    }
    if ladder.probs(two_l as u64) != 1.0 - d || ladder.probs(two_l as u64 + 1) != 1.0 {
        return false;
    }

    // Mirror symmetry and range: probs in {0} ∪ [δ', 1-δ'] ∪ {1}, monotone.
    for i in 1..=l {
        let lo = ladder.probs(i as u64);
        let hi = ladder.probs((two_l + 1 - i) as u64);
        if (hi - (1.0 - lo)).abs() > FLOAT_GUARD {
            return false;
        }
    }
    for i in 1..=two_l {
        let p = ladder.probs(i as u64);
        if !(d - FLOAT_GUARD..=1.0 - d + FLOAT_GUARD).contains(&p) {
            return false;
        }
        if p < ladder.probs(i as u64 - 1) {
            return false;
        }
    }

    // Consecutive noisy rungs are (eps', 0)-indistinguishable, exactly.
    for i in 1..two_l {
        let p = match FiniteDistribution::bernoulli(ladder.probs(i as u64)) {
            Ok(p) => p,
            Err(_) => return false,
        };
        let q = match FiniteDistribution::bernoulli(ladder.probs(i as u64 + 1)) {
            Ok(q) => q,
            Err(_) => return false,
        };
        match check_indistinguishable(&p, &q, ladder.eps_prime, 0.0) {
            Ok(true) => {}
            _ => return false,
        }
    }
    true
}
