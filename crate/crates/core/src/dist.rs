//! Finite distributions and the hockey-stick divergence.
//!
//! Privacy claims are checked, not assumed. The working tool is the
//! hockey-stick divergence
//!
//! ```text
//! H_eps(P, Q) = Σ_x max(0, P(x) - e^eps Q(x))
//! ```
//!
//! over a finite outcome space: `P` and `Q` are `(eps, delta)`-
//! indistinguishable exactly when `H_eps(P,Q) <= delta` and
//! `H_eps(Q,P) <= delta`. At `eps = 0` the divergence collapses to total
//! variation distance. For transcript spaces that factor into independent
//! per-step Bernoulli outputs there is a specialized product form that
//! avoids materializing the full outcome space.

use crate::error::{param_err, Result};
use std::collections::BTreeMap;

/// Comparisons against `delta` allow this absolute slack so that pairs that
/// are indistinguishable in exact arithmetic are not rejected over a final
/// ulp of rounding (e.g. probabilities constructed as `x` and `1 - x`).
pub(crate) const FLOAT_GUARD: f64 = 1e-12;

/// Probabilities must be non-negative and sum to 1 within this tolerance.
const MASS_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// FiniteDistribution
// ---------------------------------------------------------------------------

/// A probability distribution over finitely many outcomes, keyed by `u64`
/// outcome ids. Keys are kept sorted so iteration (and therefore every
/// reported number) is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    probs: BTreeMap<u64, f64>,
}

impl FiniteDistribution {
    /// Build from `(outcome, probability)` pairs. Repeated outcomes, negative
    /// probabilities and total mass away from 1 are parameter errors.
    pub fn new(entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut probs = BTreeMap::new();
        let mut mass = 0.0;
        for (x, p) in entries {
            if !(p >= 0.0) || !p.is_finite() {
                param_err!("probability of outcome {x} is {p}, want >= 0");
            }
            if probs.insert(x, p).is_some() {
                param_err!("outcome {x} listed twice");
            }
            mass += p;
        }
        if probs.is_empty() {
            param_err!("distribution needs at least one outcome");
        }
        if (mass - 1.0).abs() > MASS_TOL {
            param_err!("total mass {mass} differs from 1 by more than {MASS_TOL}");
        }
        Ok(FiniteDistribution { probs })
    }

    /// Bernoulli(`p`) over outcomes {0, 1}.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            param_err!("bernoulli parameter must lie in [0,1], got {p}");
        }
        FiniteDistribution::new([(0, 1.0 - p), (1, p)])
    }

    /// Probability of outcome `x` (0 when `x` is not in the support set).
    pub fn prob(&self, x: u64) -> f64 {
        self.probs.get(&x).copied().unwrap_or(0.0)
    }

    /// Outcomes in increasing order.
    pub fn outcomes(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&x, &p)| (x, p))
    }

    /// Number of listed outcomes.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Never true — construction rejects empty supports.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The joint distribution of independent Bernoulli coordinates, encoding
    /// an outcome vector `(b_1, …, b_n)` as the bit mask `Σ b_i 2^(i-1)`.
    /// Limited to 20 coordinates to keep the table at ~1M entries.
    pub fn product_bernoulli(ps: &[f64]) -> Result<Self> {
        if ps.is_empty() || ps.len() > 20 {
            param_err!("product of {} coordinates, want 1..=20", ps.len());
        }
        for &p in ps {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                param_err!("coordinate probability {p} outside [0,1]");
            }
        }
        // Build up one coordinate at a time; masses multiply.
        let mut table = vec![1.0f64];
        for (i, &p) in ps.iter().enumerate() {
            let mut next = vec![0.0; 1 << (i + 1)];
            for (mask, &m) in table.iter().enumerate() {
                next[mask] = m * (1.0 - p);
                next[mask | (1 << i)] = m * p;
            }
            table = next;
        }
        FiniteDistribution::new(table.into_iter().enumerate().map(|(x, p)| (x as u64, p)))
    }

    fn same_outcome_space(&self, other: &Self) -> bool {
        self.probs.len() == other.probs.len()
            && self.probs.keys().zip(other.probs.keys()).all(|(a, b)| a == b)
    }
}

// ---------------------------------------------------------------------------
// Divergences
// ---------------------------------------------------------------------------

/// The hockey-stick divergence `H_eps(P, Q)`. The outcome spaces must match
/// exactly (zero-probability outcomes are fine, absent ones are not):
/// comparing distributions over different spaces is almost always a bug in
/// the caller.
pub fn hockey_stick_divergence(
    p: &FiniteDistribution,
    q: &FiniteDistribution,
    eps: f64,
) -> Result<f64> {
    if !eps.is_finite() {
        param_err!("eps must be finite, got {eps}");
    }
    if !p.same_outcome_space(q) {
        param_err!("mismatched outcome spaces ({} vs {} outcomes)", p.len(), q.len());
    }
    let e = eps.exp();
    let mut div = 0.0;
    for ((_, pp), (_, qq)) in p.outcomes().zip(q.outcomes()) {
        let gap = pp - e * qq;
        if gap > 0.0 {
            div += gap;
        }
    }
    Ok(div.max(0.0))
}

/// Are `P` and `Q` `(eps, delta)`-indistinguishable? Checks the hockey-stick
/// divergence in both directions against `delta` (plus the float guard).
pub fn check_indistinguishable(
    p: &FiniteDistribution,
    q: &FiniteDistribution,
    eps: f64,
    delta: f64,
) -> Result<bool> {
    if !(delta >= 0.0) {
        param_err!("delta must be non-negative, got {delta}");
    }
    let fwd = hockey_stick_divergence(p, q, eps)?;
    let bwd = hockey_stick_divergence(q, p, eps)?;
    Ok(fwd <= delta + FLOAT_GUARD && bwd <= delta + FLOAT_GUARD)
}

/// Hockey-stick divergence between two product-Bernoulli distributions with
/// per-coordinate success probabilities `ps` and `qs`.
///
/// Coordinates with `ps[i] == qs[i]` factor out of the divergence exactly
/// (their common marginal sums to 1 against the positive part), so only the
/// differing coordinates are enumerated. The audit paths rely on this: the
/// transcript space is huge, but neighbor runs disagree in few coordinates.
pub fn product_hockey_stick(ps: &[f64], qs: &[f64], eps: f64) -> Result<f64> {
    if ps.len() != qs.len() {
        param_err!("coordinate count mismatch: {} vs {}", ps.len(), qs.len());
    }
    if !eps.is_finite() {
        param_err!("eps must be finite, got {eps}");
    }
    for &p in ps.iter().chain(qs.iter()) {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            param_err!("coordinate probability {p} outside [0,1]");
        }
    }
    let diff: Vec<(f64, f64)> = ps
        .iter()
        .zip(qs.iter())
        .filter(|(a, b)| a != b)
        .map(|(&a, &b)| (a, b))
        .collect();
    let d = diff.len();
    if d == 0 {
        return Ok(0.0);
    }
    if d > 26 {
        param_err!("{d} differing coordinates; enumeration capped at 26");
    }
    let e = eps.exp();
    let mut div = 0.0;
    for mask in 0u64..(1 << d) {
        let mut pm = 1.0;
        let mut qm = 1.0;
        for (i, &(a, b)) in diff.iter().enumerate() {
            if mask >> i & 1 == 1 {
                pm *= a;
                qm *= b;
            } else {
                pm *= 1.0 - a;
                qm *= 1.0 - b;
            }
        }
        let gap = pm - e * qm;
        if gap > 0.0 {
            div += gap;
        }
    }
    Ok(div.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hockey_stick_at_zero_eps_is_total_variation() {
        // H_0(Bern(0.1), Bern(0.2)) = max(0, 0.1-0.2) + max(0, 0.9-0.8) = 0.1.
        let p = FiniteDistribution::bernoulli(0.1).unwrap();
        let q = FiniteDistribution::bernoulli(0.2).unwrap();
        let d = hockey_stick_divergence(&p, &q, 0.0).unwrap();
        assert!((d - 0.1).abs() < 1e-15);
        println!("[PASS] H_0(Bern(0.1), Bern(0.2)) = 0.1 (total variation)");
    }

    #[test]
    fn hockey_stick_vanishes_when_ratio_is_covered() {
        // Bern(0.2) vs Bern(0.1) at eps = ln 2: 0.2 <= 2*0.1 and 0.8 <= 2*0.9,
        // so no outcome contributes.
        let p = FiniteDistribution::bernoulli(0.2).unwrap();
        let q = FiniteDistribution::bernoulli(0.1).unwrap();
        let d = hockey_stick_divergence(&p, &q, 2f64.ln()).unwrap();
        assert_eq!(d, 0.0);
        println!("[PASS] H_ln2(Bern(0.2), Bern(0.1)) = 0");
    }

    #[test]
    fn indistinguishability_examples() {
        // Bern(delta) vs Bern(0) is (0, delta)-indistinguishable.
        let delta = 0.05;
        let p = FiniteDistribution::bernoulli(delta).unwrap();
        let q = FiniteDistribution::bernoulli(0.0).unwrap();
        assert!(check_indistinguishable(&p, &q, 0.0, delta).unwrap());
        // Bern(0.1) vs Bern(0.9) is far from (0.1, 0)-indistinguishable.
        let p = FiniteDistribution::bernoulli(0.1).unwrap();
        let q = FiniteDistribution::bernoulli(0.9).unwrap();
        assert!(!check_indistinguishable(&p, &q, 0.1, 0.0).unwrap());
        println!("[PASS] indistinguishability verdicts match hand checks");
    }

    #[test]
    fn divergence_monotone_in_eps_and_zero_for_identical() {
        let p = FiniteDistribution::new([(0, 0.5), (1, 0.3), (2, 0.2)]).unwrap();
        let q = FiniteDistribution::new([(0, 0.2), (1, 0.5), (2, 0.3)]).unwrap();
        let mut last = f64::INFINITY;
        for eps in [0.0, 0.1, 0.5, 1.0, 3.0] {
            let d = hockey_stick_divergence(&p, &q, eps).unwrap();
            assert!(d <= last + 1e-15);
            last = d;
        }
        assert_eq!(hockey_stick_divergence(&p, &p, 0.0).unwrap(), 0.0);
        println!("[PASS] divergence is monotone in eps and zero on identical inputs");
    }

    #[test]
    fn mismatched_outcome_spaces_are_rejected() {
        let p = FiniteDistribution::bernoulli(0.5).unwrap();
        let q = FiniteDistribution::new([(0, 0.5), (1, 0.25), (2, 0.25)]).unwrap();
        assert!(hockey_stick_divergence(&p, &q, 0.0).is_err());
        println!("[PASS] mismatched outcome spaces are a parameter error");
    }

    #[test]
    fn product_form_agrees_with_explicit_enumeration() {
        let ps = [0.1, 0.5, 0.5, 0.9, 0.33];
        let qs = [0.1, 0.4, 0.5, 0.95, 0.31];
        let big_p = FiniteDistribution::product_bernoulli(&ps).unwrap();
        let big_q = FiniteDistribution::product_bernoulli(&qs).unwrap();
        for eps in [0.0, 0.05, 0.3, 1.0] {
            let full = hockey_stick_divergence(&big_p, &big_q, eps).unwrap();
            let fast = product_hockey_stick(&ps, &qs, eps).unwrap();
            assert!(
                (full - fast).abs() < 1e-12,
                "eps={eps}: full {full} vs product {fast}"
            );
        }
        println!("[PASS] product hockey-stick matches full enumeration");
    }

    #[test]
    fn product_of_identical_vectors_is_zero() {
        let ps = [0.2, 0.7, 0.001];
        assert_eq!(product_hockey_stick(&ps, &ps, 0.0).unwrap(), 0.0);
        println!("[PASS] identical product distributions have zero divergence");
    }

    #[test]
    fn malformed_distributions_are_rejected() {
        assert!(FiniteDistribution::new([(0, 0.5), (1, 0.6)]).is_err());
        assert!(FiniteDistribution::new([(0, -0.1), (1, 1.1)]).is_err());
        assert!(FiniteDistribution::new([(0, 0.5), (0, 0.5)]).is_err());
        assert!(FiniteDistribution::new(std::iter::empty::<(u64, f64)>()).is_err());
        assert!(FiniteDistribution::bernoulli(1.5).is_err());
        println!("[PASS] malformed distributions are rejected");
    }
}
