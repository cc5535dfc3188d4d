//! Stability-based sparse histogram: privately release the heaviest element
//! of a multiset, or admit that nothing stands out.
//!
//! Only elements actually present in the multiset receive noise — absent
//! elements are never materialized — which is what makes the histogram
//! "sparse" and forces the release threshold: an element must clear
//! `tau = (2/eps)·ln(2/delta) + 1` after `Laplace(2/eps)` noise, so an
//! element that appears once (the most a single add/remove can create)
//! survives with probability at most `delta`.

use crate::error::{param_err, Result};
use crate::params::NoiseMode;
use crate::rng::{laplace_sample, RandomSource};
use std::collections::BTreeMap;

/// Release threshold for the `(eps, delta)` histogram.
pub fn histogram_threshold(eps: f64, delta: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        param_err!("eps must be positive and finite, got {eps}");
    }
    if !(delta > 0.0 && delta < 1.0) {
        param_err!("delta must lie in (0,1), got {delta}");
    }
    Ok((2.0 / eps) * (2.0 / delta).ln() + 1.0)
}

/// Release rule at an explicit noise scale and threshold. Returns the
/// noisy-count arg-max if it clears `tau`, else `None` (the ⋆ answer).
/// Ties break toward the smallest element so replays are deterministic.
pub fn sparse_histogram_at(
    points: &[u64],
    noise_scale: f64,
    tau: f64,
    mode: NoiseMode,
    rng: &mut RandomSource,
) -> Result<Option<u64>> {
    if !(noise_scale > 0.0) || !noise_scale.is_finite() {
        param_err!("noise scale must be positive and finite, got {noise_scale}");
    }
    if !tau.is_finite() {
        param_err!("threshold must be finite, got {tau}");
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &x in points {
        *counts.entry(x).or_insert(0) += 1;
    }
    let mut best: Option<(u64, f64)> = None;
    for (&x, &c) in &counts {
        let noise = match mode {
            NoiseMode::Seeded => laplace_sample(noise_scale, rng)?,
            NoiseMode::Zero => 0.0,
        };
        let noisy = c as f64 + noise;
        if best.is_none_or(|(_, b)| noisy > b) {
            best = Some((x, noisy));
        }
    }
    Ok(best.filter(|&(_, noisy)| noisy >= tau).map(|(x, _)| x))
}

/// The `(eps, delta)`-private release: `Laplace(2/eps)` noise per present
/// element, threshold [`histogram_threshold`].
pub fn sparse_histogram(
    points: &[u64],
    eps: f64,
    delta: f64,
    mode: NoiseMode,
    rng: &mut RandomSource,
) -> Result<Option<u64>> {
    let tau = histogram_threshold(eps, delta)?;
    sparse_histogram_at(points, 2.0 / eps, tau, mode, rng)
}
