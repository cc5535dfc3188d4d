//! Deterministic randomness: seeded substreams, inverse-CDF Laplace sampling,
//! and Bernoulli draws.
//!
//! Reproducibility is a hard requirement for everything in this crate — the
//! adversarial constructions and the privacy audits must replay bit-for-bit
//! from a master seed. Two choices follow from that:
//!
//! * Every consumer gets its own [`RandomSource`] addressed by
//!   `(master seed, stream index)`. Trial `i` of a Monte-Carlo loop always
//!   uses stream `i`, so a single trial can be replayed in isolation.
//! * Laplace noise is produced by inverting the CDF on a single uniform
//!   draw, never by rejection. One uniform in, one noise value out, which
//!   keeps every mechanism transcript a pure function of its seed.
//!
//! The generator itself is SplitMix64: 64 bits of state, a full-period
//! sequence, and good equidistribution — more than enough for the
//! statistical estimates made here, and trivially portable.

use crate::error::{param_err, Result};

// ---------------------------------------------------------------------------
// Bit mixing
// ---------------------------------------------------------------------------

/// The SplitMix64 output permutation (Stafford's mix13 finalizer).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combine two words into one well-mixed word. Used to derive substream
/// states and to hash auxiliary context (stream bits, node ids) into salts.
#[inline]
pub fn mix2(a: u64, b: u64) -> u64 {
    // Golden-ratio increment keeps (a, b) and (b, a) from colliding.
    mix64(a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(31))
}

// ---------------------------------------------------------------------------
// RandomSource
// ---------------------------------------------------------------------------

/// A deterministic stream of pseudo-random numbers addressed by
/// `(seed, index)`.
///
/// Identical `(seed, index)` pairs always yield identical draw sequences;
/// distinct indices under the same master seed behave as independent
/// streams. `derive` produces a child source whose index mixes in a salt,
/// which is how per-trial, per-node and per-stream substreams are built.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    index: u64,
    state: u64,
}

impl RandomSource {
    /// Open stream `index` under `seed`.
    pub fn new(seed: u64, index: u64) -> Self {
        // Two rounds of mixing so that (seed, index) and (index, seed)
        // start from unrelated states.
        let state = mix64(mix2(seed, index) ^ 0xa076_1d64_78bd_642f);
        RandomSource { seed, index, state }
    }

    /// The master seed this source was opened under.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream index this source was opened under.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// A child source for sub-task `salt`, independent of `self`'s draws.
    pub fn derive(&self, salt: u64) -> RandomSource {
        RandomSource::new(self.seed, mix2(self.index, salt))
    }

    /// Next raw 64-bit word (SplitMix64 step).
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(self.state)
    }

    /// Uniform draw strictly inside (0, 1): `(m + 0.5) / 2^53` with `m`
    /// uniform on 53 bits. The open interval matters — `laplace_sample`
    /// takes a logarithm of `1 - 2|u - 1/2|`, which must stay positive.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

/// Invert the Laplace(0, `scale`) CDF at the uniform value `u` in (0, 1).
///
/// With `v = u - 1/2`, the inverse CDF is `-scale * sgn(v) * ln(1 - 2|v|)`.
/// `u = 1/2` maps to the median 0.
pub fn laplace_from_uniform(u: f64, scale: f64) -> Result<f64> {
    if !(scale > 0.0) || !scale.is_finite() {
        param_err!("laplace scale must be positive and finite, got {scale}");
    }
    if !(u > 0.0 && u < 1.0) {
        param_err!("uniform value must lie strictly in (0,1), got {u}");
    }
    let v = u - 0.5;
    if v == 0.0 {
        return Ok(0.0);
    }
    Ok(-scale * v.signum() * (1.0 - 2.0 * v.abs()).ln())
}

/// One Laplace(0, `scale`) sample from a single uniform draw of `rng`.
pub fn laplace_sample(scale: f64, rng: &mut RandomSource) -> Result<f64> {
    laplace_from_uniform(rng.next_f64(), scale)
}

/// One Bernoulli(`p`) draw. Consumes exactly one uniform even for the
/// degenerate `p = 0` / `p = 1` cases so that transcripts keep a fixed
/// draw count per step.
pub fn bernoulli(p: f64, rng: &mut RandomSource) -> Result<bool> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        param_err!("bernoulli probability must lie in [0,1], got {p}");
    }
    Ok(rng.next_f64() < p)
}

/// Uniform integer in `[0, n)` from one 64-bit draw via the multiply-shift
/// range map. The bias is of order `n / 2^64` — invisible next to the
/// statistical tolerances used anywhere in this crate.
pub fn uniform_below(n: u64, rng: &mut RandomSource) -> Result<u64> {
    if n == 0 {
        param_err!("uniform_below needs a positive range");
    }
    Ok(((rng.next_u64() as u128 * n as u128) >> 64) as u64)
}

/// Hash an update-stream bit pattern into a substream salt.
pub fn hash_bits(bits: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64; // FNV offset basis
    for (i, &b) in bits.iter().enumerate() {
        h ^= (b as u64).wrapping_add((i as u64) << 1);
        h = h.wrapping_mul(0x0000_0100_0000_01b3); // FNV prime
    }
    mix64(h)
}
