//! Update streams and the neighbor relation.
//!
//! The object under observation is a length-`T` bit stream
//! `Δ = (Δ_1, …, Δ_T)`: at step `t` the mechanism sees `Δ_t` and must react
//! online. Two streams are *neighbors* when they differ in exactly one
//! position — one contributor's single update flips — and every privacy
//! statement in this crate quantifies over that relation.

use crate::error::{param_err, Result};
use crate::rng::hash_bits;
use std::fmt;

/// A length-`T` stream of 0/1 updates, 1-indexed in the public API to match
/// the convention used throughout the adversarial constructions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpdateStream {
    bits: Vec<u8>,
}

impl UpdateStream {
    /// Wrap raw bits. Errors unless every entry is 0 or 1 and `T >= 1`.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            param_err!("update stream must have positive length");
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            param_err!("update stream entry {} is {}, want 0/1", pos + 1, bits[pos]);
        }
        Ok(UpdateStream { bits })
    }

    /// The all-zero stream of length `t`.
    pub fn zeros(t: usize) -> Result<Self> {
        UpdateStream::new(vec![0; t])
    }

    /// The all-one stream of length `t`.
    pub fn ones(t: usize) -> Result<Self> {
        UpdateStream::new(vec![1; t])
    }

    /// Stream length `T`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Never true — construction rejects empty streams.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The bit at 1-indexed position `t`.
    pub fn bit(&self, t: usize) -> u8 {
        self.bits[t - 1]
    }

    /// Raw bits, 0-indexed.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Total number of 1-updates.
    pub fn weight(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    /// Prefix counts `n_t = Σ_{i<=t} Δ_i` for `t = 1..=T`.
    pub fn prefix_counts(&self) -> Vec<u64> {
        let mut acc = 0u64;
        self.bits
            .iter()
            .map(|&b| {
                acc += b as u64;
                acc
            })
            .collect()
    }

    /// A copy with the bit at 1-indexed `t` flipped.
    pub fn flipped(&self, t: usize) -> Result<Self> {
        if t == 0 || t > self.len() {
            param_err!("flip position {t} outside 1..={}", self.len());
        }
        let mut bits = self.bits.clone();
        bits[t - 1] ^= 1;
        Ok(UpdateStream { bits })
    }

    /// All `T` neighbors: one single-position flip each.
    pub fn neighbors(&self) -> Vec<UpdateStream> {
        (1..=self.len())
            .map(|t| self.flipped(t).expect("in-range flip"))
            .collect()
    }

    /// Deterministic 64-bit digest, used to salt per-stream RNG substreams.
    pub fn digest(&self) -> u64 {
        hash_bits(&self.bits)
    }

    /// Parse the one-line text form: a single run of `0`/`1` characters,
    /// optionally terminated by a newline.
    pub fn parse(text: &str) -> Result<Self> {
        let line = text.strip_suffix('\n').unwrap_or(text);
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            param_err!("stream text is empty");
        }
        let mut bits = Vec::with_capacity(line.len());
        for (i, c) in line.chars().enumerate() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => param_err!("stream text has {other:?} at column {}", i + 1),
            }
        }
        UpdateStream::new(bits)
    }
}

impl fmt::Display for UpdateStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

/// Largest absolute deviation between a counter's estimates and the true
/// prefix counts. Errors when the lengths disagree.
pub fn linf_error(estimates: &[f64], stream: &UpdateStream) -> Result<f64> {
    if estimates.len() != stream.len() {
        param_err!(
            "estimate sequence has length {}, stream has length {}",
            estimates.len(),
            stream.len()
        );
    }
    let truth = stream.prefix_counts();
    Ok(estimates
        .iter()
        .zip(truth.iter())
        .map(|(&e, &n)| (e - n as f64).abs())
        .fold(0.0, f64::max))
}
