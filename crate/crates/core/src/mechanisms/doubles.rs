//! Deliberately trivial monitors with closed-form halting behavior.
//!
//! These exist so the adversarial machinery can be tested against oracles
//! whose halting distribution is known exactly: [`NeverHalt`] has all its
//! mass on "no ⊤", and [`HaltAtFirstOne`] puts probability `q` on the
//! position of the stream's first 1-update. They also feed the end-to-end
//! hand traces of the hard-instance construction.

use crate::dist::FiniteDistribution;
use crate::error::{param_err, Result};
use crate::mechanisms::{check_step, Monitor, Verdict};
use crate::rng::{bernoulli, RandomSource};
use crate::stream::UpdateStream;

/// Never emits ⊤.
pub struct NeverHalt {
    t: usize,
    steps: usize,
}

impl NeverHalt {
    pub fn new(t: usize) -> Result<Self> {
        if t == 0 {
            param_err!("horizon must be positive");
        }
        Ok(NeverHalt { t, steps: 0 })
    }

    /// The exact transcript distribution: all mass on "never halts"
    /// (outcome 0), for any stream of the right length.
    pub fn transcript_distribution(t: usize) -> Result<FiniteDistribution> {
        let entries = std::iter::once((0u64, 1.0))
            .chain((1..=t as u64).map(|x| (x, 0.0)));
        FiniteDistribution::new(entries)
    }
}

impl Monitor for NeverHalt {
    fn step(&mut self, bit: u8) -> Result<Verdict> {
        check_step(bit, self.steps, self.t, false)?;
        self.steps += 1;
        Ok(Verdict::Continue)
    }

    fn horizon(&self) -> usize {
        self.t
    }

    fn steps_taken(&self) -> usize {
        self.steps
    }

    fn halted(&self) -> bool {
        false
    }
}

/// At the stream's first 1-update, halts with probability `q`; if that coin
/// comes up tails (or the stream has no ones) it never halts.
pub struct HaltAtFirstOne {
    t: usize,
    q: f64,
    rng: RandomSource,
    seen_one: bool,
    steps: usize,
    halted: bool,
}

impl HaltAtFirstOne {
    pub fn new(t: usize, q: f64, rng: RandomSource) -> Result<Self> {
        if t == 0 {
            param_err!("horizon must be positive");
        }
        if !(0.0..=1.0).contains(&q) || q.is_nan() {
            param_err!("halting probability q must lie in [0,1], got {q}");
        }
        Ok(HaltAtFirstOne { t, q, rng, seen_one: false, steps: 0, halted: false })
    }

    /// The exact transcript distribution on `stream`: probability `q` on the
    /// first 1-position (if any), remainder on "never halts".
    pub fn transcript_distribution(stream: &UpdateStream, q: f64) -> Result<FiniteDistribution> {
        if !(0.0..=1.0).contains(&q) || q.is_nan() {
            param_err!("halting probability q must lie in [0,1], got {q}");
        }
        let first_one = (1..=stream.len()).find(|&t| stream.bit(t) == 1);
        let entries = (0..=stream.len() as u64).map(|x| {
            let p = match first_one {
                Some(pos) if x == pos as u64 => q,
                _ if x == 0 => if first_one.is_some() { 1.0 - q } else { 1.0 },
                _ => 0.0,
            };
            (x, p)
        });
        FiniteDistribution::new(entries)
    }
}

impl Monitor for HaltAtFirstOne {
    fn step(&mut self, bit: u8) -> Result<Verdict> {
        check_step(bit, self.steps, self.t, self.halted)?;
        self.steps += 1;
        if bit == 1 && !self.seen_one {
            self.seen_one = true;
            if bernoulli(self.q, &mut self.rng)? {
                self.halted = true;
                return Ok(Verdict::Halt);
            }
        }
        Ok(Verdict::Continue)
    }

    fn horizon(&self) -> usize {
        self.t
    }

    fn steps_taken(&self) -> usize {
        self.steps
    }

    fn halted(&self) -> bool {
        self.halted
    }
}
