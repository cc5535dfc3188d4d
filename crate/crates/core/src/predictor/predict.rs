//! The private online predictor for point functions.
//!
//! The machine answers a bit per query and then learns the true label. It
//! runs in four phases, tracked by `flag`:
//!
//! - **0 (collect)** — answer 0 and count positive labels. At the `k`-th
//!   positive: privately pick the heavy point `x*` with the sparse
//!   histogram, replay the whole history into the mirror as the bits
//!   `I(x_j = x*)`, and move to flag 1 if every replayed answer was ⊥
//!   (anything else means the history cannot be a point function — flag 3).
//! - **1 (watch)** — feed `I(x_t = x*)` to the mirror and echo its answer.
//!   At the mirror's first ⊤, audit the past: among the first `10k`
//!   occurrences of `x*`, a noisy count of 0-labels (`Fake`) decides
//!   whether `x*` was a decoy (flag 3, answer 0) or the real target
//!   (flag 2, answer 1).
//! - **2 (echo)** — keep echoing the mirror.
//! - **3 (dead)** — answer 0 forever.
//!
//! The delay `K = 20k` makes the replay burst land entirely inside the
//! mirror's silent region, and the mirror's joint privacy plus the
//! histogram's and `Fake`'s budgets cover the whole transcript.

use crate::error::{param_err, state_err, Result};
use crate::mirror::{derive_mirror_params, MirrorOutput, MirrorState};
use crate::params::NoiseMode;
use crate::predictor::env::LabeledExample;
use crate::predictor::histogram::sparse_histogram;
use crate::rng::{laplace_sample, RandomSource};

/// Phase of the predictor, reported as 0..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flag {
    Collect,
    Watch,
    Echo,
    Dead,
}

impl Flag {
    fn as_u8(self) -> u8 {
        match self {
            Flag::Collect => 0,
            Flag::Watch => 1,
            Flag::Echo => 2,
            Flag::Dead => 3,
        }
    }
}

/// A prediction emitted and waiting for its label.
#[derive(Debug, Clone, Copy)]
struct PendingRound {
    x: u64,
    /// Whether this round occupies one of the first `10k` occurrence slots
    /// of `x*` (so a 0-label must be counted toward `Fake`).
    in_l: bool,
}

/// Online predictor state. Drive it with [`PredictorState::predict`] /
/// [`PredictorState::feed_label`] strictly alternating, or use
/// [`run_predictor`].
pub struct PredictorState {
    eps: f64,
    delta: f64,
    /// Positive-count trigger `k`.
    k: u64,
    /// Mirror delay `K = 20k`.
    delay: u64,
    /// `Fake` kill threshold `(1/eps)·log2(1/delta)`.
    fake_threshold: f64,
    /// Occurrence slots audited by `Fake`: `10k`.
    fake_cap: u64,
    flag: Flag,
    count: u64,
    x_star: Option<u64>,
    history: Vec<LabeledExample>,
    mirror: MirrorState,
    /// Occurrences of `x*` seen so far (history + live).
    occ_seen: u64,
    /// Zero-labeled occurrences among the first `fake_cap` slots.
    fake_zeros: u64,
    pending: Option<PendingRound>,
    noise: NoiseMode,
    rng: RandomSource,
}

impl PredictorState {
    pub fn new(eps: f64, delta: f64, noise: NoiseMode, rng: RandomSource) -> Result<Self> {
        // The mirror derivation also validates 0 < eps <= 2, delta in (0, 0.1).
        let (_, ladder) = derive_mirror_params(eps, delta)?;
        let k = ((4.0 / eps) * (2.0 / delta).ln()).ceil() as u64;
        let delay = 20 * k;
        let mirror = MirrorState::with_noise(ladder, delay, noise, rng.derive(1))?;
        Ok(PredictorState {
            eps,
            delta,
            k,
            delay,
            fake_threshold: (1.0 / eps) * (1.0 / delta).log2(),
            fake_cap: 10 * k,
            flag: Flag::Collect,
            count: 0,
            x_star: None,
            history: Vec::new(),
            mirror,
            occ_seen: 0,
            fake_zeros: 0,
            pending: None,
            noise,
            rng,
        })
    }

    /// Positive-count trigger `k`.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Mirror delay `K = 20k`.
    pub fn delay(&self) -> u64 {
        self.delay
    }

    /// Noisy-rung count `2L` of the embedded mirror's ladder.
    pub fn two_l(&self) -> usize {
        self.mirror.ladder().two_l()
    }

    /// Current phase, 0..=3.
    pub fn flag(&self) -> u8 {
        self.flag.as_u8()
    }

    /// Positive labels counted while collecting.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// The identified heavy point; `None` both before the histogram runs
    /// and when it answered ⋆.
    pub fn x_star(&self) -> Option<u64> {
        self.x_star
    }

    /// Answer one query. Errors if the previous round's label is missing.
    pub fn predict(&mut self, x: u64) -> Result<u8> {
        if self.pending.is_some() {
            state_err!("the previous round's label is still pending");
        }
        let (answer, in_l) = match self.flag {
            Flag::Collect | Flag::Dead => (0, false),
            Flag::Watch => {
                let bit = (Some(x) == self.x_star) as u8;
                let in_l = if bit == 1 {
                    self.occ_seen += 1;
                    self.occ_seen <= self.fake_cap
                } else {
                    false
                };
                if self.mirror.step(bit)? == MirrorOutput::Top {
                    // First ⊤ while watching: audit the past for decoys.
                    let lap = match self.noise {
                        NoiseMode::Seeded => {
                            laplace_sample(1.0 / self.eps, &mut self.rng.derive(3))?
                        }
                        NoiseMode::Zero => 0.0,
                    };
                    let fake = self.fake_zeros as f64 + lap;
                    if fake >= self.fake_threshold {
                        self.flag = Flag::Dead;
                        (0, false)
                    } else {
                        self.flag = Flag::Echo;
                        (1, false)
                    }
                } else {
                    (0, in_l)
                }
            }
            Flag::Echo => {
                let bit = (Some(x) == self.x_star) as u8;
                ((self.mirror.step(bit)? == MirrorOutput::Top) as u8, false)
            }
        };
        self.pending = Some(PendingRound { x, in_l });
        Ok(answer)
    }

    /// Reveal the true label of the round just predicted.
    pub fn feed_label(&mut self, y: u8) -> Result<()> {
        if y > 1 {
            param_err!("label must be 0 or 1, got {y}");
        }
        let Some(round) = self.pending.take() else {
            state_err!("no prediction is awaiting a label");
        };
        match self.flag {
            Flag::Collect => {
                self.history.push(LabeledExample { x: round.x, y });
                self.count += y as u64;
                if self.count >= self.k {
                    self.transition()?;
                }
            }
            Flag::Watch => {
                if round.in_l && y == 0 {
                    self.fake_zeros += 1;
                }
            }
            Flag::Echo | Flag::Dead => {}
        }
        Ok(())
    }

    /// The `k`-th positive arrived: identify `x*`, burst-replay the history
    /// through the mirror, and leave the collecting phase.
    fn transition(&mut self) -> Result<()> {
        let positives: Vec<u64> =
            self.history.iter().filter(|e| e.y == 1).map(|e| e.x).collect();
        self.x_star =
            sparse_histogram(&positives, self.eps, self.delta, self.noise, &mut self.rng.derive(2))?;
        let mut any_top = false;
        for e in &self.history {
            let bit = (Some(e.x) == self.x_star) as u8;
            if self.mirror.step(bit)? == MirrorOutput::Top {
                any_top = true;
            }
        }
        if any_top {
            // A ⊤ inside the replay is only possible on histories no point
            // function explains; the machine goes silent for good.
            self.flag = Flag::Dead;
        } else {
            self.flag = Flag::Watch;
            for e in &self.history {
                if Some(e.x) == self.x_star {
                    self.occ_seen += 1;
                    if self.occ_seen <= self.fake_cap && e.y == 0 {
                        self.fake_zeros += 1;
                    }
                }
            }
        }
        self.history = Vec::new();
        Ok(())
    }
}

/// Outcome of one full predictor run.
#[derive(Debug, Clone)]
pub struct PredictorRun {
    pub predictions: Vec<u8>,
    /// Rounds where the emitted bit differs from the revealed label.
    pub mistakes: u64,
    pub final_flag: u8,
}

/// Drive the predictor through a labeled stream.
pub fn run_predictor(
    state: &mut PredictorState,
    examples: &[LabeledExample],
) -> Result<PredictorRun> {
    let mut predictions = Vec::with_capacity(examples.len());
    let mut mistakes = 0u64;
    for e in examples {
        let answer = state.predict(e.x)?;
        state.feed_label(e.y)?;
        if answer != e.y {
            mistakes += 1;
        }
        predictions.push(answer);
    }
    Ok(PredictorRun { predictions, mistakes, final_flag: state.flag() })
}
