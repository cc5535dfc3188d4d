//! The mirror: echo a bit stream's 1s, but never before `K` prior 1s have
//! arrived, keeping the whole output sequence jointly private.
//!
//! Zero inputs always answer ⊥ and consume no randomness. The `j`-th one
//! draws `Bern(probs(max(0, j - K)))` from the ladder: the first `K` ones
//! sit at rung 0 (hard ⊥, as the delay constraint requires), the next `2L`
//! climb the noisy rungs, and every one after that hits rung `2L + 1` and
//! beyond (hard ⊤).
//!
//! One reading note: the counter is exposed as `c() = K + ones` so a
//! transcript can be compared against descriptions that track an absolute
//! counter starting at `K`; the rung index is driven by `ones - K`, which
//! is what makes the delay constraint and the `2L` mistake bound hold.

use crate::error::{param_err, Result};
use crate::mechanisms::{check_step, Monitor, Verdict};
use crate::mirror::ladder::PiLadder;
use crate::params::NoiseMode;
use crate::rng::{bernoulli, RandomSource};
use crate::stream::UpdateStream;

/// One mirror answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorOutput {
    Bot,
    Top,
}

/// Running state of the mirror. Never halts — it answers forever.
#[derive(Debug, Clone)]
pub struct MirrorState {
    k: u64,
    ones: u64,
    ladder: PiLadder,
    noise: NoiseMode,
    rng: RandomSource,
}

impl MirrorState {
    pub fn new(ladder: PiLadder, k: u64, rng: RandomSource) -> Result<Self> {
        MirrorState::with_noise(ladder, k, NoiseMode::Seeded, rng)
    }

    /// Like [`MirrorState::new`], but with an explicit noise mode. In
    /// [`NoiseMode::Zero`] every rung draw resolves to ⊤ only when the rung
    /// probability is exactly 1, yielding the deterministic ⊥-maximal trace
    /// (useful for worst-case accounting in tests and benches).
    pub fn with_noise(
        ladder: PiLadder,
        k: u64,
        noise: NoiseMode,
        rng: RandomSource,
    ) -> Result<Self> {
        if k == 0 {
            param_err!("delay parameter K must be at least 1");
        }
        Ok(MirrorState { k, ones: 0, ladder, noise, rng })
    }

    /// Delay parameter `K`.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Number of 1-inputs consumed so far.
    pub fn ones(&self) -> u64 {
        self.ones
    }

    /// Absolute counter view: starts at `K`, increments per 1-input.
    pub fn c(&self) -> u64 {
        self.k + self.ones
    }

    /// Current rung index: `max(0, ones - K)`.
    pub fn rung(&self) -> u64 {
        self.ones.saturating_sub(self.k)
    }

    /// The ladder in use.
    pub fn ladder(&self) -> &PiLadder {
        &self.ladder
    }

    /// Consume one input bit and answer. A 0 answers ⊥ without touching
    /// the randomness; a 1 advances the rung and draws once.
    pub fn step(&mut self, bit: u8) -> Result<MirrorOutput> {
        match bit {
            0 => Ok(MirrorOutput::Bot),
            1 => {
                self.ones += 1;
                let p = self.ladder.probs(self.rung());
                let top = match self.noise {
                    NoiseMode::Seeded => bernoulli(p, &mut self.rng)?,
                    NoiseMode::Zero => p >= 1.0,
                };
                Ok(if top { MirrorOutput::Top } else { MirrorOutput::Bot })
            }
            other => param_err!("input bits must be 0 or 1, got {other}"),
        }
    }
}

/// Feed a whole stream through a fresh pass of `state`, collecting every
/// answer.
pub fn run_mirror(state: &mut MirrorState, stream: &UpdateStream) -> Result<Vec<MirrorOutput>> {
    stream.bits().iter().map(|&b| state.step(b)).collect()
}

/// Mistake and constraint accounting for one mirror transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirrorJudgment {
    /// 1-inputs beyond the K-th answered ⊥.
    pub mistakes: u64,
    /// Hard-constraint breaks: ⊤ on a 0-input.
    pub zero_violations: u64,
    /// Hard-constraint breaks: ⊤ with fewer than K strictly prior 1-inputs.
    pub early_top_violations: u64,
}

/// Judge a transcript against the mirror rules for delay `k`.
///
/// Constraint violations are counted and returned, not raised — a monitor
/// under audit is allowed to be wrong, and the caller decides what a break
/// means.
pub fn mirror_mistakes(
    outputs: &[MirrorOutput],
    stream: &UpdateStream,
    k: u64,
) -> Result<MirrorJudgment> {
    if outputs.len() != stream.len() {
        param_err!(
            "transcript length {} does not match stream length {}",
            outputs.len(),
            stream.len()
        );
    }
    let mut judgment =
        MirrorJudgment { mistakes: 0, zero_violations: 0, early_top_violations: 0 };
    let mut ones = 0u64;
    for (t, (&bit, &out)) in stream.bits().iter().zip(outputs).enumerate() {
        let prior_ones = ones;
        ones += bit as u64;
        match (bit, out) {
            (0, MirrorOutput::Top) => judgment.zero_violations += 1,
            (1, MirrorOutput::Top) if prior_ones < k => judgment.early_top_violations += 1,
            (1, MirrorOutput::Bot) if ones > k => judgment.mistakes += 1,
            _ => {}
        }
        let _ = t;
    }
    Ok(judgment)
}

/// Monitor-style wrapper: same per-step behavior, but the run halts at the
/// first ⊤, which lets the mirror stand in wherever a halting monitor is
/// expected.
pub struct MirrorMonitor {
    t: usize,
    state: MirrorState,
    steps: usize,
    halted: bool,
}

impl MirrorMonitor {
    pub fn new(t: usize, state: MirrorState) -> Result<Self> {
        if t == 0 {
            param_err!("horizon must be positive");
        }
        Ok(MirrorMonitor { t, state, steps: 0, halted: false })
    }
}

impl Monitor for MirrorMonitor {
    fn step(&mut self, bit: u8) -> Result<Verdict> {
        check_step(bit, self.steps, self.t, self.halted)?;
        self.steps += 1;
        match self.state.step(bit)? {
            MirrorOutput::Top => {
                self.halted = true;
                Ok(Verdict::Halt)
            }
            MirrorOutput::Bot => Ok(Verdict::Continue),
        }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::run_monitor;
    use crate::mirror::ladder::build_pi_ladder;

    fn test_ladder() -> PiLadder {
        build_pi_ladder(2.0f64.ln(), 0.05).unwrap()
    }

    #[test]
    fn zeros_answer_bot_and_consume_no_randomness() {
        let mut a = MirrorState::new(test_ladder(), 2, RandomSource::new(9, 0)).unwrap();
        let mut b = MirrorState::new(test_ladder(), 2, RandomSource::new(9, 0)).unwrap();
        // a sees zeros interleaved with ones; b sees only the ones. The
        // draws must line up exactly.
        let with_zeros = UpdateStream::new(vec![0, 1, 0, 0, 1, 0, 1, 1, 1]).unwrap();
        let only_ones = UpdateStream::new(vec![1, 1, 1, 1, 1]).unwrap();
        let out_a: Vec<MirrorOutput> = run_mirror(&mut a, &with_zeros)
            .unwrap()
            .into_iter()
            .zip(with_zeros.bits())
            .filter(|(_, &bit)| bit == 1)
            .map(|(o, _)| o)
            .collect();
        let out_b = run_mirror(&mut b, &only_ones).unwrap();
        assert_eq!(out_a, out_b);
        println!("[PASS] zero inputs answer ⊥ without consuming randomness");
    }

    #[test]
    fn first_k_ones_are_deterministically_bot() {
        // Rung stays at 0 for the first K ones, and probs(0) = 0.
        for k in [1u64, 2, 5] {
            for seed in 0..20 {
                let mut state =
                    MirrorState::new(test_ladder(), k, RandomSource::new(10, seed)).unwrap();
                for j in 1..=k {
                    assert_eq!(state.step(1).unwrap(), MirrorOutput::Bot, "one {j} of {k}");
                }
                assert_eq!(state.rung(), 0);
                assert_eq!(state.c(), 2 * k);
            }
        }
        println!("[PASS] the first K ones answer ⊥ deterministically");
    }

    #[test]
    fn deep_rungs_are_deterministically_top() {
        // Beyond rung 2L the ladder is hard 1.
        let ladder = test_ladder(); // 2L = 8
        let k = 2u64;
        for seed in 0..20 {
            let mut state = MirrorState::new(ladder.clone(), k, RandomSource::new(11, seed)).unwrap();
            for _ in 0..(k + 8 + 1) {
                let _ = state.step(1).unwrap();
            }
            // Rung is now 9 > 2L: every further one must answer ⊤.
            for _ in 0..5 {
                assert_eq!(state.step(1).unwrap(), MirrorOutput::Top);
            }
        }
        println!("[PASS] ones beyond rung 2L answer ⊤ deterministically");
    }

    #[test]
    fn first_noisy_one_tops_with_probability_delta_prime() {
        // The (K+1)-th one draws Bern(probs(1)) = Bern(delta').
        let k = 2u64;
        let trials = 200_000u64;
        let mut tops = 0u64;
        for seed in 0..trials {
            let mut state =
                MirrorState::new(test_ladder(), k, RandomSource::new(12, seed)).unwrap();
            state.step(1).unwrap();
            state.step(1).unwrap();
            if state.step(1).unwrap() == MirrorOutput::Top {
                tops += 1;
            }
        }
        let freq = tops as f64 / trials as f64;
        assert!((freq - 0.05).abs() < 0.005, "frequency {freq}");
        println!("[PASS] the (K+1)-th one answers ⊤ with frequency ~ delta'");
    }

    #[test]
    fn zero_noise_gives_the_bot_maximal_trace() {
        // Every noisy rung resolves to ⊥; only the deterministic tail fires.
        let k = 2u64;
        let two_l = 8u64;
        let mut state = MirrorState::with_noise(
            test_ladder(),
            k,
            crate::params::NoiseMode::Zero,
            RandomSource::new(16, 0),
        )
        .unwrap();
        for j in 1..=(k + two_l) {
            assert_eq!(state.step(1).unwrap(), MirrorOutput::Bot, "one {j}");
        }
        for _ in 0..3 {
            assert_eq!(state.step(1).unwrap(), MirrorOutput::Top);
        }
        println!("[PASS] zero-noise mirror answers ⊥ through K + 2L ones, then ⊤");
    }

    #[test]
    fn judgment_counts_mistakes_and_violations() {
        let stream = UpdateStream::new(vec![1, 1, 0, 1, 1, 1]).unwrap();
        let k = 1;
        use MirrorOutput::{Bot, Top};
        // Perfect play for K=1: ⊥ on the first one, ⊤ on ones 2..4, ⊥ on 0s.
        let perfect = vec![Bot, Top, Bot, Top, Top, Top];
        let j = mirror_mistakes(&perfect, &stream, k).unwrap();
        assert_eq!(j, MirrorJudgment { mistakes: 0, zero_violations: 0, early_top_violations: 0 });

        // All-⊥ play: the 2nd through 5th ones (beyond the K-th) are mistakes.
        let silent = vec![Bot; 6];
        let j = mirror_mistakes(&silent, &stream, k).unwrap();
        assert_eq!(j.mistakes, 4);
        assert_eq!(j.zero_violations + j.early_top_violations, 0);

        // Illegal play: ⊤ on the zero step, ⊤ on the very first one. The ⊤s
        // are violations, not mistakes, so the four late ⊥-on-one steps
        // still count as mistakes.
        let illegal = vec![Top, Bot, Top, Bot, Bot, Bot];
        let j = mirror_mistakes(&illegal, &stream, k).unwrap();
        assert_eq!(j.zero_violations, 1);
        assert_eq!(j.early_top_violations, 1);
        assert_eq!(j.mistakes, 4);
        println!("[PASS] mistake and violation accounting matches hand counts");
    }

    #[test]
    fn mirror_never_breaks_its_own_constraints_and_stays_under_2l() {
        // Exhaustive over all streams at small T, statistical over noise.
        let ladder = test_ladder(); // 2L = 8
        let t = 8usize;
        for k in [1u64, 2] {
            for mask in 0u32..(1 << t) {
                let bits: Vec<u8> = (0..t).map(|i| ((mask >> i) & 1) as u8).collect();
                let stream = UpdateStream::new(bits).unwrap();
                for seed in 0..40 {
                    let mut state = MirrorState::new(
                        ladder.clone(),
                        k,
                        RandomSource::new(13, seed).derive(mask as u64),
                    )
                    .unwrap();
                    let out = run_mirror(&mut state, &stream).unwrap();
                    let j = mirror_mistakes(&out, &stream, k).unwrap();
                    assert_eq!(j.zero_violations, 0, "stream {stream}");
                    assert_eq!(j.early_top_violations, 0, "stream {stream}");
                    assert!(j.mistakes <= 8, "stream {stream}: {} mistakes", j.mistakes);
                }
            }
        }
        println!("[PASS] mirror respects constraints and the 2L mistake cap (T = 8, exhaustive)");
    }

    #[test]
    fn outputs_depend_only_on_prefix_one_counts() {
        // Interleaved replay: two streams with identical one-positions in
        // different zero-padding answer identically on the ones under the
        // same seed.
        let ladder = test_ladder();
        let s1 = UpdateStream::new(vec![1, 1, 0, 1, 0, 0, 1]).unwrap();
        let s2 = UpdateStream::new(vec![0, 0, 1, 1, 1, 1, 0]).unwrap();
        let rng = RandomSource::new(14, 0);
        let mut m1 = MirrorState::new(ladder.clone(), 1, rng.clone()).unwrap();
        let mut m2 = MirrorState::new(ladder, 1, rng).unwrap();
        let o1: Vec<_> = run_mirror(&mut m1, &s1)
            .unwrap()
            .into_iter()
            .zip(s1.bits())
            .filter(|(_, &b)| b == 1)
            .map(|(o, _)| o)
            .collect();
        let o2: Vec<_> = run_mirror(&mut m2, &s2)
            .unwrap()
            .into_iter()
            .zip(s2.bits())
            .filter(|(_, &b)| b == 1)
            .map(|(o, _)| o)
            .collect();
        assert_eq!(o1, o2);
        println!("[PASS] answers are a function of prefix one-counts alone");
    }

    #[test]
    fn monitor_wrapper_halts_at_the_first_top() {
        let ladder = test_ladder();
        let stream = UpdateStream::ones(16).unwrap();
        let state = MirrorState::new(ladder, 2, RandomSource::new(15, 7)).unwrap();
        let mut replay = state.clone();
        let mut monitor = MirrorMonitor::new(16, state).unwrap();
        let halt = run_monitor(&mut monitor, &stream).unwrap();
        // Replay the raw mirror: the halt step must be its first ⊤.
        let first_top = (1..=16).find(|_| replay.step(1).unwrap() == MirrorOutput::Top);
        assert_eq!(halt, first_top);
        println!("[PASS] monitor wrapper halts exactly at the mirror's first ⊤");
    }
}
