//! The reduction from private online learning of point functions to the
//! threshold-monitor lower bound.
//!
//! The adversary plays `k = sqrt(T)` phases of `k` rounds against a learner
//! over the domain `{0, …, T}`. Phase `j` owns the block
//! `X_j = {(j-1)k+1, …, jk}`; every query in the phase is drawn uniformly
//! from the block and labeled 0. Against this all-negative distribution the
//! learner's per-phase behavior splits into two cases:
//!
//! * **Case 1** — for every phase `j` and point `k'` in its block, the
//!   hypothesis mass `Σ_{i in phase j} Pr[h_i(k') = 1]` is at least 0.001.
//!   Then the learner's expected mistake count on the all-negative
//!   distribution is already `Ω(k)`: it keeps gambling on 1s that never
//!   come.
//! * **Case 2** — some `(j*, k*)` has phase mass below 0.001. Conditioned
//!   on `k*` never being queried in phase `j*` (probability at least 1/4),
//!   the learner ignores `k*` with probability at least 0.99 on some fixed
//!   query sequence. On that sequence the learner *is* a threshold monitor
//!   for the point `k*`: feeding `(k*, 1)` at a slot is a 1-update, and
//!   "the hypothesis turned positive on `k*`" is the halt event. The
//!   interval-halving construction then places `κ = Θ(log k)` positive
//!   examples so the hypothesis stays zero throughout with constant
//!   probability — every placed example a mistake.
//!
//! Either way a private learner pays far more than the one mistake that the
//! non-private point learner needs.

use crate::adversary::halt::{monte_carlo_radius, HaltDistribution, HaltOracle};
use crate::adversary::hard::{build_hard_instance, hard_instance_horizon};
use crate::error::{param_err, Result};
use crate::rng::{uniform_below, RandomSource};
use rayon::prelude::*;

/// An online learner over the integer domain `{0, …, domain_max}`.
///
/// The game order per round: the learner's current hypothesis is probed (via
/// [`predict`](OnlineLearner::predict), any number of times), then one
/// labeled example arrives through [`observe`](OnlineLearner::observe).
pub trait OnlineLearner {
    /// Evaluate the current hypothesis at `x`.
    fn predict(&self, x: u64) -> bool;
    /// Consume one labeled example.
    fn observe(&mut self, x: u64, y: bool);
}

/// Builds fresh learner instances for Monte-Carlo trials.
pub trait LearnerFactory: Sync {
    fn build(&self, rng: RandomSource) -> Box<dyn OnlineLearner + Send>;
}

// ---------------------------------------------------------------------------
// Baseline learners
// ---------------------------------------------------------------------------

/// Predicts 0 everywhere, forever. The degenerate "perfectly private"
/// learner: (0,0)-DP and maximally inaccurate on positives.
#[derive(Debug, Clone, Default)]
pub struct AllZeroLearner;

impl OnlineLearner for AllZeroLearner {
    fn predict(&self, _x: u64) -> bool {
        false
    }
    fn observe(&mut self, _x: u64, _y: bool) {}
}

/// The non-private optimal learner for point functions: all-zero hypothesis
/// until the first positive example, then the point function at that
/// example. Makes at most one mistake on realizable streams.
#[derive(Debug, Clone, Default)]
pub struct ConsistentPointLearner {
    point: Option<u64>,
}

impl OnlineLearner for ConsistentPointLearner {
    fn predict(&self, x: u64) -> bool {
        self.point == Some(x)
    }
    fn observe(&mut self, x: u64, y: bool) {
        if y && self.point.is_none() {
            self.point = Some(x);
        }
    }
}

/// Gambling baseline: each round's hypothesis is the point function at a
/// fresh uniformly random domain element. Pointwise, every round predicts 1
/// on any fixed element with probability `1 / (domain_max + 1)`.
pub struct RandomPointLearner {
    domain_max: u64,
    point: u64,
    rng: RandomSource,
}

impl RandomPointLearner {
    pub fn new(domain_max: u64, mut rng: RandomSource) -> Result<Self> {
        let point = uniform_below(domain_max + 1, &mut rng)?;
        Ok(RandomPointLearner { domain_max, point, rng })
    }
}

impl OnlineLearner for RandomPointLearner {
    fn predict(&self, x: u64) -> bool {
        x == self.point
    }
    fn observe(&mut self, _x: u64, _y: bool) {
        // Redraw at the end of the round so the hypothesis is stable under
        // repeated probing within a round.
        self.point = uniform_below(self.domain_max + 1, &mut self.rng)
            .expect("domain_max + 1 > 0");
    }
}

/// Named learner families for the CLI and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    AllZero,
    ConsistentPoint,
    /// Needs the domain bound (the attack uses `{0, …, T}`).
    RandomPoint { domain_max: u64 },
}

impl LearnerFactory for LearnerKind {
    fn build(&self, rng: RandomSource) -> Box<dyn OnlineLearner + Send> {
        match *self {
            LearnerKind::AllZero => Box::new(AllZeroLearner),
            LearnerKind::ConsistentPoint => Box::new(ConsistentPointLearner::default()),
            LearnerKind::RandomPoint { domain_max } => Box::new(
                RandomPointLearner::new(domain_max, rng).expect("positive domain"),
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// The attack
// ---------------------------------------------------------------------------

/// Which branch of the case analysis the measurements selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackCase {
    /// Every (phase, point) carries hypothesis mass ≥ 0.001: the learner
    /// gambles everywhere and pays in expectation.
    Case1,
    /// A quiet (phase, point) exists: the learner was derandomized and
    /// attacked through the hard-instance construction.
    Case2,
}

/// Everything the learning attack measures.
#[derive(Debug, Clone)]
pub struct LearningAttackReport {
    /// Total rounds `T = k²`.
    pub t: usize,
    /// Phase count and block size `k = sqrt(T)`.
    pub k: usize,
    pub trials: u64,
    pub case: AttackCase,
    /// Smallest estimated phase mass over all (phase, point) pairs.
    pub min_phase_sum: f64,
    /// Hoeffding radius for the phase-mass estimates.
    pub phase_sum_radius: f64,
    /// Expected mistakes per run on the all-negative query distribution.
    pub mistake_mass: f64,
    /// Case 2 was indicated but no witness sequence passed validation
    /// within the candidate budget; the report falls back to Case-1 data.
    pub witness_search_exhausted: bool,
    /// Case 2: the quiet (phase, point) pair, 1-indexed phase.
    pub witness: Option<(usize, u64)>,
    /// Case 2: hypothesis mass at the witness on the fixed sequence.
    pub conditional_phase_sum: Option<f64>,
    /// Case 2: candidate sequences drawn before one validated.
    pub candidates_tried: Option<usize>,
    /// Case 2: hard-instance parameter κ (number of inserted positives).
    pub kappa: Option<u32>,
    /// Case 2: `c_total` of the embedded construction.
    pub c_total: Option<f64>,
    /// Case 2: global (1-indexed) rounds where `(k*, 1)` was inserted.
    pub insert_positions: Option<Vec<usize>>,
    /// Case 2: mean mistakes of the learner on the final sequence.
    pub measured_mistakes: Option<f64>,
}

/// Per-candidate validation runs during the derandomization search.
const WITNESS_TRIALS: u64 = 200;
/// Budget of candidate sequences for the derandomization search.
const MAX_CANDIDATES: usize = 10_000;
/// Required all-quiet frequency for a candidate to be accepted.
const WITNESS_ACCEPT: f64 = 0.99;
/// Case threshold on the per-(phase, point) hypothesis mass.
const CASE_THRESHOLD: f64 = 0.001;

struct PhaseLayout {
    t: usize,
    k: usize,
}

impl PhaseLayout {
    fn new(t: usize) -> Result<Self> {
        let k = (t as f64).sqrt().round() as usize;
        if k < 2 || k * k != t {
            param_err!("T must be a perfect square with sqrt(T) >= 2, got {t}");
        }
        Ok(PhaseLayout { t, k })
    }

    /// Phase (1-indexed) of global round `i` (1-indexed).
    fn phase_of(&self, i: usize) -> usize {
        (i - 1) / self.k + 1
    }

    /// Block of phase `j`: `{(j-1)k+1, …, jk}` as domain points.
    fn block(&self, j: usize) -> std::ops::RangeInclusive<u64> {
        ((j - 1) * self.k + 1) as u64..=(j * self.k) as u64
    }

    /// Draw one query for round `i` from its phase block, optionally
    /// avoiding a forbidden point inside one phase.
    fn draw_query(
        &self,
        i: usize,
        avoid: Option<(usize, u64)>,
        rng: &mut RandomSource,
    ) -> Result<u64> {
        let j = self.phase_of(i);
        let lo = ((j - 1) * self.k + 1) as u64;
        match avoid {
            Some((aj, ax)) if aj == j => {
                // Uniform over the block minus one point: draw from k-1
                // slots and skip over the forbidden value.
                let v = lo + uniform_below(self.k as u64 - 1, rng)?;
                Ok(if v >= ax { v + 1 } else { v })
            }
            _ => Ok(lo + uniform_below(self.k as u64, rng)?),
        }
    }
}

/// Run the full attack: estimate per-(phase, point) hypothesis masses on
/// the all-negative query distribution, branch on the case analysis, and in
/// Case 2 derandomize and drive the hard-instance construction through the
/// learner. `t` must be a perfect square; the domain is `{0, …, t}`.
pub fn learning_attack(
    factory: &dyn LearnerFactory,
    t: usize,
    trials: u64,
    rng: &RandomSource,
) -> Result<LearningAttackReport> {
    let layout = PhaseLayout::new(t)?;
    let k = layout.k;
    if trials == 0 {
        param_err!("need at least one trial");
    }

    // Phase-mass estimation: for each trial, run the whole T-round game,
    // probing the hypothesis at every point of the active block before each
    // example. counts[(j-1)k + b] accumulates Σ_i 1{h_i(block_point_b) = 1}
    // over rounds i of phase j; mistakes accumulates 1{h_i(x_i) = 1}.
    let est_rng = rng.derive(1);
    let (counts, mistakes) = (0..trials)
        .into_par_iter()
        .map(|n| -> Result<(Vec<u64>, u64)> {
            let trial_rng = est_rng.derive(n);
            let mut learner = factory.build(trial_rng.derive(0));
            let mut seq_rng = trial_rng.derive(1);
            let mut counts = vec![0u64; k * k];
            let mut mistakes = 0u64;
            for i in 1..=layout.t {
                let j = layout.phase_of(i);
                for (b, point) in layout.block(j).enumerate() {
                    if learner.predict(point) {
                        counts[(j - 1) * k + b] += 1;
                    }
                }
                let x = layout.draw_query(i, None, &mut seq_rng)?;
                if learner.predict(x) {
                    mistakes += 1;
                }
                learner.observe(x, false);
            }
            Ok((counts, mistakes))
        })
        .try_reduce(
            || (vec![0u64; k * k], 0),
            |(mut ca, ma), (cb, mb)| {
                for (a, b) in ca.iter_mut().zip(cb) {
                    *a += b;
                }
                Ok((ca, ma + mb))
            },
        )?;

    let n = trials as f64;
    let phase_sums: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    // Each estimate is a mean of per-trial sums in [0, k]; union over the k²
    // cells at 99% confidence.
    let phase_sum_radius =
        k as f64 * ((2.0 * (k * k) as f64 / 0.01).ln() / (2.0 * n)).sqrt();
    let mistake_mass = mistakes as f64 / n;

    let (min_idx, &min_phase_sum) = phase_sums
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("k >= 2 so the grid is non-empty");

    let mut report = LearningAttackReport {
        t: layout.t,
        k,
        trials,
        case: AttackCase::Case1,
        min_phase_sum,
        phase_sum_radius,
        mistake_mass,
        witness_search_exhausted: false,
        witness: None,
        conditional_phase_sum: None,
        candidates_tried: None,
        kappa: None,
        c_total: None,
        insert_positions: None,
        measured_mistakes: None,
    };

    if min_phase_sum >= CASE_THRESHOLD {
        return Ok(report);
    }

    // Case 2. Witness: the quietest (phase, point) cell.
    let j_star = min_idx / k + 1;
    let k_star = ((j_star - 1) * k + 1 + min_idx % k) as u64;
    report.witness = Some((j_star, k_star));

    // Derandomize: fix a sequence avoiding k* in phase j* on which the
    // hypothesis stays quiet at k* through the whole phase with frequency
    // at least WITNESS_ACCEPT.
    let search = derandomize(factory, &layout, j_star, k_star, rng)?;
    let (fixed_seq, conditional_sum, candidates) = match search {
        Some(found) => found,
        None => {
            report.witness_search_exhausted = true;
            report.candidates_tried = Some(MAX_CANDIDATES);
            return Ok(report);
        }
    };
    report.case = AttackCase::Case2;
    report.conditional_phase_sum = Some(conditional_sum);
    report.candidates_tried = Some(candidates);

    // Insertion sub-horizon: the largest κ with 2^(κ+1) - 2 <= k fits the
    // hard-instance horizon inside the first slots of phase j*.
    let mut kappa = 1u32;
    while hard_instance_horizon(kappa + 1)? <= k {
        kappa += 1;
    }
    let t_prime = hard_instance_horizon(kappa)?;
    report.kappa = Some(kappa);

    let base = (j_star - 1) * k;
    let oracle = LearnerEmbedOracle {
        factory,
        fixed_seq: &fixed_seq,
        base,
        t_prime,
        k_star,
        trials,
        rng: rng.derive(4),
    };
    let hard = build_hard_instance(&oracle, kappa)?;
    report.c_total = Some(hard.c_total);
    let inserts: Vec<usize> = hard
        .stream
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(s, _)| base + s + 1)
        .collect();

    // Measure the learner's actual mistakes on the final sequence.
    let measure_rng = rng.derive(5);
    let insert_set = inserts.clone();
    let total: u64 = (0..trials)
        .into_par_iter()
        .map(|n| -> Result<u64> {
            let mut learner = factory.build(measure_rng.derive(n));
            let mut mistakes = 0u64;
            for i in 1..=layout.t {
                let (x, y) = if insert_set.binary_search(&i).is_ok() {
                    (k_star, true)
                } else {
                    (fixed_seq[i - 1], false)
                };
                if learner.predict(x) != y {
                    mistakes += 1;
                }
                learner.observe(x, y);
            }
            Ok(mistakes)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    report.measured_mistakes = Some(total as f64 / n);
    report.insert_positions = Some(inserts);
    Ok(report)
}

/// Search for a fixed query sequence avoiding `k_star` throughout phase
/// `j_star` on which the learner's hypothesis at `k_star` stays 0 for the
/// whole phase with empirical frequency ≥ `WITNESS_ACCEPT`. Returns the
/// sequence, its measured conditional phase mass, and how many candidates
/// were tried.
fn derandomize(
    factory: &dyn LearnerFactory,
    layout: &PhaseLayout,
    j_star: usize,
    k_star: u64,
    rng: &RandomSource,
) -> Result<Option<(Vec<u64>, f64, usize)>> {
    let cand_rng = rng.derive(2);
    let val_rng = rng.derive(3);
    let phase_end = j_star * layout.k;

    for c in 0..MAX_CANDIDATES {
        let mut seq_rng = cand_rng.derive(c as u64);
        let mut seq = Vec::with_capacity(layout.t);
        for i in 1..=layout.t {
            seq.push(layout.draw_query(i, Some((j_star, k_star)), &mut seq_rng)?);
        }

        // Validate: replay the prefix through phase j*, probing h_i(k*)
        // before each example of the phase.
        let this_val = val_rng.derive(c as u64);
        let (quiet_runs, positive_probes) = (0..WITNESS_TRIALS)
            .into_par_iter()
            .map(|n| -> Result<(u64, u64)> {
                let mut learner = factory.build(this_val.derive(n));
                let mut positives = 0u64;
                for (i, &x) in seq.iter().enumerate().take(phase_end) {
                    if layout.phase_of(i + 1) == j_star && learner.predict(k_star) {
                        positives += 1;
                    }
                    learner.observe(x, false);
                }
                Ok(((positives == 0) as u64, positives))
            })
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;

        if quiet_runs as f64 / WITNESS_TRIALS as f64 >= WITNESS_ACCEPT {
            let conditional_sum = positive_probes as f64 / WITNESS_TRIALS as f64;
            return Ok(Some((seq, conditional_sum, c + 1)));
        }
    }
    Ok(None)
}

/// The learner, wrapped as a halting oracle over insertion patterns.
///
/// An update stream of length `t_prime` selects which of the first
/// `t_prime` slots of phase `j*` receive `(k*, 1)` instead of the fixed
/// sequence's negative query. The wrapped "monitor" halts at slot `s` when
/// the hypothesis predicts `k*` positive right after observing slot `s` —
/// the learner has reacted to the insertions.
struct LearnerEmbedOracle<'a> {
    factory: &'a dyn LearnerFactory,
    fixed_seq: &'a [u64],
    /// Global rounds `base + 1 ..= base + t_prime` host the insertions.
    base: usize,
    t_prime: usize,
    k_star: u64,
    trials: u64,
    rng: RandomSource,
}

impl HaltOracle for LearnerEmbedOracle<'_> {
    fn halt_distribution(
        &self,
        stream: &crate::stream::UpdateStream,
    ) -> Result<HaltDistribution> {
        if stream.len() != self.t_prime {
            param_err!(
                "insertion pattern length {} does not match sub-horizon {}",
                stream.len(),
                self.t_prime
            );
        }
        let per_stream = self.rng.derive(crate::rng::mix2(0x1ea2, stream.digest()));
        let counts = (0..self.trials)
            .into_par_iter()
            .map(|n| -> Result<Vec<u64>> {
                let mut learner = self.factory.build(per_stream.derive(n));
                let mut counts = vec![0u64; self.t_prime + 1];
                for i in 1..=self.base {
                    learner.observe(self.fixed_seq[i - 1], false);
                }
                let mut halted = false;
                // `s` drives the stream, the fixed sequence, and `counts`
                // together; an iterator over any one of them reads worse.
                #[allow(clippy::needless_range_loop)]
                for s in 1..=self.t_prime {
                    let global = self.base + s;
                    let (x, y) = if stream.bit(s) == 1 {
                        (self.k_star, true)
                    } else {
                        (self.fixed_seq[global - 1], false)
                    };
                    learner.observe(x, y);
                    if learner.predict(self.k_star) {
                        counts[s] += 1;
                        halted = true;
                        break;
                    }
                }
                if !halted {
                    counts[0] += 1;
                }
                Ok(counts)
            })
            .try_reduce(
                || vec![0u64; self.t_prime + 1],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    Ok(a)
                },
            )?;
        let n = self.trials as f64;
        let probs = (1..=self.t_prime).map(|s| counts[s] as f64 / n).collect();
        HaltDistribution::new(
            probs,
            counts[0] as f64 / n,
            monte_carlo_radius(self.t_prime, self.trials),
        )
    }

    fn horizon(&self) -> usize {
        self.t_prime
    }
}
