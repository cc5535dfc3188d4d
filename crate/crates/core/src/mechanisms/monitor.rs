//! Threshold monitors.
//!
//! All monitors watch the running count `n_t` against a level `k` and emit
//! ⊥ until their halting rule fires, then ⊤ once and stop. The interesting
//! tension: the success rule (never ⊤ while `n_t < k/2`, ⊤ by the time
//! `n_t = k`) leaves a free zone of width `k/2`, and each private monitor
//! spends its noise budget differently inside that zone. Every halting rule
//! here tests against the midpoint `3k/4`.

use crate::dist::FiniteDistribution;
use crate::error::{param_err, Result};
use crate::mechanisms::{check_step, Counter, Monitor, Verdict};
use crate::params::NoiseMode;
use crate::rng::{bernoulli, laplace_sample, RandomSource};
use crate::stream::UpdateStream;

/// The common halting threshold `3k/4`, kept as a real number so odd `k`
/// behaves sensibly.
#[inline]
fn threshold_34(k: u64) -> f64 {
    0.75 * k as f64
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        param_err!("threshold level k must be >= 1");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sparse-vector monitor
// ---------------------------------------------------------------------------

/// The sparse-vector (above-threshold) monitor.
///
/// One noisy threshold `3k/4 + Lap(2/eps)` is drawn up front; each step
/// compares `n_t + Lap(4/eps)` against it and halts at the first crossing.
/// The output sequence is `(eps, 0)`-DP: the stream enters only through the
/// 1-sensitive running count, and the classic above-threshold budget split
/// (half on the threshold, half on the per-step draws) pays for the single
/// ⊤ it ever reports.
pub struct SvtMonitor {
    t: usize,
    eps: f64,
    mode: NoiseMode,
    rng: RandomSource,
    noisy_threshold: f64,
    count: u64,
    steps: usize,
    halted: bool,
}

impl SvtMonitor {
    pub fn new(t: usize, k: u64, eps: f64, mode: NoiseMode, mut rng: RandomSource) -> Result<Self> {
        if t == 0 {
            param_err!("horizon must be positive");
        }
        check_k(k)?;
        if !(eps > 0.0) || !eps.is_finite() {
            param_err!("eps must be positive and finite, got {eps}");
        }
        let tau = match mode {
            NoiseMode::Seeded => laplace_sample(2.0 / eps, &mut rng)?,
            NoiseMode::Zero => 0.0,
        };
        Ok(SvtMonitor {
            t,
            eps,
            mode,
            rng,
            noisy_threshold: threshold_34(k) + tau,
            count: 0,
            steps: 0,
            halted: false,
        })
    }
}

impl Monitor for SvtMonitor {
    fn step(&mut self, bit: u8) -> Result<Verdict> {
        check_step(bit, self.steps, self.t, self.halted)?;
        self.steps += 1;
        self.count += bit as u64;
        let nu = match self.mode {
            NoiseMode::Seeded => laplace_sample(4.0 / self.eps, &mut self.rng)?,
            NoiseMode::Zero => 0.0,
        };
        if self.count as f64 + nu >= self.noisy_threshold {
            self.halted = true;
            return Ok(Verdict::Halt);
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

// ---------------------------------------------------------------------------
// Sampling monitor
// ---------------------------------------------------------------------------

/// The subsampling monitor: keep each 1-update independently with
/// probability `delta`, halt when the retained count reaches
/// `max(1, ceil(3k/4 * delta))`.
///
/// Flipping one update changes the transcript distribution only on the
/// event that the flipped update is retained — probability `delta` — so
/// every output prefix is `(0, delta)`-DP.
pub struct SamplingMonitor {
    t: usize,
    delta: f64,
    rng: RandomSource,
    retained: u64,
    needed: u64,
    steps: usize,
    halted: bool,
}

impl SamplingMonitor {
    pub fn new(t: usize, k: u64, delta: f64, rng: RandomSource) -> Result<Self> {
        if t == 0 {
            param_err!("horizon must be positive");
        }
        check_k(k)?;
        if !(0.0 < delta && delta < 1.0) {
            param_err!("sampling rate delta must lie in (0,1), got {delta}");
        }
        Ok(SamplingMonitor {
            t,
            delta,
            rng,
            retained: 0,
            needed: retention_target(k, delta),
            steps: 0,
            halted: false,
        })
    }
}

///`max(1, ceil(3k/4 * delta))` — the retained-count target.
pub(crate) fn retention_target(k: u64, delta: f64) -> u64 {
    ((threshold_34(k) * delta).ceil() as u64).max(1)
}

impl Monitor for SamplingMonitor {
    fn step(&mut self, bit: u8) -> Result<Verdict> {
        check_step(bit, self.steps, self.t, self.halted)?;
        self.steps += 1;
        if bit == 1 && bernoulli(self.delta, &mut self.rng)? {
            self.retained += 1;
            if self.retained >= self.needed {
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

/// The exact transcript distribution of the sampling monitor on `stream`,
/// as a distribution over halting times: outcome `t` in `1..=T` is "first ⊤
/// at step `t`", outcome 0 is "never halts".
///
/// The monitor halts at step `t` iff `Δ_t = 1`, that update is retained, and
/// exactly `needed - 1` of the earlier `n_t - 1` ones were retained — a
/// Binomial point mass, so the whole distribution is closed-form. This is
/// the reference oracle the Monte-Carlo machinery is validated against.
pub fn sampling_transcript_distribution(
    stream: &UpdateStream,
    k: u64,
    delta: f64,
) -> Result<FiniteDistribution> {
    check_k(k)?;
    if !(0.0 < delta && delta < 1.0) {
        param_err!("sampling rate delta must lie in (0,1), got {delta}");
    }
    let needed = retention_target(k, delta);
    let m = needed as usize;
    let counts = stream.prefix_counts();
    let mut entries: Vec<(u64, f64)> = Vec::with_capacity(stream.len() + 1);
    let mut total = 0.0;
    for t in 1..=stream.len() {
        let p = if stream.bit(t) == 1 {
            let earlier = (counts[t - 1] - 1) as usize;
            delta * binomial_pmf(earlier, m - 1, delta)
        } else {
            0.0
        };
        total += p;
        entries.push((t as u64, p));
    }
    entries.push((0, (1.0 - total).max(0.0)));
    FiniteDistribution::new(entries)
}

/// `Pr[Binomial(n, p) = m]` by a stable multiplicative recurrence.
fn binomial_pmf(n: usize, m: usize, p: f64) -> f64 {
    if m > n {
        return 0.0;
    }
    // Multiply C(n,m) p^m (1-p)^(n-m) one factor at a time: each factor
    // C(n,i)/C(n,i-1) * p = (n-i+1)/i * p keeps the running product in range.
    let mut acc = (1.0 - p).powi((n - m) as i32);
    for i in 1..=m {
        acc *= (n - i + 1) as f64 / i as f64 * p;
    }
    acc
}

// ---------------------------------------------------------------------------
// Exact monitor
// ---------------------------------------------------------------------------

/// Halts exactly at the first step with `n_t >= 3k/4`. Deterministically
/// successful on every stream — and therefore nowhere near private.
pub struct ExactMonitor {
    t: usize,
    k: u64,
    count: u64,
    steps: usize,
    halted: bool,
}

impl ExactMonitor {
    pub fn new(t: usize, k: u64) -> Result<Self> {
        if t == 0 {
            param_err!("horizon must be positive");
        }
        check_k(k)?;
        Ok(ExactMonitor { t, k, count: 0, steps: 0, halted: false })
    }
}

impl Monitor for ExactMonitor {
    fn step(&mut self, bit: u8) -> Result<Verdict> {
        check_step(bit, self.steps, self.t, self.halted)?;
        self.steps += 1;
        self.count += bit as u64;
        if self.count as f64 >= threshold_34(self.k) {
            self.halted = true;
            return Ok(Verdict::Halt);
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

// ---------------------------------------------------------------------------
// Counter → monitor reduction
// ---------------------------------------------------------------------------

/// Monitor built from any counter: halt the first time the estimate reaches
/// `3k/4`. If the counter's worst-step error stays below `k/4` on a run, the
/// run satisfies the success rule — estimates at `n_t < k/2` stay below
/// `3k/4`, and the estimate at the first `n_t = k` step lands above it. The
/// reduction inherits whatever privacy the counter's estimate sequence has,
/// since the verdict stream is a function of the estimates alone.
pub struct CounterMonitor {
    counter: Box<dyn Counter + Send>,
    k: u64,
    halted: bool,
}

impl CounterMonitor {
    pub fn new(counter: Box<dyn Counter + Send>, k: u64) -> Result<Self> {
        check_k(k)?;
        if counter.steps_taken() != 0 {
            param_err!("counter already consumed {} steps", counter.steps_taken());
        }
        Ok(CounterMonitor { counter, k, halted: false })
    }
}

impl Monitor for CounterMonitor {
    fn step(&mut self, bit: u8) -> Result<Verdict> {
        check_step(bit, self.counter.steps_taken(), self.counter.horizon(), self.halted)?;
        let estimate = self.counter.step(bit)?;
        if estimate >= threshold_34(self.k) {
            self.halted = true;
            return Ok(Verdict::Halt);
        }
        Ok(Verdict::Continue)
    }

    fn horizon(&self) -> usize {
        self.counter.horizon()
    }

    fn steps_taken(&self) -> usize {
        self.counter.steps_taken()
    }

    fn halted(&self) -> bool {
        self.halted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::hockey_stick_divergence;
    use crate::mechanisms::run_monitor;

    #[test]
    fn noiseless_svt_halts_at_three_quarters() {
        // k = 4: threshold 3. First n_t >= 3 on the all-ones stream is t = 3.
        let stream = UpdateStream::ones(8).unwrap();
        let mut m = SvtMonitor::new(8, 4, 1.0, NoiseMode::Zero, RandomSource::new(0, 0)).unwrap();
        assert_eq!(run_monitor(&mut m, &stream).unwrap(), Some(3));
        println!("[PASS] noiseless sparse-vector halts at the first n_t >= 3k/4");
    }

    #[test]
    fn exact_monitor_is_deterministically_correct() {
        // k = 4: halts at the ceil(3k/4)-th one, wherever it falls.
        let stream = UpdateStream::new(vec![0, 1, 0, 1, 1, 0, 1, 0]).unwrap();
        let mut m = ExactMonitor::new(8, 4).unwrap();
        assert_eq!(run_monitor(&mut m, &stream).unwrap(), Some(5)); // 3rd one at t=5
        let zeros = UpdateStream::zeros(8).unwrap();
        let mut m = ExactMonitor::new(8, 4).unwrap();
        assert_eq!(run_monitor(&mut m, &zeros).unwrap(), None);
        println!("[PASS] exact monitor halts exactly at the ceil(3k/4)-th one");
    }

    #[test]
    fn retention_target_handles_small_rates() {
        assert_eq!(retention_target(8, 1.0 / 800.0), 1); // ceil(0.0075) -> 1
        assert_eq!(retention_target(8, 0.5), 3); // ceil(3.0)
        assert_eq!(retention_target(100, 0.1), 8); // ceil(7.5)
        println!("[PASS] retention target max(1, ceil(3k/4 * delta)) checks out");
    }

    #[test]
    fn sampling_transcript_distribution_matches_monte_carlo() {
        let stream = UpdateStream::new(vec![1, 1, 0, 1, 1, 1, 0, 1]).unwrap();
        let (k, delta) = (4, 0.3);
        let exact = sampling_transcript_distribution(&stream, k, delta).unwrap();
        let trials = 200_000u64;
        let mut counts = vec![0u64; stream.len() + 1];
        for i in 0..trials {
            let mut m =
                SamplingMonitor::new(8, k, delta, RandomSource::new(0xeffe, i)).unwrap();
            match run_monitor(&mut m, &stream).unwrap() {
                Some(t) => counts[t] += 1,
                None => counts[0] += 1,
            }
        }
        for (x, p) in exact.outcomes() {
            let freq = counts[x as usize] as f64 / trials as f64;
            assert!(
                (freq - p).abs() < 0.005,
                "outcome {x}: exact {p} vs empirical {freq}"
            );
        }
        println!("[PASS] closed-form sampling transcript matches 2*10^5 trials");
    }

    #[test]
    fn sampling_transcripts_are_zero_delta_indistinguishable() {
        // Exhaustive desk-scale DP check at eps = 0: over every stream of
        // length <= 6 and every neighbor, the transcript distributions stay
        // within total variation delta.
        let delta = 0.2;
        let k = 4;
        for t in 1..=6usize {
            for pattern in 0u32..(1 << t) {
                let bits: Vec<u8> = (0..t).map(|i| ((pattern >> i) & 1) as u8).collect();
                let stream = UpdateStream::new(bits).unwrap();
                let p = sampling_transcript_distribution(&stream, k, delta).unwrap();
                for neighbor in stream.neighbors() {
                    let q = sampling_transcript_distribution(&neighbor, k, delta).unwrap();
                    let fwd = hockey_stick_divergence(&p, &q, 0.0).unwrap();
                    let bwd = hockey_stick_divergence(&q, &p, 0.0).unwrap();
                    assert!(
                        fwd <= delta + 1e-12 && bwd <= delta + 1e-12,
                        "stream {stream} neighbor {neighbor}: {fwd} / {bwd}"
                    );
                }
            }
        }
        println!("[PASS] sampling monitor transcripts are (0, delta)-DP for T <= 6");
    }

    #[test]
    fn counter_monitor_inherits_counter_behavior() {
        use crate::mechanisms::counter::ZeroCounter;
        // Zero counter never reaches 3k/4 for k >= 1.
        let stream = UpdateStream::ones(6).unwrap();
        let mut m = CounterMonitor::new(Box::new(ZeroCounter::new(6).unwrap()), 2).unwrap();
        assert_eq!(run_monitor(&mut m, &stream).unwrap(), None);
        println!("[PASS] zero-counter monitor never halts");
    }

    #[test]
    fn seeded_svt_runs_replay_deterministically() {
        // The monitor state is (n_t, draws so far) — nothing positional — so
        // a seeded run is a pure function of (seed, stream).
        let stream = UpdateStream::new(vec![0, 1, 1, 0, 1, 1, 1, 1]).unwrap();
        let run = |seed: u64| {
            let mut m =
                SvtMonitor::new(8, 4, 0.7, NoiseMode::Seeded, RandomSource::new(seed, 5))
                    .unwrap();
            run_monitor(&mut m, &stream).unwrap()
        };
        assert_eq!(run(33), run(33));
        assert_eq!(run(34), run(34));
        println!("[PASS] seeded sparse-vector runs replay deterministically");
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        for (n, p) in [(0usize, 0.3), (5, 0.2), (17, 0.9)] {
            let total: f64 = (0..=n).map(|m| binomial_pmf(n, m, p)).sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n} p={p}: {total}");
        }
        assert_eq!(binomial_pmf(3, 5, 0.5), 0.0);
        println!("[PASS] binomial pmf normalizes");
    }

    #[test]
    fn parameter_domains_are_enforced() {
        let rng = RandomSource::new(0, 0);
        assert!(SvtMonitor::new(0, 4, 1.0, NoiseMode::Zero, rng.clone()).is_err());
        assert!(SvtMonitor::new(8, 0, 1.0, NoiseMode::Zero, rng.clone()).is_err());
        assert!(SvtMonitor::new(8, 4, 0.0, NoiseMode::Zero, rng.clone()).is_err());
        assert!(SamplingMonitor::new(8, 4, 0.0, rng.clone()).is_err());
        assert!(SamplingMonitor::new(8, 4, 1.0, rng.clone()).is_err());
        assert!(ExactMonitor::new(8, 0).is_err());
        println!("[PASS] monitor constructors validate their domains");
    }
}
