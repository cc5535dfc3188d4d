//! The success judge for threshold monitors.
//!
//! A monitor run on a stream is *successful* when both requirements hold:
//!
//! * it never emitted ⊤ at a step with `n_t < k/2`, and
//! * if the stream ever reaches `n_t >= k`, the monitor had emitted ⊤ at or
//!   before the first such step.
//!
//! Halting anywhere in the free zone `k/2 <= n_t < k` is neither rewarded
//! nor punished. Since a monitor stops at its first ⊤, "⊤ at every step with
//! `n_t >= k`" collapses to the halting-time condition above.

use crate::error::{param_err, Result};
use crate::mechanisms::{run_monitor, MonitorSpec};
use crate::rng::RandomSource;
use crate::stream::UpdateStream;
use rayon::prelude::*;

/// Judge a single run from its halting step (1-indexed; `None` = never ⊤).
pub fn run_is_successful(stream: &UpdateStream, k: u64, halt: Option<usize>) -> bool {
    let counts = stream.prefix_counts();
    let first_k = (1..=stream.len()).find(|&t| counts[t - 1] >= k);
    match halt {
        Some(h) => {
            // ⊤ with n_h < k/2 breaks the quiet requirement (integer n_h:
            // n_h < k/2 iff 2 n_h < k).
            if 2 * counts[h - 1] < k {
                return false;
            }
            match first_k {
                Some(t) => h <= t,
                None => true,
            }
        }
        None => first_k.is_none(),
    }
}

/// Monte-Carlo estimate of the success probability of `spec` on `stream`
/// over `trials` independent runs. Trial `i` draws its noise from the
/// substream `rng.derive(i)`, so any single trial can be replayed alone.
pub fn evaluate_success(
    spec: &MonitorSpec,
    stream: &UpdateStream,
    trials: u64,
    rng: &RandomSource,
) -> Result<f64> {
    if trials == 0 {
        param_err!("need at least one trial");
    }
    let k = match spec.threshold() {
        Some(k) => k,
        None => param_err!("success is undefined for monitors without a threshold level"),
    };
    let successes = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let mut monitor = spec.build(rng.derive(i))?;
            let halt = run_monitor(monitor.as_mut(), stream)?;
            Ok(run_is_successful(stream, k, halt) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(successes as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn success_rule_hand_cases() {
        // k = 4, stream with counts 1,2,2,3,4,4: first n_t >= 4 at t = 5;
        // quiet zone is n_t < 2, i.e. t = 1.
        let stream = UpdateStream::new(vec![1, 1, 0, 1, 1, 0]).unwrap();
        let k = 4;
        assert!(!run_is_successful(&stream, k, Some(1))); // n=1 < k/2
        assert!(run_is_successful(&stream, k, Some(2))); // n=2, free zone
        assert!(run_is_successful(&stream, k, Some(5))); // at the deadline
        assert!(!run_is_successful(&stream, k, Some(6))); // past the deadline
        assert!(!run_is_successful(&stream, k, None)); // never ⊤ but n hit k
        println!("[PASS] success rule matches hand cases");
    }

    #[test]
    fn quiet_streams_require_silence() {
        // Stream never reaches k/2: any ⊤ is failure, silence is success.
        let stream = UpdateStream::new(vec![1, 0, 0, 0]).unwrap();
        let k = 4;
        assert!(run_is_successful(&stream, k, None));
        assert!(!run_is_successful(&stream, k, Some(1)));
        // Free zone without reaching k: both behaviors succeed.
        let stream = UpdateStream::new(vec![1, 1, 1, 0]).unwrap();
        assert!(run_is_successful(&stream, k, None));
        assert!(run_is_successful(&stream, k, Some(3))); // n=3 in [2,4)
        println!("[PASS] silence is judged correctly on sub-threshold streams");
    }

    #[test]
    fn exact_monitor_succeeds_everywhere() {
        // Spot-check on a spread of streams; the exact monitor is correct by
        // construction so its estimated success probability is exactly 1.
        let rng = RandomSource::new(7, 0);
        for bits in [vec![0, 0, 0, 0, 0, 0], vec![1, 1, 1, 1, 1, 1], vec![0, 1, 1, 0, 1, 1]] {
            let stream = UpdateStream::new(bits).unwrap();
            let spec = MonitorSpec::Exact { t: stream.len(), k: 4 };
            let s = evaluate_success(&spec, &stream, 10, &rng).unwrap();
            assert_eq!(s, 1.0, "stream {stream}");
        }
        println!("[PASS] exact monitor succeeds on every stream");
    }

    #[test]
    fn never_halt_fails_exactly_when_k_is_reached() {
        let rng = RandomSource::new(7, 1);
        let spec = MonitorSpec::ZeroCounterMonitor { t: 6, k: 4 };
        let quiet = UpdateStream::new(vec![1, 0, 0, 1, 0, 0]).unwrap();
        assert_eq!(evaluate_success(&spec, &quiet, 10, &rng).unwrap(), 1.0);
        let loud = UpdateStream::new(vec![1, 1, 1, 1, 0, 0]).unwrap();
        assert_eq!(evaluate_success(&spec, &loud, 10, &rng).unwrap(), 0.0);
        println!("[PASS] silent monitors succeed iff the stream stays under k");
    }
}
