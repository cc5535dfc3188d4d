//! Privacy budget split for the mirror: from a target `(eps, delta)` to the
//! per-rung `(eps', delta')` the ladder needs.
//!
//! Changing one input bit shifts the rung index at no more than `2L` output
//! steps: at most two of those cross a hard boundary of the ladder (rung
//! 0 ↔ 1 and rung 2L ↔ beyond), each a `(0, delta')` step, and the rest are
//! pure `eps'` steps. Advanced composition over `m = 2L - 2` such steps at
//! slack `delta''` spends
//!
//! ```text
//! eps_total(eps') = m·eps'·(e^{eps'} - 1)/2 + eps'·sqrt(2 m ln(1/delta''))
//! ```
//!
//! Splitting `delta' = delta'' = delta/4` leaves `2 delta' + delta'' =
//! 3 delta / 4 <= delta`. The length `L` itself depends on `eps'` through
//! the ladder, so the largest workable `eps'` is found by scanning a fixed
//! geometric grid from `eps/2` downward — a fixed grid rather than a
//! bisection so the returned value is exactly monotone in `delta`.

use crate::error::{param_err, Result};
use crate::mirror::ladder::{build_pi_ladder, PiLadder};

/// The derived budget, with the numbers needed to re-check it.
#[derive(Debug, Clone, Copy)]
pub struct MirrorParams {
    /// Target parameters.
    pub eps: f64,
    pub delta: f64,
    /// Per-rung parameters for the ladder.
    pub eps_prime: f64,
    pub delta_prime: f64,
    /// Advanced-composition slack.
    pub delta_dprime: f64,
    /// Ladder half-length at these parameters.
    pub l: usize,
    /// Composed pure steps, `m = 2L - 2`.
    pub m: usize,
    /// The composition total at the returned `eps_prime`; at most `eps`.
    pub eps_total: f64,
    /// Total delta spent: `2 delta' + delta''`; at most `delta`.
    pub delta_total: f64,
}

/// Advanced-composition total for `m` pure-`eps_prime` steps at slack
/// `delta_dprime`.
pub fn composition_total(eps_prime: f64, m: usize, delta_dprime: f64) -> f64 {
    let m = m as f64;
    m * eps_prime * (eps_prime.exp() - 1.0) / 2.0
        + eps_prime * (2.0 * m * (1.0 / delta_dprime).ln()).sqrt()
}

/// Ladder half-length for `(eps_prime, delta_prime)` without materializing
/// the rungs: minimal `L` with `delta_prime e^{(L-1) eps_prime} >= cap`.
fn ladder_half_length(eps_prime: f64, delta_prime: f64) -> usize {
    let cap = 1.0 / (1.0 + eps_prime.exp());
    // Closed form, then nudge to the exact minimal integer to stay in
    // lockstep with the multiplicative loop in build_pi_ladder.
    let mut l = ((cap / delta_prime).ln() / eps_prime).ceil() as i64 + 1;
    while l > 1 && delta_prime * ((l as f64 - 2.0) * eps_prime).exp() >= cap {
        l -= 1;
    }
    while delta_prime * ((l as f64 - 1.0) * eps_prime).exp() < cap {
        l += 1;
    }
    l.max(1) as usize
}

/// Grid resolution for the `eps_prime` search.
const GRID_POINTS: usize = 2000;
/// Ratio between consecutive grid points (spans about six orders of
/// magnitude below `eps/2`).
const GRID_RATIO: f64 = 0.993;

/// Pick the largest grid `eps_prime` whose full composition total fits in
/// `eps`, with `delta' = delta'' = delta/4`, and return the budget
/// certificate together with the built ladder.
pub fn derive_mirror_params(eps: f64, delta: f64) -> Result<(MirrorParams, PiLadder)> {
    if !(eps > 0.0 && eps <= 2.0) {
        param_err!("eps must lie in (0, 2], got {eps}");
    }
    if !(delta > 0.0 && delta < 0.1) {
        param_err!("delta must lie in (0, 0.1), got {delta}");
    }
    let delta_prime = delta / 4.0;
    let delta_dprime = delta / 4.0;

    let mut eps_prime = eps / 2.0;
    for _ in 0..GRID_POINTS {
        let cap = 1.0 / (1.0 + eps_prime.exp());
        if delta_prime < cap {
            let l = ladder_half_length(eps_prime, delta_prime);
            if l > crate::mirror::ladder::MAX_HALF_LENGTH {
                // Length only grows as eps_prime shrinks, so no smaller grid
                // point can work either.
                param_err!(
                    "feasible eps_prime for eps={eps}, delta={delta} needs a ladder \
                     beyond the materialization limit"
                );
            }
            let m = 2 * l - 2;
            let eps_total = composition_total(eps_prime, m, delta_dprime);
            if eps_total <= eps {
                let ladder = build_pi_ladder(eps_prime, delta_prime)?;
                debug_assert_eq!(ladder.half_length(), l, "length shortcut out of lockstep");
                let params = MirrorParams {
                    eps,
                    delta,
                    eps_prime,
                    delta_prime,
                    delta_dprime,
                    l,
                    m,
                    eps_total,
                    delta_total: 2.0 * delta_prime + delta_dprime,
                };
                return Ok((params, ladder));
            }
        }
        eps_prime *= GRID_RATIO;
    }
    param_err!("no feasible eps_prime on the search grid for eps={eps}, delta={delta}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mirror::ladder::verify_pi_ladder;

    #[test]
    fn derived_budget_recomposes_under_the_target() {
        for (eps, delta) in [(1.0, 0.05), (2.0, 0.05), (0.5, 0.01), (0.1, 0.09)] {
            let (p, ladder) = derive_mirror_params(eps, delta).unwrap();
            // Re-evaluate the bound independently of the search.
            let total = composition_total(p.eps_prime, 2 * ladder.half_length() - 2, delta / 4.0);
            assert!(total <= eps + 1e-12, "({eps},{delta}): total {total}");
            assert!(p.delta_total <= delta + 1e-12);
            assert_eq!(p.l, ladder.half_length());
            assert!(verify_pi_ladder(&ladder));
            println!(
                "[PASS] ({eps}, {delta}) -> eps' = {:.5}, L = {}, total = {:.4}",
                p.eps_prime, p.l, total
            );
        }
    }

    #[test]
    fn single_step_budget_matches_hand_reduction() {
        // With m = 1 the bound is eps'(e^{eps'}-1)/2 + eps' sqrt(2 ln(4/delta)).
        let eps_prime = 0.2f64;
        let delta = 0.05f64;
        let by_hand = eps_prime * (eps_prime.exp() - 1.0) / 2.0
            + eps_prime * (2.0 * (4.0 / delta).ln()).sqrt();
        assert!((composition_total(eps_prime, 1, delta / 4.0) - by_hand).abs() < 1e-15);
        println!("[PASS] m = 1 composition reduces to the closed form");
    }

    #[test]
    fn doubling_delta_never_shrinks_eps_prime() {
        for eps in [0.3, 1.0, 2.0] {
            let mut delta = 0.002;
            let mut last = derive_mirror_params(eps, delta).unwrap().0.eps_prime;
            while delta * 2.0 < 0.1 {
                delta *= 2.0;
                let next = derive_mirror_params(eps, delta).unwrap().0.eps_prime;
                assert!(next >= last, "eps={eps} delta={delta}: {next} < {last}");
                last = next;
            }
        }
        println!("[PASS] eps' is monotone non-decreasing in delta on the fixed grid");
    }

    #[test]
    fn length_shortcut_agrees_with_the_built_ladder() {
        for eps_prime in [0.01f64, 0.1, 0.5, 1.0, 2.0] {
            for delta_prime in [0.0005, 0.01, 0.09] {
                if delta_prime >= 1.0 / (1.0 + eps_prime.exp()) {
                    continue;
                }
                let l = ladder_half_length(eps_prime, delta_prime);
                let ladder = build_pi_ladder(eps_prime, delta_prime).unwrap();
                assert_eq!(l, ladder.half_length(), "eps'={eps_prime} delta'={delta_prime}");
            }
        }
        println!("[PASS] closed-form ladder length matches the constructive loop");
    }

    #[test]
    fn out_of_domain_targets_are_rejected() {
        assert!(derive_mirror_params(0.0, 0.05).is_err());
        assert!(derive_mirror_params(2.1, 0.05).is_err());
        assert!(derive_mirror_params(1.0, 0.0).is_err());
        assert!(derive_mirror_params(1.0, 0.1).is_err());
        println!("[PASS] out-of-domain privacy targets are rejected");
    }
}
