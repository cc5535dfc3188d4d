//! Shared parameter vocabulary: privacy budgets and noise modes.

use crate::error::{param_err, Result};

/// An `(eps, delta)` privacy budget. `eps >= 0`, `delta` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    pub eps: f64,
    pub delta: f64,
}

impl PrivacyParams {
    /// Validated constructor.
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            param_err!("eps must be finite and >= 0, got {eps}");
        }
        if !(0.0..1.0).contains(&delta) {
            param_err!("delta must lie in [0,1), got {delta}");
        }
        Ok(PrivacyParams { eps, delta })
    }

    /// Pure-DP budget (`delta = 0`).
    pub fn pure(eps: f64) -> Result<Self> {
        PrivacyParams::new(eps, 0.0)
    }
}

/// Whether a mechanism draws its calibrated noise or substitutes exact
/// zeros. The zero mode exists for tests: it turns every mechanism into a
/// deterministic function whose transcripts can be checked exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// Draw noise from the mechanism's seeded source (the real mechanism).
    Seeded,
    /// Replace every noise draw with 0 (deterministic test mode).
    Zero,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets_are_validated() {
        assert!(PrivacyParams::new(0.5, 0.0).is_ok());
        assert!(PrivacyParams::new(0.0, 0.999).is_ok());
        assert!(PrivacyParams::new(-0.1, 0.0).is_err());
        assert!(PrivacyParams::new(0.5, 1.0).is_err());
        assert!(PrivacyParams::new(f64::NAN, 0.0).is_err());
        println!("[PASS] privacy budgets validate their domains");
    }
}
