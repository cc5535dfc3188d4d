//! Jointly private mirroring of a bit stream.
//!
//! The mirror answers ⊤/⊥ per step, aiming to echo each 1-input, under a
//! delay constraint (never ⊤ before `K` prior 1s) and a joint privacy
//! constraint: for any position, the vector of answers at all *other*
//! positions must be `(eps, delta)`-indistinguishable when that position's
//! bit flips. The pieces:
//!
//! - [`ladder`]: the π probability ladder — a geometric ascent from δ' to
//!   the cap `1/(1+e^{ε'})`, mirrored down from `1-δ'`, whose consecutive
//!   rungs are `(ε', 0)`-indistinguishable;
//! - [`params`]: turning a target `(eps, delta)` into ladder parameters
//!   `(ε', δ')` via an advanced-composition certificate;
//! - [`state`]: the mirror itself plus mistake accounting and a halting
//!   monitor wrapper;
//! - [`audit`]: an exact, exhaustive joint-privacy audit at enumeration
//!   scale.

pub mod audit;
pub mod ladder;
pub mod params;
pub mod state;

pub use audit::{audit_jdp, audit_ladder, step_probabilities, JdpAuditReport, MAX_AUDIT_HORIZON};
pub use ladder::{build_pi_ladder, verify_pi_ladder, PiLadder, MAX_HALF_LENGTH};
pub use params::{composition_total, derive_mirror_params, MirrorParams};
pub use state::{
    mirror_mistakes, run_mirror, MirrorJudgment, MirrorMonitor, MirrorOutput, MirrorState,
};
