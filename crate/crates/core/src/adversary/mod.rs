//! Adversarial lower-bound machinery for threshold monitors.
//!
//! A monitor that is both private and accurate is impossible once the
//! horizon is long enough relative to its threshold. This module makes that
//! concrete and measurable:
//!
//! - [`halt`] — halting-time distributions and the oracle interface through
//!   which the adversary probes a monitor (closed-form or Monte-Carlo).
//! - [`hard`] — the interval-halving construction that turns `k + 1` oracle
//!   calls into a stream the monitor must miss.
//! - [`attack`] — the accounting checks tying the construction to the
//!   failure-probability bound, and a one-shot attack report.
//! - [`learning`] — the reduction from online learning of point functions:
//!   any private, low-mistake learner yields a private, accurate monitor,
//!   so the lower bound transfers to learners.

pub mod attack;
pub mod halt;
pub mod hard;
pub mod learning;

pub use attack::{attack_report, claim1_check, theorem_bound, AttackReport, Claim1Report};
pub use halt::{
    estimate_halt_distribution, monte_carlo_radius, ExactHaltOracle, HaltDistribution,
    HaltOracle, MonteCarloHaltOracle,
};
pub use hard::{build_hard_instance, hard_instance_horizon, Branch, HardInstance};
pub use learning::{
    learning_attack, AllZeroLearner, AttackCase, ConsistentPointLearner, LearnerFactory,
    LearnerKind, LearningAttackReport, OnlineLearner, RandomPointLearner,
};
