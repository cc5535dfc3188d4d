//! Counting and monitoring under continual observation.
//!
//! A data stream delivers one update bit per step; a mechanism must react
//! online, and its whole output sequence must protect any single update.
//! This crate assembles the pieces needed to study how well that can be
//! done for threshold monitoring and running counts:
//!
//! * [`mechanisms`] — private counters and threshold monitors (dyadic-tree
//!   counter, sparse-vector and subsampling monitors, a counter→monitor
//!   reduction), plus the success judge for monitor runs.
//! * [`adversary`] — the interval-halving construction of hard inputs that
//!   pins down how long any private monitor can stay accurate, with its
//!   accounting identity and failure-probability bound, and a reduction
//!   from online learning of point functions.
//! * [`mirror`] — the probability ladder and delayed randomized-response
//!   machine that answer the mirror problem under joint DP, with an exact
//!   transcript-level audit.
//! * [`predictor`] — a private online predictor for point functions built
//!   from a sparse histogram plus the mirror machine.
//! * [`harness`] — experiment configs, structured text reports, and the
//!   stream→threshold-query adapter used by the CLI.
//!
//! Everything randomized is driven by seeded substreams ([`rng`]) so every
//! experiment, audit and attack replays bit-for-bit.

// Parameter guards are written in negated form (`!(x > 0.0)`) on purpose:
// the negation fails closed on NaN, where the suggested `x <= 0.0` would
// wave a NaN straight through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod dist;
pub mod error;
pub mod harness;
pub mod mechanisms;
pub mod mirror;
pub mod params;
pub mod predictor;
pub mod rng;
pub mod stream;

pub use error::{Error, Result};
