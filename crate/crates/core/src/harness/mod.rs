//! The experiment harness: configuration, dispatch, reporting, and the
//! stream ↔ threshold-query adapter.
//!
//! The `dplab` binary is a thin clap front-end over [`run_experiment`]; all
//! behavior worth testing lives here. Reports are plain structured text —
//! `key=value` lines plus comma-separated tables — so a pinned seed gives a
//! byte-stable regression artifact.

pub mod adapter;
pub mod config;
pub mod report;
pub mod run;

pub use adapter::{stream_to_query_instance, QueryDataset};
pub use config::{thread_cap, ExperimentConfig, ExperimentKind};
pub use report::{emit_report, Report, Table};
pub use run::{
    canonical_streams, run_experiment, RunOutcome, SVT_THRESHOLD_C, TREE_ENVELOPE_C,
};
