//! Private online prediction for point functions.
//!
//! A stream of queries arrives one per round; the machine answers a bit and
//! then sees the true label, and the whole answer sequence must be private
//! with respect to any single labeled example. For the class of point
//! functions this is solvable with a mistake count independent of the
//! horizon:
//!
//! - [`histogram`] — the stability-based sparse histogram used to privately
//!   identify the candidate target point;
//! - [`predict`] — the four-phase predictor built from the histogram, the
//!   jointly private mirror, and one noisy audit counter;
//! - [`env`] — realizable-stream generation, the labeled-example file
//!   format, and the non-private one-mistake baseline.

pub mod env;
pub mod histogram;
pub mod predict;

pub use env::{
    learner_mistakes, nonprivate_point_learner, read_labeled_stream, realizable_stream_generator,
    write_labeled_stream, LabeledExample,
};
pub use histogram::{histogram_threshold, sparse_histogram, sparse_histogram_at};
pub use predict::{run_predictor, PredictorRun, PredictorState};
