//! Labeled-example streams: the environment the predictor plays against,
//! plus the non-private baseline it is measured against.

use crate::adversary::learning::{ConsistentPointLearner, OnlineLearner};
use crate::error::{param_err, Result};
use crate::rng::{uniform_below, RandomSource};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// One round of the prediction game: query point, then revealed bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledExample {
    pub x: u64,
    pub y: u8,
}

impl LabeledExample {
    pub fn new(x: u64, y: u8) -> Result<Self> {
        if y > 1 {
            param_err!("label must be 0 or 1, got {y}");
        }
        Ok(LabeledExample { x, y })
    }
}

/// A stream consistent with the point function at `x_star` over the domain
/// `{0, …, domain_size-1}`: rounds listed in `positive_positions`
/// (1-indexed) query `x_star` with label 1, every other round queries a
/// uniform non-target point with label 0.
pub fn realizable_stream_generator(
    x_star: u64,
    t: usize,
    positive_positions: &[usize],
    domain_size: u64,
    rng: &mut RandomSource,
) -> Result<Vec<LabeledExample>> {
    if domain_size < 2 {
        param_err!("domain must hold at least two elements, got {domain_size}");
    }
    if x_star >= domain_size {
        param_err!("target point {x_star} lies outside the domain of size {domain_size}");
    }
    let mut positive = vec![false; t + 1];
    for &pos in positive_positions {
        if pos == 0 || pos > t {
            param_err!("positive position {pos} outside 1..={t}");
        }
        positive[pos] = true;
    }
    let mut examples = Vec::with_capacity(t);
    for is_positive in positive.iter().skip(1) {
        if *is_positive {
            examples.push(LabeledExample { x: x_star, y: 1 });
        } else {
            // Uniform over the domain minus the target.
            let v = uniform_below(domain_size - 1, rng)?;
            let x = if v >= x_star { v + 1 } else { v };
            examples.push(LabeledExample { x, y: 0 });
        }
    }
    Ok(examples)
}

/// The optimal non-private learner for point functions: the all-zero
/// hypothesis until the first positive example, then the point function at
/// that example. Makes at most one mistake on realizable streams.
pub fn nonprivate_point_learner() -> ConsistentPointLearner {
    ConsistentPointLearner::default()
}

/// Play a hypothesis-based learner through a labeled stream and count its
/// prediction mistakes.
pub fn learner_mistakes(learner: &mut dyn OnlineLearner, examples: &[LabeledExample]) -> u64 {
    let mut mistakes = 0;
    for e in examples {
        if learner.predict(e.x) != (e.y == 1) {
            mistakes += 1;
        }
        learner.observe(e.x, e.y == 1);
    }
    mistakes
}

/// Write a labeled stream as one `x y` pair per line.
pub fn write_labeled_stream(path: &Path, examples: &[LabeledExample]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for e in examples {
        writeln!(out, "{} {}", e.x, e.y)?;
    }
    out.flush()?;
    Ok(())
}

/// Read a labeled stream written by [`write_labeled_stream`]. Blank lines
/// are ignored; anything else that does not parse as two integers is a
/// parameter error naming the line.
pub fn read_labeled_stream(path: &Path) -> Result<Vec<LabeledExample>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut examples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (Some(xs), Some(ys), None) = (parts.next(), parts.next(), parts.next()) else {
            param_err!("line {}: expected \"x y\", got {trimmed:?}", idx + 1);
        };
        let x: u64 = xs
            .parse()
            .map_err(|_| crate::error::Error::Parameter(format!("line {}: bad point {xs:?}", idx + 1)))?;
        let y: u8 = ys
            .parse()
            .map_err(|_| crate::error::Error::Parameter(format!("line {}: bad label {ys:?}", idx + 1)))?;
        examples.push(LabeledExample::new(x, y)?);
    }
    Ok(examples)
}
