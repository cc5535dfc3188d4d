//! Adapter between update streams and threshold-query datasets.
//!
//! A monitor consumes a bit stream; a threshold-query data structure holds a
//! finite set of reals and answers, for a non-decreasing sequence of query
//! values, how many stored reals are at most each value. The two pictures
//! are exchangeable: send a length-`T` stream to the point set
//! `{i/(T+1) : Δ_i = 1}` and the query ladder `(1/T, 2/T, …, T/T)`. Because
//! `i/(T+1) ≤ j/T` exactly when `i ≤ j` (for `1 ≤ i, j ≤ T`), the count of
//! points at most the `t`-th query equals the prefix count `n_t`, so any
//! monitor statement transfers verbatim to threshold queries and back.
//!
//! The mapping is also reversible: distinct streams give distinct point
//! sets, and the stream is recovered from a point set by reading off
//! `i = p·(T+1)` for each point `p`.

use crate::error::{param_err, Result};
use crate::stream::UpdateStream;

/// A finite multiset of reals in `[0,1]` plus a sorted query sequence, the
/// instance format for offline threshold-query evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryDataset {
    points: Vec<f64>,
    queries: Vec<f64>,
}

impl QueryDataset {
    /// Build a dataset, canonicalizing the point multiset into sorted order.
    /// Every value must lie in `[0,1]` and the queries must be
    /// non-decreasing as given.
    pub fn new(mut points: Vec<f64>, queries: Vec<f64>) -> Result<Self> {
        for &p in &points {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                param_err!("point {p} lies outside [0,1]");
            }
        }
        for &q in &queries {
            if !(0.0..=1.0).contains(&q) || q.is_nan() {
                param_err!("query {q} lies outside [0,1]");
            }
        }
        if queries.windows(2).any(|w| w[0] > w[1]) {
            param_err!("queries must be non-decreasing");
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("no NaN after validation"));
        Ok(QueryDataset { points, queries })
    }

    /// The stored points, sorted ascending.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// The query values, non-decreasing.
    pub fn queries(&self) -> &[f64] {
        &self.queries
    }

    /// How many points are at most `q` — the quantity a threshold-query
    /// structure must answer. Runs in `O(log n)` on the sorted points.
    pub fn count_at_most(&self, q: f64) -> u64 {
        self.points.partition_point(|&p| p <= q) as u64
    }
}

/// Reduce a monitor instance to a threshold-query instance: point `i/(T+1)`
/// for every 1-update at step `i`, queried at `(1/T, 2/T, …, T/T)`.
pub fn stream_to_query_instance(stream: &UpdateStream) -> QueryDataset {
    let t = stream.len();
    let denom = (t + 1) as f64;
    let points = (1..=t)
        .filter(|&i| stream.bit(i) == 1)
        .map(|i| i as f64 / denom)
        .collect();
    let queries = (1..=t).map(|j| j as f64 / t as f64).collect();
    QueryDataset { points, queries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{uniform_below, RandomSource};

    #[test]
    fn worked_example_maps_exactly() {
        let stream = UpdateStream::new(vec![1, 0, 1]).unwrap();
        let ds = stream_to_query_instance(&stream);
        assert_eq!(ds.points(), &[0.25, 0.75]);
        assert_eq!(ds.queries(), &[1.0 / 3.0, 2.0 / 3.0, 1.0]);
        println!("[PASS] (1,0,1) maps to points {{0.25, 0.75}} and queries (1/3, 2/3, 1)");
    }

    #[test]
    fn all_zero_stream_gives_empty_points() {
        let ds = stream_to_query_instance(&UpdateStream::zeros(5).unwrap());
        assert!(ds.points().is_empty());
        assert_eq!(ds.queries().len(), 5);
        assert_eq!(ds.count_at_most(1.0), 0);
        println!("[PASS] all-zero stream maps to an empty point set");
    }

    /// The load-bearing inequality: `i/(T+1) ≤ j/T` iff `i ≤ j`, checked
    /// through the public API on single-one streams — every (i, j) pair for
    /// every horizon up to 64.
    #[test]
    fn grid_identity_exhaustive_to_64() {
        for t in 1..=64usize {
            for i in 1..=t {
                let mut bits = vec![0u8; t];
                bits[i - 1] = 1;
                let ds = stream_to_query_instance(&UpdateStream::new(bits).unwrap());
                for j in 1..=t {
                    let expect = u64::from(i <= j);
                    assert_eq!(
                        ds.count_at_most(ds.queries()[j - 1]),
                        expect,
                        "t={t} i={i} j={j}"
                    );
                }
            }
        }
        println!("[PASS] i/(T+1) <= j/T iff i <= j, exhaustively for T <= 64");
    }

    /// Prefix-count preservation on full streams: all-ones (which exercises
    /// every grid pair at once), alternating, and seeded random streams.
    #[test]
    fn prefix_counts_preserved_on_streams() {
        let mut rng = RandomSource::new(0xadab, 0);
        for t in 1..=64usize {
            let ones = UpdateStream::ones(t).unwrap();
            let alternating =
                UpdateStream::new((1..=t).map(|i| (i % 2) as u8).collect()).unwrap();
            let random = UpdateStream::new(
                (0..t)
                    .map(|_| uniform_below(2, &mut rng).unwrap() as u8)
                    .collect(),
            )
            .unwrap();
            for stream in [ones, alternating, random] {
                let ds = stream_to_query_instance(&stream);
                let counts = stream.prefix_counts();
                for j in 1..=t {
                    assert_eq!(
                        ds.count_at_most(ds.queries()[j - 1]),
                        counts[j - 1],
                        "t={t} j={j} stream={stream}"
                    );
                }
            }
        }
        println!("[PASS] point counts below q_t equal prefix counts n_t for T <= 64");
    }

    /// For fixed T the map stream -> point set is injective and reversible.
    #[test]
    fn weight_preserving_bijection_small_t() {
        let t = 6usize;
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << t) {
            let bits: Vec<u8> = (0..t).map(|i| ((mask >> i) & 1) as u8).collect();
            let stream = UpdateStream::new(bits).unwrap();
            let ds = stream_to_query_instance(&stream);
            assert_eq!(ds.points().len() as u64, stream.weight());
            // Recover the stream: i = p * (T+1) is exact for these dyadic-free
            // rationals because i/(T+1) * (T+1) round-trips below 2^53.
            let mut recovered = vec![0u8; t];
            for &p in ds.points() {
                let i = (p * (t + 1) as f64).round() as usize;
                recovered[i - 1] = 1;
            }
            assert_eq!(recovered, stream.bits());
            // Injectivity: hash the point list's bit patterns.
            let key: Vec<u64> = ds.points().iter().map(|p| p.to_bits()).collect();
            assert!(seen.insert(key), "duplicate point set for mask {mask}");
        }
        assert_eq!(seen.len(), 1 << t);
        println!("[PASS] stream -> point set is a bijection at T = 6");
    }

    #[test]
    fn dataset_validation_rejects_bad_values() {
        assert!(QueryDataset::new(vec![1.5], vec![]).is_err());
        assert!(QueryDataset::new(vec![-0.1], vec![]).is_err());
        assert!(QueryDataset::new(vec![], vec![0.5, 0.4]).is_err());
        assert!(QueryDataset::new(vec![f64::NAN], vec![]).is_err());
        let ds = QueryDataset::new(vec![0.9, 0.1, 0.5], vec![0.2, 0.2, 0.8]).unwrap();
        assert_eq!(ds.points(), &[0.1, 0.5, 0.9]);
        assert_eq!(ds.count_at_most(0.5), 2);
        println!("[PASS] dataset validation enforces range and query order");
    }
}
