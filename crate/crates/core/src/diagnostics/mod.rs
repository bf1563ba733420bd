//! Empirical diagnostics over truncations and integer sets.
//!
//! "Dense" is only ever approximated here: every routine takes its epsilon,
//! resolution or bound explicitly and reports what it scanned.

pub mod accumulation;
pub mod aps;
pub mod coverage;
pub mod density;
pub mod gaps;
pub mod ratios;

use std::collections::HashMap;

pub use accumulation::{closure_checks, estimate_accumulation, AccumulationApprox, CheckStatus, ClosureReport};
pub use aps::{find_3aps, find_3aps_in};
pub use coverage::{coverage, coverage_of_truncation, coverage_streaming, CoverageReport, UncoveredProbe};
pub use density::{estimate_density, estimate_density_values, DensityChkpt, DensityEstimate, DensityVerdict};
pub use gaps::{count_ratios_in, ratio_gaps, ratio_gaps_of, verify_gap, Gap, GapMode, GapReport};
pub use ratios::{ratio_profile, ratio_profile_values, RatioProfile};

// Dense cell tables are used up to this many cells, a hash map beyond.
const DENSE_CELL_LIMIT: usize = 1 << 22;

/// Uniform grid over `[0, 1]^k` bucketing points for fixed-radius queries.
///
/// The cell side is at least the query radius, so every point within the
/// radius of a query lies in the query's cell or an adjacent one: lookups
/// are exact, never approximate.
pub(crate) struct PointIndex {
    dim: usize,
    cell: f64,
    per_axis: usize,
    points: Vec<f64>,
    buckets: Vec<Vec<u32>>,
    dense: Option<Vec<u32>>,
    sparse: HashMap<Vec<u32>, u32>,
    offsets: Vec<Vec<i64>>,
}

const NO_BUCKET: u32 = u32::MAX;

impl PointIndex {
    /// Indexes `points` (flat, `dim` coordinates each) for radius `radius`.
    pub(crate) fn new(dim: usize, radius: f64, points: Vec<f64>) -> Self {
        let cell = radius * (1.0 + 1e-9);
        let per_axis = (1.0 / cell).floor() as usize + 1;
        let total = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(per_axis));
        let dense = total.filter(|&t| t <= DENSE_CELL_LIMIT).map(|t| vec![NO_BUCKET; t]);
        let mut offsets = vec![Vec::new()];
        for _ in 0..dim {
            offsets = offsets
                .into_iter()
                .flat_map(|o: Vec<i64>| {
                    (-1..=1).map(move |d| {
                        let mut n = o.clone();
                        n.push(d);
                        n
                    })
                })
                .collect();
        }
        let mut index = PointIndex {
            dim,
            cell,
            per_axis,
            points,
            buckets: Vec::new(),
            dense,
            sparse: HashMap::new(),
            offsets,
        };
        for i in 0..index.len() {
            let key = index.cell_of(index.point(i));
            let b = match index.bucket_id(&key) {
                Some(b) => b,
                None => {
                    let b = index.buckets.len() as u32;
                    index.buckets.push(Vec::new());
                    match &mut index.dense {
                        Some(d) => {
                            let lin = linear(&key, index.per_axis);
                            d[lin] = b;
                        }
                        None => {
                            index.sparse.insert(key, b);
                        }
                    }
                    b
                }
            };
            index.buckets[b as usize].push(i as u32);
        }
        index
    }

    pub(crate) fn len(&self) -> usize {
        self.points.len() / self.dim.max(1)
    }

    pub(crate) fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub(crate) fn bucket(&self, b: usize) -> &[u32] {
        &self.buckets[b]
    }

    fn cell_of(&self, q: &[f64]) -> Vec<u32> {
        q.iter().map(|&c| ((c / self.cell).floor().max(0.0) as usize).min(self.per_axis - 1) as u32).collect()
    }

    fn bucket_id(&self, key: &[u32]) -> Option<u32> {
        match &self.dense {
            Some(d) => Some(d[linear(key, self.per_axis)]).filter(|&b| b != NO_BUCKET),
            None => self.sparse.get(key).copied(),
        }
    }

    /// Calls `f(bucket)` for every non-empty bucket adjacent to the cell of `q`;
    /// stops as soon as `f` returns false.
    pub(crate) fn for_each_bucket_near(&self, q: &[f64], mut f: impl FnMut(usize) -> bool) {
        let base = self.cell_of(q);
        let mut key = vec![0u32; self.dim];
        'outer: for off in &self.offsets {
            for ((k, &b), &d) in key.iter_mut().zip(&base).zip(off) {
                let v = b as i64 + d;
                if v < 0 || v >= self.per_axis as i64 {
                    continue 'outer;
                }
                *k = v as u32;
            }
            if let Some(b) = self.bucket_id(&key) {
                if !f(b as usize) {
                    return;
                }
            }
        }
    }

    /// First indexed point within `radius` of `q` accepted by `pred`.
    pub(crate) fn find_within(&self, q: &[f64], radius: f64, mut pred: impl FnMut(usize) -> bool) -> Option<usize> {
        let mut hit = None;
        self.for_each_bucket_near(q, |b| {
            for &i in &self.buckets[b] {
                let i = i as usize;
                if crate::geometry::euclidean(self.point(i), q) <= radius && pred(i) {
                    hit = Some(i);
                    return false;
                }
            }
            true
        });
        hit
    }
}

fn linear(key: &[u32], per_axis: usize) -> usize {
    key.iter().rev().fold(0usize, |acc, &c| acc * per_axis + c as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for dim in [2usize, 3] {
            let pts: Vec<f64> = (0..600 * dim).map(|_| rng.random::<f64>()).collect();
            for radius in [0.02, 0.1, 0.3] {
                let idx = PointIndex::new(dim, radius, pts.clone());
                for _ in 0..200 {
                    let q: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
                    let brute = (0..idx.len()).filter(|&i| crate::geometry::euclidean(idx.point(i), &q) <= radius).count();
                    let mut fast = 0;
                    idx.for_each_bucket_near(&q, |b| {
                        fast += idx
                            .bucket(b)
                            .iter()
                            .filter(|&&i| crate::geometry::euclidean(idx.point(i as usize), &q) <= radius)
                            .count();
                        true
                    });
                    assert_eq!(brute, fast);
                }
            }
        }
    }
}
