//! Epsilon-coverage of probe points by a direction set.
//!
//! The probes are indexed, not the set: each direction (materialized or
//! streamed from a [`TupleSpace`]) marks the probes within epsilon of it, so
//! 10^8-tuple products are covered without ever being stored.

use std::sync::atomic::{AtomicBool, AtomicU32, AtomicUsize, Ordering};

use super::PointIndex;
use crate::engine::{DirectionSetTruncation, EnumerationMode, TupleSpace};
use crate::error::{config, Result};
use crate::geometry::{self, DirectionPoint, NormKind};

/// How many uncovered probes a report lists explicitly.
pub const UNCOVERED_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct UncoveredProbe {
    pub index: usize,
    pub coords: Vec<f64>,
    /// Within epsilon of a coordinate hyperplane.
    pub axis_adjacent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub epsilon: f64,
    pub probe_count: usize,
    pub covered: usize,
    pub fraction: f64,
    pub axis_adjacent_probes: usize,
    pub covered_excluding_axis: usize,
    /// Covered fraction of the probes that are not axis-adjacent.
    pub fraction_excluding_axis: f64,
    pub uncovered_total: usize,
    /// First [`UNCOVERED_CAP`] uncovered probes, by probe index.
    pub uncovered: Vec<UncoveredProbe>,
    /// Per-probe covered flags, in probe order.
    pub covered_mask: Vec<bool>,
    /// Directions supplied, or tuples planned by the enumeration mode.
    pub visited: u64,
    pub source: String,
}

struct CoverState {
    index: PointIndex,
    eps: f64,
    covered: Vec<AtomicBool>,
    remaining: Vec<AtomicU32>,
    total_remaining: AtomicUsize,
}

impl CoverState {
    fn new(probes: &[DirectionPoint], eps: f64) -> Self {
        let dim = probes[0].dim();
        let flat: Vec<f64> = probes.iter().flat_map(|p| p.coords().iter().copied()).collect();
        let index = PointIndex::new(dim, eps, flat);
        let remaining = (0..index.bucket_count()).map(|b| AtomicU32::new(index.bucket(b).len() as u32)).collect();
        CoverState {
            covered: (0..probes.len()).map(|_| AtomicBool::new(false)).collect(),
            total_remaining: AtomicUsize::new(probes.len()),
            remaining,
            index,
            eps,
        }
    }

    /// Marks probes within epsilon of `q`; false once every probe is covered.
    fn mark(&self, q: &[f64]) -> bool {
        self.index.for_each_bucket_near(q, |b| {
            if self.remaining[b].load(Ordering::Relaxed) == 0 {
                return true;
            }
            for &i in self.index.bucket(b) {
                let i = i as usize;
                if !self.covered[i].load(Ordering::Relaxed)
                    && geometry::euclidean(self.index.point(i), q) <= self.eps
                    && !self.covered[i].swap(true, Ordering::Relaxed)
                {
                    self.remaining[b].fetch_sub(1, Ordering::Relaxed);
                    self.total_remaining.fetch_sub(1, Ordering::Relaxed);
                }
            }
            true
        });
        self.total_remaining.load(Ordering::Relaxed) > 0
    }

    fn report(self, probes: &[DirectionPoint], visited: u64, source: String) -> CoverageReport {
        let mask: Vec<bool> = self.covered.iter().map(|c| c.load(Ordering::Relaxed)).collect();
        let eps = self.eps;
        let axis: Vec<bool> = probes.iter().map(|p| p.min_coord() < eps).collect();
        let covered = mask.iter().filter(|&&c| c).count();
        let axis_adjacent_probes = axis.iter().filter(|&&a| a).count();
        let covered_excluding_axis = mask.iter().zip(&axis).filter(|&(&c, &a)| c && !a).count();
        let non_axis = probes.len() - axis_adjacent_probes;
        let uncovered: Vec<UncoveredProbe> = mask
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .take(UNCOVERED_CAP)
            .map(|(i, _)| UncoveredProbe { index: i, coords: probes[i].coords().to_vec(), axis_adjacent: axis[i] })
            .collect();
        CoverageReport {
            epsilon: eps,
            probe_count: probes.len(),
            covered,
            fraction: covered as f64 / probes.len() as f64,
            axis_adjacent_probes,
            covered_excluding_axis,
            fraction_excluding_axis: if non_axis == 0 { 1.0 } else { covered_excluding_axis as f64 / non_axis as f64 },
            uncovered_total: probes.len() - covered,
            uncovered,
            covered_mask: mask,
            visited,
            source,
        }
    }
}

fn check_inputs(eps: f64, probes: &[DirectionPoint], dim: usize) -> Result<NormKind> {
    if !(eps > 0.0 && eps.is_finite()) {
        return config(format!("epsilon must be positive, got {eps}"));
    }
    let Some(first) = probes.first() else {
        return config("coverage needs at least one probe");
    };
    if probes.iter().any(|p| p.dim() != dim || p.norm_kind() != first.norm_kind()) {
        return config(format!("probes must all be {dim}-dimensional under one norm"));
    }
    Ok(first.norm_kind())
}

/// Coverage of `probes` by a materialized set of directions.
pub fn coverage(points: &[DirectionPoint], eps: f64, probes: &[DirectionPoint]) -> Result<CoverageReport> {
    let Some(first) = points.first() else {
        return config("coverage needs a non-empty direction set");
    };
    check_inputs(eps, probes, first.dim())?;
    if points.iter().any(|p| p.dim() != first.dim()) {
        return config("direction set mixes dimensions");
    }
    let state = CoverState::new(probes, eps);
    for p in points {
        if !state.mark(p.coords()) {
            break;
        }
    }
    Ok(state.report(probes, points.len() as u64, "points".into()))
}

/// Coverage of `probes` by a built truncation.
pub fn coverage_of_truncation(t: &DirectionSetTruncation, eps: f64, probes: &[DirectionPoint]) -> Result<CoverageReport> {
    let norm = probes.first().map(|p| p.norm_kind()).unwrap_or_default();
    coverage(&t.float_points(norm), eps, probes)
}

/// Coverage of `probes` by the directions of a streamed tuple product.
///
/// Exhaustive mode is exact for the truncation; sampled mode reports the
/// coverage of the sampled sub-multiset. Either way the result does not
/// depend on `workers`.
pub fn coverage_streaming(
    space: &TupleSpace,
    mode: EnumerationMode,
    eps: f64,
    probes: &[DirectionPoint],
    workers: usize,
) -> Result<CoverageReport> {
    let norm = check_inputs(eps, probes, space.dim())?;
    let state = CoverState::new(probes, eps);
    let k = space.dim();
    space.fold(
        mode,
        workers,
        || vec![0.0; k],
        |buf, t| {
            geometry::rho_u64_into(t, norm, buf);
            state.mark(buf)
        },
        |a, _| a,
    );
    // Early exit makes the number of tuples actually walked scheduling-dependent,
    // so the report carries the planned count instead.
    let visited = match mode {
        EnumerationMode::Exhaustive => u64::try_from(space.size()).unwrap_or(u64::MAX),
        EnumerationMode::Sampled { count, .. } => count,
    };
    Ok(state.report(probes, visited, mode.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{probe_grid, ProbeScheme};

    fn pt(c: &[f64]) -> DirectionPoint {
        DirectionPoint::new(c.to_vec(), NormKind::Euclidean).unwrap()
    }

    #[test]
    fn three_probe_example() {
        let probes = vec![pt(&[1.0, 0.0]), pt(&[0.6, 0.8]), pt(&[0.0, 1.0])];
        let set = vec![geometry::rho_integer(&[3, 4], NormKind::Euclidean).unwrap()];
        let r = coverage(&set, 0.05, &probes).unwrap();
        assert_eq!(r.covered, 1);
        assert!((r.fraction - 1.0 / 3.0).abs() < 1e-15);
        let idx: Vec<usize> = r.uncovered.iter().map(|u| u.index).collect();
        assert_eq!(idx, vec![0, 2]);
        assert!(r.uncovered.iter().all(|u| u.axis_adjacent));
    }

    #[test]
    fn streaming_matches_materialized() {
        let specs: Vec<crate::intsets::IntegerSetSpec> = vec!["primes".parse().unwrap(), "n-phi".parse().unwrap()];
        let (space, _) = TupleSpace::new(&specs, 3000, false).unwrap();
        let t = crate::engine::build_truncation(
            &specs,
            3000,
            false,
            EnumerationMode::Exhaustive,
            crate::engine::BuildOptions::default(),
        )
        .unwrap();
        let probes = probe_grid(2, 300, ProbeScheme::Grid, NormKind::Euclidean).unwrap();
        let a = coverage_of_truncation(&t, 0.01, &probes).unwrap();
        for workers in [1, 2] {
            let b = coverage_streaming(&space, EnumerationMode::Exhaustive, 0.01, &probes, workers).unwrap();
            assert_eq!(a.covered_mask, b.covered_mask);
        }
        // brute-force oracle on the mask
        let pts = t.float_points(NormKind::Euclidean);
        for (p, &c) in probes.iter().zip(&a.covered_mask) {
            let near = pts.iter().any(|q| geometry::distance(p, q).unwrap() <= 0.01);
            assert_eq!(near, c);
        }
    }

    #[test]
    fn bad_inputs() {
        let probes = vec![pt(&[1.0, 0.0])];
        let set = vec![pt(&[1.0, 0.0])];
        assert!(coverage(&set, 0.0, &probes).is_err());
        assert!(coverage(&[], 0.1, &probes).is_err());
        assert!(coverage(&set, 0.1, &[]).is_err());
    }
}
