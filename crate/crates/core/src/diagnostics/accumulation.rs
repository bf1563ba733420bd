//! Finite stand-ins for the accumulation points of a direction set, and the
//! permutation / projection closure checks run on them.
//!
//! A direction `x` of the base truncation `T(X_1)` is *persistent* when every
//! later rung `X_j` of the ladder contributes a fresh direction within epsilon
//! of it: a tuple with some coordinate in `(X_(j-1), X_j]` that is not a
//! multiple of `x`. Finite sets stop contributing fresh tuples, so they have
//! no persistent points.
//!
//! Fresh neighbours are searched constructively: for each coordinate `i`
//! (the anchor) and a spread of anchor values `u_i` in `(X_(j-1), X_j]`, the
//! other coordinates are bracketed around `u_i x_j / x_i`. Every candidate is
//! verified exactly, so persistence is never over-reported.

use rayon::prelude::*;

use super::PointIndex;
use crate::engine::{build_truncation, pairwise_distinct, BuildOptions, EnumerationMode, PrimitiveDirection};
use crate::error::{config, Result};
use crate::geometry::{self, IndexSubset, NormKind, Permutation};
use crate::intsets::IntegerSetSpec;
use crate::parallel::with_workers;

/// Anchor values tried per coordinate and rung.
pub const ANCHORS_PER_RUNG: usize = 16;
/// Violations listed explicitly per check.
pub const VIOLATION_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct AccumulationApprox {
    pub specs: Vec<IntegerSetSpec>,
    pub ladder: Vec<u64>,
    pub epsilon: f64,
    pub distinct: bool,
    pub norm: NormKind,
    /// Size of the base truncation `T(X_1)`.
    pub base_count: usize,
    /// Persistent directions, sorted.
    pub points: Vec<PrimitiveDirection>,
}

impl AccumulationApprox {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn float_points(&self) -> Vec<geometry::DirectionPoint> {
        self.points.iter().map(|p| p.to_point(self.norm)).collect()
    }
}

/// Persistent directions of the (distinct) direction set of `specs` along `ladder`.
pub fn estimate_accumulation(
    specs: &[IntegerSetSpec],
    ladder: &[u64],
    eps: f64,
    distinct: bool,
    norm: NormKind,
    opts: BuildOptions,
) -> Result<AccumulationApprox> {
    if ladder.len() < 3 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return config("the bound ladder needs >= 3 strictly increasing rungs");
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return config(format!("epsilon must be positive, got {eps}"));
    }
    let base = build_truncation(specs, ladder[0], distinct, EnumerationMode::Exhaustive, opts)?;
    if base.is_empty() {
        return config(format!("the truncation at the first rung {} is empty", ladder[0]));
    }
    let top = ladder[ladder.len() - 1];
    let sets: Vec<Vec<u64>> = specs.iter().map(|s| s.enumerate(top)).collect::<Result<_>>()?;
    for (s, spec) in sets.iter().zip(specs) {
        if s.is_empty() {
            return config(format!("`{spec}` has no elements <= {top}"));
        }
    }
    let finder = FreshFinder { sets: &sets, eps, distinct, norm };
    let points: Vec<PrimitiveDirection> = with_workers(opts.workers, || {
        base.points
            .par_iter()
            .filter(|p| ladder.windows(2).all(|w| finder.has_fresh_neighbour(p, w[0], w[1])))
            .cloned()
            .collect()
    });
    Ok(AccumulationApprox {
        specs: specs.to_vec(),
        ladder: ladder.to_vec(),
        epsilon: eps,
        distinct,
        norm,
        base_count: base.len(),
        points,
    })
}

struct FreshFinder<'a> {
    sets: &'a [Vec<u64>],
    eps: f64,
    distinct: bool,
    norm: NormKind,
}

impl FreshFinder<'_> {
    fn has_fresh_neighbour(&self, p: &PrimitiveDirection, prev: u64, cur: u64) -> bool {
        let k = p.dim();
        let x = p.to_point(self.norm);
        let x = x.coords();
        let mut tuple = vec![0u64; k];
        let mut image = vec![0.0; k];
        let mut options: Vec<Vec<u64>> = vec![Vec::new(); k];
        for anchor in 0..k {
            if x[anchor] == 0.0 {
                continue;
            }
            let set = &self.sets[anchor];
            let lo = set.partition_point(|&v| v <= prev);
            let hi = set.partition_point(|&v| v <= cur);
            if lo >= hi {
                continue;
            }
            let n = hi - lo;
            let picks = ANCHORS_PER_RUNG.min(n);
            for t in 0..picks {
                // spread evenly over the fresh range, always including both ends
                let idx = lo + if picks == 1 { n - 1 } else { t * (n - 1) / (picks - 1) };
                let ua = set[idx];
                let scale = ua as f64 / x[anchor];
                let mut feasible = true;
                for i in 0..k {
                    options[i].clear();
                    if i == anchor {
                        options[i].push(ua);
                        continue;
                    }
                    let s = &self.sets[i];
                    let target = x[i] * scale;
                    let j = s.partition_point(|&v| (v as f64) <= target);
                    if j > 0 {
                        options[i].push(s[j - 1]);
                    }
                    if j < s.len() {
                        options[i].push(s[j]);
                    }
                    feasible &= !options[i].is_empty();
                }
                if feasible && self.try_combinations(p, x, &options, &mut tuple, &mut image) {
                    return true;
                }
            }
        }
        false
    }

    fn try_combinations(
        &self,
        p: &PrimitiveDirection,
        x: &[f64],
        options: &[Vec<u64>],
        tuple: &mut [u64],
        image: &mut [f64],
    ) -> bool {
        let k = options.len();
        let mut idx = vec![0usize; k];
        loop {
            for i in 0..k {
                tuple[i] = options[i][idx[i]];
            }
            if (!self.distinct || pairwise_distinct(tuple))
                && !p.is_direction_of(tuple)
                && geometry::rho_u64_into(tuple, self.norm, image)
                && geometry::euclidean(image, x) <= self.eps
            {
                return true;
            }
            let mut i = k;
            loop {
                if i == 0 {
                    return false;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < options[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub point: PrimitiveDirection,
    /// The permutation images or index subset (1-based) that was checked.
    pub action: String,
    pub image: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CheckStatus {
    Checked { checked: u64, violation_count: u64, violations: Vec<Violation> },
    Skipped { reason: String },
}

impl CheckStatus {
    pub fn violation_count(&self) -> Option<u64> {
        match self {
            CheckStatus::Checked { violation_count, .. } => Some(*violation_count),
            CheckStatus::Skipped { .. } => None,
        }
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self, CheckStatus::Skipped { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureReport {
    pub epsilon: f64,
    /// Matching radius, twice the approximation's epsilon.
    pub tolerance: f64,
    pub approx_size: usize,
    /// Non-identity permutations preserving the spec tuple.
    pub permutations: Vec<Permutation>,
    pub permutation_check: CheckStatus,
    pub projection_check: CheckStatus,
}

fn one_based(p: &Permutation) -> String {
    let v: Vec<String> = p.images().iter().map(|i| (i + 1).to_string()).collect();
    format!("[{}]", v.join(" "))
}

fn subset_label(s: &IndexSubset) -> String {
    let v: Vec<String> = s.indices().iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Checks that the approximation is closed, up to `2 eps`, under the
/// permutations preserving the spec tuple and under `rho_I` for every proper
/// index subset `I` meeting a point.
pub fn closure_checks(approx: &AccumulationApprox, workers: usize) -> Result<ClosureReport> {
    let k = approx.specs.len();
    let tol = 2.0 * approx.epsilon;
    let permutations: Vec<Permutation> = Permutation::all(k)
        .into_iter()
        .filter(|p| !p.is_identity() && (0..k).all(|i| approx.specs[p.images()[i]] == approx.specs[i]))
        .collect();
    let mut report = ClosureReport {
        epsilon: approx.epsilon,
        tolerance: tol,
        approx_size: approx.len(),
        permutations: permutations.clone(),
        permutation_check: CheckStatus::Skipped { reason: String::new() },
        projection_check: CheckStatus::Skipped { reason: String::new() },
    };
    if approx.is_empty() {
        let reason = "the approximation is empty".to_string();
        report.permutation_check = CheckStatus::Skipped { reason: reason.clone() };
        report.projection_check = CheckStatus::Skipped { reason };
        return Ok(report);
    }
    let floats = approx.float_points();
    let flat: Vec<f64> = floats.iter().flat_map(|p| p.coords().iter().copied()).collect();
    let index = PointIndex::new(k, tol, flat);
    let matched = |q: &[f64]| index.find_within(q, tol, |_| true).is_some();

    report.permutation_check = if permutations.is_empty() {
        CheckStatus::Skipped { reason: "no coordinate permutation preserves the spec tuple".into() }
    } else {
        let found: Vec<Violation> = with_workers(workers, || {
            approx
                .points
                .par_iter()
                .zip(&floats)
                .flat_map_iter(|(p, x)| {
                    permutations.iter().filter_map(move |pi| {
                        let y = pi.apply(x.coords());
                        (!matched(&y)).then(|| Violation { point: p.clone(), action: one_based(pi), image: y })
                    })
                })
                .collect()
        });
        checked(approx.len() as u64 * permutations.len() as u64, found)
    };

    let top = approx.ladder[approx.ladder.len() - 1];
    let mut short = None;
    for spec in &approx.specs {
        let n = spec.enumerate(top)?.len();
        if n < k {
            short = Some(format!("`{spec}` has {n} < k = {k} elements up to {top}"));
            break;
        }
    }
    report.projection_check = match short {
        Some(reason) => CheckStatus::Skipped { reason },
        None => {
            let subsets = IndexSubset::proper_subsets(k);
            let results: Vec<(u64, Vec<Violation>)> = with_workers(workers, || {
                approx
                    .points
                    .par_iter()
                    .zip(&floats)
                    .map(|(p, x)| {
                        let mut n = 0;
                        let mut bad = Vec::new();
                        for s in subsets.iter().filter(|s| s.meets(x.coords())) {
                            n += 1;
                            let y = geometry::rho_projection(x, s).expect("subset meets the point");
                            if !matched(y.coords()) {
                                bad.push(Violation { point: p.clone(), action: subset_label(s), image: y.into_coords() });
                            }
                        }
                        (n, bad)
                    })
                    .collect()
            });
            let n = results.iter().map(|r| r.0).sum();
            checked(n, results.into_iter().flat_map(|r| r.1).collect())
        }
    };
    Ok(report)
}

fn checked(checked: u64, mut violations: Vec<Violation>) -> CheckStatus {
    let violation_count = violations.len() as u64;
    violations.truncate(VIOLATION_CAP);
    CheckStatus::Checked { checked, violation_count, violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> IntegerSetSpec {
        s.parse().unwrap()
    }

    fn opts() -> BuildOptions {
        BuildOptions::default()
    }

    #[test]
    fn finite_sets_have_no_persistent_points() {
        let u = vec![spec("explicit(1, 2)"), spec("explicit(1, 2)")];
        for eps in [0.01, 0.5, 2.0] {
            let a = estimate_accumulation(&u, &[2, 10, 100], eps, false, NormKind::Euclidean, opts()).unwrap();
            assert!(a.is_empty());
        }
    }

    #[test]
    fn naturals_persist_and_close() {
        let u = vec![spec("naturals"), spec("naturals")];
        let a = estimate_accumulation(&u, &[100, 300, 1000], 0.01, false, NormKind::Euclidean, opts()).unwrap();
        assert!(a.len() as f64 > 0.9 * a.base_count as f64);
        let r = closure_checks(&a, 0).unwrap();
        assert_eq!(r.permutations.len(), 1);
        assert_eq!(r.permutation_check.violation_count(), Some(0));
        assert_eq!(r.projection_check.violation_count(), Some(0));
    }

    #[test]
    fn gap_arc_is_avoided() {
        let u = vec![spec("block(5: 1..2)"), spec("block(5: 1..2)")];
        let a = estimate_accumulation(&u, &[200, 1000, 6000], 0.002, false, NormKind::Euclidean, opts()).unwrap();
        assert!(!a.is_empty());
        for p in &a.points {
            let (x, y) = (p.coords()[0] as f64, p.coords()[1] as f64);
            assert!(!(x / y > 2.01 && x / y < 2.49), "{p}");
        }
    }

    #[test]
    fn epsilon_monotone() {
        let u = vec![spec("primes"), spec("squares")];
        let small = estimate_accumulation(&u, &[100, 400, 2000], 0.005, false, NormKind::Euclidean, opts()).unwrap();
        let large = estimate_accumulation(&u, &[100, 400, 2000], 0.02, false, NormKind::Euclidean, opts()).unwrap();
        assert!(small.points.iter().all(|p| large.points.binary_search(p).is_ok()));
    }

    #[test]
    fn mixed_specs_skip_permutations() {
        let u = vec![spec("primes-ap(4, 1)"), spec("primes-ap(4, 3)")];
        let a = estimate_accumulation(&u, &[200, 1000, 5000], 0.02, false, NormKind::Euclidean, opts()).unwrap();
        let r = closure_checks(&a, 1).unwrap();
        assert!(r.permutation_check.is_skipped());
        assert!(!r.projection_check.is_skipped());
    }

    #[test]
    fn ladder_validation() {
        let u = vec![spec("naturals"), spec("naturals")];
        assert!(estimate_accumulation(&u, &[10, 100], 0.1, false, NormKind::Euclidean, opts()).is_err());
        assert!(estimate_accumulation(&u, &[10, 100, 50], 0.1, false, NormKind::Euclidean, opts()).is_err());
    }
}
