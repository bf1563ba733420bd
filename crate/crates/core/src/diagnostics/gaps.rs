//! Exact gaps in the ratio set `{ a / b : a, b in A ∩ [1, X] }` over a scan interval.
//!
//! All comparisons are integer cross-multiplications; floats only appear in
//! reports. A gap is a maximal open sub-interval of the scan interval holding
//! no ratio, and only gaps at least `(hi - lo) / resolution` wide are reported.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{config, resource, Result};
use crate::intsets::IntegerSetSpec;
use crate::parallel::with_workers;

/// Largest pair count the pair-scan mode materializes.
pub const PAIR_SCAN_BUDGET: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapMode {
    /// Materialize every in-scan ratio, sort, and walk neighbours.
    PairScan,
    /// Bin the in-scan ratios into `2 * resolution` bins keeping exact extremes.
    IntervalSieve,
    /// Pair scan when the pair count fits [`PAIR_SCAN_BUDGET`], else the sieve.
    Auto,
}

impl GapMode {
    pub fn name(self) -> &'static str {
        match self {
            GapMode::PairScan => "pair-scan",
            GapMode::IntervalSieve => "interval-sieve",
            GapMode::Auto => "auto",
        }
    }
}

impl std::str::FromStr for GapMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair-scan" => Ok(GapMode::PairScan),
            "interval-sieve" => Ok(GapMode::IntervalSieve),
            "auto" => Ok(GapMode::Auto),
            other => config(format!("unknown gap mode `{other}` (pair-scan, interval-sieve, auto)")),
        }
    }
}

/// An open interval `(lo, hi)` of the scan holding no ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gap {
    pub lo: Ratio<u64>,
    pub hi: Ratio<u64>,
}

impl Gap {
    pub fn width(&self) -> f64 {
        to_f64(self.hi) - to_f64(self.lo)
    }

    /// Whether the closed interval `[a, b]` lies inside this open gap.
    pub fn contains_closed(&self, a: Ratio<u64>, b: Ratio<u64>) -> bool {
        self.lo < a && b < self.hi
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_ratio(self.lo), fmt_ratio(self.hi))
    }
}

pub fn fmt_ratio(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub lo: Ratio<u64>,
    pub hi: Ratio<u64>,
    pub resolution: u64,
    pub mode: GapMode,
    pub bound: u64,
    pub element_count: usize,
    /// Ordered pairs `(a, b)` with `a / b` strictly inside the scan interval.
    pub pairs_in_scan: u64,
    pub gaps: Vec<Gap>,
}

impl GapReport {
    pub fn widest(&self) -> Option<&Gap> {
        self.gaps.iter().max_by(|a, b| a.width().total_cmp(&b.width()))
    }

    /// The reported gap containing `[a, b]`, if any.
    pub fn gap_containing(&self, a: Ratio<u64>, b: Ratio<u64>) -> Option<&Gap> {
        self.gaps.iter().find(|g| g.contains_closed(a, b))
    }
}

fn cmp_frac(a: (u64, u64), b: (u64, u64)) -> Ordering {
    (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128))
}

/// Gaps of the ratio set of `spec ∩ [1, bound]` inside `(lo, hi)`.
pub fn ratio_gaps(
    spec: &IntegerSetSpec,
    bound: u64,
    lo: Ratio<u64>,
    hi: Ratio<u64>,
    resolution: u64,
    mode: GapMode,
    workers: usize,
) -> Result<GapReport> {
    let values = spec.enumerate(bound)?;
    ratio_gaps_of(&values, bound, lo, hi, resolution, mode, workers)
}

/// Same as [`ratio_gaps`] over an ascending list of elements.
pub fn ratio_gaps_of(
    values: &[u64],
    bound: u64,
    lo: Ratio<u64>,
    hi: Ratio<u64>,
    resolution: u64,
    mode: GapMode,
    workers: usize,
) -> Result<GapReport> {
    if values.len() < 2 {
        return config(format!("ratio gaps need >= 2 elements <= {bound}, got {}", values.len()));
    }
    if lo >= hi || *lo.numer() == 0 {
        return config(format!("scan interval ({lo}, {hi}) needs 0 < lo < hi"));
    }
    if resolution == 0 {
        return config("gap resolution must be >= 1");
    }
    let pairs = values.len() as u128 * values.len() as u128;
    let mode = match mode {
        GapMode::Auto if pairs <= PAIR_SCAN_BUDGET => GapMode::PairScan,
        GapMode::Auto => GapMode::IntervalSieve,
        GapMode::PairScan if pairs > PAIR_SCAN_BUDGET => {
            return resource(format!(
                "pair scan over {pairs} pairs exceeds {PAIR_SCAN_BUDGET}; use the interval-sieve mode"
            ))
        }
        m => m,
    };
    let (ratios, pairs_in_scan) = match mode {
        GapMode::PairScan => pair_scan(values, lo, hi, workers),
        _ => interval_sieve(values, lo, hi, resolution, workers),
    };
    let gaps = gaps_between(&ratios, lo, hi, resolution);
    Ok(GapReport {
        lo,
        hi,
        resolution,
        mode,
        bound,
        element_count: values.len(),
        pairs_in_scan,
        gaps,
    })
}

// The slice of `values` with lo < v / b < hi, for fixed b.
fn scan_slice(values: &[u64], b: u64, lo: Ratio<u64>, hi: Ratio<u64>) -> &[u64] {
    let b = b as u128;
    let (ln, ld) = (*lo.numer() as u128, *lo.denom() as u128);
    let (hn, hd) = (*hi.numer() as u128, *hi.denom() as u128);
    let start = values.partition_point(|&a| a as u128 * ld <= ln * b);
    let end = values.partition_point(|&a| a as u128 * hd < hn * b);
    &values[start..end.max(start)]
}

fn pair_scan(values: &[u64], lo: Ratio<u64>, hi: Ratio<u64>, workers: usize) -> (Vec<(u64, u64)>, u64) {
    let mut ratios: Vec<(u64, u64)> = with_workers(workers, || {
        values
            .par_iter()
            .flat_map_iter(|&b| {
                scan_slice(values, b, lo, hi).iter().map(move |&a| {
                    let g = num_integer::gcd(a, b);
                    (a / g, b / g)
                })
            })
            .collect()
    });
    let pairs = ratios.len() as u64;
    ratios.par_sort_unstable_by(|x, y| cmp_frac(*x, *y));
    ratios.dedup();
    (ratios, pairs)
}

type Bin = Option<((u64, u64), (u64, u64))>;

fn merge_bins(mut a: Vec<Bin>, b: Vec<Bin>) -> Vec<Bin> {
    for (x, y) in a.iter_mut().zip(b) {
        *x = match (*x, y) {
            (None, y) => y,
            (x, None) => x,
            (Some((xmin, xmax)), Some((ymin, ymax))) => Some((
                if cmp_frac(ymin, xmin).is_lt() { ymin } else { xmin },
                if cmp_frac(ymax, xmax).is_gt() { ymax } else { xmax },
            )),
        };
    }
    a
}

/// Exact per-bin minimum and maximum ratios; returns the extremes in order.
fn interval_sieve(
    values: &[u64],
    lo: Ratio<u64>,
    hi: Ratio<u64>,
    resolution: u64,
    workers: usize,
) -> (Vec<(u64, u64)>, u64) {
    let bins = (2 * resolution) as usize;
    let (ln, ld) = (*lo.numer() as u128, *lo.denom() as u128);
    let (hn, hd) = (*hi.numer() as u128, *hi.denom() as u128);
    // (a/b - lo) / (hi - lo) * bins = (a ld - ln b) hd bins / (b (hn ld - ln hd))
    let span = hn * ld - ln * hd;
    let (table, pairs) = with_workers(workers, || {
        values
            .par_iter()
            .fold(
                || (vec![None; bins], 0u64),
                |(mut table, mut pairs): (Vec<Bin>, u64), &b| {
                    for &a in scan_slice(values, b, lo, hi) {
                        pairs += 1;
                        let num = (a as u128 * ld - ln * b as u128) * hd * bins as u128;
                        let idx = ((num / (b as u128 * span)) as usize).min(bins - 1);
                        let r = (a, b);
                        table[idx] = match table[idx] {
                            None => Some((r, r)),
                            Some((mn, mx)) => Some((
                                if cmp_frac(r, mn).is_lt() { r } else { mn },
                                if cmp_frac(r, mx).is_gt() { r } else { mx },
                            )),
                        };
                    }
                    (table, pairs)
                },
            )
            .reduce(|| (vec![None; bins], 0), |a, b| (merge_bins(a.0, b.0), a.1 + b.1))
    });
    let mut out = Vec::new();
    for (mn, mx) in table.into_iter().flatten() {
        let reduce = |(a, b): (u64, u64)| {
            let g = num_integer::gcd(a, b);
            (a / g, b / g)
        };
        out.push(reduce(mn));
        if cmp_frac(mn, mx).is_ne() {
            out.push(reduce(mx));
        }
    }
    (out, pairs)
}

// Gaps between consecutive entries of `ratios` (sorted, inside the scan),
// with the scan endpoints as sentinels, at least (hi - lo) / resolution wide.
fn gaps_between(ratios: &[(u64, u64)], lo: Ratio<u64>, hi: Ratio<u64>, resolution: u64) -> Vec<Gap> {
    let as_pair = |r: Ratio<u64>| (*r.numer(), *r.denom());
    let mut points = Vec::with_capacity(ratios.len() + 2);
    points.push(as_pair(lo));
    points.extend_from_slice(ratios);
    points.push(as_pair(hi));
    let (ln, ld) = as_pair(lo);
    let (hn, hd) = as_pair(hi);
    points
        .windows(2)
        .filter(|w| wide_enough(w[0], w[1], (ln, ld), (hn, hd), resolution))
        .map(|w| Gap { lo: Ratio::new(w[0].0, w[0].1), hi: Ratio::new(w[1].0, w[1].1) })
        .collect()
}

// (q - p) * resolution >= hi - lo, exactly when the products fit in u128.
fn wide_enough(p: (u64, u64), q: (u64, u64), lo: (u64, u64), hi: (u64, u64), resolution: u64) -> bool {
    let exact = || -> Option<bool> {
        let gap_num = (q.0 as u128 * p.1 as u128).checked_sub(p.0 as u128 * q.1 as u128)?;
        let gap_den = q.1 as u128 * p.1 as u128;
        let scan_num = hi.0 as u128 * lo.1 as u128 - lo.0 as u128 * hi.1 as u128;
        let scan_den = hi.1 as u128 * lo.1 as u128;
        let lhs = gap_num.checked_mul(resolution as u128)?.checked_mul(scan_den)?;
        let rhs = scan_num.checked_mul(gap_den)?;
        Some(lhs >= rhs)
    };
    exact().unwrap_or_else(|| {
        let f = |r: (u64, u64)| r.0 as f64 / r.1 as f64;
        (f(q) - f(p)) * resolution as f64 >= f(hi) - f(lo)
    })
}

/// Independent check that no ratio of `values` lies strictly inside `(lo, hi)`.
pub fn verify_gap(values: &[u64], gap: &Gap) -> bool {
    count_ratios_in(values, gap.lo, gap.hi, false) == 0
}

/// Ordered pairs `(a, b)` of `values` with `a / b` in `[lo, hi]` (`closed`)
/// or `(lo, hi)`.
pub fn count_ratios_in(values: &[u64], lo: Ratio<u64>, hi: Ratio<u64>, closed: bool) -> u64 {
    let (ln, ld) = (*lo.numer() as u128, *lo.denom() as u128);
    let (hn, hd) = (*hi.numer() as u128, *hi.denom() as u128);
    values
        .iter()
        .map(|&b| {
            let b = b as u128;
            let start = if closed {
                values.partition_point(|&a| a as u128 * ld < ln * b)
            } else {
                values.partition_point(|&a| a as u128 * ld <= ln * b)
            };
            let end = if closed {
                values.partition_point(|&a| a as u128 * hd <= hn * b)
            } else {
                values.partition_point(|&a| a as u128 * hd < hn * b)
            };
            end.saturating_sub(start) as u64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: u64, b: u64) -> Ratio<u64> {
        Ratio::new(a, b)
    }

    #[test]
    fn powers_of_two_leave_everything_empty() {
        let v = vec![1, 2, 4, 8, 16, 32, 64];
        let g = ratio_gaps_of(&v, 64, r(1, 1), r(2, 1), 10, GapMode::PairScan, 1).unwrap();
        assert_eq!(g.gaps, vec![Gap { lo: r(1, 1), hi: r(2, 1) }]);
        assert_eq!(g.pairs_in_scan, 0);
    }

    #[test]
    fn naturals_have_only_farey_gaps() {
        let v: Vec<u64> = (1..=100).collect();
        // widest windows are exactly 1/50, e.g. (99/50, 2); nothing wider
        let g = ratio_gaps_of(&v, 100, r(1, 1), r(2, 1), 100, GapMode::PairScan, 1).unwrap();
        assert!(g.gaps.iter().all(|gap| gap.hi - gap.lo <= r(1, 50)));
        assert!(g.gaps.contains(&Gap { lo: r(99, 50), hi: r(2, 1) }));
        let fine = ratio_gaps_of(&v, 100, r(1, 1), r(2, 1), 200, GapMode::PairScan, 1).unwrap();
        assert_eq!(fine.gaps[0], Gap { lo: r(1, 1), hi: r(100, 99) });
    }

    #[test]
    fn block_union_gap() {
        let a: IntegerSetSpec = "block(5: 1..2)".parse().unwrap();
        let g = ratio_gaps(&a, 10_000, r(3, 2), r(3, 1), 100, GapMode::PairScan, 0).unwrap();
        let gap = g.gap_containing(r(2, 1), r(5, 2)).expect("gap around [2, 5/2]");
        let v = a.enumerate(10_000).unwrap();
        assert!(verify_gap(&v, gap));
        assert_eq!(count_ratios_in(&v, r(2, 1), r(5, 2), true), 0);
    }

    #[test]
    fn modes_agree() {
        for s in ["block(5: 1..2)", "block(5: 2..3)", "primes", "squares", "n-phi"] {
            let v = s.parse::<IntegerSetSpec>().unwrap().enumerate(4000).unwrap();
            for (lo, hi, res) in [(r(1, 1), r(2, 1), 64), (r(3, 2), r(3, 1), 100), (r(1, 3), r(7, 2), 17)] {
                let a = ratio_gaps_of(&v, 4000, lo, hi, res, GapMode::PairScan, 1).unwrap();
                let b = ratio_gaps_of(&v, 4000, lo, hi, res, GapMode::IntervalSieve, 2).unwrap();
                assert_eq!(a.gaps, b.gaps, "{s} {lo} {hi}");
                assert_eq!(a.pairs_in_scan, b.pairs_in_scan);
                for gap in &a.gaps {
                    assert!(verify_gap(&v, gap));
                }
            }
        }
    }

    #[test]
    fn pair_scan_budget() {
        let v: Vec<u64> = (1..=20_000).collect();
        assert!(matches!(
            ratio_gaps_of(&v, 20_000, r(1, 1), r(2, 1), 10, GapMode::PairScan, 1),
            Err(crate::Error::Resource(_))
        ));
    }
}
