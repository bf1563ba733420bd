//! Natural density from counting-function checkpoints `A(X) / X`.

use crate::error::{config, Result};
use crate::intsets::IntegerSetSpec;

/// Last-three spread below which a sequence of ratios counts as converging.
pub const CONVERGENCE_SPREAD: f64 = 0.01;
/// Rise and fall both beyond this make a sequence oscillating.
pub const OSCILLATION_SWING: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityChkpt {
    pub x: u64,
    pub count: u64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityVerdict {
    Converging { delta: f64 },
    Oscillating { lo: f64, hi: f64 },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub checkpoints: Vec<DensityChkpt>,
    pub verdict: DensityVerdict,
}

/// Checkpoint ratios of `spec` at the given ascending bounds, all `<= bound`.
pub fn estimate_density(spec: &IntegerSetSpec, bound: u64, checkpoints: &[u64]) -> Result<DensityEstimate> {
    check(bound, checkpoints)?;
    let values = spec.enumerate(bound)?;
    estimate_density_values(&values, checkpoints)
}

fn check(bound: u64, checkpoints: &[u64]) -> Result<()> {
    if bound < 100 {
        return config(format!("density estimates need X >= 100, got {bound}"));
    }
    if checkpoints.len() < 3 {
        return config(format!("density estimates need >= 3 checkpoints, got {}", checkpoints.len()));
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return config("checkpoints must be positive and strictly ascending");
    }
    if checkpoints[checkpoints.len() - 1] > bound {
        return config(format!("checkpoint {} exceeds X = {bound}", checkpoints[checkpoints.len() - 1]));
    }
    Ok(())
}

/// Same as [`estimate_density`] over an ascending list of set elements.
pub fn estimate_density_values(values: &[u64], checkpoints: &[u64]) -> Result<DensityEstimate> {
    if checkpoints.len() < 3 || checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints[0] == 0 {
        return config("need >= 3 positive, strictly ascending checkpoints");
    }
    let checkpoints: Vec<DensityChkpt> = checkpoints
        .iter()
        .map(|&x| {
            let count = values.partition_point(|&v| v <= x) as u64;
            DensityChkpt { x, count, ratio: count as f64 / x as f64 }
        })
        .collect();
    let ratios: Vec<f64> = checkpoints.iter().map(|c| c.ratio).collect();
    Ok(DensityEstimate { verdict: verdict(&ratios), checkpoints })
}

/// Converging when the last three ratios agree within [`CONVERGENCE_SPREAD`];
/// oscillating when the sequence both climbs above and drops below an earlier
/// value by more than [`OSCILLATION_SWING`].
pub fn verdict(ratios: &[f64]) -> DensityVerdict {
    let n = ratios.len();
    if n >= 3 {
        let tail = &ratios[n - 3..];
        let spread = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - tail.iter().copied().fold(f64::INFINITY, f64::min);
        if spread < CONVERGENCE_SPREAD {
            return DensityVerdict::Converging { delta: ratios[n - 1] };
        }
    }
    let (mut rises, mut falls) = (false, false);
    for j in 1..n {
        let lo = ratios[..j].iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios[..j].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rises |= ratios[j] > lo + OSCILLATION_SWING;
        falls |= ratios[j] < hi - OSCILLATION_SWING;
    }
    if rises && falls {
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return DensityVerdict::Oscillating { lo, hi };
    }
    DensityVerdict::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::count_checkpoints;

    fn spec(s: &str) -> IntegerSetSpec {
        s.parse().unwrap()
    }

    #[test]
    fn evens_and_squares() {
        let cps: Vec<u64> = count_checkpoints(1_000_000).into_iter().filter(|&x| x >= 100).collect();
        let e = estimate_density(&spec("evens"), 1_000_000, &cps).unwrap();
        assert_eq!(e.verdict, DensityVerdict::Converging { delta: 0.5 });
        let s = estimate_density(&spec("squares"), 1_000_000, &cps).unwrap();
        match s.verdict {
            DensityVerdict::Converging { delta } => assert!(delta < 0.01),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn block_union_oscillates() {
        let p = 5u64.pow(7);
        let cps = [5u64.pow(6), 2 * 5u64.pow(6), p, 2 * p];
        let e = estimate_density(&spec("block(5: 1..2)"), 2 * p, &cps).unwrap();
        // closed form: 1 + 5 + ... + 5^(m-1) elements below 5^m, plus the block [5^m, X]
        let below = |m: u32| (5u64.pow(m) - 1) / 4;
        assert_eq!(e.checkpoints[2].count, below(7) + 1);
        assert_eq!(e.checkpoints[3].count, below(7) + p);
        match e.verdict {
            DensityVerdict::Oscillating { lo, hi } => {
                assert!((lo - 0.25).abs() < 0.01, "{lo}");
                assert!((hi - 0.625).abs() < 0.01, "{hi}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monotone_sequences_are_not_oscillating() {
        assert_eq!(verdict(&[0.1, 0.2, 0.3, 0.45]), DensityVerdict::Inconclusive);
        assert_eq!(verdict(&[0.9, 0.7, 0.5, 0.3]), DensityVerdict::Inconclusive);
    }

    #[test]
    fn preconditions() {
        assert!(estimate_density(&spec("evens"), 50, &[10, 20, 30]).is_err());
        assert!(estimate_density(&spec("evens"), 1000, &[10, 20]).is_err());
        assert!(estimate_density(&spec("evens"), 1000, &[10, 30, 20]).is_err());
        assert!(estimate_density(&spec("evens"), 1000, &[10, 20, 2000]).is_err());
    }
}
