//! Three-term arithmetic progressions `a < b < c`, `a + c = 2 b`.

use rayon::prelude::*;

use crate::error::{config, Result};
use crate::intsets::IntegerSetSpec;
use crate::parallel::with_workers;

/// All 3-APs in `spec ∩ [1, bound]`, ascending, stopping after `limit` if given.
pub fn find_3aps(spec: &IntegerSetSpec, bound: u64, limit: Option<usize>, workers: usize) -> Result<Vec<(u64, u64, u64)>> {
    if bound < 3 {
        return config(format!("3-AP search needs X >= 3, got {bound}"));
    }
    let values = spec.enumerate(bound)?;
    Ok(find_3aps_in(&values, limit, workers))
}

/// 3-APs of an ascending list, found by testing each midpoint `(a + c) / 2`
/// against a membership bitmap.
pub fn find_3aps_in(values: &[u64], limit: Option<usize>, workers: usize) -> Vec<(u64, u64, u64)> {
    let Some(&max) = values.last() else { return Vec::new() };
    let mut member = vec![0u64; (max as usize >> 6) + 1];
    for &v in values {
        member[(v >> 6) as usize] |= 1 << (v & 63);
    }
    let has = |v: u64| member[(v >> 6) as usize] >> (v & 63) & 1 == 1;
    let mut out: Vec<(u64, u64, u64)> = with_workers(workers, || {
        values
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, &a)| {
                values.get(i + 2..).unwrap_or(&[]).iter().filter_map(move |&c| {
                    let s = a + c;
                    (s % 2 == 0 && has(s / 2)).then_some((a, s / 2, c))
                })
            })
            .collect()
    });
    out.sort_unstable();
    if let Some(n) = limit {
        out.truncate(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn oracle(values: &[u64]) -> Vec<(u64, u64, u64)> {
        let set: HashSet<u64> = values.iter().copied().collect();
        let mut out = Vec::new();
        for (i, &a) in values.iter().enumerate() {
            for &b in &values[i + 1..] {
                let c = 2 * b - a;
                if set.contains(&c) {
                    out.push((a, b, c));
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn examples() {
        let s: IntegerSetSpec = "explicit(1, 2, 3, 5)".parse().unwrap();
        assert_eq!(find_3aps(&s, 5, None, 1).unwrap(), vec![(1, 2, 3), (1, 3, 5)]);
        // mixed exponents do form progressions: 3^4 + 15^3 = 2 * 12^3
        let pp = find_3aps(&"perfect-powers".parse().unwrap(), 1_000_000, None, 0).unwrap();
        assert_eq!(pp[0], (81, 1728, 3375));
        assert_eq!(pp.len(), 5);
        // a single exponent does not
        assert!(find_3aps(&"poly(x1^3; L=100; diag)".parse().unwrap(), 1_000_000, None, 0).unwrap().is_empty());
        assert!(find_3aps(&"two-three-powers".parse().unwrap(), 10_000, None, 0).unwrap().is_empty());
        assert!(find_3aps(&s, 2, None, 1).is_err());
    }

    #[test]
    fn agrees_with_oracle() {
        for s in ["primes", "squares", "block(5: 1..2)", "n-phi"] {
            let v = s.parse::<IntegerSetSpec>().unwrap().enumerate(3000).unwrap();
            assert_eq!(find_3aps_in(&v, None, 2), oracle(&v), "{s}");
        }
    }
}
