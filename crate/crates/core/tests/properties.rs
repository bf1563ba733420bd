use std::collections::{BTreeSet, HashSet};

use dirset_core::arith::{primes_in_ap, primes_up_to, representable_count, sieve, SieveKind};
use dirset_core::diagnostics::{
    coverage_of_truncation, estimate_density, find_3aps_in, ratio_gaps_of, ratio_profile, verify_gap, DensityVerdict,
    GapMode,
};
use dirset_core::engine::{build_truncation, oracle_truncation, BuildOptions, EnumerationMode, ORACLE_BUDGET};
use dirset_core::geometry::{
    distance, permute, probe_grid, rho, rho_integer, rho_projection, DirectionPoint, IndexSubset, NormKind, Permutation,
    ProbeScheme,
};
use dirset_core::intsets::{diagonal_sequence, IntegerSetSpec};
use num_rational::Ratio;
use proptest::prelude::*;

const POOL: [&str; 12] = [
    "naturals",
    "primes",
    "squares",
    "block(3: 1..2)",
    "block(5: 2..3)",
    "primes-ap(4, 3)",
    "n-omega",
    "n-phi",
    "poly(x1^2 + x2^2; L=12; diag)",
    "perfect-powers",
    "two-three-powers",
    "explicit(2, 3, 7, 11, 30, 31, 64, 100)",
];

fn spec(s: &str) -> IntegerSetSpec {
    s.parse().unwrap()
}

fn any_spec() -> impl Strategy<Value = IntegerSetSpec> {
    (0..POOL.len()).prop_map(|i| spec(POOL[i]))
}

fn norm() -> impl Strategy<Value = NormKind> {
    prop_oneof![Just(NormKind::Euclidean), Just(NormKind::L1)]
}

fn int_tuple(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<u64>> {
    k.prop_flat_map(|k| prop::collection::vec(0u64..1_000_000, k)).prop_filter("non-zero", |v| v.iter().any(|&x| x > 0))
}

fn real_point(k: usize) -> impl Strategy<Value = DirectionPoint> {
    prop::collection::vec(0.0f64..1.0, k)
        .prop_filter("non-zero", |v| v.iter().any(|&x| x > 1e-9))
        .prop_map(|v| rho(&v, NormKind::Euclidean).unwrap())
}

fn product_size(specs: &[IntegerSetSpec], bound: u64) -> u128 {
    specs.iter().map(|s| s.enumerate(bound).unwrap().len() as u128).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rho_integer_scaling_is_exact(x in int_tuple(2..=5), lambda in 1u64..10_000, n in norm()) {
        let scaled: Vec<u64> = x.iter().map(|&v| v * lambda).collect();
        prop_assert_eq!(rho_integer(&x, n).unwrap(), rho_integer(&scaled, n).unwrap());
    }

    #[test]
    fn rho_real_scaling(x in prop::collection::vec(0.0f64..1e3, 2..=5), e in -6.0f64..6.0, n in norm()) {
        prop_assume!(x.iter().any(|&v| v > 1e-3));
        let lambda = 10f64.powf(e);
        let scaled: Vec<f64> = x.iter().map(|&v| v * lambda).collect();
        let (a, b) = (rho(&x, n).unwrap(), rho(&scaled, n).unwrap());
        for (u, v) in a.coords().iter().zip(b.coords()) {
            prop_assert!((u - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn projection_is_idempotent(x in real_point(4), mask in 1u8..15) {
        let subset = IndexSubset::new((0..4).filter(|i| mask >> i & 1 == 1), 4).unwrap();
        prop_assume!(subset.meets(x.coords()));
        let once = rho_projection(&x, &subset).unwrap();
        prop_assert_eq!(rho_projection(&once, &subset).unwrap(), once);
    }

    #[test]
    fn permutation_inverse_round_trips(x in real_point(5), seed in 0usize..120) {
        let p = Permutation::all(5).swap_remove(seed);
        prop_assert_eq!(permute(&permute(&x, &p).unwrap(), &p.inverse()).unwrap(), x);
    }

    #[test]
    fn triangle_inequality(a in real_point(3), b in real_point(3), c in real_point(3)) {
        let (ab, bc, ac) = (distance(&a, &b).unwrap(), distance(&b, &c).unwrap(), distance(&a, &c).unwrap());
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn probes_are_valid_points(k in 2usize..=4, res in 2usize..30, seed in any::<u64>(), random in any::<bool>(), n in norm()) {
        let scheme = if random { ProbeScheme::Random { seed } } else { ProbeScheme::Grid };
        for p in probe_grid(k, res, scheme, n).unwrap() {
            prop_assert!(DirectionPoint::new(p.coords().to_vec(), n).is_ok());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_is_prefix_closed(s in any_spec(), x1 in 1u64..3_000, extra in 0u64..3_000) {
        let short = s.enumerate(x1).unwrap();
        let long = s.enumerate(x1 + extra).unwrap();
        prop_assert!(long.starts_with(&short));
        prop_assert!(short.windows(2).all(|w| w[0] < w[1]) && short.first().is_none_or(|&v| v >= 1));
    }

    #[test]
    fn contains_matches_enumeration(s in any_spec(), ns in prop::collection::vec(1u64..20_000, 16)) {
        for n in ns {
            let members = s.enumerate(n).unwrap();
            prop_assert_eq!(s.contains(n), members.last() == Some(&n), "{} at {}", s, n);
        }
    }

    #[test]
    fn counts_are_monotone(x in 10u64..5_000, omega in any::<bool>()) {
        let kind = if omega { SieveKind::Omega } else { SieveKind::Totient };
        let table = sieve(kind, x).unwrap();
        let cps = representable_count(&table, x).unwrap();
        prop_assert!(cps.windows(2).all(|w| w[0].x < w[1].x && w[0].count <= w[1].count));
    }

    #[test]
    fn primes_in_ap_subset(m in 2u64..40, a in 0u64..40, x in 2u64..5_000) {
        let a = a % m;
        prop_assume!(num_integer::gcd(a, m) == 1);
        let all: HashSet<u64> = primes_up_to(x).into_iter().collect();
        for p in primes_in_ap(m, a, x).unwrap() {
            prop_assert!(all.contains(&p) && p % m == a);
        }
    }

    #[test]
    fn build_matches_oracle(specs in prop::collection::vec(any_spec(), 2..=4), bound in 10u64..300, distinct in any::<bool>()) {
        prop_assume!(product_size(&specs, bound) <= ORACLE_BUDGET);
        let built = build_truncation(&specs, bound, distinct, EnumerationMode::Exhaustive, BuildOptions::default()).unwrap();
        let oracle = oracle_truncation(&specs, bound, distinct).unwrap();
        prop_assert!(built.points.iter().eq(oracle.iter()));
    }

    #[test]
    fn distinct_is_a_subset(specs in prop::collection::vec(any_spec(), 2..=3), bound in 10u64..200) {
        prop_assume!(product_size(&specs, bound) <= ORACLE_BUDGET);
        let opts = BuildOptions::default();
        let all = build_truncation(&specs, bound, false, EnumerationMode::Exhaustive, opts).unwrap();
        let distinct = build_truncation(&specs, bound, true, EnumerationMode::Exhaustive, opts).unwrap();
        prop_assert!(distinct.points.iter().all(|p| all.contains(p)));
    }

    #[test]
    fn truncations_grow_with_bound(specs in prop::collection::vec(any_spec(), 2..=3), x1 in 10u64..150, extra in 0u64..150) {
        let x2 = x1 + extra;
        prop_assume!(product_size(&specs, x2) <= ORACLE_BUDGET);
        let opts = BuildOptions::default();
        let small = build_truncation(&specs, x1, false, EnumerationMode::Exhaustive, opts).unwrap();
        let large = build_truncation(&specs, x2, false, EnumerationMode::Exhaustive, opts).unwrap();
        prop_assert!(small.points.iter().all(|p| large.contains(p)));
    }

    #[test]
    fn scaling_explicit_sets_keeps_directions(
        sets in prop::collection::vec(prop::collection::btree_set(1u64..200, 1..12), 2..=3),
        c in 1u64..50,
        distinct in any::<bool>(),
    ) {
        let specs: Vec<IntegerSetSpec> =
            sets.iter().map(|s| IntegerSetSpec::explicit(s.iter().copied().collect()).unwrap()).collect();
        let scaled: Vec<IntegerSetSpec> =
            sets.iter().map(|s| IntegerSetSpec::explicit(s.iter().map(|v| v * c).collect()).unwrap()).collect();
        let opts = BuildOptions::default();
        let a = build_truncation(&specs, 200, distinct, EnumerationMode::Exhaustive, opts).unwrap();
        let b = build_truncation(&scaled, 200 * c, distinct, EnumerationMode::Exhaustive, opts).unwrap();
        prop_assert_eq!(a.points, b.points);
    }

    #[test]
    fn identical_specs_are_permutation_closed(s in any_spec(), k in 2usize..=3, bound in 10u64..120, distinct in any::<bool>()) {
        let specs = vec![s; k];
        prop_assume!(product_size(&specs, bound) <= ORACLE_BUDGET);
        let t = build_truncation(&specs, bound, distinct, EnumerationMode::Exhaustive, BuildOptions::default()).unwrap();
        for p in &t.points {
            for perm in Permutation::all(k) {
                let image = dirset_core::engine::PrimitiveDirection::new(&perm.apply(p.coords())).unwrap();
                prop_assert!(t.contains(&image));
            }
        }
    }

    #[test]
    fn gap_modes_agree_and_verify(s in any_spec(), bound in 50u64..2_000, res in 5u64..200) {
        let values = s.enumerate(bound).unwrap();
        prop_assume!(values.len() >= 2);
        let (lo, hi) = (Ratio::new(1, 1), Ratio::new(4, 1));
        let pair = ratio_gaps_of(&values, bound, lo, hi, res, GapMode::PairScan, 1).unwrap();
        let sieve = ratio_gaps_of(&values, bound, lo, hi, res, GapMode::IntervalSieve, 2).unwrap();
        prop_assert_eq!(&pair.gaps, &sieve.gaps);
        for g in &pair.gaps {
            prop_assert!(verify_gap(&values, g));
        }
    }

    #[test]
    fn coverage_monotone(s in any_spec(), x1 in 20u64..150, extra in 0u64..150, e1 in 0.01f64..0.1, de in 0.0f64..0.1) {
        let specs = vec![s.clone(), s];
        let x2 = x1 + extra;
        let opts = BuildOptions::default();
        let probes = probe_grid(2, 200, ProbeScheme::Grid, NormKind::Euclidean).unwrap();
        let small = build_truncation(&specs, x1, false, EnumerationMode::Exhaustive, opts).unwrap();
        let large = build_truncation(&specs, x2, false, EnumerationMode::Exhaustive, opts).unwrap();
        let base = coverage_of_truncation(&small, e1, &probes).unwrap();
        prop_assert!(coverage_of_truncation(&large, e1, &probes).unwrap().covered >= base.covered);
        prop_assert!(coverage_of_truncation(&small, e1 + de, &probes).unwrap().covered >= base.covered);
    }

    #[test]
    fn three_aps_match_hash_oracle(values in prop::collection::btree_set(1u64..5_000, 0..400)) {
        let v: Vec<u64> = values.iter().copied().collect();
        let mut expected = Vec::new();
        for (i, &a) in v.iter().enumerate() {
            for &b in &v[i + 1..] {
                if values.contains(&(2 * b - a)) {
                    expected.push((a, b, 2 * b - a));
                }
            }
        }
        expected.sort_unstable();
        prop_assert_eq!(find_3aps_in(&v, None, 2), expected);
    }

    #[test]
    fn full_block_unions_have_density_one(q in 2u64..12, cuts in prop::collection::btree_set(2u64..12, 0..4)) {
        let mut points: Vec<u64> = vec![1];
        points.extend(cuts.into_iter().filter(|&c| c < q));
        points.push(q);
        let segments: Vec<(u64, u64)> = points.windows(2).map(|w| (w[0], w[1])).collect();
        let s = IntegerSetSpec::block_union(q, &segments);
        let est = estimate_density(&s, 100_000, &[1_000, 10_000, 100_000]).unwrap();
        match est.verdict {
            DensityVerdict::Converging { delta } => prop_assert!((delta - 1.0).abs() <= 0.01),
            other => prop_assert!(false, "verdict {:?}", other),
        }
    }
}

fn naive_omega(mut n: u64) -> u32 {
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            count += 1;
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    count + u32::from(n > 1)
}

#[test]
fn sieves_match_naive_oracles() {
    let x = 10_000u64;
    let primes = sieve(SieveKind::Primes, x).unwrap();
    let omega = sieve(SieveKind::Omega, x).unwrap();
    let phi = sieve(SieveKind::Totient, x).unwrap();
    for n in 1..=x {
        let totient = (1..=n).filter(|&m| num_integer::gcd(m, n) == 1).count() as u32;
        assert_eq!(phi.get(n), Some(totient), "phi({n})");
        assert_eq!(omega.get(n), Some(naive_omega(n)), "omega({n})");
        assert_eq!(primes.get(n), Some(u32::from(n >= 2 && totient == n as u32 - 1)), "prime({n})");
    }
}

#[test]
fn totient_trend_settles_near_constant() {
    let cps = dirset_core::arith::representable_count_segmented(SieveKind::Totient, 1_000_000, 0).unwrap();
    let last = cps.iter().find(|c| c.x == 1_000_000).unwrap().ratio_to_reference.unwrap();
    assert!((last - 1.365).abs() < 0.05, "{last}");
}

#[test]
fn five_block_sets_partition_the_naturals() {
    let bound = 100_000;
    let parts: Vec<BTreeSet<u64>> = [(1, 2), (2, 3), (3, 5)]
        .iter()
        .map(|&seg| IntegerSetSpec::block_union(5, &[seg]).enumerate(bound).unwrap().into_iter().collect())
        .collect();
    for n in 1..=bound {
        assert_eq!(parts.iter().filter(|p| p.contains(&n)).count(), 1, "{n}");
    }
}

#[test]
fn diagonal_ratios_tend_to_one() {
    for (f, d) in [
        ("poly(x1^2 + x2^2; L=10; diag)", 2.0),
        ("poly(x1^3 + 2*x2 + 5; L=5; diag)", 3.0),
        ("poly(2*x1; L=1; diag)", 1.0),
        ("poly(x1*x2 + x3^2 - x1; L=5; diag)", 2.0),
    ] {
        let seq = diagonal_sequence(&spec(f), 10_000).unwrap();
        let at = |n: u64| seq.iter().find(|e| e.0 == n).unwrap().1 as f64;
        let r = at(9_999) / at(10_000);
        assert!((1.0 - r).abs() <= 2.0 * d / 1e4 + 1e-6, "{f}: {r}");
    }
}

/// Sets passing a desk-scale denseness hypothesis (positive converging
/// density, or consecutive ratios tending to one) are well covered.
#[test]
fn hypothesis_checks_predict_coverage() {
    let x = 100_000;
    let probes = probe_grid(2, 300, ProbeScheme::Grid, NormKind::Euclidean).unwrap();
    let mut passing = Vec::new();
    for s in POOL.iter().map(|s| spec(s)) {
        let values = s.enumerate(x).unwrap();
        let window = values.iter().filter(|&&v| v > x / 10).count();
        // positive beyond the verdict's own resolution, and still growing in the last decade
        let density_ok = window > 0
            && matches!(
                estimate_density(&s, x, &[1_000, 10_000, 100_000]).unwrap().verdict,
                DensityVerdict::Converging { delta } if delta > dirset_core::diagnostics::density::CONVERGENCE_SPREAD
            );
        // every consecutive ratio reaching into the last decade, so block boundaries are seen
        let ratios_ok = window >= 1 && window < values.len() && ratio_profile(&s, x, window).is_ok_and(|p| p.approaches_one);
        if !(density_ok || ratios_ok) {
            continue;
        }
        passing.push(s.to_string());
        let (space, _) = dirset_core::engine::TupleSpace::new(&[s.clone(), s.clone()], x, false).unwrap();
        let mode = EnumerationMode::auto(&space, 100_000_000, 7, 5_000_000);
        let report = dirset_core::diagnostics::coverage_streaming(&space, mode, 0.05, &probes, 0).unwrap();
        assert!(report.fraction > 0.95, "{s}: {}", report.fraction);
    }
    assert!(passing.len() >= 3, "only {passing:?} passed a hypothesis check");
}
