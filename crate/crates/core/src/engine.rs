//! Finite truncations of direction sets.
//!
//! A truncation at bound `X` is `{ rho(u) : u_i in U_i, u_i <= X }`, stored
//! exactly as gcd-reduced integer tuples. [`TupleSpace`] streams the tuple
//! product in parallel (exhaustively or by seeded sampling) so diagnostics can
//! consume 10^8 tuples without materializing them.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{config, domain, resource, Error, Result};
use crate::geometry::{self, DirectionPoint, NormKind, OpenBox};
use crate::intsets::{enumerate_detailed, IntegerSetSpec};
use crate::parallel::with_workers;

/// Default cap on the tuple product an exhaustive enumeration may walk.
pub const DEFAULT_TUPLE_BUDGET: u128 = 100_000_000;
/// Cap on the tuple product of [`oracle_truncation`].
pub const ORACLE_BUDGET: u128 = 1_000_000;
/// Samples per independently seeded block in sampled mode.
pub const SAMPLE_BLOCK: u64 = 65_536;

/// Integer tuple with gcd 1: the exact representative of a rational direction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimitiveDirection {
    coords: Vec<u64>,
}

impl PrimitiveDirection {
    /// Reduces `tuple` by the gcd of its coordinates.
    pub fn new(tuple: &[u64]) -> Result<Self> {
        if tuple.len() < 2 {
            return domain(format!("direction needs k >= 2 coordinates, got {}", tuple.len()));
        }
        let g = tuple.iter().fold(0u64, |g, &v| num_integer::gcd(g, v));
        if g == 0 {
            return domain("the zero tuple has no direction");
        }
        Ok(PrimitiveDirection { coords: tuple.iter().map(|v| v / g).collect() })
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_point(&self, norm: NormKind) -> DirectionPoint {
        geometry::rho_integer(&self.coords, norm).expect("primitive directions are non-zero")
    }

    /// Whether `tuple` is a positive multiple of this direction.
    pub fn is_direction_of(&self, tuple: &[u64]) -> bool {
        let Some(j) = self.coords.iter().position(|&c| c != 0) else { return false };
        tuple.len() == self.coords.len()
            && tuple
                .iter()
                .zip(&self.coords)
                .all(|(&t, &c)| t as u128 * self.coords[j] as u128 == c as u128 * tuple[j] as u128)
    }
}

impl fmt::Display for PrimitiveDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationMode {
    Exhaustive,
    /// `count` tuples drawn uniformly (per coordinate) from the product.
    Sampled { seed: u64, count: u64 },
}

impl EnumerationMode {
    /// Exhaustive when the product fits `budget`, sampled otherwise.
    pub fn auto(space: &TupleSpace, budget: u128, seed: u64, samples: u64) -> Self {
        if space.size() <= budget {
            EnumerationMode::Exhaustive
        } else {
            EnumerationMode::Sampled { seed, count: samples }
        }
    }
}

impl fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumerationMode::Exhaustive => f.write_str("exhaustive"),
            EnumerationMode::Sampled { seed, count } => write!(f, "sampled(seed={seed}, count={count})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub budget: u128,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { budget: DEFAULT_TUPLE_BUDGET, workers: 0 }
    }
}

/// The truncated product `(U_1 ∩ [1, X]) x ... x (U_k ∩ [1, X])`.
#[derive(Clone, Debug)]
pub struct TupleSpace {
    sets: Vec<Vec<u64>>,
    distinct: bool,
}

impl TupleSpace {
    /// Enumerates every spec up to `bound`. Returns the space and any warnings.
    pub fn new(specs: &[IntegerSetSpec], bound: u64, distinct: bool) -> Result<(Self, Vec<String>)> {
        if specs.len() < 2 {
            return config(format!("direction sets need k >= 2 set specs, got {}", specs.len()));
        }
        let mut warnings = Vec::new();
        let mut sets = Vec::with_capacity(specs.len());
        for spec in specs {
            let e = enumerate_detailed(spec, bound)?;
            if e.values.is_empty() {
                return config(format!("`{spec}` has no elements <= {bound}; {}", e.warnings.join("; ")));
            }
            warnings.extend(e.warnings);
            sets.push(e.values);
        }
        let k = specs.len();
        if distinct && specs.iter().all(|s| *s == specs[0]) && sets.iter().any(|s| s.len() < k) {
            warnings.push(format!(
                "distinct variant with fewer than k = {k} elements <= {bound} per set; the |U_i| >= k hypothesis of the closure checks is unavailable"
            ));
        }
        Ok((TupleSpace { sets, distinct }, warnings))
    }

    /// A space over explicit ascending sets.
    pub fn from_sets(sets: Vec<Vec<u64>>, distinct: bool) -> Result<Self> {
        if sets.len() < 2 {
            return config("direction sets need k >= 2 sets");
        }
        if sets.iter().any(|s| s.is_empty() || s[0] == 0 || s.windows(2).any(|w| w[0] >= w[1])) {
            return config("tuple sets must be non-empty, positive and strictly ascending");
        }
        Ok(TupleSpace { sets, distinct })
    }

    pub fn dim(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<u64>] {
        &self.sets
    }

    pub fn distinct(&self) -> bool {
        self.distinct
    }

    /// Size of the full product, before the distinctness filter.
    pub fn size(&self) -> u128 {
        self.sets.iter().try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128)).unwrap_or(u128::MAX)
    }

    pub fn check_budget(&self, budget: u128) -> Result<()> {
        if self.size() > budget {
            return resource(format!(
                "exhaustive enumeration needs {} tuples, over the budget {budget}; use sampled mode",
                self.size()
            ));
        }
        Ok(())
    }

    pub fn is_admissible(&self, tuple: &[u64]) -> bool {
        !self.distinct || pairwise_distinct(tuple)
    }

    /// Folds `visit` over the admissible tuples, one accumulator per rayon task.
    ///
    /// `visit` returning false stops the whole enumeration early. The set of
    /// visited tuples never depends on `workers`: exhaustive mode walks the
    /// product, sampled mode seeds block `b` as stream `b` of `seed`.
    pub fn fold<S, I, V, M>(&self, mode: EnumerationMode, workers: usize, init: I, visit: V, merge: M) -> S
    where
        S: Send,
        I: Fn() -> S + Sync + Send,
        V: Fn(&mut S, &[u64]) -> bool + Sync + Send,
        M: Fn(S, S) -> S + Sync + Send,
    {
        let stop = AtomicBool::new(false);
        with_workers(workers, || match mode {
            EnumerationMode::Exhaustive => {
                let (depth, tasks) = self.task_split();
                (0..tasks)
                    .into_par_iter()
                    .fold(&init, |mut s, t| {
                        if !stop.load(Ordering::Relaxed) {
                            self.walk_prefix(t, depth, &mut s, &visit, &stop);
                        }
                        s
                    })
                    .reduce(&init, &merge)
            }
            EnumerationMode::Sampled { seed, count } => (0..count.div_ceil(SAMPLE_BLOCK))
                .into_par_iter()
                .fold(&init, |mut s, block| {
                    if !stop.load(Ordering::Relaxed) {
                        let n = SAMPLE_BLOCK.min(count - block * SAMPLE_BLOCK);
                        self.sample_block(seed, block, n, &mut s, &visit, &stop);
                    }
                    s
                })
                .reduce(&init, &merge),
        })
    }

    // Leading coordinates enumerated per task, and the number of tasks.
    fn task_split(&self) -> (usize, u64) {
        let k = self.dim();
        let mut tasks: u64 = 1;
        let mut depth = 0;
        while depth < k - 1 && tasks < 256 {
            tasks = tasks.saturating_mul(self.sets[depth].len() as u64);
            depth += 1;
        }
        (depth, tasks)
    }

    fn walk_prefix<S>(
        &self,
        task: u64,
        depth: usize,
        s: &mut S,
        visit: &(impl Fn(&mut S, &[u64]) -> bool + Sync),
        stop: &AtomicBool,
    ) {
        let k = self.dim();
        let mut tuple = vec![0u64; k];
        let mut rest = task;
        for i in (0..depth).rev() {
            let n = self.sets[i].len() as u64;
            tuple[i] = self.sets[i][(rest % n) as usize];
            rest /= n;
        }
        if self.distinct && !pairwise_distinct(&tuple[..depth]) {
            return;
        }
        let mut idx = vec![0usize; k];
        for (t, set) in tuple.iter_mut().zip(&self.sets).skip(depth) {
            *t = set[0];
        }
        let mut steps: u32 = 0;
        loop {
            if self.is_admissible(&tuple) && !visit(s, &tuple) {
                stop.store(true, Ordering::Relaxed);
                return;
            }
            steps = steps.wrapping_add(1);
            if steps.is_multiple_of(4096) && stop.load(Ordering::Relaxed) {
                return;
            }
            let mut i = k;
            loop {
                if i == depth {
                    return;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < self.sets[i].len() {
                    tuple[i] = self.sets[i][idx[i]];
                    break;
                }
                idx[i] = 0;
                tuple[i] = self.sets[i][0];
            }
        }
    }

    fn sample_block<S>(
        &self,
        seed: u64,
        block: u64,
        n: u64,
        s: &mut S,
        visit: &(impl Fn(&mut S, &[u64]) -> bool + Sync),
        stop: &AtomicBool,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let mut tuple = vec![0u64; self.dim()];
        for j in 0..n {
            for (t, set) in tuple.iter_mut().zip(&self.sets) {
                *t = set[rng.random_range(0..set.len())];
            }
            if self.is_admissible(&tuple) && !visit(s, &tuple) {
                stop.store(true, Ordering::Relaxed);
                return;
            }
            if j % 4096 == 4095 && stop.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

pub(crate) fn pairwise_distinct(t: &[u64]) -> bool {
    t.iter().enumerate().all(|(i, a)| t[i + 1..].iter().all(|b| a != b))
}

/// A deduplicated, sorted set of primitive directions.
#[derive(Clone, Debug)]
pub struct DirectionSetTruncation {
    pub specs: Vec<IntegerSetSpec>,
    pub bound: u64,
    pub distinct: bool,
    pub mode: EnumerationMode,
    pub points: Vec<PrimitiveDirection>,
    pub warnings: Vec<String>,
}

impl DirectionSetTruncation {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.specs.len()
    }

    pub fn contains(&self, p: &PrimitiveDirection) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn float_points(&self, norm: NormKind) -> Vec<DirectionPoint> {
        self.points.iter().map(|p| p.to_point(norm)).collect()
    }

    /// One direction per line, coordinates space-separated, lexicographic order.
    pub fn write_text(&self, w: &mut impl Write) -> std::io::Result<()> {
        for p in &self.points {
            writeln!(w, "{p}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

// Sort and dedup once a worker's buffer grows past this many directions.
const COMPACT_AT: usize = 1 << 22;

fn compact(v: &mut Vec<PrimitiveDirection>) {
    v.sort_unstable();
    v.dedup();
}

/// Builds the truncation of the (distinct) direction set of `specs` at `bound`.
pub fn build_truncation(
    specs: &[IntegerSetSpec],
    bound: u64,
    distinct: bool,
    mode: EnumerationMode,
    opts: BuildOptions,
) -> Result<DirectionSetTruncation> {
    let (space, warnings) = TupleSpace::new(specs, bound, distinct)?;
    if mode == EnumerationMode::Exhaustive {
        space.check_budget(opts.budget)?;
    }
    let mut points = space.fold(
        mode,
        opts.workers,
        Vec::new,
        |buf: &mut Vec<PrimitiveDirection>, t| {
            buf.push(PrimitiveDirection::new(t).expect("set elements are positive"));
            if buf.len() >= COMPACT_AT {
                compact(buf);
            }
            true
        },
        |mut a, mut b| {
            a.append(&mut b);
            if a.len() >= COMPACT_AT {
                compact(&mut a);
            }
            a
        },
    );
    compact(&mut points);
    Ok(DirectionSetTruncation { specs: specs.to_vec(), bound, distinct, mode, points, warnings })
}

fn oracle_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reference truncation: plain nested loops with their own gcd, for tests.
pub fn oracle_truncation(specs: &[IntegerSetSpec], bound: u64, distinct: bool) -> Result<BTreeSet<PrimitiveDirection>> {
    if specs.len() < 2 {
        return config("direction sets need k >= 2 set specs");
    }
    let sets: Vec<Vec<u64>> = specs.iter().map(|s| s.enumerate(bound)).collect::<Result<_>>()?;
    let size = sets.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if size > ORACLE_BUDGET {
        return resource(format!("oracle needs {size} tuples, over its budget {ORACLE_BUDGET}"));
    }
    fn rec(sets: &[Vec<u64>], prefix: &mut Vec<u64>, distinct: bool, out: &mut BTreeSet<PrimitiveDirection>) {
        if prefix.len() == sets.len() {
            let g = prefix.iter().fold(0, |g, &v| oracle_gcd(g, v));
            out.insert(PrimitiveDirection { coords: prefix.iter().map(|v| v / g).collect() });
            return;
        }
        for &v in &sets[prefix.len()] {
            if distinct && prefix.contains(&v) {
                continue;
            }
            prefix.push(v);
            rec(sets, prefix, distinct, out);
            prefix.pop();
        }
    }
    let mut out = BTreeSet::new();
    rec(&sets, &mut Vec::new(), distinct, &mut out);
    Ok(out)
}

/// Outcome of [`witness_in_box`]. Failing to find a witness is an expected
/// answer for non-dense sets, not an error.
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessOutcome {
    Found { tuple: Vec<u64>, point: DirectionPoint, scale: u64 },
    NotFound { scales: Vec<u64> },
}

impl WitnessOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, WitnessOutcome::Found { .. })
    }
}

/// Searches `U_1 x ... x U_k` (elements up to `search_bound`) for a tuple
/// whose direction lies strictly inside `bx`.
///
/// Scales grow geometrically. At scale `s` the search takes elements from
/// the intervals `s (y_i - eta, y_i + eta)` around a sphere point `y` of the
/// box, with `eta` small enough that normalization keeps such tuples inside,
/// and also brackets each target `s y_i` by its neighbours in `U_i`. Every
/// candidate is checked exactly; the one closest to `y` wins.
pub fn witness_in_box(
    specs: &[IntegerSetSpec],
    bx: &OpenBox,
    search_bound: u64,
    distinct: bool,
    norm: NormKind,
) -> Result<WitnessOutcome> {
    if specs.len() != bx.dim() {
        return domain(format!("{} specs but a {}-dimensional box", specs.len(), bx.dim()));
    }
    let y = bx.sphere_point(norm)?;
    let sets: Vec<Vec<u64>> = specs.iter().map(|s| s.enumerate(search_bound)).collect::<Result<_>>()?;
    let k = y.len();
    let c = match norm {
        NormKind::Euclidean => (k as f64).sqrt(),
        NormKind::L1 => k as f64,
    };
    let margin = y
        .iter()
        .zip(bx.lower().iter().zip(bx.upper()))
        .map(|(v, (a, b))| (v - a).min(b - v))
        .fold(f64::INFINITY, f64::min);
    let eta = margin / (4.0 * (1.0 + c));
    let y_max = y.iter().copied().fold(0.0, f64::max);
    let mut scales = Vec::new();
    let mut s: u64 = 1;
    let mut image = vec![0.0; k];
    while (y_max - eta) * s as f64 <= search_bound as f64 {
        scales.push(s);
        let sf = s as f64;
        let mut options: Vec<Vec<u64>> = Vec::with_capacity(k);
        for (set, &yi) in sets.iter().zip(&y) {
            let (lo, hi) = ((yi - eta) * sf, (yi + eta) * sf);
            let start = set.partition_point(|&u| (u as f64) <= lo);
            let mut opts: Vec<u64> = set[start..].iter().copied().take_while(|&u| (u as f64) < hi).take(k).collect();
            let t = yi * sf;
            let succ = set.partition_point(|&u| (u as f64) <= t);
            if succ > 0 {
                opts.push(set[succ - 1]);
            }
            if succ < set.len() {
                opts.push(set[succ]);
            }
            opts.sort_unstable();
            opts.dedup();
            options.push(opts);
        }
        let mut best: Option<(f64, Vec<u64>)> = None;
        if options.iter().all(|o| !o.is_empty()) {
            let mut idx = vec![0usize; k];
            let mut tuple = vec![0u64; k];
            loop {
                for i in 0..k {
                    tuple[i] = options[i][idx[i]];
                }
                if (!distinct || pairwise_distinct(&tuple))
                    && geometry::rho_u64_into(&tuple, norm, &mut image)
                    && bx.contains(&image)
                {
                    let d = geometry::euclidean(&image, &y);
                    if best.as_ref().is_none_or(|(bd, bt)| d < *bd || (d == *bd && tuple < *bt)) {
                        best = Some((d, tuple.clone()));
                    }
                }
                let mut i = k;
                let done = loop {
                    if i == 0 {
                        break true;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < options[i].len() {
                        break false;
                    }
                    idx[i] = 0;
                };
                if done {
                    break;
                }
            }
        }
        if let Some((_, tuple)) = best {
            let point = geometry::rho_integer(&tuple, norm)?;
            return Ok(WitnessOutcome::Found { tuple, point, scale: s });
        }
        s = match s.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(WitnessOutcome::NotFound { scales })
}

/// Coordinate substitution behind closure under `rho_I`: keeps the
/// coordinates of `tuple` indexed by `subset` and replaces every other
/// coordinate `j` by the smallest element of `U_j` (up to `bound`) that keeps
/// the tuple pairwise distinct when `distinct` is set. As the kept
/// coordinates grow, the direction of the result tends to `rho_I(rho(tuple))`.
pub fn substitution_witness(
    specs: &[IntegerSetSpec],
    tuple: &[u64],
    subset: &geometry::IndexSubset,
    bound: u64,
    distinct: bool,
) -> Result<Vec<u64>> {
    if specs.len() != tuple.len() || subset.dim() != tuple.len() {
        return domain("specs, tuple and subset dimensions differ");
    }
    let mut out = tuple.to_vec();
    for j in 0..tuple.len() {
        if subset.contains(j) {
            continue;
        }
        let set = specs[j].enumerate(bound)?;
        let pick = set
            .iter()
            .copied()
            .find(|v| !distinct || !out.iter().enumerate().any(|(i, o)| i != j && o == v))
            .ok_or_else(|| Error::Domain(format!("no admissible substitute in `{}` up to {bound}", specs[j])))?;
        out[j] = pick;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> IntegerSetSpec {
        s.parse().unwrap()
    }

    fn dirs(points: &[PrimitiveDirection]) -> Vec<Vec<u64>> {
        points.iter().map(|p| p.coords().to_vec()).collect()
    }

    #[test]
    fn truncation_examples() {
        let u = vec![spec("explicit(1, 2)"), spec("explicit(1, 2)")];
        let t = build_truncation(&u, 2, false, EnumerationMode::Exhaustive, BuildOptions::default()).unwrap();
        assert_eq!(dirs(&t.points), vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        let t = build_truncation(&u, 2, true, EnumerationMode::Exhaustive, BuildOptions::default()).unwrap();
        assert_eq!(dirs(&t.points), vec![vec![1, 2], vec![2, 1]]);
        let ap = vec![spec("primes-ap(4, 1)"), spec("primes-ap(4, 3)")];
        let t = build_truncation(&ap, 10, false, EnumerationMode::Exhaustive, BuildOptions::default()).unwrap();
        assert_eq!(dirs(&t.points), vec![vec![5, 3], vec![5, 7]]);
    }

    #[test]
    fn oracle_examples() {
        let u = vec![spec("explicit(1, 2, 3)"), spec("explicit(1, 2, 3)")];
        assert_eq!(oracle_truncation(&u, 3, false).unwrap().len(), 7);
        assert_eq!(oracle_truncation(&u, 3, true).unwrap().len(), 6);
    }

    #[test]
    fn distinct_warning() {
        let u = vec![spec("explicit(1, 2)"); 3];
        let t = build_truncation(&u, 2, true, EnumerationMode::Exhaustive, BuildOptions::default()).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let u = vec![spec("naturals"), spec("naturals")];
        let opts = BuildOptions { budget: 100, workers: 1 };
        assert!(matches!(
            build_truncation(&u, 11, false, EnumerationMode::Exhaustive, opts),
            Err(Error::Resource(_))
        ));
        assert!(build_truncation(&u, 11, false, EnumerationMode::Sampled { seed: 1, count: 50 }, opts).is_ok());
    }

    #[test]
    fn sampling_ignores_worker_count() {
        let u = vec![spec("primes"), spec("primes"), spec("naturals")];
        let mode = EnumerationMode::Sampled { seed: 7, count: 200_000 };
        let a = build_truncation(&u, 500, false, mode, BuildOptions { budget: 0, workers: 1 }).unwrap();
        let b = build_truncation(&u, 500, false, mode, BuildOptions { budget: 0, workers: 3 }).unwrap();
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn export_is_sorted_text() {
        let u = vec![spec("explicit(1, 2)"), spec("explicit(1, 2)")];
        let t = build_truncation(&u, 2, false, EnumerationMode::Exhaustive, BuildOptions::default()).unwrap();
        assert_eq!(t.to_text(), "1 1\n1 2\n2 1\n");
    }

    #[test]
    fn primitive_direction_multiples() {
        let p = PrimitiveDirection::new(&[4, 6, 0]).unwrap();
        assert_eq!(p.coords(), &[2, 3, 0]);
        assert!(p.is_direction_of(&[6, 9, 0]));
        assert!(!p.is_direction_of(&[6, 9, 1]));
        assert!(PrimitiveDirection::new(&[0, 0]).is_err());
    }

    #[test]
    fn witness_examples() {
        let nn = vec![spec("naturals"), spec("naturals")];
        let bx = OpenBox::new(&[(0.55, 0.65), (0.75, 0.85)]).unwrap();
        match witness_in_box(&nn, &bx, 1000, false, NormKind::Euclidean).unwrap() {
            WitnessOutcome::Found { tuple, .. } => assert_eq!(tuple, vec![3, 4]),
            other => panic!("{other:?}"),
        }
        let a = vec![spec("block(5: 1..2)"), spec("block(5: 1..2)")];
        let gap = OpenBox::new(&[(0.905, 0.915), (0.405, 0.415)]).unwrap();
        match witness_in_box(&a, &gap, 100_000, false, NormKind::Euclidean).unwrap() {
            WitnessOutcome::NotFound { scales } => assert!(scales.len() > 10),
            other => panic!("{other:?}"),
        }
        let ap = vec![spec("primes-ap(4, 1)"), spec("primes-ap(4, 3)")];
        let near_diag = OpenBox::new(&[(0.7, 0.72), (0.69, 0.715)]).unwrap();
        match witness_in_box(&ap, &near_diag, 1000, false, NormKind::Euclidean).unwrap() {
            WitnessOutcome::Found { tuple, point, .. } => {
                assert!(crate::arith::is_prime(tuple[0]) && tuple[0] % 4 == 1);
                assert!(crate::arith::is_prime(tuple[1]) && tuple[1] % 4 == 3);
                assert!(near_diag.contains(point.coords()));
            }
            other => panic!("{other:?}"),
        }
        let off = OpenBox::new(&[(0.1, 0.2), (0.1, 0.2)]).unwrap();
        assert!(witness_in_box(&nn, &off, 100, false, NormKind::Euclidean).is_err());
    }

    #[test]
    fn substitution_tends_to_projection() {
        let nn = vec![spec("naturals"), spec("naturals"), spec("naturals")];
        let subset = geometry::IndexSubset::new([0, 1], 3).unwrap();
        let w = substitution_witness(&nn, &[3000, 4000, 5000], &subset, 10, true).unwrap();
        assert_eq!(w, vec![3000, 4000, 1]);
        let x = geometry::rho_integer(&w, NormKind::Euclidean).unwrap();
        let target = geometry::rho_projection(
            &geometry::rho_integer(&[3000, 4000, 5000], NormKind::Euclidean).unwrap(),
            &subset,
        )
        .unwrap();
        assert!(geometry::distance(&x, &target).unwrap() < 1e-3);
    }
}
