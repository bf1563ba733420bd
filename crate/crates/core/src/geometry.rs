//! The non-negative octant of the unit sphere and the maps acting on it.
//!
//! Indices in this module are 0-based: coordinate `i` of a point is
//! `coords()[i]`, an [`IndexSubset`] holds 0-based positions and a
//! [`Permutation`] maps `0..k` onto itself.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{config, domain, Result};

/// Absolute tolerance for the unit-norm invariant of [`DirectionPoint`].
pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;

/// Which norm `rho` divides by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NormKind {
    #[default]
    Euclidean,
    L1,
}

impl NormKind {
    pub fn norm(self, xs: &[f64]) -> f64 {
        match self {
            NormKind::L1 => xs.iter().map(|x| x.abs()).sum(),
            NormKind::Euclidean => {
                let scale = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                if scale == 0.0 || !scale.is_finite() {
                    return scale;
                }
                let sum: f64 = xs.iter().map(|x| (x / scale) * (x / scale)).sum();
                scale * sum.sqrt()
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Euclidean => "euclidean",
            NormKind::L1 => "l1",
        }
    }
}

impl std::str::FromStr for NormKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(NormKind::Euclidean),
            "l1" => Ok(NormKind::L1),
            other => config(format!("unknown norm `{other}` (expected euclidean or l1)")),
        }
    }
}

/// A point of the sphere octant: `k >= 2` coordinates in `[0, 1]` with unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionPoint {
    coords: Vec<f64>,
    norm: NormKind,
}

impl DirectionPoint {
    /// Validates `coords` against the octant invariants.
    pub fn new(coords: Vec<f64>, norm: NormKind) -> Result<Self> {
        if coords.len() < 2 {
            return domain(format!("direction needs k >= 2 coordinates, got {}", coords.len()));
        }
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() || !(0.0..=1.0 + UNIT_NORM_TOLERANCE).contains(&c) {
                return domain(format!("coordinate {i} = {c} is outside [0, 1]"));
            }
        }
        if coords.iter().all(|&c| c == 0.0) {
            return domain("direction has no positive coordinate");
        }
        let n = norm.norm(&coords);
        if (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return domain(format!("{} norm is {n}, expected 1", norm.name()));
        }
        Ok(DirectionPoint { coords, norm })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    /// Smallest coordinate; a point is within `eps` of a coordinate hyperplane iff this is `< eps`.
    pub fn min_coord(&self) -> f64 {
        self.coords.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

/// `x / |x|` for a non-negative, non-zero vector.
pub fn rho(x: &[f64], norm: NormKind) -> Result<DirectionPoint> {
    if x.len() < 2 {
        return domain(format!("rho needs k >= 2 coordinates, got {}", x.len()));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return domain(format!("coordinate {i} = {} is negative or not finite", x[i]));
    }
    let n = norm.norm(x);
    if n == 0.0 {
        return domain("rho is undefined on the zero vector");
    }
    let coords = x.iter().map(|v| (v / n).min(1.0)).collect();
    DirectionPoint::new(coords, norm)
}

/// `rho` of an integer tuple.
///
/// Coordinates are first divided by the largest one, so the image depends
/// only on the exact ratios: integer multiples of a tuple give bit-identical
/// images, and so does the streaming path used by the diagnostics.
pub fn rho_integer(x: &[u64], norm: NormKind) -> Result<DirectionPoint> {
    if x.len() < 2 {
        return domain(format!("rho needs k >= 2 coordinates, got {}", x.len()));
    }
    let mut out = vec![0.0; x.len()];
    if !rho_u64_into(x, norm, &mut out) {
        return domain("rho is undefined on the zero vector");
    }
    DirectionPoint::new(out, norm)
}

/// Writes `rho(x)` into `out`; false for the zero vector.
pub(crate) fn rho_u64_into(x: &[u64], norm: NormKind, out: &mut [f64]) -> bool {
    let m = x.iter().copied().max().unwrap_or(0);
    if m == 0 {
        return false;
    }
    let m = m as f64;
    for (o, &v) in out.iter_mut().zip(x) {
        *o = v as f64 / m;
    }
    let n = match norm {
        NormKind::Euclidean => out.iter().map(|r| r * r).sum::<f64>().sqrt(),
        NormKind::L1 => out.iter().sum::<f64>(),
    };
    for o in out.iter_mut() {
        *o = (*o / n).min(1.0);
    }
    true
}

/// A non-empty set of 0-based coordinate positions in a `k`-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSubset {
    indices: Vec<usize>,
    dim: usize,
}

impl IndexSubset {
    pub fn new(indices: impl IntoIterator<Item = usize>, dim: usize) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return domain("index subset must be non-empty");
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= dim) {
            return domain(format!("index {i} out of range for dimension {dim}"));
        }
        Ok(IndexSubset { indices, dim })
    }

    pub fn full(dim: usize) -> Self {
        IndexSubset { indices: (0..dim).collect(), dim }
    }

    /// Every non-empty proper subset of `0..dim`, ordered by bitmask.
    pub fn proper_subsets(dim: usize) -> Vec<IndexSubset> {
        assert!(dim < 32, "dimension too large to enumerate subsets");
        (1u32..(1 << dim) - 1)
            .map(|mask| IndexSubset {
                indices: (0..dim).filter(|i| mask & (1 << i) != 0).collect(),
                dim,
            })
            .collect()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.dim
    }

    /// True when some coordinate of `x` indexed by this subset is non-zero.
    pub fn meets(&self, x: &[f64]) -> bool {
        self.indices.iter().any(|&i| x.get(i).is_some_and(|&v| v != 0.0))
    }
}

/// Zeroes the coordinates outside `subset` and renormalizes.
pub fn rho_projection(x: &DirectionPoint, subset: &IndexSubset) -> Result<DirectionPoint> {
    if subset.dim() != x.dim() {
        return domain(format!(
            "index subset has dimension {}, point has {}",
            subset.dim(),
            x.dim()
        ));
    }
    if !subset.meets(x.coords()) {
        return domain("index subset does not meet the point; projection would be the zero vector");
    }
    // already supported on the subset: renormalizing again would only add rounding
    if (0..x.dim()).all(|i| subset.contains(i) || x.coords()[i] == 0.0) {
        return Ok(x.clone());
    }
    let y: Vec<f64> = x
        .coords()
        .iter()
        .enumerate()
        .map(|(i, &v)| if subset.contains(i) { v } else { 0.0 })
        .collect();
    rho(&y, x.norm_kind())
}

/// A bijection on `0..k`. Applied to a tuple it yields `(x[p(0)], ..., x[p(k-1)])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return domain(format!("{images:?} is not a bijection on 0..{}", images.len()));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(k: usize) -> Self {
        Permutation { images: (0..k).collect() }
    }

    pub fn transposition(k: usize, i: usize, j: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        if i >= k || j >= k {
            return domain(format!("transposition ({i} {j}) out of range for k = {k}"));
        }
        images.swap(i, j);
        Ok(Permutation { images })
    }

    /// All `k!` permutations in lexicographic order of their image vectors.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation { images: current.clone() });
            // next lexicographic permutation
            let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..k).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p] = i;
        }
        Permutation { images: inv }
    }

    pub fn apply<T: Copy>(&self, xs: &[T]) -> Vec<T> {
        self.images.iter().map(|&p| xs[p]).collect()
    }
}

/// Rearranges coordinates: output coordinate `i` is input coordinate `p(i)`.
pub fn permute(x: &DirectionPoint, p: &Permutation) -> Result<DirectionPoint> {
    if p.len() != x.dim() {
        return domain(format!("permutation of {} elements applied to a {}-dimensional point", p.len(), x.dim()));
    }
    Ok(DirectionPoint { coords: p.apply(x.coords()), norm: x.norm })
}

/// Euclidean distance between the coordinate tuples of two points.
pub fn distance(x: &DirectionPoint, y: &DirectionPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return domain(format!("dimension mismatch: {} vs {}", x.dim(), y.dim()));
    }
    if x.norm_kind() != y.norm_kind() {
        return domain("points normalized under different norms");
    }
    Ok(euclidean(x.coords(), y.coords()))
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// A product of open intervals `(a_i, b_i)` with `0 <= a_i < b_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl OpenBox {
    pub fn new(intervals: &[(f64, f64)]) -> Result<Self> {
        if intervals.len() < 2 {
            return domain("box needs k >= 2 intervals");
        }
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a >= 0.0 && a < b) {
                return domain(format!("interval {i} = ({a}, {b}) needs 0 <= a < b"));
            }
        }
        Ok(OpenBox {
            lower: intervals.iter().map(|p| p.0).collect(),
            upper: intervals.iter().map(|p| p.1).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (a, b))| a < v && v < b)
    }

    /// The box is convex and the norm is monotone on the octant, so the norm
    /// ranges over exactly `(|a|, |b|)` inside it.
    pub fn meets_sphere(&self, norm: NormKind) -> bool {
        norm.norm(&self.lower) < 1.0 && 1.0 < norm.norm(&self.upper)
    }

    /// A unit-norm point strictly inside the box, on the diagonal segment from
    /// the lower to the upper corner.
    pub fn sphere_point(&self, norm: NormKind) -> Result<Vec<f64>> {
        if !self.meets_sphere(norm) {
            return domain("box does not meet the unit sphere octant");
        }
        let at = |t: f64| -> Vec<f64> {
            self.lower.iter().zip(&self.upper).map(|(a, b)| a + t * (b - a)).collect()
        };
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm.norm(&at(mid)) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(at(0.5 * (lo + hi)))
    }
}

/// How probe points are laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeScheme {
    /// Angle grid for `k = 2`, normalized simplex lattice for `k >= 3`.
    Grid,
    /// `resolution` points drawn uniformly from the octant.
    Random { seed: u64 },
}

/// Probe points standing in for "every open set of the octant".
///
/// For the grid scheme with `k = 2` the points sit at angles
/// `j * pi / (2 (resolution - 1))`; for `k >= 3` they are the lattice points
/// `n / resolution` of the simplex `sum x_i = 1`, normalized.
pub fn probe_grid(k: usize, resolution: usize, scheme: ProbeScheme, norm: NormKind) -> Result<Vec<DirectionPoint>> {
    if k < 2 {
        return config(format!("probe grid needs k >= 2, got {k}"));
    }
    if resolution < 2 {
        return config(format!("probe resolution must be >= 2, got {resolution}"));
    }
    match scheme {
        ProbeScheme::Grid if k == 2 => (0..resolution)
            .map(|j| {
                let (c, s) = if j == 0 {
                    (1.0, 0.0)
                } else if j == resolution - 1 {
                    (0.0, 1.0)
                } else {
                    let theta = j as f64 * FRAC_PI_2 / (resolution - 1) as f64;
                    (theta.cos(), theta.sin())
                };
                rho(&[c, s], norm)
            })
            .collect(),
        ProbeScheme::Grid => {
            let mut out = Vec::new();
            let mut parts = vec![0usize; k];
            simplex_lattice(&mut parts, 0, resolution, &mut |p| {
                let x: Vec<f64> = p.iter().map(|&n| n as f64).collect();
                out.push(rho(&x, norm));
            });
            out.into_iter().collect()
        }
        ProbeScheme::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..resolution)
                .map(|_| loop {
                    let x: Vec<f64> = (0..k).map(|_| {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        g.abs()
                    }).collect();
                    if x.iter().any(|&v| v > 0.0) {
                        break rho(&x, norm);
                    }
                })
                .collect()
        }
    }
}

// Non-negative integer vectors summing to `remaining`, in lexicographically decreasing order.
fn simplex_lattice(parts: &mut [usize], pos: usize, remaining: usize, emit: &mut impl FnMut(&[usize])) {
    if pos == parts.len() - 1 {
        parts[pos] = remaining;
        emit(parts);
        return;
    }
    for n in (0..=remaining).rev() {
        parts[pos] = n;
        simplex_lattice(parts, pos + 1, remaining - n, emit);
    }
}
