//! Declarative descriptions of the integer-set families used as coordinates
//! of direction sets, with exact ascending enumeration and membership tests.
//!
//! Every family has a one-line text form (see [`IntegerSetSpec`]'s `FromStr`),
//! shared by the CLI, config files and the Python bindings:
//!
//! | text                                 | set                                           |
//! |--------------------------------------|-----------------------------------------------|
//! | `block(5: 1..2, 2..3)`               | union over k >= 0 of `[a q^k, b q^k)`          |
//! | `primes-ap(4, 1)`, `primes`          | primes `= a (mod m)`                          |
//! | `poly(x1^2 + x2^2; L=316; diag)`     | positive values of f on `{1..L}^m` (+ diagonal) |
//! | `perfect-powers(3)`                  | `m^r`, `m >= 2`, `r >= 3`                      |
//! | `n-omega`, `n-phi`                   | `n omega(n)`, `n phi(n)`                      |
//! | `two-three-powers`                   | `2^m (m >= 2)` and `3^n (n >= 2)`             |
//! | `explicit(1, 2, 3)`, `file(path)`    | a literal ascending list                       |
//!
//! Aliases: `naturals`, `primes`, `squares`, `evens`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;

use crate::arith::{self, SieveKind};
use crate::error::{config, resource, Error, Result};
use crate::poly::{cauchy_bound, forward_difference, horner, Polynomial};

/// Largest lattice box `L^m` a polynomial image may scan.
pub const LATTICE_BUDGET: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IntegerSetSpec {
    /// `U = union_k union_segments [a q^k, b q^k) ∩ N`.
    BlockUnion { q: u64, segments: Vec<(Ratio<u64>, Ratio<u64>)> },
    PrimesInAP { m: u64, a: u64 },
    /// Positive values of `poly` on the box `{1..lattice_bound}^m`; with
    /// `diagonal`, also every positive `poly(n, ..., n)`.
    PolynomialImage { poly: Polynomial, lattice_bound: u64, diagonal: bool },
    PerfectPowers { min_exponent: u32 },
    WeightedByOmega,
    WeightedByTotient,
    TwoThreePowers,
    Explicit { values: Vec<u64> },
}

/// The box a polynomial image was enumerated over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    pub arity: usize,
    pub bound: u64,
}

/// Result of [`enumerate_detailed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetEnumeration {
    pub values: Vec<u64>,
    pub lattice_box: Option<LatticeBox>,
    pub warnings: Vec<String>,
}

impl IntegerSetSpec {
    pub fn naturals() -> Self {
        IntegerSetSpec::BlockUnion { q: 2, segments: vec![(Ratio::from_integer(1), Ratio::from_integer(2))] }
    }

    pub fn primes() -> Self {
        IntegerSetSpec::PrimesInAP { m: 1, a: 0 }
    }

    pub fn block_union(q: u64, segments: &[(u64, u64)]) -> Self {
        IntegerSetSpec::BlockUnion {
            q,
            segments: segments.iter().map(|&(a, b)| (Ratio::from_integer(a), Ratio::from_integer(b))).collect(),
        }
    }

    pub fn explicit(values: Vec<u64>) -> Result<Self> {
        let spec = IntegerSetSpec::Explicit { values };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the structural requirements of each family.
    pub fn validate(&self) -> Result<()> {
        match self {
            IntegerSetSpec::BlockUnion { q, segments } => {
                if *q < 2 {
                    return config(format!("block union needs q >= 2, got {q}"));
                }
                if segments.is_empty() {
                    return config("block union needs at least one segment");
                }
                for (a, b) in segments {
                    if *a.numer() == 0 || a >= b {
                        return config(format!("block segment ({a}, {b}) needs 0 < a < b"));
                    }
                }
                Ok(())
            }
            IntegerSetSpec::PrimesInAP { m, a } => arith::check_residue_class(*m, *a),
            IntegerSetSpec::PolynomialImage { poly, lattice_bound, diagonal } => {
                if *lattice_bound == 0 {
                    return config("polynomial image needs lattice bound L >= 1");
                }
                if *diagonal {
                    check_diagonal_hypothesis(poly)?;
                }
                Ok(())
            }
            IntegerSetSpec::PerfectPowers { min_exponent } => {
                if *min_exponent < 3 {
                    return config(format!("perfect powers need min exponent >= 3, got {min_exponent}"));
                }
                Ok(())
            }
            IntegerSetSpec::Explicit { values } => {
                if values.first() == Some(&0) {
                    return config("explicit sets hold positive integers only");
                }
                if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
                    return config(format!("explicit values must be strictly ascending ({} then {})", w[0], w[1]));
                }
                Ok(())
            }
            IntegerSetSpec::WeightedByOmega | IntegerSetSpec::WeightedByTotient | IntegerSetSpec::TwoThreePowers => {
                Ok(())
            }
        }
    }

    /// Ascending distinct elements `<= bound`.
    pub fn enumerate(&self, bound: u64) -> Result<Vec<u64>> {
        enumerate_detailed(self, bound).map(|e| e.values)
    }

    pub fn contains(&self, n: u64) -> bool {
        contains(self, n)
    }
}

fn check_diagonal_hypothesis(poly: &Polynomial) -> Result<()> {
    if poly.total_degree() == 0 {
        return config("diagonal sequence needs a polynomial of degree >= 1");
    }
    let lead = poly.leading_sum();
    if lead <= 0 {
        return config(format!(
            "the top-degree coefficients of `{poly}` sum to {lead}; the diagonal g(n) = f(n, ..., n) is not eventually positive and increasing"
        ));
    }
    Ok(())
}

/// Enumeration with the lattice box (polynomial images) and warnings.
pub fn enumerate_detailed(spec: &IntegerSetSpec, bound: u64) -> Result<SetEnumeration> {
    spec.validate()?;
    let mut lattice_box = None;
    let mut warnings = Vec::new();
    let values = match spec {
        IntegerSetSpec::BlockUnion { q, segments } => block_union_values(*q, segments, bound),
        IntegerSetSpec::PrimesInAP { m, a } => {
            if bound < 2 {
                Vec::new()
            } else {
                arith::primes_in_ap(*m, *a, bound)?
            }
        }
        IntegerSetSpec::PolynomialImage { poly, lattice_bound, diagonal } => {
            lattice_box = Some(LatticeBox { arity: poly.arity(), bound: *lattice_bound });
            let mut v = lattice_values(poly, *lattice_bound, bound)?;
            if *diagonal {
                v.extend(diagonal_values_up_to(poly, bound)?);
                v.sort_unstable();
                v.dedup();
            }
            if v.is_empty() {
                warnings.push(format!(
                    "`{spec}` has no positive values <= {bound} on the lattice box {{1..{lattice_bound}}}^{}",
                    poly.arity()
                ));
            }
            v
        }
        IntegerSetSpec::PerfectPowers { min_exponent } => perfect_powers(*min_exponent, bound),
        IntegerSetSpec::WeightedByOmega => arith::representable_values(SieveKind::Omega, bound)?,
        IntegerSetSpec::WeightedByTotient => arith::representable_values(SieveKind::Totient, bound)?,
        IntegerSetSpec::TwoThreePowers => two_three_powers(bound),
        IntegerSetSpec::Explicit { values } => values.iter().copied().take_while(|&v| v <= bound).collect(),
    };
    Ok(SetEnumeration { values, lattice_box, warnings })
}

fn ceil_div(num: u128, den: u128) -> u128 {
    num.div_ceil(den)
}

fn block_union_values(q: u64, segments: &[(Ratio<u64>, Ratio<u64>)], bound: u64) -> Vec<u64> {
    // inclusive integer ranges [lo, hi] = [ceil(a q^k), ceil(b q^k) - 1]
    let mut ranges: Vec<(u64, u64)> = Vec::new();
    for (a, b) in segments {
        let (an, ad) = (*a.numer() as u128, *a.denom() as u128);
        let (bn, bd) = (*b.numer() as u128, *b.denom() as u128);
        let mut scale: u128 = 1;
        while let Some(lo) = an.checked_mul(scale).map(|v| ceil_div(v, ad)) {
            if lo > bound as u128 {
                break;
            }
            let hi_excl = bn.checked_mul(scale).map(|v| ceil_div(v, bd)).unwrap_or(u128::MAX);
            let lo = lo.max(1);
            let hi = hi_excl.saturating_sub(1).min(bound as u128);
            if lo <= hi {
                ranges.push((lo as u64, hi as u64));
            }
            match scale.checked_mul(q as u128) {
                Some(s) => scale = s,
                None => break,
            }
        }
    }
    ranges.sort_unstable();
    let mut out = Vec::new();
    let mut next = 1u64;
    for (lo, hi) in ranges {
        let start = lo.max(next);
        if start <= hi {
            out.extend(start..=hi);
            next = hi + 1;
        }
    }
    out
}

fn block_union_contains(q: u64, segments: &[(Ratio<u64>, Ratio<u64>)], n: u64) -> bool {
    let n = n as u128;
    segments.iter().any(|(a, b)| {
        let (an, ad) = (*a.numer() as u128, *a.denom() as u128);
        let (bn, bd) = (*b.numer() as u128, *b.denom() as u128);
        let mut scale: u128 = 1;
        loop {
            // a q^k <= n < b q^k, cross-multiplied
            let Some(lo) = an.checked_mul(scale) else { return false };
            if lo > n * ad {
                return false;
            }
            if bn.checked_mul(scale).is_none_or(|hi| n * bd < hi) {
                return true;
            }
            match scale.checked_mul(q as u128) {
                Some(s) => scale = s,
                None => return false,
            }
        }
    })
}

fn lattice_size(arity: usize, l: u64) -> u128 {
    (0..arity).try_fold(1u128, |acc, _| acc.checked_mul(l as u128)).unwrap_or(u128::MAX)
}

fn for_each_lattice_point(arity: usize, l: u64, mut f: impl FnMut(&[u64]) -> bool) {
    let mut point = vec![1u64; arity];
    loop {
        if !f(&point) {
            return;
        }
        let mut i = 0;
        loop {
            if i == arity {
                return;
            }
            if point[i] < l {
                point[i] += 1;
                break;
            }
            point[i] = 1;
            i += 1;
        }
    }
}

fn lattice_values(poly: &Polynomial, l: u64, bound: u64) -> Result<Vec<u64>> {
    let size = lattice_size(poly.arity(), l);
    if size > LATTICE_BUDGET {
        return resource(format!(
            "lattice box {{1..{l}}}^{} has {size} points, over the budget {LATTICE_BUDGET}",
            poly.arity()
        ));
    }
    let mut out = Vec::new();
    for_each_lattice_point(poly.arity(), l, |p| {
        if let Some(v) = poly.eval(p) {
            if v >= 1 && v <= bound as i128 {
                out.push(v as u64);
            }
        }
        true
    });
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Past this `n`, `g(n) = f(n, ..., n)` is positive and strictly increasing.
fn diagonal_monotone_from(coeffs: &[i128]) -> Result<u64> {
    let diff = forward_difference(coeffs).ok_or_else(|| Error::Resource("diagonal coefficients overflow".into()))?;
    let b = cauchy_bound(coeffs).max(cauchy_bound(&diff));
    Ok(b.ceil() as u64 + 1)
}

fn diagonal_values_up_to(poly: &Polynomial, bound: u64) -> Result<Vec<u64>> {
    let coeffs = poly.diagonal_coefficients();
    let start = diagonal_monotone_from(&coeffs)?;
    let mut out = Vec::new();
    let mut n: u64 = 1;
    loop {
        match horner(&coeffs, n as i128) {
            Some(v) if v >= 1 && v <= bound as i128 => out.push(v as u64),
            Some(v) if v > bound as i128 && n >= start => break,
            None if n >= start => break,
            _ => {}
        }
        n += 1;
    }
    Ok(out)
}

/// `(n, g(n))` for the first `count` values of `n >= 1` with `g(n) = f(n, ..., n) > 0`.
///
/// Requires the top-degree coefficients of `f` to have a positive sum, which
/// makes `g` eventually increasing with consecutive ratios tending to 1.
pub fn diagonal_sequence(spec: &IntegerSetSpec, count: usize) -> Result<Vec<(u64, u64)>> {
    let IntegerSetSpec::PolynomialImage { poly, .. } = spec else {
        return config("diagonal sequences are defined for polynomial images only");
    };
    check_diagonal_hypothesis(poly)?;
    let coeffs = poly.diagonal_coefficients();
    let mut out = Vec::with_capacity(count);
    let mut n: u64 = 1;
    while out.len() < count {
        let v = horner(&coeffs, n as i128).ok_or_else(|| Error::Resource(format!("g({n}) overflows")))?;
        if v >= 1 {
            let v = u64::try_from(v).map_err(|_| Error::Resource(format!("g({n}) exceeds u64")))?;
            out.push((n, v));
        }
        n += 1;
    }
    Ok(out)
}

fn perfect_powers(min_exponent: u32, bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut r = min_exponent;
    while r < 64 && 2u64.checked_pow(r).is_some_and(|v| v <= bound) {
        let mut m = 2u64;
        while let Some(v) = m.checked_pow(r).filter(|&v| v <= bound) {
            out.push(v);
            m += 1;
        }
        r += 1;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Largest `m` with `m^r <= n`.
fn integer_root(n: u64, r: u32) -> u64 {
    let mut m = (n as f64).powf(1.0 / r as f64).round() as u64;
    while m > 0 && m.checked_pow(r).is_none_or(|v| v > n) {
        m -= 1;
    }
    while (m + 1).checked_pow(r).is_some_and(|v| v <= n) {
        m += 1;
    }
    m
}

fn two_three_powers(bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for base in [2u64, 3] {
        let mut v = base * base;
        while v <= bound {
            out.push(v);
            match v.checked_mul(base) {
                Some(next) => v = next,
                None => break,
            }
        }
    }
    out.sort_unstable();
    out
}

fn is_power_of(mut n: u64, base: u64) -> bool {
    while n.is_multiple_of(base) {
        n /= base;
    }
    n == 1
}

fn totient_weight_contains(n: u64) -> bool {
    // n = k phi(k) forces k | n; walk the divisors of n with their factorizations
    let factors = arith::factorize(n);
    let mut exps = vec![0u32; factors.len()];
    loop {
        let mut k: u64 = 1;
        let mut phi: u64 = 1;
        for (&(p, _), &e) in factors.iter().zip(&exps) {
            if e > 0 {
                k *= p.pow(e);
                phi *= (p - 1) * p.pow(e - 1);
            }
        }
        if k as u128 * phi as u128 == n as u128 {
            return true;
        }
        let mut i = 0;
        loop {
            if i == factors.len() {
                return false;
            }
            if exps[i] < factors[i].1 {
                exps[i] += 1;
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// Membership, consistent with [`IntegerSetSpec::enumerate`] at bound `n`.
pub fn contains(spec: &IntegerSetSpec, n: u64) -> bool {
    if n == 0 || spec.validate().is_err() {
        return false;
    }
    match spec {
        IntegerSetSpec::BlockUnion { q, segments } => block_union_contains(*q, segments, n),
        IntegerSetSpec::PrimesInAP { m, a } => n % m == a % m && arith::is_prime(n),
        IntegerSetSpec::PolynomialImage { poly, lattice_bound, diagonal } => {
            let target = n as i128;
            let mut found = false;
            if lattice_size(poly.arity(), *lattice_bound) <= LATTICE_BUDGET {
                for_each_lattice_point(poly.arity(), *lattice_bound, |p| {
                    found = poly.eval(p) == Some(target);
                    !found
                });
            }
            found || (*diagonal && diagonal_values_up_to(poly, n).is_ok_and(|v| v.contains(&n)))
        }
        IntegerSetSpec::PerfectPowers { min_exponent } => {
            (*min_exponent..64).any(|r| {
                let m = integer_root(n, r);
                m >= 2 && m.checked_pow(r) == Some(n)
            })
        }
        IntegerSetSpec::WeightedByOmega => {
            (1..=16u64).any(|w| n.is_multiple_of(w) && n / w >= 2 && arith::omega_of(n / w) as u64 == w)
        }
        IntegerSetSpec::WeightedByTotient => totient_weight_contains(n),
        IntegerSetSpec::TwoThreePowers => n >= 4 && (is_power_of(n, 2) || (n >= 9 && is_power_of(n, 3))),
        IntegerSetSpec::Explicit { values } => values.binary_search(&n).is_ok(),
    }
}

/// Parses one positive integer per line, strictly ascending. Blank lines are skipped.
pub fn parse_explicit_list(text: &str) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: i + 1, message };
        let v: u64 = line.parse().map_err(|_| err(format!("`{line}` is not a positive integer")))?;
        if v == 0 {
            return Err(err("0 is not a positive integer".into()));
        }
        match out.last() {
            Some(&prev) if prev == v => return Err(err(format!("duplicate value {v}"))),
            Some(&prev) if prev > v => return Err(err(format!("{v} is below the previous value {prev}"))),
            _ => out.push(v),
        }
    }
    Ok(out)
}

pub fn load_explicit(path: &Path) -> Result<IntegerSetSpec> {
    let text = std::fs::read_to_string(path)?;
    IntegerSetSpec::explicit(parse_explicit_list(&text)?)
}

fn fmt_ratio(r: &Ratio<u64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for IntegerSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegerSetSpec::BlockUnion { q, segments } => {
                let segs: Vec<String> =
                    segments.iter().map(|(a, b)| format!("{}..{}", fmt_ratio(a), fmt_ratio(b))).collect();
                write!(f, "block({q}: {})", segs.join(", "))
            }
            IntegerSetSpec::PrimesInAP { m, a } => write!(f, "primes-ap({m}, {a})"),
            IntegerSetSpec::PolynomialImage { poly, lattice_bound, diagonal } => {
                write!(f, "poly({poly}; L={lattice_bound}{})", if *diagonal { "; diag" } else { "" })
            }
            IntegerSetSpec::PerfectPowers { min_exponent } => write!(f, "perfect-powers({min_exponent})"),
            IntegerSetSpec::WeightedByOmega => write!(f, "n-omega"),
            IntegerSetSpec::WeightedByTotient => write!(f, "n-phi"),
            IntegerSetSpec::TwoThreePowers => write!(f, "two-three-powers"),
            IntegerSetSpec::Explicit { values } => {
                let vs: Vec<String> = values.iter().map(u64::to_string).collect();
                write!(f, "explicit({})", vs.join(", "))
            }
        }
    }
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
        None => s.parse().map(Ratio::from_integer).map_err(|_| bad()),
    }
}

fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim().parse().map_err(|_| Error::Config(format!("cannot parse {what} `{}`", s.trim())))
}

impl FromStr for IntegerSetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) => {
                let Some(inner) = s[i + 1..].strip_suffix(')') else {
                    return config(format!("missing `)` in set spec `{s}`"));
                };
                (s[..i].trim(), Some(inner))
            }
            None => (s, None),
        };
        let no_args = |spec: IntegerSetSpec| match args {
            None => Ok(spec),
            Some(_) => config(format!("`{name}` takes no arguments")),
        };
        let spec = match name {
            "naturals" => no_args(IntegerSetSpec::naturals())?,
            "primes" => no_args(IntegerSetSpec::primes())?,
            "squares" => no_args("poly(x1^2; L=1; diag)".parse()?)?,
            "evens" => no_args("poly(2*x1; L=1; diag)".parse()?)?,
            "n-omega" => no_args(IntegerSetSpec::WeightedByOmega)?,
            "n-phi" => no_args(IntegerSetSpec::WeightedByTotient)?,
            "two-three-powers" => no_args(IntegerSetSpec::TwoThreePowers)?,
            "perfect-powers" => IntegerSetSpec::PerfectPowers {
                min_exponent: match args {
                    None => 3,
                    Some(a) => parse_u64(a, "exponent")? as u32,
                },
            },
            "primes-ap" => {
                let a = args.ok_or_else(|| Error::Config("primes-ap needs (m, a)".into()))?;
                let parts: Vec<&str> = a.split(',').collect();
                if parts.len() != 2 {
                    return config(format!("primes-ap needs (m, a), got `{a}`"));
                }
                IntegerSetSpec::PrimesInAP { m: parse_u64(parts[0], "modulus")?, a: parse_u64(parts[1], "residue")? }
            }
            "block" => {
                let a = args.ok_or_else(|| Error::Config("block needs (q: a..b, ...)".into()))?;
                let (q, segs) = a
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("block needs `q: a..b, ...`, got `{a}`")))?;
                let segments = segs
                    .split(',')
                    .map(|seg| {
                        let (lo, hi) = seg
                            .split_once("..")
                            .ok_or_else(|| Error::Config(format!("block segment `{}` needs a..b", seg.trim())))?;
                        Ok((parse_ratio(lo)?, parse_ratio(hi)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                IntegerSetSpec::BlockUnion { q: parse_u64(q, "block base")?, segments }
            }
            "poly" => {
                let a = args.ok_or_else(|| Error::Config("poly needs (f; L=..)".into()))?;
                let mut parts = a.split(';');
                let poly: Polynomial = parts.next().unwrap_or("").parse()?;
                let mut lattice_bound = None;
                let mut diagonal = false;
                for opt in parts {
                    let opt = opt.trim();
                    if opt == "diag" {
                        diagonal = true;
                    } else if let Some(l) = opt.strip_prefix("L=") {
                        lattice_bound = Some(parse_u64(l, "lattice bound")?);
                    } else {
                        return config(format!("unknown poly option `{opt}`"));
                    }
                }
                let lattice_bound =
                    lattice_bound.ok_or_else(|| Error::Config(format!("poly spec `{s}` needs an explicit L=")))?;
                IntegerSetSpec::PolynomialImage { poly, lattice_bound, diagonal }
            }
            "explicit" => {
                let a = args.unwrap_or("");
                let values = a
                    .split(',')
                    .filter(|v| !v.trim().is_empty())
                    .map(|v| parse_u64(v, "explicit value"))
                    .collect::<Result<Vec<_>>>()?;
                IntegerSetSpec::Explicit { values }
            }
            "file" => {
                let path = args.ok_or_else(|| Error::Config("file needs (path)".into()))?;
                load_explicit(Path::new(path.trim()))?
            }
            other => return config(format!("unknown set family `{other}` in `{s}`")),
        };
        spec.validate()?;
        Ok(spec)
    }
}
