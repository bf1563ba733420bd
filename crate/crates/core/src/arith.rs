//! Sieves for primes, `omega(n)` (distinct prime divisors) and Euler's
//! `phi(n)`, primes in residue classes, and the counting function
//! `f_X = #{ n <= X : n = k f(k) for some k }`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{config, resource, Result};
use crate::parallel::with_workers;

/// Largest bound served by an in-memory [`SieveTable`]; above it use [`SegmentedSieve`].
pub const SEGMENTED_THRESHOLD: u64 = 100_000_000;

/// Reference value of the constant `c` in `phi_X ~ c sqrt(X)`.
pub const TOTIENT_COUNT_CONSTANT: f64 = 1.365;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SieveKind {
    Omega,
    Totient,
    Primes,
}

impl SieveKind {
    pub fn name(self) -> &'static str {
        match self {
            SieveKind::Omega => "omega",
            SieveKind::Totient => "totient",
            SieveKind::Primes => "primes",
        }
    }
}

impl std::str::FromStr for SieveKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" => Ok(SieveKind::Omega),
            "totient" | "phi" => Ok(SieveKind::Totient),
            "primes" => Ok(SieveKind::Primes),
            other => config(format!("unknown sieve kind `{other}` (expected omega, totient or primes)")),
        }
    }
}

/// Exact values of an arithmetic function on `0..=bound`.
///
/// For [`SieveKind::Primes`] the value is 1 on primes and 0 elsewhere.
/// Index 0 is unused and holds 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveTable {
    kind: SieveKind,
    bound: u64,
    values: Vec<u32>,
}

impl SieveTable {
    pub fn kind(&self) -> SieveKind {
        self.kind
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<u32> {
        self.values.get(usize::try_from(n).ok()?).copied()
    }
}

/// Linear sieve up to `bound`, O(bound) time.
pub fn sieve(kind: SieveKind, bound: u64) -> Result<SieveTable> {
    if bound == 0 {
        return config("sieve bound must be >= 1");
    }
    if bound > SEGMENTED_THRESHOLD {
        return resource(format!(
            "sieve bound {bound} exceeds the in-memory limit {SEGMENTED_THRESHOLD}; use the segmented sieve"
        ));
    }
    let n = bound as usize;
    let mut values = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    // `values[i] == 0` for i >= 2 marks "not yet reached", i.e. prime: every
    // composite gets a positive value before the outer loop arrives at it.
    match kind {
        SieveKind::Totient => {
            if n >= 1 {
                values[1] = 1;
            }
            for i in 2..=n {
                if values[i] == 0 {
                    values[i] = (i - 1) as u32;
                    primes.push(i as u32);
                }
                for &p in &primes {
                    let p = p as usize;
                    let Some(m) = i.checked_mul(p).filter(|&m| m <= n) else { break };
                    if i % p == 0 {
                        values[m] = values[i] * p as u32;
                        break;
                    }
                    values[m] = values[i] * (p as u32 - 1);
                }
            }
        }
        SieveKind::Omega | SieveKind::Primes => {
            for i in 2..=n {
                if values[i] == 0 {
                    values[i] = 1;
                    primes.push(i as u32);
                }
                for &p in &primes {
                    let p = p as usize;
                    let Some(m) = i.checked_mul(p).filter(|&m| m <= n) else { break };
                    if i % p == 0 {
                        values[m] = values[i];
                        break;
                    }
                    values[m] = values[i] + 1;
                }
            }
            if kind == SieveKind::Primes {
                values.iter_mut().for_each(|v| *v = 0);
                for &p in &primes {
                    values[p as usize] = 1;
                }
            }
        }
    }
    Ok(SieveTable { kind, bound, values })
}

/// All primes `<= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    if bound > SEGMENTED_THRESHOLD {
        let seg = SegmentedSieve::new(SieveKind::Primes, bound, 1 << 20).expect("bound >= 2");
        let mut out = Vec::new();
        for i in 0..seg.segment_count() {
            let (start, values) = seg.segment(i);
            out.extend(values.iter().enumerate().filter(|(_, &v)| v == 1).map(|(j, _)| start + j as u64));
        }
        return out;
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut m = i.saturating_mul(i);
        while m <= n {
            composite[m] = true;
            m += i;
        }
    }
    out
}

/// Primes `p <= bound` with `p = a (mod m)`. `m = 1` selects every prime.
pub fn primes_in_ap(m: u64, a: u64, bound: u64) -> Result<Vec<u64>> {
    check_residue_class(m, a)?;
    if bound < 2 {
        return config(format!("prime bound must be >= 2, got {bound}"));
    }
    let a = a % m;
    Ok(primes_up_to(bound).into_iter().filter(|p| p % m == a).collect())
}

pub(crate) fn check_residue_class(m: u64, a: u64) -> Result<()> {
    if m == 0 {
        return config("modulus must be >= 1");
    }
    let g = num_integer::gcd(a % m, m);
    if g != 1 {
        return config(format!(
            "gcd({a}, {m}) = {g}: the class holds at most one prime"
        ));
    }
    Ok(())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, `(p, e)` pairs ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    let mut cofactor_prime = is_prime(n);
    while n > 1 {
        if cofactor_prime || p.saturating_mul(p) > n {
            out.push((n, 1));
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
            cofactor_prime = is_prime(n);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out
}

pub fn omega_of(n: u64) -> u32 {
    factorize(n).len() as u32
}

pub fn totient_of(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// A sieve processed in fixed-length windows of `[1, bound]`.
///
/// Windows only read the shared base primes up to `sqrt(bound)`, so they can be
/// computed independently and in any order.
#[derive(Clone, Debug)]
pub struct SegmentedSieve {
    kind: SieveKind,
    bound: u64,
    segment_len: u64,
    base_primes: Vec<u64>,
}

impl SegmentedSieve {
    pub fn new(kind: SieveKind, bound: u64, segment_len: u64) -> Result<Self> {
        if bound == 0 {
            return config("sieve bound must be >= 1");
        }
        if segment_len == 0 {
            return config("segment length must be >= 1");
        }
        if bound > u32::MAX as u64 {
            return resource(format!("segmented sieve values are 32-bit; bound {bound} is too large"));
        }
        let root = (bound as f64).sqrt() as u64 + 1;
        Ok(SegmentedSieve { kind, bound, segment_len, base_primes: primes_up_to(root) })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn segment_count(&self) -> usize {
        self.bound.div_ceil(self.segment_len) as usize
    }

    /// Values for `n` in `[start, start + len)`, with `start = 1 + index * segment_len`.
    pub fn segment(&self, index: usize) -> (u64, Vec<u32>) {
        let lo = 1 + index as u64 * self.segment_len;
        let hi = (lo + self.segment_len - 1).min(self.bound);
        let len = (hi - lo + 1) as usize;
        let mut rest: Vec<u64> = (lo..=hi).collect();
        let mut omega = vec![0u32; len];
        let mut phi: Vec<u64> = (lo..=hi).collect();
        for &p in &self.base_primes {
            if p * p > hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m <= hi {
                let j = (m - lo) as usize;
                omega[j] += 1;
                phi[j] = phi[j] / p * (p - 1);
                while rest[j].is_multiple_of(p) {
                    rest[j] /= p;
                }
                m += p;
            }
        }
        let values = (0..len)
            .map(|j| {
                let n = lo + j as u64;
                let tail = rest[j];
                let totient = if tail > 1 { phi[j] / tail * (tail - 1) } else { phi[j] };
                match self.kind {
                    // phi(n) = n - 1 exactly for primes
                    SieveKind::Primes => u32::from(n >= 2 && totient == n - 1),
                    SieveKind::Omega => omega[j] + u32::from(tail > 1),
                    SieveKind::Totient => totient as u32,
                }
            })
            .collect();
        (lo, values)
    }
}

/// One checkpoint of the counting function `f_X`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountChkpt {
    pub x: u64,
    pub count: u64,
    /// `count / sqrt(X)` for totient, `count * ln ln X / X` for omega;
    /// `None` where the main term is not positive.
    pub ratio_to_reference: Option<f64>,
}

/// Powers of ten `>= 10` up to `x`, then `x` itself.
pub fn count_checkpoints(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 10u64;
    while p <= x {
        out.push(p);
        match p.checked_mul(10) {
            Some(next) => p = next,
            None => break,
        }
    }
    if out.last() != Some(&x) {
        out.push(x);
    }
    out
}

pub fn reference_ratio(kind: SieveKind, x: u64, count: u64) -> Option<f64> {
    let xf = x as f64;
    match kind {
        SieveKind::Totient => (x > 0).then(|| count as f64 / xf.sqrt()),
        SieveKind::Omega => {
            let ll = xf.ln().ln();
            (ll > 0.0).then(|| count as f64 * ll / xf)
        }
        SieveKind::Primes => None,
    }
}

fn check_weight_kind(kind: SieveKind) -> Result<()> {
    if kind == SieveKind::Primes {
        return config("k * f(k) counting needs the omega or totient kind");
    }
    Ok(())
}

struct Bitset {
    words: Vec<AtomicU64>,
}

impl Bitset {
    fn new(bits: u64) -> Self {
        Bitset { words: (0..bits / 64 + 1).map(|_| AtomicU64::new(0)).collect() }
    }

    fn set(&self, i: u64) {
        self.words[(i / 64) as usize].fetch_or(1 << (i % 64), Ordering::Relaxed);
    }

    fn into_words(self) -> Vec<u64> {
        self.words.into_iter().map(AtomicU64::into_inner).collect()
    }
}

fn mark(bits: &Bitset, k: u64, f: u32, x: u64) {
    if let Some(v) = k.checked_mul(f as u64) {
        if v >= 1 && v <= x {
            bits.set(v);
        }
    }
}

fn checkpoints_from_words(kind: SieveKind, words: &[u64], x: u64) -> Vec<CountChkpt> {
    let mut out = Vec::new();
    let mut count = 0u64;
    let mut next_bit = 0u64;
    for cp in count_checkpoints(x) {
        while next_bit <= cp {
            if next_bit.is_multiple_of(64) && next_bit + 63 <= cp {
                count += words[(next_bit / 64) as usize].count_ones() as u64;
                next_bit += 64;
            } else {
                count += (words[(next_bit / 64) as usize] >> (next_bit % 64)) & 1;
                next_bit += 1;
            }
        }
        out.push(CountChkpt { x: cp, count, ratio_to_reference: reference_ratio(kind, cp, count) });
    }
    out
}

fn representable_words(table: &SieveTable, x: u64) -> Result<Vec<u64>> {
    check_weight_kind(table.kind)?;
    if table.bound < x {
        return config(format!("sieve bound {} is below the counting bound {x}", table.bound));
    }
    let bits = Bitset::new(x);
    // k f(k) >= k whenever f(k) >= 1, so k never needs to exceed x
    for k in 1..=x {
        mark(&bits, k, table.values[k as usize], x);
    }
    Ok(bits.into_words())
}

/// `f_X` at [`count_checkpoints`] of `x`, counting only `n >= 1`.
pub fn representable_count(table: &SieveTable, x: u64) -> Result<Vec<CountChkpt>> {
    let words = representable_words(table, x)?;
    Ok(checkpoints_from_words(table.kind, &words, x))
}

/// Same counts as [`representable_count`], computed window by window so the
/// bound is limited by one bit per integer instead of a full table.
pub fn representable_count_segmented(kind: SieveKind, x: u64, workers: usize) -> Result<Vec<CountChkpt>> {
    check_weight_kind(kind)?;
    let seg = SegmentedSieve::new(kind, x, 1 << 18)?;
    let bits = Bitset::new(x);
    with_workers(workers, || {
        (0..seg.segment_count()).into_par_iter().for_each(|i| {
            let (start, values) = seg.segment(i);
            for (j, &f) in values.iter().enumerate() {
                mark(&bits, start + j as u64, f, x);
            }
        })
    });
    Ok(checkpoints_from_words(kind, &bits.into_words(), x))
}

/// The sorted distinct values `k f(k) <= x`, i.e. the set `{ n f(n) }` truncated at `x`.
pub fn representable_values(kind: SieveKind, x: u64) -> Result<Vec<u64>> {
    check_weight_kind(kind)?;
    if x == 0 {
        return Ok(Vec::new());
    }
    let words = if x <= SEGMENTED_THRESHOLD {
        representable_words(&sieve(kind, x)?, x)?
    } else {
        let seg = SegmentedSieve::new(kind, x, 1 << 18)?;
        let bits = Bitset::new(x);
        (0..seg.segment_count()).into_par_iter().for_each(|i| {
            let (start, values) = seg.segment(i);
            for (j, &f) in values.iter().enumerate() {
                mark(&bits, start + j as u64, f, x);
            }
        });
        bits.into_words()
    };
    let mut out = Vec::new();
    for (w, &word) in words.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros() as u64;
            out.push(w as u64 * 64 + b);
            bits &= bits - 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    fn naive_omega(n: u64) -> u32 {
        (2..=n).filter(|&p| n.is_multiple_of(p) && (2..p).all(|d| p % d != 0)).count() as u32
    }

    fn naive_phi(n: u64) -> u64 {
        (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
    }

    #[test]
    fn sieve_examples() {
        let om = sieve(SieveKind::Omega, 12).unwrap();
        assert_eq!((om.get(12), om.get(7), om.get(1)), (Some(2), Some(1), Some(0)));
        let ph = sieve(SieveKind::Totient, 12).unwrap();
        assert_eq!((ph.get(12), ph.get(7), ph.get(1)), (Some(4), Some(6), Some(1)));
        let divisor_sum: u32 = (1..=12).filter(|d| 12 % d == 0).map(|d| ph.get(d).unwrap()).sum();
        assert_eq!(divisor_sum, 12);
    }

    #[test]
    fn sieve_errors() {
        assert!(matches!(sieve(SieveKind::Omega, 0), Err(crate::Error::Config(_))));
        assert!(matches!(sieve(SieveKind::Omega, SEGMENTED_THRESHOLD + 1), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn sieve_matches_naive_oracle() {
        let om = sieve(SieveKind::Omega, 10_000).unwrap();
        let ph = sieve(SieveKind::Totient, 10_000).unwrap();
        let pr = sieve(SieveKind::Primes, 10_000).unwrap();
        for n in 1..=10_000u64 {
            // the naive omega oracle is quadratic; sample it, and check the rest by factorization
            if n <= 600 {
                assert_eq!(om.get(n).unwrap(), naive_omega(n), "omega({n})");
            }
            assert_eq!(om.get(n).unwrap(), omega_of(n), "omega({n})");
            if n <= 3000 {
                assert_eq!(ph.get(n).unwrap() as u64, naive_phi(n), "phi({n})");
            }
            assert_eq!(ph.get(n).unwrap() as u64, totient_of(n), "phi({n})");
            let prime = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(pr.get(n).unwrap() == 1, prime, "prime({n})");
            assert_eq!(is_prime(n), prime);
        }
    }

    #[test]
    fn segmented_matches_linear() {
        for kind in [SieveKind::Omega, SieveKind::Totient, SieveKind::Primes] {
            let table = sieve(kind, 50_000).unwrap();
            let seg = SegmentedSieve::new(kind, 50_000, 997).unwrap();
            for i in 0..seg.segment_count() {
                let (start, values) = seg.segment(i);
                for (j, v) in values.iter().enumerate() {
                    assert_eq!(Some(*v), table.get(start + j as u64), "{kind:?} at {}", start + j as u64);
                }
            }
        }
    }

    #[test]
    fn miller_rabin_large() {
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(u64::MAX));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn primes_in_ap_examples() {
        assert_eq!(primes_in_ap(4, 1, 30).unwrap(), vec![5, 13, 17, 29]);
        assert_eq!(primes_in_ap(1, 0, 10).unwrap(), vec![2, 3, 5, 7]);
        assert!(matches!(primes_in_ap(4, 2, 30), Err(crate::Error::Config(_))));
        // trial-division oracle
        let oracle: Vec<u64> = (2..=1000u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0) && n % 10 == 3)
            .collect();
        assert_eq!(primes_in_ap(10, 3, 1000).unwrap(), oracle);
    }

    fn brute_representable(f: impl Fn(u64) -> u64, x: u64) -> Vec<u64> {
        let mut v: Vec<u64> = (1..=x).map(|k| k * f(k)).filter(|&n| n >= 1 && n <= x).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    #[test]
    fn representable_examples() {
        let om = sieve(SieveKind::Omega, 20).unwrap();
        let c = representable_count(&om, 20).unwrap();
        assert_eq!(c.last().unwrap().count, 14);
        assert_eq!(
            representable_values(SieveKind::Omega, 20).unwrap(),
            vec![2, 3, 4, 5, 7, 8, 9, 11, 12, 13, 16, 17, 19, 20]
        );
        let ph = sieve(SieveKind::Totient, 20).unwrap();
        assert_eq!(representable_count(&ph, 20).unwrap().last().unwrap().count, 6);
        assert_eq!(representable_values(SieveKind::Totient, 20).unwrap(), vec![1, 2, 6, 8, 12, 20]);
        assert_eq!(brute_representable(|k| naive_omega(k) as u64, 20).len(), 14);
        assert_eq!(brute_representable(naive_phi, 20), vec![1, 2, 6, 8, 12, 20]);
    }

    #[test]
    fn representable_matches_brute_force() {
        for x in [1u64, 2, 9, 10, 11, 99, 100, 1234, 5000] {
            assert_eq!(representable_values(SieveKind::Omega, x).unwrap(), brute_representable(omega_of_u64, x));
            assert_eq!(representable_values(SieveKind::Totient, x).unwrap(), brute_representable(totient_of, x));
        }
    }

    fn omega_of_u64(n: u64) -> u64 {
        omega_of(n) as u64
    }

    #[test]
    fn representable_errors_and_checkpoints() {
        let small = sieve(SieveKind::Totient, 10).unwrap();
        assert!(matches!(representable_count(&small, 11), Err(crate::Error::Config(_))));
        let pr = sieve(SieveKind::Primes, 10).unwrap();
        assert!(representable_count(&pr, 10).is_err());
        assert_eq!(count_checkpoints(1000), vec![10, 100, 1000]);
        assert_eq!(count_checkpoints(2500), vec![10, 100, 1000, 2500]);
        assert_eq!(count_checkpoints(7), vec![7]);
    }

    #[test]
    fn segmented_count_matches_table() {
        for kind in [SieveKind::Omega, SieveKind::Totient] {
            let table = sieve(kind, 300_000).unwrap();
            let direct = representable_count(&table, 300_000).unwrap();
            for workers in [1, 3] {
                assert_eq!(representable_count_segmented(kind, 300_000, workers).unwrap(), direct);
            }
            let monotone = direct.windows(2).all(|w| w[0].count <= w[1].count);
            assert!(monotone);
        }
    }
}
