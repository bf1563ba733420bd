//! Integer polynomials in `x1, ..., xm` with a small text syntax such as
//! `x1^2 + x2^2` or `3*x1*x2 - 5`.

use std::fmt;
use std::str::FromStr;

use crate::error::{config, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: i64,
    /// Exponent of `x(i+1)` at position `i`; length equals the polynomial's arity.
    pub exps: Vec<u32>,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// A polynomial with like terms merged, zero terms dropped, and terms sorted
/// by descending degree, then descending exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    arity: usize,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn new(arity: usize, terms: Vec<Term>) -> Result<Self> {
        if arity == 0 {
            return config("polynomial needs at least one variable");
        }
        let mut merged: Vec<Term> = Vec::new();
        for mut t in terms {
            if t.exps.len() > arity {
                return config(format!("term uses {} variables, arity is {arity}", t.exps.len()));
            }
            t.exps.resize(arity, 0);
            match merged.iter_mut().find(|m| m.exps == t.exps) {
                Some(m) => {
                    m.coeff = m
                        .coeff
                        .checked_add(t.coeff)
                        .ok_or_else(|| Error::Config("coefficient overflow".into()))?
                }
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0);
        merged.sort_by(|a, b| b.degree().cmp(&a.degree()).then_with(|| b.exps.cmp(&a.exps)));
        Ok(Polynomial { arity, terms: merged })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(Term::degree).max().unwrap_or(0)
    }

    /// Sum of the coefficients of the terms of top total degree.
    pub fn leading_sum(&self) -> i64 {
        let d = self.total_degree();
        self.terms.iter().filter(|t| t.degree() == d).map(|t| t.coeff).sum()
    }

    /// `f(xs)`, or `None` on `i128` overflow.
    pub fn eval(&self, xs: &[u64]) -> Option<i128> {
        debug_assert_eq!(xs.len(), self.arity);
        let mut acc: i128 = 0;
        for t in &self.terms {
            let mut v = t.coeff as i128;
            for (&x, &e) in xs.iter().zip(&t.exps) {
                v = v.checked_mul((x as i128).checked_pow(e)?)?;
            }
            acc = acc.checked_add(v)?;
        }
        Some(acc)
    }

    /// Coefficients `c_0..=c_d` of `g(n) = f(n, ..., n)`.
    pub fn diagonal_coefficients(&self) -> Vec<i128> {
        let mut c = vec![0i128; self.total_degree() as usize + 1];
        for t in &self.terms {
            c[t.degree() as usize] += t.coeff as i128;
        }
        c
    }

    /// `g(n) = f(n, ..., n)`, or `None` on overflow.
    pub fn diagonal_value(&self, n: u64) -> Option<i128> {
        horner(&self.diagonal_coefficients(), n as i128)
    }
}

pub(crate) fn horner(coeffs: &[i128], n: i128) -> Option<i128> {
    coeffs.iter().rev().try_fold(0i128, |acc, &c| acc.checked_mul(n)?.checked_add(c))
}

/// `1 + max |c_j| / |c_d|`: every real root lies strictly below this.
pub(crate) fn cauchy_bound(coeffs: &[i128]) -> f64 {
    let Some((&lead, rest)) = coeffs.split_last() else { return 0.0 };
    if rest.is_empty() || lead == 0 {
        return 0.0;
    }
    1.0 + rest.iter().map(|c| c.unsigned_abs() as f64).fold(0.0, f64::max) / lead.unsigned_abs() as f64
}

/// Coefficients of `g(n + 1) - g(n)`.
pub(crate) fn forward_difference(coeffs: &[i128]) -> Option<Vec<i128>> {
    let d = coeffs.len();
    if d <= 1 {
        return Some(vec![0]);
    }
    // binomial expansion of (n + 1)^j
    let mut out = vec![0i128; d - 1];
    for (j, &c) in coeffs.iter().enumerate().skip(1) {
        let mut binom: i128 = 1;
        for (i, o) in out.iter_mut().enumerate().take(j) {
            // C(j, i) n^i term, i < j
            *o = o.checked_add(c.checked_mul(binom)?)?;
            binom = binom.checked_mul((j - i) as i128)? / (i as i128 + 1);
        }
    }
    Some(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mag = t.coeff.unsigned_abs();
            match (i, t.coeff < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = t
                .exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { format!("x{}", v + 1) } else { format!("x{}^{e}", v + 1) })
                .collect();
            match (mag, vars.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                (_, false) => write!(f, "{mag}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return config("empty polynomial");
        }
        let mut terms = Vec::new();
        let mut arity = 0usize;
        for (sign, body) in split_signed(&compact)? {
            let mut coeff: i64 = sign;
            let mut exps: Vec<u32> = Vec::new();
            for factor in body.split('*') {
                if factor.is_empty() {
                    return config(format!("empty factor in `{s}`"));
                }
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad(s, factor))?),
                    None => (factor, 1),
                };
                if let Some(idx) = base.strip_prefix(['x', 'X']) {
                    let v: usize = idx.parse().map_err(|_| bad(s, factor))?;
                    if v == 0 {
                        return config(format!("variables are numbered from x1 in `{s}`"));
                    }
                    if exps.len() < v {
                        exps.resize(v, 0);
                    }
                    exps[v - 1] += exp;
                    arity = arity.max(v);
                } else {
                    let c: i64 = base.parse().map_err(|_| bad(s, factor))?;
                    let c = c.checked_pow(exp).ok_or_else(|| bad(s, factor))?;
                    coeff = coeff.checked_mul(c).ok_or_else(|| bad(s, factor))?;
                }
            }
            terms.push(Term { coeff, exps });
        }
        Polynomial::new(arity.max(1), terms)
    }
}

fn bad(s: &str, factor: &str) -> Error {
    Error::Config(format!("cannot parse factor `{factor}` in polynomial `{s}`"))
}

fn split_signed(s: &str) -> Result<Vec<(i64, &str)>> {
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut start = 0usize;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if (c == b'+' || c == b'-') && !(i > 0 && bytes[i - 1] == b'^') {
            if i > start {
                out.push((sign, &s[start..i]));
            } else if i > 0 {
                return config(format!("dangling operator in `{s}`"));
            }
            sign = if c == b'-' { -1 } else { 1 };
            start = i + 1;
        }
        i += 1;
    }
    if start >= s.len() {
        return config(format!("dangling operator in `{s}`"));
    }
    out.push((sign, &s[start..]));
    Ok(out)
}
