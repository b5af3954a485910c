//! Prime factorizations, `q`-adic valuations and the `(b, t)` regime.
//!
//! `α₁` and `α₂` are the minimum and maximum of `v_q(t) / v_q(b)` over the
//! primes `q | b`. They are kept as exact rationals: the series in the
//! same-prime-divisors law use `⌊i α₁⌋` and `⌈i α₂⌉`, and an off-by-one there
//! changes terms by a factor `b^γ`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Rational, Real};

/// Prime factorization by trial division, as `(prime, exponent)` ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut q = 2u64;
    while q.saturating_mul(q) <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    matches!(factorize(n).as_slice(), [(_, 1)]) && n >= 2
}

/// Largest `e` with `q^e | n`.
pub fn valuation(q: u64, n: u64) -> Result<u32> {
    if !is_prime(q) {
        return Err(Error::Domain(format!("{q} is not prime")));
    }
    if n == 0 {
        return Err(Error::Domain("valuation of 0 is unbounded".into()));
    }
    let mut e = 0;
    let mut m = n;
    while m.is_multiple_of(q) {
        m /= q;
        e += 1;
    }
    Ok(e)
}

fn prime_set(n: u64) -> BTreeSet<u64> {
    factorize(n).into_iter().map(|(q, _)| q).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `log t / log b` is rational.
    MultiplicativelyDependent,
    /// Same prime divisors but `α₁ < α₂`.
    SamePrimesIndependent,
    /// The prime divisors of `b` and `t` differ.
    DifferentPrimes,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::MultiplicativelyDependent => "MultiplicativelyDependent",
            Regime::SamePrimesIndependent => "SamePrimesIndependent",
            Regime::DifferentPrimes => "DifferentPrimes",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationRow {
    pub prime: u64,
    pub v_b: u32,
    pub v_t: u32,
}

/// Everything number-theoretic about the pair `(b, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub b: u64,
    pub t: u64,
    pub primes_b: Vec<u64>,
    pub primes_t: Vec<u64>,
    /// One row per prime dividing `b` or `t`.
    pub valuations: Vec<ValuationRow>,
    pub same_primes: bool,
    pub mult_dependent: bool,
    pub alpha1: Option<Rational>,
    pub alpha2: Option<Rational>,
    /// `(k, l)` with `b^k = t^l`, smallest positive, when dependent.
    pub dependence: Option<(u64, u64)>,
    /// `log t / log b`, rounded.
    pub log_ratio: f64,
    pub regime: Regime,
}

impl RegimeReport {
    /// `log t / log b` as a certified enclosure.
    pub fn log_ratio_real(&self, prec: u32) -> Real {
        Real::log_ratio(self.t, self.b, prec)
    }
}

/// Classifies `(b, t)`; both must be at least 2.
pub fn analyze(b: u64, t: u64) -> Result<RegimeReport> {
    if b < 2 || t < 2 {
        return Err(Error::Domain(format!("b = {b} and t = {t} must both be at least 2")));
    }
    let primes_b = prime_set(b);
    let primes_t = prime_set(t);
    let all: BTreeSet<u64> = primes_b.union(&primes_t).copied().collect();
    let valuations: Vec<ValuationRow> = all
        .iter()
        .map(|&q| ValuationRow {
            prime: q,
            v_b: valuation(q, b).expect("prime"),
            v_t: valuation(q, t).expect("prime"),
        })
        .collect();
    let same_primes = primes_b == primes_t;
    let (alpha1, alpha2) = if same_primes {
        let ratios: Vec<Rational> = valuations
            .iter()
            .map(|row| Rational::new(row.v_t, row.v_b))
            .collect();
        (ratios.iter().min().cloned(), ratios.iter().max().cloned())
    } else {
        (None, None)
    };
    let mult_dependent = same_primes && alpha1 == alpha2;
    // α = k / l in lowest terms means t^l = b^k.
    let dependence = if mult_dependent {
        let a = alpha1.as_ref().expect("same primes");
        Some((
            a.numer().try_into().expect("small"),
            a.denom().try_into().expect("small"),
        ))
    } else {
        None
    };
    let regime = if !same_primes {
        Regime::DifferentPrimes
    } else if mult_dependent {
        Regime::MultiplicativelyDependent
    } else {
        Regime::SamePrimesIndependent
    };
    Ok(RegimeReport {
        b,
        t,
        primes_b: primes_b.into_iter().collect(),
        primes_t: primes_t.into_iter().collect(),
        valuations,
        same_primes,
        mult_dependent,
        alpha1,
        alpha2,
        dependence,
        log_ratio: (t as f64).ln() / (b as f64).ln(),
        regime,
    })
}

/// Whether `x^l = y^k` for some positive `k, l`, returning `log x / log y`
/// as an exact rational when it is one.
pub fn log_ratio_rational(x: u64, y: u64) -> Option<Rational> {
    if x < 2 || y < 2 {
        return None;
    }
    let report = analyze(y, x).ok()?;
    if report.mult_dependent {
        report.alpha1
    } else {
        None
    }
}

/// `b^k == t^l` checked with big integers.
pub fn powers_equal(b: u64, k: u32, t: u64, l: u32) -> bool {
    num_traits::pow(BigInt::from(b), k as usize) == num_traits::pow(BigInt::from(t), l as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(2, 12).unwrap(), 2);
        assert_eq!(valuation(3, 18).unwrap(), 2);
        assert_eq!(valuation(5, 12).unwrap(), 0);
        assert!(matches!(valuation(4, 12), Err(Error::Domain(_))));
        assert!(matches!(valuation(1, 12), Err(Error::Domain(_))));
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
        assert_eq!(factorize(1), vec![]);
    }

    #[test]
    fn same_primes_pair() {
        let r = analyze(12, 18).unwrap();
        assert!(r.same_primes);
        assert!(!r.mult_dependent);
        assert_eq!(r.alpha1, Some(Rational::new(1, 2)));
        assert_eq!(r.alpha2, Some(Rational::from(2)));
        assert_eq!(r.regime, Regime::SamePrimesIndependent);
    }

    #[test]
    fn dependent_pair() {
        let r = analyze(4, 8).unwrap();
        assert_eq!(r.regime, Regime::MultiplicativelyDependent);
        assert_eq!(r.alpha1, Some(Rational::new(3, 2)));
        assert_eq!(r.alpha2, Some(Rational::new(3, 2)));
        let (k, l) = r.dependence.unwrap();
        assert!(powers_equal(4, k as u32, 8, l as u32));
    }

    #[test]
    fn different_primes() {
        let r = analyze(3, 2).unwrap();
        assert_eq!(r.regime, Regime::DifferentPrimes);
        assert!(r.alpha1.is_none());
        assert!(analyze(1, 4).is_err());
    }

    #[test]
    fn log_ratio_detects_dependence() {
        assert_eq!(log_ratio_rational(9, 3), Some(Rational::from(2)));
        assert_eq!(log_ratio_rational(8, 4), Some(Rational::new(3, 2)));
        assert_eq!(log_ratio_rational(6, 4), None);
    }
}
