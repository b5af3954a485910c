use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{Rational, Real};

/// An exact positive real of the form `prod base_k ^ exp_k` with rational
/// bases and rational exponents, e.g. `c * t^(-theta n) * n^(-beta)`.
///
/// Such values are usually irrational, but they can be compared with each
/// other and with rationals exactly by raising both sides to a common
/// integer power.
#[derive(Clone, PartialEq, Eq)]
pub struct PowProduct {
    factors: Vec<(Rational, Rational)>,
}

impl PowProduct {
    pub fn one() -> Self {
        PowProduct { factors: Vec::new() }
    }

    pub fn rational(q: Rational) -> Self {
        assert!(q.is_positive(), "PowProduct requires positive values");
        PowProduct {
            factors: vec![(q, Rational::one())],
        }
    }

    /// `base^exp`; the base must be positive.
    pub fn power(base: Rational, exp: Rational) -> Self {
        assert!(base.is_positive(), "PowProduct requires positive bases");
        PowProduct {
            factors: vec![(base, exp)],
        }
    }

    pub fn times(mut self, other: &PowProduct) -> Self {
        self.factors.extend(other.factors.iter().cloned());
        self
    }

    pub fn recip(&self) -> Self {
        PowProduct {
            factors: self.factors.iter().map(|(b, e)| (b.clone(), -e)).collect(),
        }
    }

    pub fn factors(&self) -> &[(Rational, Rational)] {
        &self.factors
    }

    /// The value when every exponent is an integer.
    pub fn to_rational(&self) -> Option<Rational> {
        let mut acc = Rational::one();
        for (b, e) in &self.factors {
            if !e.is_integer() {
                return None;
            }
            acc = acc * b.pow(e.numer().to_i64()?);
        }
        Some(acc)
    }

    /// Exact comparison with one.
    pub fn cmp_one(&self) -> Ordering {
        // Merge equal bases, then compare the integer products of both sides
        // raised to the common denominator of the exponents.
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(self.factors.len());
        for (b, e) in &self.factors {
            match merged.iter_mut().find(|(mb, _)| mb == b) {
                Some((_, me)) => *me += e,
                None => merged.push((b.clone(), e.clone())),
            }
        }
        let l = merged.iter().fold(BigInt::one(), |acc, (_, e)| acc.lcm(e.denom()));
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (b, e) in &merged {
            let k = (e * Rational::from(l.clone())).numer().clone();
            let k = k.to_i64().expect("exponent fits in i64");
            let (up, down) = if k >= 0 { (b.numer(), b.denom()) } else { (b.denom(), b.numer()) };
            let k = k.unsigned_abs() as usize;
            num *= num_traits::pow(up.clone(), k);
            den *= num_traits::pow(down.clone(), k);
        }
        num.cmp(&den)
    }

    /// Exact comparison of two products.
    pub fn cmp_product(&self, other: &PowProduct) -> Ordering {
        self.clone().times(&other.recip()).cmp_one()
    }

    /// Exact comparison with a positive rational.
    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        if !q.is_positive() {
            return Ordering::Greater;
        }
        self.clone()
            .times(&PowProduct::rational(q.recip()))
            .cmp_one()
    }

    pub fn ln_f64(&self) -> f64 {
        self.factors
            .iter()
            .map(|(b, e)| e.to_f64() * b.ln_f64())
            .sum()
    }

    pub fn to_f64(&self) -> f64 {
        self.ln_f64().exp()
    }

    /// Certified enclosure of the natural logarithm.
    pub fn ln_real(&self, prec: u32) -> Real {
        self.factors.iter().fold(Real::from_integer(0, prec), |acc, (b, e)| {
            acc.add(&Real::ln(b, prec).mul_rational(e))
        })
    }
}

impl fmt::Debug for PowProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(b, e)| {
                if e.is_integer() && *e == Rational::one() {
                    format!("{b}")
                } else {
                    format!("({b})^({e})")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Display for PowProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
