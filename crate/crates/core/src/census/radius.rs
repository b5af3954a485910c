use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactnum::{PowProduct, Rational};

/// A ball radius: a positive rational or an exact power product such as
/// `2^(-6n/5)`, which is compared exactly against rational distances.
#[derive(Clone, PartialEq, Eq)]
pub struct Radius(PowProduct);

impl Radius {
    pub fn rational(q: Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::Domain(format!("radius {q} must be positive")));
        }
        Ok(Radius(PowProduct::rational(q)))
    }

    /// `coeff · base^(-exponent)`.
    pub fn power(coeff: Rational, base: u64, exponent: Rational) -> Result<Self> {
        if !coeff.is_positive() || base < 2 {
            return Err(Error::Domain(format!("radius {coeff}·{base}^(-{exponent}) is not a positive power")));
        }
        Ok(Radius(
            PowProduct::rational(coeff).times(&PowProduct::power(Rational::from(base), -exponent)),
        ))
    }

    pub fn from_product(p: PowProduct) -> Self {
        Radius(p)
    }

    pub fn as_product(&self) -> &PowProduct {
        &self.0
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.0.to_rational()
    }

    /// Whether `d < radius`.
    pub fn exceeds(&self, d: &Rational) -> bool {
        self.0.cmp_rational(d) == Ordering::Greater
    }

    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        self.0.cmp_rational(q)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn ln_f64(&self) -> f64 {
        self.0.ln_f64()
    }

    /// Rationals `lo <= radius <= hi`, equal when the radius is rational and
    /// otherwise about `radius · 2^-extra_bits` apart.
    pub fn bracket(&self, extra_bits: u32) -> (Rational, Rational) {
        if let Some(q) = self.to_rational() {
            return (q.clone(), q);
        }
        let ln2 = std::f64::consts::LN_2;
        let k = (-self.ln_f64() / ln2).ceil().max(0.0) as i64 + extra_bits as i64;
        let scale = Rational::integer_pow(2, -k);
        let guess = (self.ln_f64() + k as f64 * ln2).exp().floor();
        let guess = BigInt::from(guess as u128);
        let mut slack = BigInt::from(1u32 << 10);
        loop {
            // 2^-k <= radius, so the lower end never needs to go below it.
            let lo = Rational::from((&guess - &slack).max(BigInt::one())) * &scale;
            let hi = Rational::from(&guess + &slack) * &scale;
            if self.exceeds(&lo) && self.cmp_rational(&hi) == Ordering::Less {
                return (lo, hi);
            }
            slack *= 16;
        }
    }

    /// Smallest `k >= 0` with `base^-k <= lo`.
    pub(crate) fn depth_for(lo: &Rational, base: u32) -> u32 {
        let mut k = (lo.recip().ln_f64() / (base as f64).ln()).floor().max(0.0) as u32;
        k = k.saturating_sub(2);
        while Rational::integer_pow(base as u64, -(k as i64)) > *lo {
            k += 1;
        }
        k
    }
}

/// Prints in the notation [`FromStr`] reads: `n/d`, `b^(-e)` or `c*b^(-e)`.
impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{q}");
        }
        let mut coeff = Rational::one();
        let mut rest = Vec::new();
        for (b, e) in self.0.factors() {
            if e.is_integer() {
                coeff = coeff * b.pow(e.numer().try_into().expect("small exponent"));
            } else {
                rest.push((b, e));
            }
        }
        match rest.as_slice() {
            [(b, e)] if b.is_integer() && e.is_negative() => {
                if coeff != Rational::one() {
                    write!(f, "{coeff}*")?;
                }
                write!(f, "{b}^(-{})", -(*e).clone())
            }
            _ => write!(f, "{}", self.0),
        }
    }
}

impl fmt::Debug for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Radius {
    type Err = Error;

    /// `num/den`, or `base^(-num/den)` optionally preceded by `coeff*`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim().replace(' ', "");
        if let Some((lhs, rhs)) = text.split_once('^') {
            let (coeff, base) = match lhs.rsplit_once('*') {
                Some((c, b)) => (c.parse::<Rational>()?, b),
                None => (Rational::one(), lhs),
            };
            let base: u64 = base
                .parse()
                .map_err(|_| Error::Parse(format!("bad radius base in `{text}`")))?;
            let exp = rhs.trim_start_matches('(').trim_end_matches(')');
            let exp = exp
                .strip_prefix('-')
                .ok_or_else(|| Error::Parse(format!("radius exponent in `{text}` must be negative")))?;
            return Radius::power(coeff, base, exp.parse()?);
        }
        Radius::rational(text.parse()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn bracket_encloses_irrational_radius() {
        let rad = Radius::power(r(1, 1), 2, r(132, 5)).unwrap();
        let (lo, hi) = rad.bracket(40);
        assert!(lo < hi);
        assert!(rad.exceeds(&lo));
        assert!(!rad.exceeds(&hi));
        let rel = ((&hi - &lo) / &lo).to_f64();
        assert!(rel < 1e-8, "{rel}");
    }

    #[test]
    fn rational_bracket_is_degenerate() {
        let rad: Radius = "1/100".parse().unwrap();
        assert_eq!(rad.bracket(40), (r(1, 100), r(1, 100)));
        let rad: Radius = "3^(-4)".parse().unwrap();
        assert_eq!(rad.to_rational(), Some(r(1, 81)));
        let rad: Radius = "1/4*5^(-3)".parse().unwrap();
        assert_eq!(rad.to_rational(), Some(r(1, 500)));
        assert!("0".parse::<Radius>().is_err());
        for text in ["2^(-66/5)", "1/4*5^(-7/3)"] {
            let rad: Radius = text.parse().unwrap();
            assert_eq!(rad.to_string(), text);
        }
        assert!("0.1".parse::<Radius>().is_err());
    }

    #[test]
    fn depth_covers_radius() {
        for (lo, b) in [(r(1, 100), 3), (r(1, 9), 3), (r(1, 1), 5), (r(2, 7), 4)] {
            let k = Radius::depth_for(&lo, b);
            assert!(Rational::integer_pow(b as u64, -(k as i64)) <= lo);
            assert!(k == 0 || Rational::integer_pow(b as u64, -(k as i64 - 1)) > lo);
        }
    }
}
