//! Certified real numbers as dyadic intervals.
//!
//! A [`Real`] is a closed interval `[lo, hi] * 2^-prec` that is guaranteed to
//! contain the true value. Every operation rounds outward, so signs read off
//! an interval that excludes zero are exact facts, not float guesses.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 80;

#[derive(Clone, PartialEq, Eq)]
pub struct Real {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Real {
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let scaled = q.numer() << prec as usize;
        Real {
            lo: floor_div(&scaled, q.denom()),
            hi: ceil_div(&scaled, q.denom()),
            prec,
        }
    }

    pub fn from_integer(n: i64, prec: u32) -> Self {
        let v = BigInt::from(n) << prec as usize;
        Real { lo: v.clone(), hi: v, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Lower end as an exact rational.
    pub fn lower(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << self.prec as usize)
    }

    /// Upper end as an exact rational.
    pub fn upper(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << self.prec as usize)
    }

    /// Width of the enclosure.
    pub fn width(&self) -> Rational {
        self.upper() - self.lower()
    }

    /// Midpoint rounded to `f64`.
    pub fn to_f64(&self) -> f64 {
        let mid = Rational::new(&self.lo + &self.hi, BigInt::from(2) << self.prec as usize);
        mid.to_f64()
    }

    /// The sign of the value when the enclosure proves it.
    ///
    /// Returns `Some(Equal)` only for the degenerate interval `[0, 0]`.
    pub fn certified_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lower() <= *q && *q <= self.upper()
    }

    fn check(&self, other: &Real) {
        assert_eq!(self.prec, other.prec, "mixed precisions");
    }

    pub fn add(&self, other: &Real) -> Real {
        self.check(other);
        Real {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Real {
        Real {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Real) -> Real {
        self.check(other);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = products.iter().min().expect("non-empty");
        let max = products.iter().max().expect("non-empty");
        let scale = BigInt::one() << self.prec as usize;
        Real {
            lo: floor_div(min, &scale),
            hi: ceil_div(max, &scale),
            prec: self.prec,
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> Real {
        let a = &self.lo * q.numer();
        let b = &self.hi * q.numer();
        let (min, max) = if a <= b { (a, b) } else { (b, a) };
        Real {
            lo: floor_div(&min, q.denom()),
            hi: ceil_div(&max, q.denom()),
            prec: self.prec,
        }
    }

    /// Interval quotient. Returns `None` when the divisor may be zero.
    pub fn div(&self, other: &Real) -> Option<Real> {
        self.check(other);
        if !(other.lo.is_positive() || other.hi.is_negative()) {
            return None;
        }
        let a = &self.lo << self.prec as usize;
        let b = &self.hi << self.prec as usize;
        let mut lows = Vec::with_capacity(4);
        let mut highs = Vec::with_capacity(4);
        for num in [&a, &b] {
            for den in [&other.lo, &other.hi] {
                // Normalize to a positive denominator so floor/ceil are correct.
                let (n, d) = if den.is_negative() {
                    (-num, -den)
                } else {
                    (num.clone(), den.clone())
                };
                lows.push(floor_div(&n, &d));
                highs.push(ceil_div(&n, &d));
            }
        }
        Some(Real {
            lo: lows.into_iter().min().expect("non-empty"),
            hi: highs.into_iter().max().expect("non-empty"),
            prec: self.prec,
        })
    }

    /// Natural logarithm of a positive rational.
    pub fn ln(q: &Rational, prec: u32) -> Real {
        assert!(q.is_positive(), "ln of non-positive value {q}");
        let n = ln_integer(q.numer(), prec);
        if q.denom().is_one() {
            n
        } else {
            n.sub(&ln_integer(q.denom(), prec))
        }
    }

    /// `ln(a) / ln(b)` for integers `a, b >= 2`.
    pub fn log_ratio(a: u64, b: u64, prec: u32) -> Real {
        assert!(b >= 2, "log base must be at least 2");
        let num = Real::ln(&Rational::from(a), prec);
        let den = Real::ln(&Rational::from(b), prec);
        num.div(&den).expect("ln b > 0")
    }
}

/// Guard bits used inside series evaluations.
const GUARD: u32 = 32;

/// `2 atanh(a/c)` enclosed at `w` fractional bits, for `0 <= a/c <= 1/3`.
fn two_atanh_scaled(a: &BigInt, c: &BigInt, w: u32) -> (BigInt, BigInt) {
    let scale = BigInt::one() << w as usize;
    let z_lo = floor_div(&(a * &scale), c);
    let z_hi = ceil_div(&(a * &scale), c);
    let z2_lo = floor_div(&(&z_lo * &z_lo), &scale);
    let z2_hi = ceil_div(&(&z_hi * &z_hi), &scale);
    let mut p_lo = z_lo;
    let mut p_hi = z_hi;
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut k: u64 = 1;
    while p_hi > BigInt::one() {
        let kk = BigInt::from(k);
        sum_lo += floor_div(&p_lo, &kk);
        sum_hi += ceil_div(&p_hi, &kk);
        p_lo = floor_div(&(&p_lo * &z2_lo), &scale);
        p_hi = ceil_div(&(&p_hi * &z2_hi), &scale);
        k += 2;
    }
    // Remaining tail is below z^k * 9/8 <= 2 ulps.
    sum_hi += 2;
    (sum_lo * 2, sum_hi * 2)
}

fn ln_integer(n: &BigInt, prec: u32) -> Real {
    assert!(n.is_positive());
    if n.is_one() {
        return Real::from_integer(0, prec);
    }
    let w = prec + GUARD;
    let k = n.bits() - 1;
    let pow = BigInt::one() << k as usize;
    // ln 2 = 2 atanh(1/3)
    let (ln2_lo, ln2_hi) = two_atanh_scaled(&BigInt::one(), &BigInt::from(3), w);
    // n = 2^k * y with y in [1, 2); ln y = 2 atanh((n - 2^k) / (n + 2^k))
    let (y_lo, y_hi) = two_atanh_scaled(&(n - &pow), &(n + &pow), w);
    let kk = BigInt::from(k);
    let lo = &ln2_lo * &kk + y_lo;
    let hi = &ln2_hi * &kk + y_hi;
    let shift = BigInt::one() << GUARD as usize;
    Real {
        lo: floor_div(&lo, &shift),
        hi: ceil_div(&hi, &shift),
        prec,
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Real({} ± {:.1e} @{} bits)",
            self.to_f64(),
            self.width().to_f64() / 2.0,
            self.prec
        )
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl ToPrimitive for Real {
    fn to_i64(&self) -> Option<i64> {
        None
    }
    fn to_u64(&self) -> Option<u64> {
        None
    }
    fn to_f64(&self) -> Option<f64> {
        Some(Real::to_f64(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_matches_std() {
        let l = Real::ln(&Rational::from(2), 80);
        assert!((l.to_f64() - std::f64::consts::LN_2).abs() < 1e-16);
        assert!(l.width().to_f64() < 1e-22);
    }

    #[test]
    fn ln_of_fraction_and_big_integer() {
        let l = Real::ln(&Rational::new(7, 1000), 100);
        assert!((l.to_f64() - (0.007f64).ln()).abs() < 1e-14);
        let big = Rational::integer_pow(3, 500);
        let l = Real::ln(&big, 100);
        assert!((l.to_f64() / (500.0 * 3f64.ln()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dependent_log_ratio_is_enclosed_tightly() {
        let r = Real::log_ratio(8, 4, 128);
        assert!(r.contains(&Rational::new(3, 2)));
        assert!(r.width() < Rational::integer_pow(2, -100));
    }

    #[test]
    fn gamma_of_middle_third() {
        let g = Real::log_ratio(2, 3, 80);
        assert!((g.to_f64() - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn signs_are_certified() {
        let a = Real::ln(&Rational::from(3), 64);
        let b = Real::ln(&Rational::from(2), 64).mul_rational(&Rational::new(3, 2));
        // ln 3 < 1.5 ln 2 is false: ln 3 = 1.0986, 1.5 ln 2 = 1.0397
        assert_eq!(a.sub(&b).certified_sign(), Some(Ordering::Greater));
        let z = a.sub(&a);
        // Same enclosure subtracted from itself straddles zero.
        assert_eq!(z.certified_sign(), None);
    }

    #[test]
    fn mul_and_div_enclose() {
        let a = Real::from_rational(&Rational::new(1, 3), 60);
        let b = Real::from_rational(&Rational::new(-7, 5), 60);
        let p = a.mul(&b);
        assert!(p.contains(&Rational::new(-7, 15)));
        let q = a.div(&b).unwrap();
        assert!(q.contains(&Rational::new(-5, 21)));
        assert!(a.div(&Real::from_integer(0, 60)).is_none());
    }
}
