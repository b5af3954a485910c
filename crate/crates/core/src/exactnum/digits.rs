//! Base-`b` digit expansions of rationals in `[0, 1]`.
//!
//! Every rational has an eventually periodic expansion. A rational of the
//! form `p / b^k` with `p > 0` has two: the canonical one ending in zeros
//! and an alternate one ending in repeated `b - 1`. We store the canonical
//! one and flag the alternate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// An eventually periodic base-`b` expansion `integer_part . preperiod (period)*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitExpansion {
    pub base: u32,
    /// `1` only for the value one, otherwise `0`.
    pub integer_part: u32,
    pub preperiod: Vec<u32>,
    /// Never empty; `[0]` for terminating values.
    pub period: Vec<u32>,
    /// Whether a second expansion (trailing `b - 1` digits) exists.
    pub has_alternate: bool,
}

impl DigitExpansion {
    pub fn is_terminating(&self) -> bool {
        self.period == [0]
    }

    /// The exact value encoded by the digits.
    pub fn value(&self) -> Rational {
        let b = BigInt::from(self.base);
        let mut pre = BigInt::zero();
        for &d in &self.preperiod {
            pre = pre * &b + d;
        }
        let mut per = BigInt::zero();
        for &d in &self.period {
            per = per * &b + d;
        }
        let k = self.preperiod.len() as i64;
        let lambda = self.period.len() as u32;
        let scale = Rational::integer_pow(self.base as u64, -k);
        let cycle = Rational::new(per, num_traits::pow(b, lambda as usize) - 1u32);
        Rational::from_integer(self.integer_part) + scale * (Rational::from_integer(pre) + cycle)
    }

    /// The alternate expansion as `(preperiod, period)`, if it exists.
    ///
    /// For the value one this is `0.(b-1)(b-1)...`.
    pub fn alternate(&self) -> Option<(Vec<u32>, Vec<u32>)> {
        if !self.has_alternate {
            return None;
        }
        let top = self.base - 1;
        if self.integer_part == 1 {
            return Some((Vec::new(), vec![top]));
        }
        let mut pre = self.preperiod.clone();
        while pre.last() == Some(&0) {
            pre.pop();
        }
        let last = pre.last_mut()?;
        *last -= 1;
        Some((pre, vec![top]))
    }

    /// Digit at 1-based position `i` of the canonical expansion.
    pub fn digit(&self, i: usize) -> u32 {
        assert!(i >= 1);
        let k = self.preperiod.len();
        if i <= k {
            self.preperiod[i - 1]
        } else {
            self.period[(i - k - 1) % self.period.len()]
        }
    }
}

/// Number of digits before the purely periodic part of any reduced fraction
/// with denominator `den` in base `base`: the least `k` such that the part of
/// `den` built from primes of `base` divides `base^k`.
pub fn preperiod_len(den: &BigInt, base: u32) -> usize {
    let b = BigInt::from(base);
    let mut rest = den.clone();
    let mut k = 0;
    loop {
        let g = rest.gcd(&b);
        if g.is_one() {
            return k;
        }
        rest /= &g;
        k += 1;
    }
}

/// Exact eventually periodic expansion of `x` in `base`.
pub fn expand(x: &Rational, base: u32) -> Result<DigitExpansion> {
    if base < 2 {
        return Err(Error::Domain(format!("base {base} must be at least 2")));
    }
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::Domain(format!("{x} is outside [0, 1]")));
    }
    if *x == Rational::one() {
        return Ok(DigitExpansion {
            base,
            integer_part: 1,
            preperiod: Vec::new(),
            period: vec![0],
            has_alternate: true,
        });
    }
    let den = x.denom().clone();
    let b = BigInt::from(base);
    let mu = preperiod_len(&den, base);
    let mut rem = x.numer().clone();
    let mut preperiod = Vec::with_capacity(mu);
    for _ in 0..mu {
        let (d, r) = (rem * &b).div_rem(&den);
        preperiod.push(d.to_u32().expect("digit below base"));
        rem = r;
    }
    let start = rem.clone();
    let mut period = Vec::new();
    loop {
        let (d, r) = (rem * &b).div_rem(&den);
        period.push(d.to_u32().expect("digit below base"));
        rem = r;
        if rem == start {
            break;
        }
    }
    let terminating = period == [0];
    Ok(DigitExpansion {
        base,
        integer_part: 0,
        has_alternate: terminating && !x.is_zero(),
        preperiod,
        period,
    })
}

/// The `n` base-`base` digits of `p`, most significant first, so that
/// `p = sum d_i base^(n-i)`. Requires `0 <= p < base^n`.
pub fn digits_fixed(p: &BigInt, base: u32, n: usize) -> Result<Vec<u32>> {
    let b = BigInt::from(base);
    let limit = num_traits::pow(b.clone(), n);
    if p < &BigInt::zero() || p >= &limit {
        return Err(Error::Domain(format!("{p} is outside [0, {base}^{n})")));
    }
    let mut out = vec![0u32; n];
    let mut rest = p.clone();
    for slot in out.iter_mut().rev() {
        let (q, r) = rest.div_rem(&b);
        *slot = r.to_u32().expect("digit below base");
        rest = q;
    }
    Ok(out)
}

/// Fast `u64` variant of [`digits_fixed`] for hot loops.
pub fn digits_fixed_u64(mut p: u64, base: u32, n: usize, out: &mut Vec<u32>) {
    out.clear();
    out.resize(n, 0);
    let b = base as u64;
    for slot in out.iter_mut().rev() {
        *slot = (p % b) as u32;
        p /= b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn quarter_in_base_three() {
        let e = expand(&r(1, 4), 3).unwrap();
        assert!(e.preperiod.is_empty());
        assert_eq!(e.period, vec![0, 2]);
        assert!(!e.has_alternate);
    }

    #[test]
    fn one_is_terminating_with_alternate() {
        let e = expand(&r(1, 1), 3).unwrap();
        assert_eq!(e.integer_part, 1);
        assert!(e.is_terminating());
        assert!(e.has_alternate);
        assert_eq!(e.alternate().unwrap(), (vec![], vec![2]));
        assert_eq!(e.value(), r(1, 1));
    }

    #[test]
    fn two_fifths_in_base_five() {
        let e = expand(&r(2, 5), 5).unwrap();
        assert_eq!(e.preperiod, vec![2]);
        assert_eq!(e.period, vec![0]);
        assert!(e.has_alternate);
        // 0.1444...
        assert_eq!(e.alternate().unwrap(), (vec![1], vec![4]));
    }

    #[test]
    fn zero_has_no_alternate() {
        let e = expand(&r(0, 1), 7).unwrap();
        assert!(e.preperiod.is_empty());
        assert_eq!(e.period, vec![0]);
        assert!(!e.has_alternate);
    }

    #[test]
    fn mixed_preperiod() {
        // 1/6 in base 10 = 0.1(6)
        let e = expand(&r(1, 6), 10).unwrap();
        assert_eq!(e.preperiod, vec![1]);
        assert_eq!(e.period, vec![6]);
        // 1/12 in base 2 = 0.00(01)
        let e = expand(&r(1, 12), 2).unwrap();
        assert_eq!(e.preperiod, vec![0, 0]);
        assert_eq!(e.period, vec![0, 1]);
        assert_eq!(e.value(), r(1, 12));
    }

    #[test]
    fn expand_rejects_out_of_range() {
        assert!(matches!(expand(&r(-1, 3), 3), Err(Error::Domain(_))));
        assert!(matches!(expand(&r(4, 3), 3), Err(Error::Domain(_))));
    }

    #[test]
    fn fixed_digits() {
        assert_eq!(digits_fixed(&BigInt::from(7), 5, 3).unwrap(), vec![0, 1, 2]);
        assert_eq!(digits_fixed(&BigInt::from(0), 3, 4).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(digits_fixed(&BigInt::from(6), 5, 2).unwrap(), vec![1, 1]);
        assert!(digits_fixed(&BigInt::from(25), 5, 2).is_err());
        let mut buf = Vec::new();
        digits_fixed_u64(6, 5, 2, &mut buf);
        assert_eq!(buf, vec![1, 1]);
    }

    #[test]
    fn fixed_digits_agree_with_expansion() {
        // digits_fixed(6, 5, 2) matches the leading digits of expand(6/25, 5).
        let e = expand(&r(6, 25), 5).unwrap();
        assert_eq!(e.preperiod, vec![1, 1]);
    }
}
