//! The generalized Cantor set `C(b, D)`: numbers in `[0, 1]` with a base-`b`
//! expansion using only digits from `D`.
//!
//! Membership and distance are exact. Rationals have eventually periodic
//! expansions, so scanning one preperiod plus one period (or stopping at the
//! first inadmissible digit) decides everything.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{digits_fixed, Rational, Real, DEFAULT_PRECISION};

/// Default bound on `|D|^n` for explicit level enumeration.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// Base `b` and digit set `D` of a generalized Cantor set.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct CantorParams {
    base: u32,
    digits: Vec<u32>,
    allowed: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    b: u32,
    #[serde(rename = "D")]
    digits: Vec<u32>,
}

impl TryFrom<RawParams> for CantorParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        CantorParams::new(raw.b, &raw.digits)
    }
}

impl From<CantorParams> for RawParams {
    fn from(p: CantorParams) -> Self {
        RawParams {
            b: p.base,
            digits: p.digits,
        }
    }
}

impl CantorParams {
    /// Validates `b >= 3`, `D ⊆ {0..b-1}` without repeats and
    /// `2 <= |D| <= b - 1`.
    pub fn new(base: u32, digits: &[u32]) -> Result<Self> {
        if base < 3 {
            return Err(Error::InvalidParams(format!("base b = {base} must satisfy b >= 3")));
        }
        let mut sorted = digits.to_vec();
        sorted.sort_unstable();
        if let Some(&d) = sorted.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidParams(format!(
                "digit {d} is not in {{0, ..., b-1}} for b = {base}"
            )));
        }
        let before = sorted.len();
        sorted.dedup();
        if sorted.len() != before {
            return Err(Error::InvalidParams("digit set D contains repeated digits".into()));
        }
        if sorted.len() < 2 || sorted.len() as u32 > base - 1 {
            return Err(Error::InvalidParams(format!(
                "|D| = {} must satisfy 2 <= |D| <= b-1 = {}",
                sorted.len(),
                base - 1
            )));
        }
        let mut allowed = vec![false; base as usize];
        for &d in &sorted {
            allowed[d as usize] = true;
        }
        Ok(CantorParams {
            base,
            digits: sorted,
            allowed,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn digit_count(&self) -> u32 {
        self.digits.len() as u32
    }

    #[inline]
    pub fn allows(&self, digit: u32) -> bool {
        self.allowed.get(digit as usize).copied().unwrap_or(false)
    }

    pub fn min_digit(&self) -> u32 {
        self.digits[0]
    }

    pub fn max_digit(&self) -> u32 {
        *self.digits.last().expect("|D| >= 2")
    }

    /// `m_l = min D`.
    pub fn m_left(&self) -> u32 {
        self.min_digit()
    }

    /// `m_r = b - 1 - max D`.
    pub fn m_right(&self) -> u32 {
        self.base - 1 - self.max_digit()
    }

    /// `m = min(m_l, m_r)`; also the largest `m` with `D ⊆ {m, ..., b-1-m}`.
    pub fn m(&self) -> u32 {
        self.m_left().min(self.m_right())
    }

    /// Whether `D` contains `0` or `b - 1`.
    pub fn touches_boundary(&self) -> bool {
        self.m() == 0
    }

    /// Smallest point of the set, `min D / (b - 1)`.
    pub fn min_point(&self) -> Rational {
        Rational::new(self.min_digit(), self.base - 1)
    }

    /// Largest point of the set, `max D / (b - 1)`.
    pub fn max_point(&self) -> Rational {
        Rational::new(self.max_digit(), self.base - 1)
    }

    fn below(&self, d: u32) -> Option<u32> {
        self.digits.iter().rev().copied().find(|&e| e < d)
    }

    fn above(&self, d: u32) -> Option<u32> {
        self.digits.iter().copied().find(|&e| e > d)
    }
}

impl fmt::Debug for CantorParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({}, {:?})", self.base, self.digits)
    }
}

impl fmt::Display for CantorParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "C({}, {{{}}})", self.base, ds.join(","))
    }
}

/// A closed interval with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub left: Rational,
    pub right: Rational,
}

impl Interval {
    pub fn new(left: Rational, right: Rational) -> Self {
        assert!(left <= right, "interval endpoints out of order");
        Interval { left, right }
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    /// Distance from `x` to the interval (zero inside).
    pub fn distance_to(&self, x: &Rational) -> Rational {
        if *x < self.left {
            &self.left - x
        } else if *x > self.right {
            x - &self.right
        } else {
            Rational::zero()
        }
    }
}

/// `γ = log|D| / log b` enclosed at `prec` bits.
pub fn gamma(params: &CantorParams, prec: u32) -> Real {
    Real::log_ratio(params.digit_count() as u64, params.base as u64, prec)
}

/// `γ` at the default 80-bit precision, rounded to `f64`.
pub fn gamma_f64(params: &CantorParams) -> f64 {
    gamma(params, DEFAULT_PRECISION).to_f64()
}

fn check_cap(params: &CantorParams, n: u32, cap: u64) -> Result<()> {
    let count = (params.digit_count() as f64).powi(n as i32);
    if count > cap as f64 {
        return Err(Error::Resource {
            cap: "enumeration",
            needed: format!("|D|^n = {}^{}", params.digit_count(), n),
            limit: cap.to_string(),
        });
    }
    Ok(())
}

/// Numerators `P` (over `b^n`) of the left endpoints of level `n`, ascending.
pub fn level_left_numerators(params: &CantorParams, n: u32, cap: u64) -> Result<Vec<BigInt>> {
    check_cap(params, n, cap)?;
    let b = BigInt::from(params.base);
    let mut current = vec![BigInt::zero()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(current.len() * params.digits.len());
        for p in &current {
            let shifted = p * &b;
            for &d in &params.digits {
                next.push(&shifted + d);
            }
        }
        current = next;
    }
    Ok(current)
}

/// The `|D|^n` closed intervals of length `b^-n` making up level `n`, sorted.
pub fn level_intervals(params: &CantorParams, n: u32, cap: u64) -> Result<Vec<Interval>> {
    let scale = Rational::integer_pow(params.base as u64, -(n as i64));
    Ok(level_left_numerators(params, n, cap)?
        .into_iter()
        .map(|p| {
            let left = Rational::from(p) * &scale;
            let right = &left + &scale;
            Interval { left, right }
        })
        .collect())
}

/// Level-`k` intervals that meet the closed window `[lo, hi]`, sorted.
///
/// Enumerates by depth-first search over digit prefixes, pruning cells that
/// miss the window, so the work is proportional to the output.
pub fn level_intervals_meeting(
    params: &CantorParams,
    k: u32,
    lo: &Rational,
    hi: &Rational,
    cap: u64,
) -> Result<Vec<Interval>> {
    let mut out = Vec::new();
    let b = params.base as u64;
    let mut stack: Vec<(u32, BigInt)> = vec![(0, BigInt::zero())];
    while let Some((depth, p)) = stack.pop() {
        let width = Rational::integer_pow(b, -(depth as i64));
        let left = Rational::from(p.clone()) * &width;
        let right = &left + &width;
        if right < *lo || left > *hi {
            continue;
        }
        if depth == k {
            out.push(Interval { left, right });
            if out.len() as u64 > cap {
                return Err(Error::Resource {
                    cap: "enumeration",
                    needed: format!("more than {cap} intervals"),
                    limit: cap.to_string(),
                });
            }
            continue;
        }
        let shifted = &p * BigInt::from(b);
        for &d in params.digits.iter().rev() {
            stack.push((depth + 1, &shifted + d));
        }
    }
    Ok(out)
}

fn check_endpoint_range(params: &CantorParams, p: &BigInt, n: u32) -> Result<()> {
    let limit = num_traits::pow(BigInt::from(params.base), n as usize);
    if p < &BigInt::zero() || p > &limit {
        return Err(Error::Domain(format!("p = {p} is outside [0, {}^{n}]", params.base)));
    }
    Ok(())
}

/// Whether `p / b^n` is a left endpoint of a level-`n` interval.
pub fn is_left_endpoint(params: &CantorParams, p: &BigInt, n: u32) -> Result<bool> {
    check_endpoint_range(params, p, n)?;
    let limit = num_traits::pow(BigInt::from(params.base), n as usize);
    if *p == limit {
        return Ok(false);
    }
    Ok(digits_fixed(p, params.base, n as usize)?
        .into_iter()
        .all(|d| params.allows(d)))
}

/// Whether `p / b^n` is a right endpoint of a level-`n` interval.
pub fn is_right_endpoint(params: &CantorParams, p: &BigInt, n: u32) -> Result<bool> {
    check_endpoint_range(params, p, n)?;
    if p.is_zero() {
        return Ok(false);
    }
    let prev = p - 1u32;
    Ok(digits_fixed(&prev, params.base, n as usize)?
        .into_iter()
        .all(|d| params.allows(d)))
}

/// `u64` fast path of [`is_left_endpoint`]; `p < b^n` assumed.
#[inline]
pub fn is_left_endpoint_u64(params: &CantorParams, mut p: u64, n: u32) -> bool {
    let b = params.base as u64;
    for _ in 0..n {
        if !params.allows((p % b) as u32) {
            return false;
        }
        p /= b;
    }
    p == 0
}

/// Nearest point of `C(b, D)` to `x` and the distance to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nearest {
    pub distance: Rational,
    /// On ties the smaller of the two candidates.
    pub witness: Rational,
}

/// Integer types the digit scanner runs on: `u128` for small fractions and
/// `BigInt` for everything else.
trait Word: Clone + Integer + From<u32> + ToPrimitive + Into<BigInt> {}
impl Word for u128 {}
impl Word for BigInt {}

/// Outcome of scanning the canonical expansion of `num/den`.
struct Scan<T> {
    member: bool,
    /// Deepest position `i` with an admissible digit below `x_i`:
    /// `(i, remainder before position i, that digit)`.
    pred: Option<(usize, T, u32)>,
    /// Deepest position with an admissible digit above `x_i`.
    succ: Option<(usize, T, u32)>,
}

/// Preperiod length of any reduced fraction with denominator `den`, and
/// whether such fractions terminate in `base`.
fn preperiod<T: Word>(den: &T, base: u32) -> (usize, bool) {
    let b = T::from(base);
    let mut rest = den.clone();
    let mut k = 0;
    loop {
        let g = rest.gcd(&b);
        if g.is_one() {
            return (k, rest.is_one());
        }
        rest = rest / g;
        k += 1;
    }
}

/// Scans digits of `num/den in [0, 1)` until the first inadmissible digit or
/// until the full preperiod and period have been seen.
fn scan<T: Word>(params: &CantorParams, num: T, den: T) -> Scan<T> {
    let b = T::from(params.base);
    let (mu, terminating) = preperiod(&den, params.base);
    let mut rem = num;
    let mut pred = None;
    let mut succ = None;
    let mut start: Option<T> = if mu == 0 { Some(rem.clone()) } else { None };
    let mut digit_at_mu = 0;
    let mut i = 0usize;
    loop {
        i += 1;
        let (d, r) = (rem.clone() * b.clone()).div_rem(&den);
        let d = d.to_u32().expect("digit below base");
        if let Some(lower) = params.below(d) {
            pred = Some((i, rem.clone(), lower));
        }
        if let Some(upper) = params.above(d) {
            succ = Some((i, rem.clone(), upper));
        }
        if i == mu {
            digit_at_mu = d;
        }
        if !params.allows(d) {
            // The canonical expansion leaves D. A terminating value may still
            // lie in C through `x_1 .. x_{mu-1} (x_mu - 1) (b-1)(b-1)...`.
            let member = terminating
                && mu > 0
                && i >= mu
                && digit_at_mu >= 1
                && params.allows(digit_at_mu - 1)
                && params.allows(params.base - 1);
            return Scan { member, pred, succ };
        }
        rem = r;
        if i == mu {
            start = Some(rem.clone());
        } else if i > mu && Some(&rem) == start.as_ref() {
            return Scan {
                member: true,
                pred,
                succ,
            };
        }
    }
}

fn nearest_from_scan<T: Word>(params: &CantorParams, x: &Rational, s: Scan<T>) -> Nearest {
    if s.member {
        return Nearest {
            distance: Rational::zero(),
            witness: x.clone(),
        };
    }
    let b = params.base;
    let den: BigInt = x.denom().clone();
    let bm1 = BigInt::from(b - 1);
    // Candidates: prefix of x through position i-1, then `digit`, then the
    // constant tail `tail_digit` forever.
    let candidate = |i: usize, rem: T, digit: u32, tail_digit: u32| -> Rational {
        let rem: BigInt = rem.into();
        let scale = num_traits::pow(BigInt::from(b), i);
        // prefix value = x - rem / (den b^(i-1))
        let prefix = x - Rational::new(rem * BigInt::from(b), &den * &scale);
        prefix + Rational::new(BigInt::from(digit) * &bm1 + tail_digit, &bm1 * &scale)
    };
    let pred = s.pred.map(|(i, rem, d)| candidate(i, rem, d, params.max_digit()));
    let succ = s.succ.map(|(i, rem, d)| candidate(i, rem, d, params.min_digit()));
    pick(x, pred, succ)
}

fn pick(x: &Rational, pred: Option<Rational>, succ: Option<Rational>) -> Nearest {
    match (pred, succ) {
        (Some(p), Some(s)) => {
            let dp = x - &p;
            let ds = &s - x;
            if dp <= ds {
                Nearest { distance: dp, witness: p }
            } else {
                Nearest { distance: ds, witness: s }
            }
        }
        (Some(p), None) => Nearest {
            distance: x - &p,
            witness: p,
        },
        (None, Some(s)) => Nearest {
            distance: &s - x,
            witness: s,
        },
        (None, None) => unreachable!("C(b, D) is non-empty"),
    }
}

fn check_unit(x: &Rational) -> Result<()> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::Domain(format!("{x} is outside [0, 1]")));
    }
    Ok(())
}

fn fits_u128(x: &Rational) -> Option<(u128, u128)> {
    // remainder * base must not overflow: keep den below 2^100.
    if x.denom().bits() > 100 {
        return None;
    }
    Some((x.numer().to_u128()?, x.denom().to_u128()?))
}

/// Nearest point of `C(b, D)` to `x ∈ [0, 1]`.
pub fn nearest(params: &CantorParams, x: &Rational) -> Result<Nearest> {
    check_unit(x)?;
    if *x == Rational::one() {
        let top = params.max_point();
        return Ok(Nearest {
            distance: Rational::one() - &top,
            witness: if params.allows(params.base - 1) { x.clone() } else { top },
        });
    }
    Ok(match fits_u128(x) {
        Some((n, d)) => nearest_from_scan(params, x, scan(params, n, d)),
        None => nearest_from_scan(params, x, scan(params, x.numer().clone(), x.denom().clone())),
    })
}

/// Exact distance from `x ∈ [0, 1]` to `C(b, D)`.
pub fn distance(params: &CantorParams, x: &Rational) -> Result<Rational> {
    Ok(nearest(params, x)?.distance)
}

/// Distance from any rational to `C(b, D)`, including points outside `[0, 1]`.
pub fn distance_anywhere(params: &CantorParams, x: &Rational) -> Rational {
    if x.is_negative() {
        params.min_point() - x
    } else if *x > Rational::one() {
        x - params.max_point()
    } else {
        distance(params, x).expect("x in [0, 1]")
    }
}

/// Whether `x ∈ [0, 1]` has some base-`b` expansion with all digits in `D`.
pub fn member(params: &CantorParams, x: &Rational) -> Result<bool> {
    check_unit(x)?;
    if *x == Rational::one() {
        return Ok(params.allows(params.base - 1));
    }
    Ok(match fits_u128(x) {
        Some((n, d)) => scan(params, n, d).member,
        None => scan(params, x.numer().clone(), x.denom().clone()).member,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn c(b: u32, d: &[u32]) -> CantorParams {
        CantorParams::new(b, d).unwrap()
    }

    #[test]
    fn params_validation_names_invariant() {
        assert!(matches!(CantorParams::new(4, &[0, 1, 2, 3]), Err(Error::InvalidParams(m)) if m.contains("|D|")));
        assert!(matches!(CantorParams::new(2, &[0, 1]), Err(Error::InvalidParams(m)) if m.contains("b >= 3")));
        assert!(matches!(CantorParams::new(5, &[1, 7]), Err(Error::InvalidParams(_))));
        assert!(matches!(CantorParams::new(5, &[1, 1, 2]), Err(Error::InvalidParams(_))));
        assert!(matches!(CantorParams::new(5, &[1]), Err(Error::InvalidParams(_))));
        let p = c(5, &[2, 1]);
        assert_eq!(p.digits(), &[1, 2]);
        assert_eq!((p.m_left(), p.m_right(), p.m()), (1, 2, 1));
    }

    #[test]
    fn level_one_of_example() {
        let p = c(5, &[1, 2]);
        let ivs = level_intervals(&p, 1, ENUMERATION_CAP).unwrap();
        assert_eq!(
            ivs,
            vec![Interval::new(r(1, 5), r(2, 5)), Interval::new(r(2, 5), r(3, 5))]
        );
        let lefts: Vec<_> = level_intervals(&p, 2, ENUMERATION_CAP)
            .unwrap()
            .into_iter()
            .map(|iv| iv.left)
            .collect();
        assert_eq!(lefts, vec![r(6, 25), r(7, 25), r(11, 25), r(12, 25)]);
    }

    #[test]
    fn middle_third_level_one() {
        let ivs = level_intervals(&c(3, &[0, 2]), 1, ENUMERATION_CAP).unwrap();
        assert_eq!(
            ivs,
            vec![Interval::new(r(0, 1), r(1, 3)), Interval::new(r(2, 3), r(1, 1))]
        );
    }

    #[test]
    fn cap_is_enforced() {
        let err = level_intervals(&c(3, &[0, 2]), 30, 1000).unwrap_err();
        assert!(matches!(err, Error::Resource { cap: "enumeration", .. }));
    }

    #[test]
    fn endpoints() {
        let p = c(5, &[1, 2]);
        let big = |v: i64| BigInt::from(v);
        assert!(is_left_endpoint(&p, &big(1), 1).unwrap());
        assert!(!is_left_endpoint(&p, &big(3), 1).unwrap());
        assert!(is_left_endpoint(&p, &big(7), 2).unwrap());
        assert!(is_right_endpoint(&p, &big(2), 1).unwrap());
        assert!(!is_right_endpoint(&p, &big(4), 1).unwrap());
        assert!(is_right_endpoint(&c(3, &[0, 2]), &big(1), 1).unwrap());
        assert!(is_left_endpoint(&p, &big(26), 2).is_err());
        assert!(!is_left_endpoint(&p, &big(25), 2).unwrap());
        assert!(is_left_endpoint_u64(&p, 7, 2));
        assert!(!is_left_endpoint_u64(&p, 8, 2));
    }

    #[test]
    fn membership() {
        let ct = c(3, &[0, 2]);
        assert!(member(&ct, &r(1, 4)).unwrap());
        assert!(!member(&ct, &r(1, 2)).unwrap());
        assert!(member(&ct, &r(1, 1)).unwrap());
        assert!(member(&ct, &r(1, 3)).unwrap()); // 0.0222...
        assert!(member(&ct, &r(0, 1)).unwrap());
        assert!(!member(&ct, &r(4, 9)).unwrap()); // 0.11 / 0.1022..
        assert!(member(&ct, &r(3, 4)).unwrap()); // 0.2020...
        // 2/5 in base 5 is 0.2 or 0.1444...; neither fits D = {1, 2} fully.
        assert!(!member(&c(5, &[1, 2]), &r(2, 5)).unwrap());
        assert!(member(&c(5, &[1, 2]), &r(1, 4)).unwrap()); // 0.111...
        assert!(member(&ct, &r(2, 1)).is_err());
    }

    #[test]
    fn distances() {
        let ex = c(5, &[1, 2]);
        assert_eq!(distance(&ex, &r(2, 5)).unwrap(), r(1, 20));
        let ct = c(3, &[0, 2]);
        assert_eq!(distance(&ct, &r(1, 2)).unwrap(), r(1, 6));
        assert_eq!(nearest(&ct, &r(1, 2)).unwrap().witness, r(1, 3));
        assert_eq!(distance(&ct, &r(1, 4)).unwrap(), r(0, 1));
        // Below the set: 0 < min C(5,{1,2}) = 1/4.
        assert_eq!(distance(&ex, &r(0, 1)).unwrap(), r(1, 4));
        assert_eq!(distance(&ex, &r(1, 1)).unwrap(), r(1, 2));
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_f64(&c(3, &[0, 2])) - 0.630_929_753_571_457_4).abs() < 1e-15);
        assert!((gamma_f64(&c(5, &[1, 2])) - 2f64.ln() / 5f64.ln()).abs() < 1e-15);
    }
}
