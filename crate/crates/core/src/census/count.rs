//! Counting lattice points `p / t^n` within a radius of `C(b, D)`.
//!
//! Each level-`K` construction interval `[L, R]` holds set points exactly at
//! `L + d_l` and `R - d_r`, and the gaps of the set inside it are shorter
//! than `b^-K`. Once `b^-K < 2r`, the points within `r` of the set are
//! precisely the union of the open intervals `(L + d_l - r, R - d_r + r)`.
//! Intervals come out of a depth-first walk already sorted, so they are
//! merged on the fly and lattice points are counted by floor division.
//!
//! Irrational radii are replaced by a rational bracket `lo <= r <= hi`:
//! points within `lo` are counted as above and the few lattice points whose
//! status differs between `lo` and `hi` are settled by the exact distance.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use super::radius::Radius;
use crate::cantor::{distance, CantorParams};
use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// Extra bits of precision in the bracket around an irrational radius.
const BRACKET_BITS: u32 = 40;

/// Integer type for the kernel: `i128` when everything fits, else `BigInt`.
pub(crate) trait Word:
    Clone
    + Ord
    + Integer
    + Signed
    + From<i64>
    + From<u64>
    + ToPrimitive
    + Send
    + Sync
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
}

impl Word for i128 {}
impl Word for BigInt {}

fn to_word<T: Word>(x: &BigInt) -> T {
    // Only called after the width check, or with T = BigInt.
    let (sign, digits) = x.to_u64_digits();
    let mut acc = T::from(0i64);
    for d in digits.iter().rev() {
        acc = acc * &T::from(1u64 << 32) * &T::from(1u64 << 32) + &T::from(*d);
    }
    if sign == num_bigint::Sign::Minus {
        -acc
    } else {
        acc
    }
}

/// Scaled data for the kernel. Positions are in units of `1 / q` with
/// `q = (b - 1) b^K r_den`.
pub(crate) struct Kernel<T> {
    base: T,
    digits: Vec<T>,
    pow: Vec<T>,
    b1: T,
    ml: T,
    mr: T,
    depth: usize,
    rd: T,
    r_lo: T,
    r_hi: T,
    q: T,
    tn: T,
}

/// Lattice points `p` in `[p0, p1]` with `a < p q / tn < b`.
fn lattice_open<T: Word>(k: &Kernel<T>, a: &T, b: &T, p0: &T, p1: &T) -> u64 {
    let lo = (a.clone() * &k.tn).div_floor(&k.q) + &T::from(1i64);
    let hi = ceil_div(&(b.clone() * &k.tn), &k.q) - &T::from(1i64);
    let lo = lo.max(p0.clone());
    let hi = hi.min(p1.clone());
    if hi < lo {
        0
    } else {
        (hi - &lo + &T::from(1i64)).to_u64().expect("count fits in u64")
    }
}

fn ceil_div<T: Word>(a: &T, b: &T) -> T {
    -((-a.clone()).div_floor(b))
}

impl<T: Word> Kernel<T> {
    fn new(params: &CantorParams, depth: u32, lo: &Rational, hi: &Rational, tn: &BigInt) -> Self {
        let b = params.base() as u64;
        let rd = lo.denom().lcm(hi.denom());
        let scale_r = |r: &Rational| -> BigInt {
            // r · (b-1) b^K rd
            let num = r.numer() * (&rd / r.denom());
            num * BigInt::from(b - 1) * num_traits::pow(BigInt::from(b), depth as usize)
        };
        let q = BigInt::from(b - 1) * num_traits::pow(BigInt::from(b), depth as usize) * &rd;
        Kernel {
            base: T::from(b),
            digits: params.digits().iter().map(|&d| T::from(d as u64)).collect(),
            pow: (0..=depth)
                .map(|j| to_word(&num_traits::pow(BigInt::from(b), j as usize)))
                .collect(),
            b1: T::from(b - 1),
            ml: T::from(params.m_left() as u64),
            mr: T::from(params.m_right() as u64),
            depth: depth as usize,
            rd: to_word(&rd),
            r_lo: to_word(&scale_r(lo)),
            r_hi: to_word(&scale_r(hi)),
            q: to_word(&q),
            tn: to_word(tn),
        }
    }

    /// Points of `[p0, p1]` within `lo` of the set, plus the lattice points
    /// whose status needs the exact distance.
    fn count_range(&self, p0: u64, p1: u64) -> (u64, Vec<u64>) {
        let p0w = T::from(p0);
        let p1w = T::from(p1);
        let win_lo = p0w.clone() * &self.q;
        let win_hi = p1w.clone() * &self.q;
        let bracketed = self.r_lo != self.r_hi;
        let mut count = 0u64;
        let mut pending = Vec::new();
        let mut current: Option<(T, T)> = None;
        let mut stack: Vec<(usize, T)> = vec![(0, T::from(0i64))];
        while let Some((j, k)) = stack.pop() {
            let unit = self.pow[self.depth - j].clone() * &self.rd;
            let first = (k.clone() * &self.b1 + &self.ml) * &unit;
            let last = ((k.clone() + &T::from(1i64)) * &self.b1 - &self.mr) * &unit;
            // The subtree only reaches positions in (first - r, last + r).
            if (last.clone() + &self.r_hi) * &self.tn <= win_lo || (first.clone() - &self.r_hi) * &self.tn >= win_hi {
                continue;
            }
            if j < self.depth {
                for d in self.digits.iter().rev() {
                    stack.push((j + 1, k.clone() * &self.base + d));
                }
                continue;
            }
            let a = first.clone() - &self.r_lo;
            let b = last.clone() + &self.r_lo;
            current = match current {
                Some((ca, cb)) if a < cb => Some((ca, cb.max(b))),
                Some((ca, cb)) => {
                    count += lattice_open(self, &ca, &cb, &p0w, &p1w);
                    Some((a, b))
                }
                None => Some((a, b)),
            };
            if bracketed {
                // (first - hi, first - lo] and [last + lo, last + hi)
                let l0 = ((first.clone() - &self.r_hi) * &self.tn).div_floor(&self.q) + &T::from(1i64);
                let l1 = ((first - &self.r_lo) * &self.tn).div_floor(&self.q);
                let r0 = ceil_div(&((last.clone() + &self.r_lo) * &self.tn), &self.q);
                let r1 = ceil_div(&((last + &self.r_hi) * &self.tn), &self.q) - &T::from(1i64);
                for (x, y) in [(l0, l1), (r0, r1)] {
                    let x = x.max(p0w.clone());
                    let y = y.min(p1w.clone());
                    let mut p = x;
                    while p <= y {
                        pending.push(p.to_u64().expect("p fits in u64"));
                        p = p + &T::from(1i64);
                    }
                }
            }
        }
        if let Some((a, b)) = current {
            count += lattice_open(self, &a, &b, &p0w, &p1w);
        }
        (count, pending)
    }
}

/// Splits `0..=last` into `parts` contiguous ranges.
pub(crate) fn partition(last: u64, parts: usize) -> Vec<(u64, u64)> {
    let parts = (parts.max(1) as u64).min(last + 1);
    let total = last + 1;
    (0..parts)
        .map(|i| (total * i / parts, total * (i + 1) / parts - 1))
        .collect()
}

pub(crate) fn count_exact(
    params: &CantorParams,
    tn: u64,
    radius: &Radius,
    cap: u64,
    parts: usize,
) -> Result<u64> {
    let (lo, hi) = radius.bracket(BRACKET_BITS);
    let depth = Radius::depth_for(&lo, params.base()) + 2;
    let leaves = (params.digit_count() as f64).powi(depth as i32);
    if leaves > cap as f64 {
        return Err(Error::Resource {
            cap: "exact census leaves |D|^K",
            needed: format!("{}^{depth}", params.digit_count()),
            limit: cap.to_string(),
        });
    }
    let tn_big = BigInt::from(tn);
    let width = {
        let rd = lo.denom().lcm(hi.denom());
        let q = BigInt::from(params.base() - 1) * num_traits::pow(BigInt::from(params.base()), depth as usize) * rd;
        q.bits() + tn_big.bits() + 8
    };
    let ranges = partition(tn, parts);
    let (certain, mut pending) = if width <= 120 {
        let kernel = Kernel::<i128>::new(params, depth, &lo, &hi, &tn_big);
        run(&kernel, &ranges)
    } else {
        let kernel = Kernel::<BigInt>::new(params, depth, &lo, &hi, &tn_big);
        run(&kernel, &ranges)
    };
    pending.sort_unstable();
    pending.dedup();
    let extra = pending
        .par_iter()
        .map(|&p| -> Result<u64> {
            let d = distance(params, &Rational::new(p, tn))?;
            Ok(u64::from(d >= lo && radius.exceeds(&d)))
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    Ok(certain + extra)
}

fn run<T: Word>(kernel: &Kernel<T>, ranges: &[(u64, u64)]) -> (u64, Vec<u64>) {
    let parts: Vec<(u64, Vec<u64>)> = ranges.par_iter().map(|&(p0, p1)| kernel.count_range(p0, p1)).collect();
    let mut total = 0;
    let mut pending = Vec::new();
    for (c, p) in parts {
        total += c;
        pending.extend(p);
    }
    (total, pending)
}

pub(crate) fn count_brute(params: &CantorParams, tn: u64, radius: &Radius, parts: usize) -> Result<u64> {
    let counts = partition(tn, parts)
        .par_iter()
        .map(|&(p0, p1)| -> Result<u64> {
            let mut c = 0;
            for p in p0..=p1 {
                if radius.exceeds(&distance(params, &Rational::new(p, tn))?) {
                    c += 1;
                }
            }
            Ok(c)
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(counts.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_cover_range() {
        for (last, parts) in [(0, 4), (9, 3), (100, 7), (5, 100)] {
            let r = partition(last, parts);
            assert_eq!(r.first().unwrap().0, 0);
            assert_eq!(r.last().unwrap().1, last);
            assert!(r.windows(2).all(|w| w[0].1 + 1 == w[1].0));
        }
    }

    #[test]
    fn word_conversion() {
        let x = BigInt::from(-123_456_789_012_345_678_901i128);
        assert_eq!(to_word::<i128>(&x), -123_456_789_012_345_678_901i128);
        assert_eq!(to_word::<BigInt>(&x), x);
    }
}
