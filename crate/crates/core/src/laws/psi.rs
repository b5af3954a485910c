//! Approximation functions `ψ`, denominator-exponent sequences `A` and
//! dimension functions `f`.
//!
//! A ball family is `B(p / t^{a_n}, ψ(n))`. Distinct `n` with the same
//! exponent `a_n = i` give concentric balls, so only the largest radius
//! `ψ_A(i) = max{ψ(n) : a_n = i}` matters.

use std::cmp::Ordering;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::exponent::{GammaAffine, GammaCtx};
use crate::error::{Error, Result};
use crate::exactnum::{PowProduct, Rational};

/// How `ψ(n)` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PsiFamily {
    /// `ψ(n) = c · base^(-θ n)`; `base` defaults to the query base `t`.
    PowerDecay {
        c: Rational,
        theta: Rational,
        base: Option<u64>,
    },
    /// `ψ(n) = base^(-θ n) · n^(-β)`.
    LogModified {
        theta: Rational,
        beta: Rational,
        base: Option<u64>,
    },
    /// `ψ(1), ψ(2), ...` listed explicitly.
    Table { values: Vec<Rational> },
}

/// The exponents `a_n`, non-decreasing positive integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    Identity,
    /// `a_n = ⌊slope · n + offset⌋`.
    Affine { slope: Rational, offset: Rational },
    Table { values: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiSpec {
    pub family: PsiFamily,
    pub sequence: SequenceSpec,
}

impl PsiSpec {
    pub fn new(family: PsiFamily, sequence: SequenceSpec) -> Result<Self> {
        let spec = PsiSpec { family, sequence };
        spec.validate()?;
        Ok(spec)
    }

    /// `ψ(n) = c t^(-θ n)` with `a_n = n`.
    pub fn power(c: Rational, theta: Rational) -> Result<Self> {
        PsiSpec::new(
            PsiFamily::PowerDecay { c, theta, base: None },
            SequenceSpec::Identity,
        )
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            PsiFamily::PowerDecay { c, theta, base } => {
                if !c.is_positive() {
                    return Err(Error::Domain(format!("ψ prefactor {c} must be positive")));
                }
                if !theta.is_positive() {
                    return Err(Error::Domain(format!("decay rate θ = {theta} must be positive")));
                }
                check_base(*base)?;
            }
            PsiFamily::LogModified { theta, base, .. } => {
                if !theta.is_positive() {
                    return Err(Error::Domain(format!("decay rate θ = {theta} must be positive")));
                }
                check_base(*base)?;
            }
            PsiFamily::Table { values } => {
                if values.is_empty() {
                    return Err(Error::Domain("ψ table is empty".into()));
                }
                if let Some(v) = values.iter().find(|v| !v.is_positive()) {
                    return Err(Error::Domain(format!("ψ values must be positive, got {v}")));
                }
            }
        }
        match &self.sequence {
            SequenceSpec::Identity => {}
            SequenceSpec::Affine { slope, offset } => {
                if !slope.is_positive() {
                    return Err(Error::Domain(format!("sequence slope {slope} must be positive")));
                }
                if (slope + offset).floor() < 1.into() {
                    return Err(Error::Domain("sequence must start at a positive integer".into()));
                }
            }
            SequenceSpec::Table { values } => {
                if values.is_empty() || values[0] == 0 {
                    return Err(Error::Domain("sequence must be positive and non-empty".into()));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::Domain("sequence must be non-decreasing".into()));
                }
            }
        }
        Ok(())
    }

    /// Whether `ψ` is a closed-form family and `A` is affine, so the
    /// verdict can be decided symbolically.
    pub fn is_symbolic(&self) -> bool {
        !matches!(self.family, PsiFamily::Table { .. }) && !matches!(self.sequence, SequenceSpec::Table { .. })
    }

    /// Largest `n` for which `ψ(n)` and `a_n` are both defined.
    pub fn horizon(&self) -> Option<u64> {
        let a = match &self.family {
            PsiFamily::Table { values } => Some(values.len() as u64),
            _ => None,
        };
        let b = match &self.sequence {
            SequenceSpec::Table { values } => Some(values.len() as u64),
            _ => None,
        };
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    /// The base `ψ` decays in, given the query base `t`.
    pub fn decay_base(&self, t: u64) -> u64 {
        match &self.family {
            PsiFamily::PowerDecay { base, .. } | PsiFamily::LogModified { base, .. } => base.unwrap_or(t),
            PsiFamily::Table { .. } => t,
        }
    }

    /// `(θ, β)` for the closed-form families.
    pub fn rates(&self) -> Option<(Rational, Rational)> {
        match &self.family {
            PsiFamily::PowerDecay { theta, .. } => Some((theta.clone(), Rational::zero())),
            PsiFamily::LogModified { theta, beta, .. } => Some((theta.clone(), beta.clone())),
            PsiFamily::Table { .. } => None,
        }
    }

    /// Slope and offset of an affine `A`.
    pub fn affine(&self) -> Option<(Rational, Rational)> {
        match &self.sequence {
            SequenceSpec::Identity => Some((Rational::one(), Rational::zero())),
            SequenceSpec::Affine { slope, offset } => Some((slope.clone(), offset.clone())),
            SequenceSpec::Table { .. } => None,
        }
    }

    /// `ψ(n)` exactly.
    pub fn psi(&self, n: u64, t: u64) -> Result<PowProduct> {
        if n == 0 {
            return Err(Error::Domain("ψ is indexed from n = 1".into()));
        }
        let s = self.decay_base(t);
        Ok(match &self.family {
            PsiFamily::PowerDecay { c, theta, .. } => PowProduct::rational(c.clone())
                .times(&PowProduct::power(Rational::from(s), -(theta * Rational::from(n)))),
            PsiFamily::LogModified { theta, beta, .. } => {
                PowProduct::power(Rational::from(s), -(theta * Rational::from(n)))
                    .times(&PowProduct::power(Rational::from(n), -beta.clone()))
            }
            PsiFamily::Table { values } => {
                let v = values.get(n as usize - 1).ok_or_else(|| {
                    Error::Domain(format!("ψ table has {} entries, asked for n = {n}", values.len()))
                })?;
                PowProduct::rational(v.clone())
            }
        })
    }

    /// `a_n`.
    pub fn exponent(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::Domain("sequences are indexed from n = 1".into()));
        }
        match &self.sequence {
            SequenceSpec::Identity => Ok(n),
            SequenceSpec::Affine { slope, offset } => (slope * Rational::from(n) + offset)
                .floor()
                .to_u64()
                .ok_or_else(|| Error::Domain("sequence value overflows".into())),
            SequenceSpec::Table { values } => values.get(n as usize - 1).copied().ok_or_else(|| {
                Error::Domain(format!("sequence table has {} entries, asked for n = {n}", values.len()))
            }),
        }
    }

    /// `{n : a_n = i}`, as an inclusive range (empty when `i ∉ A`).
    pub fn fiber(&self, i: u64) -> Result<Option<(u64, u64)>> {
        match &self.sequence {
            SequenceSpec::Identity => Ok((i >= 1).then_some((i, i))),
            SequenceSpec::Affine { slope, offset } => {
                // a_n = i  ⟺  i <= slope n + offset < i + 1
                let lo = ((Rational::from(i) - offset) / slope).ceil().max(num_bigint::BigInt::from(1));
                let hi = ((Rational::from(i + 1) - offset) / slope).ceil() - num_bigint::BigInt::from(1);
                if hi < lo {
                    return Ok(None);
                }
                Ok(Some((lo.to_u64().expect("fits"), hi.to_u64().expect("fits"))))
            }
            SequenceSpec::Table { values } => {
                let lo = values.partition_point(|&v| v < i);
                let hi = values.partition_point(|&v| v <= i);
                Ok((lo < hi).then_some((lo as u64 + 1, hi as u64)))
            }
        }
    }

    /// `ψ_A(i) = max{ψ(n) : a_n = i}`; errors when `i` is not in `A` or the
    /// fiber leaves the tabulated range.
    pub fn psi_a(&self, i: u64, t: u64) -> Result<PowProduct> {
        let (lo, hi) = self
            .fiber(i)?
            .ok_or_else(|| Error::Domain(format!("{i} is not a value of the sequence")))?;
        // Closed-form families decrease in n, so the first index wins.
        if self.rates().is_some_and(|(_, beta)| !beta.is_negative()) {
            return self.psi(lo, t);
        }
        let mut best = self.psi(lo, t)?;
        for n in lo + 1..=hi {
            let v = self.psi(n, t)?;
            if v.cmp_product(&best) == Ordering::Greater {
                best = v;
            }
        }
        Ok(best)
    }

    /// The values of `A` up to `cutoff`.
    pub fn index_set(&self, cutoff: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        let limit = self.horizon();
        let mut n = 1;
        loop {
            if limit.is_some_and(|h| n > h) {
                break;
            }
            let a = self.exponent(n)?;
            if a > cutoff {
                break;
            }
            if out.last() != Some(&a) {
                out.push(a);
            }
            n += 1;
        }
        Ok(out)
    }
}

fn check_base(base: Option<u64>) -> Result<()> {
    match base {
        Some(b) if b < 2 => Err(Error::Domain(format!("decay base {b} must be at least 2"))),
        _ => Ok(()),
    }
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = |b: &Option<u64>| b.map_or("t".to_string(), |v| v.to_string());
        match &self.family {
            PsiFamily::PowerDecay { c, theta, base: b } => write!(f, "ψ(n) = {c}·{}^(-{theta}n)", base(b))?,
            PsiFamily::LogModified { theta, beta, base: b } => {
                write!(f, "ψ(n) = {}^(-{theta}n)·n^(-{beta})", base(b))?
            }
            PsiFamily::Table { values } => write!(f, "ψ = table of {} values", values.len())?,
        }
        match &self.sequence {
            SequenceSpec::Identity => Ok(()),
            SequenceSpec::Affine { slope, offset } => write!(f, ", a_n = ⌊{slope}n + {offset}⌋"),
            SequenceSpec::Table { values } => write!(f, ", a_n tabulated ({} values)", values.len()),
        }
    }
}

/// `f(r) = r^s (ln 1/r)^c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionFunctionSpec {
    pub s: GammaAffine,
    pub c: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    NotMonotone,
}

/// Behaviour of `f(r) / r^γ` on the grid `r = 2^-k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub direction: Monotonicity,
    pub grid: (u32, u32),
    /// Whether `f(r)/r^γ` is monotone, which the laws assume.
    pub admissible: bool,
}

impl DimensionFunctionSpec {
    pub fn new(s: GammaAffine, c: Rational) -> Self {
        DimensionFunctionSpec { s, c }
    }

    pub fn power(s: GammaAffine) -> Self {
        DimensionFunctionSpec { s, c: Rational::zero() }
    }

    /// `ln f(r)` given `ln r`; the log factor is dropped where `ln 1/r <= 0`.
    pub fn ln_eval(&self, ln_r: f64, ctx: &GammaCtx) -> f64 {
        self.ln_eval_with(ln_r, self.s.to_f64(ctx))
    }

    /// [`ln_eval`](Self::ln_eval) with the exponent already evaluated.
    pub fn ln_eval_with(&self, ln_r: f64, s: f64) -> f64 {
        let mut v = s * ln_r;
        if !self.c.is_zero() && -ln_r > 0.0 {
            v += self.c.to_f64() * (-ln_r).ln();
        }
        v
    }

    pub fn eval(&self, r: f64, ctx: &GammaCtx) -> f64 {
        self.ln_eval(r.ln(), ctx).exp()
    }

    /// Checks `f(r)/r^γ` for monotonicity over `r = 2^-k`, `k` in `2..=400`.
    pub fn monotonicity(&self, ctx: &GammaCtx) -> MonotonicityReport {
        let gamma = ctx.gamma_f64();
        let sg = self.s.to_f64(ctx) - gamma;
        let c = self.c.to_f64();
        let (k0, k1) = (2u32, 400u32);
        let h = |k: u32| {
            let ln_r = -(k as f64) * std::f64::consts::LN_2;
            sg * ln_r + c * (-ln_r).ln()
        };
        let mut up = false;
        let mut down = false;
        let mut prev = h(k0);
        for k in k0 + 1..=k1 {
            let v = h(k);
            let tol = 1e-12 * v.abs().max(1.0);
            // Increasing k means decreasing r.
            if v > prev + tol {
                down = true;
            } else if v < prev - tol {
                up = true;
            }
            prev = v;
        }
        let direction = match (up, down) {
            (false, false) => Monotonicity::Constant,
            (true, false) => Monotonicity::Increasing,
            (false, true) => Monotonicity::Decreasing,
            (true, true) => Monotonicity::NotMonotone,
        };
        MonotonicityReport {
            direction,
            grid: (k0, k1),
            admissible: direction != Monotonicity::NotMonotone,
        }
    }
}

impl fmt::Display for DimensionFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_zero() {
            write!(f, "f(r) = r^({})", self.s)
        } else {
            write!(f, "f(r) = r^({})·(ln 1/r)^({})", self.s, self.c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn affine_fibers_partition_indices() {
        let spec = PsiSpec::new(
            PsiFamily::PowerDecay { c: r(1, 1), theta: r(1, 1), base: None },
            SequenceSpec::Affine { slope: r(2, 3), offset: r(1, 2) },
        )
        .unwrap();
        let mut seen = Vec::new();
        for i in 1..40 {
            if let Some((lo, hi)) = spec.fiber(i).unwrap() {
                for n in lo..=hi {
                    assert_eq!(spec.exponent(n).unwrap(), i);
                    seen.push(n);
                }
            }
        }
        let expect: Vec<u64> = (1..=seen.len() as u64).collect();
        assert_eq!(seen, expect);
        let idx = spec.index_set(10).unwrap();
        assert_eq!(idx, (1..=10).filter(|&i| spec.fiber(i).unwrap().is_some()).collect::<Vec<_>>());
    }

    #[test]
    fn psi_a_takes_the_largest_radius() {
        let spec = PsiSpec::new(
            PsiFamily::Table { values: vec![r(1, 10), r(1, 4), r(1, 100), r(1, 1000)] },
            SequenceSpec::Table { values: vec![1, 1, 2, 2] },
        )
        .unwrap();
        assert_eq!(spec.psi_a(1, 2).unwrap().to_rational(), Some(r(1, 4)));
        assert_eq!(spec.psi_a(2, 2).unwrap().to_rational(), Some(r(1, 100)));
        assert!(spec.psi_a(3, 2).is_err());
        assert_eq!(spec.index_set(5).unwrap(), vec![1, 2]);
    }

    #[test]
    fn closed_forms() {
        let spec = PsiSpec::power(r(1, 4), r(1, 1)).unwrap();
        assert_eq!(spec.psi(3, 5).unwrap().to_rational(), Some(r(1, 500)));
        let spec = PsiSpec::new(
            PsiFamily::LogModified { theta: r(1, 1), beta: r(2, 1), base: Some(3) },
            SequenceSpec::Identity,
        )
        .unwrap();
        assert_eq!(spec.psi(2, 7).unwrap().to_rational(), Some(r(1, 36)));
    }

    #[test]
    fn invalid_specs() {
        assert!(PsiSpec::power(r(0, 1), r(1, 1)).is_err());
        assert!(PsiSpec::power(r(1, 1), r(-1, 1)).is_err());
        assert!(PsiSpec::new(
            PsiFamily::Table { values: vec![r(1, 2)] },
            SequenceSpec::Table { values: vec![2, 1] }
        )
        .is_err());
    }

    #[test]
    fn monotonicity_of_gauge() {
        let ctx = GammaCtx { digits: 2, base: 3 };
        let f = DimensionFunctionSpec::power("gamma".parse().unwrap());
        assert_eq!(f.monotonicity(&ctx).direction, Monotonicity::Constant);
        let f = DimensionFunctionSpec::power(GammaAffine::rational(r(1, 2)));
        assert_eq!(f.monotonicity(&ctx).direction, Monotonicity::Decreasing);
        // r^(γ-1/100) / ln(1/r) turns around inside the grid
        let f = DimensionFunctionSpec::new("-1/100+gamma".parse().unwrap(), r(-1, 1));
        assert!(!f.monotonicity(&ctx).admissible);
    }
}
