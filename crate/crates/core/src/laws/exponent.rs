//! Growth exponents of series terms and their exact signs.
//!
//! Every exponent met by the verdict engine is a finite sum
//! `Σ c_x ln x + Σ g_x γ ln x` with rational `c_x, g_x`, integer `x >= 2`,
//! and `γ = ln|D| / ln b`. When every `x` in the second sum is
//! multiplicatively dependent on `b`, the expression collapses to a rational
//! combination of prime logarithms, which is zero exactly when every prime's
//! coefficient vanishes. Otherwise the expression is zero only if it is
//! identically zero as a polynomial in prime logarithms, and a non-zero sign
//! is certified by interval evaluation at increasing precision.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cantor::CantorParams;
use crate::error::{Error, Result};
use crate::exactnum::{Rational, Real};
use crate::regime::{factorize, log_ratio_rational};

/// The pair `(|D|, b)` that fixes `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaCtx {
    pub digits: u64,
    pub base: u64,
}

impl GammaCtx {
    pub fn of(params: &CantorParams) -> Self {
        GammaCtx {
            digits: params.digit_count() as u64,
            base: params.base() as u64,
        }
    }

    pub fn gamma(&self, prec: u32) -> Real {
        Real::log_ratio(self.digits, self.base, prec)
    }

    pub fn gamma_f64(&self) -> f64 {
        self.gamma(96).to_f64()
    }
}

/// A rational affine function of `γ`: `rational + gamma * γ`.
///
/// Used for the exponent `s` of dimension functions so that critical values
/// like `s = γ` are represented exactly.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GammaAffine {
    pub rational: Rational,
    pub gamma: Rational,
}

impl GammaAffine {
    pub fn rational(q: Rational) -> Self {
        GammaAffine {
            rational: q,
            gamma: Rational::zero(),
        }
    }

    pub fn gamma_multiple(k: Rational) -> Self {
        GammaAffine {
            rational: Rational::zero(),
            gamma: k,
        }
    }

    pub fn add(&self, other: &GammaAffine) -> GammaAffine {
        GammaAffine {
            rational: &self.rational + &other.rational,
            gamma: &self.gamma + &other.gamma,
        }
    }

    pub fn scale(&self, k: &Rational) -> GammaAffine {
        GammaAffine {
            rational: &self.rational * k,
            gamma: &self.gamma * k,
        }
    }

    pub fn to_f64(&self, ctx: &GammaCtx) -> f64 {
        self.rational.to_f64() + self.gamma.to_f64() * ctx.gamma_f64()
    }

    /// Exact sign, via `sign(x + yγ) = sign(x ln b + y ln|D|)`.
    pub fn sign(&self, ctx: &GammaCtx) -> Option<Ordering> {
        let mut e = LogExpr::zero();
        e.add_plain(ctx.base, self.rational.clone());
        e.add_plain(ctx.digits, self.gamma.clone());
        e.sign(ctx)
    }
}

impl fmt::Display for GammaAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.gamma;
        if g.is_zero() {
            return write!(f, "{}", self.rational);
        }
        let gpart = if *g == Rational::one() {
            "gamma".to_string()
        } else {
            format!("{g}*gamma")
        };
        if self.rational.is_zero() {
            write!(f, "{gpart}")
        } else {
            write!(f, "{}+{gpart}", self.rational)
        }
    }
}

impl fmt::Debug for GammaAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_number(text: &str) -> Result<Rational> {
    if text.contains('.') || text.contains(['e', 'E']) {
        Rational::parse_decimal(text)
    } else {
        text.parse()
    }
}

impl FromStr for GammaAffine {
    type Err = Error;

    /// Accepts sums of terms such as `0.43`, `3/4`, `gamma`, `2*gamma`,
    /// `gamma/2`, `1/2*gamma` (`γ` is accepted for `gamma`).
    fn from_str(text: &str) -> Result<Self> {
        let cleaned = text.replace('γ', "gamma").replace(' ', "");
        if cleaned.is_empty() {
            return Err(Error::Parse("empty exponent".into()));
        }
        // Split into signed terms.
        let mut terms = Vec::new();
        let mut current = String::new();
        for (i, ch) in cleaned.char_indices() {
            let prev = cleaned[..i].chars().last();
            let is_sign = (ch == '+' || ch == '-') && i > 0 && !matches!(prev, Some('e') | Some('E') | Some('*') | Some('/'));
            if is_sign {
                terms.push(std::mem::take(&mut current));
            }
            current.push(ch);
        }
        terms.push(current);
        let mut out = GammaAffine::default();
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, term.trim_start_matches('+').to_string()),
            };
            let value = if let Some(pos) = body.find("gamma") {
                let before = body[..pos].trim_end_matches('*');
                let after = &body[pos + "gamma".len()..];
                let mut k = if before.is_empty() {
                    Rational::one()
                } else {
                    parse_number(before)?
                };
                if let Some(den) = after.strip_prefix('/') {
                    let d = parse_number(den)?;
                    if d.is_zero() {
                        return Err(Error::Parse(format!("`{text}` divides by zero")));
                    }
                    k = k / d;
                } else if !after.is_empty() {
                    return Err(Error::Parse(format!("cannot parse exponent `{text}`")));
                }
                GammaAffine::gamma_multiple(k)
            } else {
                GammaAffine::rational(parse_number(&body)?)
            };
            let value = if neg { value.scale(&Rational::from(-1)) } else { value };
            out = out.add(&value);
        }
        Ok(out)
    }
}

impl Serialize for GammaAffine {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GammaAffine {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `Σ plain[x] ln x + Σ gamma[x] γ ln x`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogExpr {
    plain: BTreeMap<u64, Rational>,
    gamma: BTreeMap<u64, Rational>,
}

/// Precisions tried, in bits, when certifying a sign numerically.
const PRECISIONS: [u32; 6] = [64, 128, 256, 512, 1024, 2048];

impl LogExpr {
    pub fn zero() -> Self {
        LogExpr::default()
    }

    /// `coeff * ln x`.
    pub fn ln(x: u64, coeff: Rational) -> Self {
        let mut e = LogExpr::zero();
        e.add_plain(x, coeff);
        e
    }

    pub fn add_plain(&mut self, x: u64, coeff: Rational) {
        assert!(x >= 1, "logarithm of zero");
        if x == 1 || coeff.is_zero() {
            return;
        }
        let slot = self.plain.entry(x).or_default();
        *slot += &coeff;
    }

    /// Adds `coeff * γ ln x`.
    pub fn add_gamma(&mut self, x: u64, coeff: Rational) {
        assert!(x >= 1, "logarithm of zero");
        if x == 1 || coeff.is_zero() {
            return;
        }
        let slot = self.gamma.entry(x).or_default();
        *slot += &coeff;
    }

    pub fn plus(mut self, other: &LogExpr) -> Self {
        for (x, c) in &other.plain {
            self.add_plain(*x, c.clone());
        }
        for (x, c) in &other.gamma {
            self.add_gamma(*x, c.clone());
        }
        self
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        LogExpr {
            plain: self.plain.iter().map(|(x, c)| (*x, c * k)).collect(),
            gamma: self.gamma.iter().map(|(x, c)| (*x, c * k)).collect(),
        }
    }

    /// Folds `γ ln x` into `q ln|D|` whenever `ln x / ln b = q` is rational.
    pub fn reduced(&self, ctx: &GammaCtx) -> LogExpr {
        let mut out = LogExpr {
            plain: self.plain.clone(),
            gamma: BTreeMap::new(),
        };
        for (x, g) in &self.gamma {
            match log_ratio_rational(*x, ctx.base) {
                Some(q) => out.add_plain(ctx.digits, g * &q),
                None => out.add_gamma(*x, g.clone()),
            }
        }
        out.plain.retain(|_, c| !c.is_zero());
        out.gamma.retain(|_, c| !c.is_zero());
        out
    }

    /// Coefficients of `ln p` for each prime `p` in a plain sum.
    fn prime_coefficients(terms: &BTreeMap<u64, Rational>) -> BTreeMap<u64, Rational> {
        let mut out: BTreeMap<u64, Rational> = BTreeMap::new();
        for (x, c) in terms {
            for (p, e) in factorize(*x) {
                let slot = out.entry(p).or_default();
                *slot += &(c * Rational::from(e));
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Whether the expression is identically zero over the prime logarithms.
    pub fn is_structurally_zero(&self, ctx: &GammaCtx) -> bool {
        let r = self.reduced(ctx);
        if r.gamma.is_empty() {
            return LogExpr::prime_coefficients(&r.plain).is_empty();
        }
        // E ln b = (Σ plain) (ln b) + (Σ gamma) (ln|D|), a quadratic form.
        let lin = LogExpr::prime_coefficients(&r.plain);
        let glin = LogExpr::prime_coefficients(&r.gamma);
        let vb = factorize(ctx.base);
        let vd = factorize(ctx.digits);
        let mut quad: BTreeMap<(u64, u64), Rational> = BTreeMap::new();
        let mut put = |p: u64, q: u64, c: Rational| {
            let key = (p.min(q), p.max(q));
            let slot = quad.entry(key).or_default();
            *slot += &c;
        };
        for (p, c) in &lin {
            for (q, e) in &vb {
                put(*p, *q, c * Rational::from(*e));
            }
        }
        for (p, c) in &glin {
            for (q, e) in &vd {
                put(*p, *q, c * Rational::from(*e));
            }
        }
        quad.values().all(|c| c.is_zero())
    }

    /// Certified enclosure at `prec` bits.
    pub fn enclose(&self, ctx: &GammaCtx, prec: u32) -> Real {
        let mut acc = Real::from_integer(0, prec);
        for (x, c) in &self.plain {
            acc = acc.add(&Real::ln(&Rational::from(*x), prec).mul_rational(c));
        }
        if !self.gamma.is_empty() {
            let mut g = Real::from_integer(0, prec);
            for (x, c) in &self.gamma {
                g = g.add(&Real::ln(&Rational::from(*x), prec).mul_rational(c));
            }
            acc = acc.add(&g.mul(&ctx.gamma(prec)));
        }
        acc
    }

    pub fn to_f64(&self, ctx: &GammaCtx) -> f64 {
        self.enclose(ctx, 96).to_f64()
    }

    /// Exact sign, or `None` if a non-structural zero cannot be excluded at
    /// the highest working precision.
    pub fn sign(&self, ctx: &GammaCtx) -> Option<Ordering> {
        let r = self.reduced(ctx);
        if r.is_structurally_zero(ctx) {
            return Some(Ordering::Equal);
        }
        for prec in PRECISIONS {
            if let Some(s) = r.enclose(ctx, prec).certified_sign() {
                if s != Ordering::Equal {
                    return Some(s);
                }
            }
        }
        None
    }
}

impl fmt::Display for LogExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .plain
            .iter()
            .map(|(x, c)| format!("({c})ln{x}"))
            .collect();
        parts.extend(self.gamma.iter().map(|(x, c)| format!("({c})γ·ln{x}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    const CT: GammaCtx = GammaCtx { digits: 2, base: 3 };

    #[test]
    fn gamma_times_ln_base_is_ln_digits() {
        // ln 2 - γ ln 3 = 0 for the middle-third set.
        let mut e = LogExpr::ln(2, r(1, 1));
        e.add_gamma(3, r(-1, 1));
        assert_eq!(e.sign(&CT), Some(Ordering::Equal));
        // γ ln 9 = 2 ln 2
        let mut e = LogExpr::ln(2, r(2, 1));
        e.add_gamma(9, r(-1, 1));
        assert_eq!(e.sign(&CT), Some(Ordering::Equal));
    }

    #[test]
    fn plain_signs_are_exact() {
        // 3 ln 2 - 2 ln 3 = ln(8/9) < 0
        let e = LogExpr::ln(2, r(3, 1)).plus(&LogExpr::ln(3, r(-2, 1)));
        assert_eq!(e.sign(&CT), Some(Ordering::Less));
        // ln 4 - 2 ln 2 = 0 even though the bases differ
        let e = LogExpr::ln(4, r(1, 1)).plus(&LogExpr::ln(2, r(-2, 1)));
        assert_eq!(e.sign(&CT), Some(Ordering::Equal));
    }

    #[test]
    fn independent_gamma_terms_are_certified() {
        // ln 2 - (1 - γ)(6/5) ln 2 ... sign of 1 - (6/5)(1 - γ) for C(3,{0,2}) is positive (≈ 0.557)
        let mut e = LogExpr::ln(2, r(1, 1));
        e.add_plain(2, r(-6, 5));
        e.add_gamma(2, r(6, 5));
        assert_eq!(e.sign(&CT), Some(Ordering::Greater));
        assert!((e.to_f64(&CT) - (1.0 - 1.2 * (1.0 - 0.630_929_753_571_457_4)) * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn affine_parsing() {
        let g: GammaAffine = "gamma".parse().unwrap();
        assert_eq!(g, GammaAffine::gamma_multiple(r(1, 1)));
        let g: GammaAffine = "0.43".parse().unwrap();
        assert_eq!(g, GammaAffine::rational(r(43, 100)));
        let g: GammaAffine = "1/2+3/4*gamma".parse().unwrap();
        assert_eq!(g.rational, r(1, 2));
        assert_eq!(g.gamma, r(3, 4));
        let g: GammaAffine = "gamma/4".parse().unwrap();
        assert_eq!(g.gamma, r(1, 4));
        let g: GammaAffine = "1-γ".parse().unwrap();
        assert_eq!((g.rational, g.gamma), (r(1, 1), r(-1, 1)));
        assert!("gammas".parse::<GammaAffine>().is_err());
        let shown = GammaAffine { rational: r(1, 2), gamma: r(3, 4) }.to_string();
        assert_eq!(shown.parse::<GammaAffine>().unwrap().gamma, r(3, 4));
    }

    #[test]
    fn affine_sign() {
        // γ - 0.63 > 0, γ - 0.631 < 0
        let a = GammaAffine { rational: r(-63, 100), gamma: r(1, 1) };
        assert_eq!(a.sign(&CT), Some(Ordering::Greater));
        let a = GammaAffine { rational: r(-631, 1000), gamma: r(1, 1) };
        assert_eq!(a.sign(&CT), Some(Ordering::Less));
    }
}
