//! Counting the balls `B(p / t^n, r)`, `0 <= p <= t^n`, that meet `C(b, D)`.
//!
//! Two independent methods are provided: [`Method::BruteForce`] asks for the
//! exact distance of every lattice point, [`Method::Exact`] walks the
//! construction tree (see the `count` module notes). They must agree exactly.

mod count;
pub mod output;
mod radius;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use radius::Radius;

use crate::cantor::{CantorParams, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::regime::analyze;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    BruteForce,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::BruteForce => "brute_force",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "brute" | "brute_force" | "brute-force" => Ok(Method::BruteForce),
            _ => Err(Error::Parse(format!("unknown census method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusOptions {
    /// Bound on `t^n` for brute force and on `|D|^K` for the exact walk.
    pub cap: u64,
    /// Number of `p`-ranges counted independently.
    pub partitions: usize,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            cap: ENUMERATION_CAP,
            partitions: 64,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub n: u32,
    pub t: u64,
    pub radius: String,
    pub count: u64,
    pub method: Method,
    /// Wall time; left out of machine output so reruns are byte-identical.
    #[serde(skip)]
    pub elapsed: Duration,
}

fn in_pool<R: Send>(workers: Option<usize>, job: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Resource {
                    cap: "worker threads",
                    needed: w.to_string(),
                    limit: e.to_string(),
                })?;
            Ok(pool.install(job))
        }
    }
}

/// Number of `p` in `[0, t^n]` with `dist(p / t^n, C(b, D)) < radius`.
pub fn count_surviving(
    params: &CantorParams,
    t: u64,
    n: u32,
    radius: &Radius,
    method: Method,
    opts: &CensusOptions,
) -> Result<CensusRow> {
    if t < 2 {
        return Err(Error::Domain(format!("base t = {t} must be at least 2")));
    }
    if radius.cmp_rational(&Rational::one()) != std::cmp::Ordering::Less {
        return Err(Error::Domain(format!("radius {radius} must be below 1")));
    }
    let tn = t.checked_pow(n).ok_or_else(|| Error::Resource {
        cap: "t^n",
        needed: format!("{t}^{n}"),
        limit: u64::MAX.to_string(),
    })?;
    let start = Instant::now();
    let count = match method {
        Method::BruteForce => {
            if tn > opts.cap {
                return Err(Error::Resource {
                    cap: "brute-force points t^n",
                    needed: tn.to_string(),
                    limit: opts.cap.to_string(),
                });
            }
            in_pool(opts.workers, || count::count_brute(params, tn, radius, opts.partitions))??
        }
        Method::Exact => in_pool(opts.workers, || {
            count::count_exact(params, tn, radius, opts.cap, opts.partitions)
        })??,
    };
    Ok(CensusRow {
        n,
        t,
        radius: radius.to_string(),
        count,
        method,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Slope of `ln count` against `n ln t`.
    pub exponent: f64,
    /// `ln` of the fitted prefactor.
    pub intercept: f64,
    pub r_squared: f64,
    pub rows_used: usize,
}

/// Least-squares fit of `ln count ≈ c + exponent · n ln t` over rows with a
/// positive count.
pub fn growth_fit(rows: &[CensusRow], t: u64) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.count > 0)
        .map(|r| (r.n as f64 * (t as f64).ln(), (r.count as f64).ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "{} rows with a positive count, at least 4 needed",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all rows share the same n".into()));
    }
    let exponent = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(GrowthFit {
        exponent,
        intercept: my - exponent * mx,
        r_squared,
        rows_used: pts.len(),
    })
}

/// Rows `count(n)` for `radius(n) = t^(-θn)`.
pub fn power_law_rows(
    params: &CantorParams,
    t: u64,
    theta: &Rational,
    levels: std::ops::RangeInclusive<u32>,
    opts: &CensusOptions,
) -> Result<Vec<CensusRow>> {
    levels
        .map(|n| {
            let radius = Radius::power(Rational::one(), t, theta * Rational::from(n))?;
            count_surviving(params, t, n, &radius, Method::Exact, opts)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoverExponent {
    /// No ball survives at any level.
    Empty { rows: Vec<CensusRow> },
    Fitted {
        /// Where `Σ_n count(n) ψ(n)^s` turns from growth to decay.
        s_star: f64,
        /// `γ / θ`.
        prediction: f64,
        fit: GrowthFit,
        rows: Vec<CensusRow>,
    },
}

/// Critical exponent of the natural level-`n` covers of `W_t(ψ) ∩ C(b, D)`
/// for `ψ(n) = t^(-θn)`.
pub fn natural_cover_exponent(
    params: &CantorParams,
    t: u64,
    theta: &Rational,
    levels: std::ops::RangeInclusive<u32>,
    opts: &CensusOptions,
) -> Result<CoverExponent> {
    let report = analyze(params.base() as u64, t)?;
    if !report.mult_dependent {
        return Err(Error::Precondition(format!(
            "natural covers are only calibrated for t multiplicatively dependent on b, got ({}, {t})",
            params.base()
        )));
    }
    if *theta <= Rational::one() {
        return Err(Error::Precondition(format!("θ = {theta} must exceed 1")));
    }
    let rows = power_law_rows(params, t, theta, levels, opts)?;
    if rows.iter().all(|r| r.count == 0) {
        return Ok(CoverExponent::Empty { rows });
    }
    let fit = growth_fit(&rows, t)?;
    let gamma = crate::cantor::gamma_f64(params);
    Ok(CoverExponent::Fitted {
        s_star: fit.exponent / theta.to_f64(),
        prediction: gamma / theta.to_f64(),
        fit,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(b: u32, d: &[u32]) -> CantorParams {
        CantorParams::new(b, d).unwrap()
    }

    fn rad(s: &str) -> Radius {
        s.parse().unwrap()
    }

    fn both(params: &CantorParams, t: u64, n: u32, r: &Radius) -> u64 {
        let opts = CensusOptions::default();
        let a = count_surviving(params, t, n, r, Method::Exact, &opts).unwrap().count;
        let b = count_surviving(params, t, n, r, Method::BruteForce, &opts).unwrap().count;
        assert_eq!(a, b, "{params} t={t} n={n} r={r}");
        a
    }

    #[test]
    fn middle_third_examples() {
        let p = c(3, &[0, 2]);
        assert_eq!(both(&p, 3, 2, &rad("1/100")), 8);
        assert_eq!(both(&p, 3, 1, &rad("1/100")), 4);
    }

    #[test]
    fn example_family_is_empty() {
        let p = c(5, &[1, 2]);
        for n in 1..=5 {
            let r = Radius::power(Rational::new(1, 4), 5, Rational::from(n)).unwrap();
            assert_eq!(both(&p, 5, n, &r), 0);
        }
    }

    #[test]
    fn irrational_radius_agrees() {
        let p = c(3, &[0, 2]);
        for n in 1..=12 {
            let r = Radius::power(Rational::one(), 2, Rational::new(6 * n as i64, 5)).unwrap();
            both(&p, 2, n, &r);
        }
    }

    #[test]
    fn bad_inputs() {
        let p = c(3, &[0, 2]);
        let opts = CensusOptions::default();
        assert!(matches!(
            count_surviving(&p, 3, 2, &rad("1"), Method::Exact, &opts),
            Err(Error::Domain(_))
        ));
        let small = CensusOptions { cap: 100, ..opts };
        assert!(matches!(
            count_surviving(&p, 3, 5, &rad("1/100"), Method::BruteForce, &small),
            Err(Error::Resource { .. })
        ));
        assert!(matches!(
            count_surviving(&p, 3, 2, &rad("1/1000000000"), Method::Exact, &small),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn fit_needs_rows() {
        let p = c(3, &[0, 2]);
        let rows = power_law_rows(&p, 3, &Rational::from(2), 2..=2, &CensusOptions::default()).unwrap();
        assert!(matches!(growth_fit(&rows, 3), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn cover_exponent_cases() {
        let opts = CensusOptions::default();
        let p = c(3, &[0, 2]);
        match natural_cover_exponent(&p, 3, &Rational::from(2), 2..=7, &opts).unwrap() {
            CoverExponent::Fitted { s_star, prediction, .. } => assert!((s_star - prediction).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let p5 = c(5, &[1, 2]);
        assert!(matches!(
            natural_cover_exponent(&p5, 5, &Rational::from(2), 1..=5, &opts).unwrap(),
            CoverExponent::Empty { .. }
        ));
        assert!(matches!(
            natural_cover_exponent(&p, 3, &Rational::one(), 1..=5, &opts),
            Err(Error::Precondition(_))
        ));
    }
}
