//! Intersections of balls `B(p / b^n, r)` with `C(b, D)`.
//!
//! For `r < b^-n / 2` the ball meets at most the level-`n` interval starting
//! at `p / b^n` and the one ending there. Inside such an interval the points
//! of `C(b, D)` closest to its left end sit `d_l = m_l / ((b-1) b^n)` to the
//! right (digits `min D` forever), and symmetrically `d_r` from the right
//! end. So the ball can be replaced by balls recentred on set points with
//! radii reduced by the shift.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cantor::{is_left_endpoint, is_right_endpoint, CantorParams};
use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// An open ball with exact centre and positive radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Rational,
    pub radius: Rational,
}

impl Ball {
    pub fn new(center: Rational, radius: Rational) -> Self {
        Ball { center, radius }
    }

    /// Whether `x` lies in the open ball.
    pub fn contains(&self, x: &Rational) -> bool {
        (x - &self.center).abs() < self.radius
    }

    pub fn left(&self) -> Rational {
        &self.center - &self.radius
    }

    pub fn right(&self) -> Rational {
        &self.center + &self.radius
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}, {})", self.center, self.radius)
    }
}

/// How `B(p / b^n, r) ∩ C(b, D)` can be rewritten.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum IntersectionForm {
    Empty,
    /// Only the interval to the right of the centre contributes.
    Left(Ball),
    /// Only the interval to the left of the centre contributes.
    Right(Ball),
    /// The centre is both a left and a right endpoint.
    Pair { left: Ball, right: Ball },
}

impl IntersectionForm {
    pub fn is_empty(&self) -> bool {
        matches!(self, IntersectionForm::Empty)
    }

    pub fn balls(&self) -> Vec<&Ball> {
        match self {
            IntersectionForm::Empty => vec![],
            IntersectionForm::Left(b) | IntersectionForm::Right(b) => vec![b],
            IntersectionForm::Pair { left, right } => vec![left, right],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            IntersectionForm::Empty => "empty",
            IntersectionForm::Left(_) => "left",
            IntersectionForm::Right(_) => "right",
            IntersectionForm::Pair { .. } => "pair",
        }
    }
}

/// Which endpoint sets contain `p / b^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointCase {
    LeftOnly,
    RightOnly,
    Both,
    Neither,
}

/// Note printed by verbose frontends about the reading of the both-endpoint case.
pub const BOTH_ENDPOINT_NOTE: &str = "the two-ball case is applied when p/b^n is both a left and a \
right endpoint (L_n ∩ R_n); reading it as L_n ∪ R_n would overlap the one-sided cases";

/// The shifts `(d_l, d_r) = (m_l, m_r) / ((b - 1) b^n)`.
pub fn shifts(params: &CantorParams, n: u32) -> (Rational, Rational) {
    let denom = Rational::from(params.base() - 1) * Rational::integer_pow(params.base() as u64, n as i64);
    (
        Rational::from(params.m_left()) / &denom,
        Rational::from(params.m_right()) / &denom,
    )
}

/// Locates `p / b^n` among the level-`n` endpoints.
pub fn endpoint_case(params: &CantorParams, p: &BigInt, n: u32) -> Result<EndpointCase> {
    let l = is_left_endpoint(params, p, n)?;
    let r = is_right_endpoint(params, p, n)?;
    Ok(match (l, r) {
        (true, false) => EndpointCase::LeftOnly,
        (false, true) => EndpointCase::RightOnly,
        (true, true) => EndpointCase::Both,
        (false, false) => EndpointCase::Neither,
    })
}

/// Rewrites `B(p / b^n, radius) ∩ C(b, D)` as recentred balls.
///
/// Requires `0 < radius < b^-n / 2`; larger radii return
/// [`Error::NotApplicable`] so the caller can treat that regime separately.
pub fn classify(params: &CantorParams, p: &BigInt, n: u32, radius: &Rational) -> Result<IntersectionForm> {
    if !radius.is_positive() {
        return Err(Error::Domain(format!("radius {radius} must be positive")));
    }
    let half_cell = Rational::integer_pow(params.base() as u64, -(n as i64)) / Rational::from(2);
    let case = endpoint_case(params, p, n)?;
    if *radius >= half_cell {
        return Err(Error::NotApplicable {
            radius: radius.to_string(),
            bound: half_cell.to_string(),
        });
    }
    let center = Rational::from(p.clone()) * Rational::integer_pow(params.base() as u64, -(n as i64));
    let (dl, dr) = shifts(params, n);
    let left_ball = || {
        let r = radius - &dl;
        r.is_positive().then(|| Ball::new(&center + &dl, r))
    };
    let right_ball = || {
        let r = radius - &dr;
        r.is_positive().then(|| Ball::new(&center - &dr, r))
    };
    Ok(match case {
        EndpointCase::Neither => IntersectionForm::Empty,
        EndpointCase::LeftOnly => left_ball().map_or(IntersectionForm::Empty, IntersectionForm::Left),
        EndpointCase::RightOnly => right_ball().map_or(IntersectionForm::Empty, IntersectionForm::Right),
        EndpointCase::Both => match (left_ball(), right_ball()) {
            (Some(left), Some(right)) => IntersectionForm::Pair { left, right },
            (Some(left), None) => IntersectionForm::Left(left),
            (None, Some(right)) => IntersectionForm::Right(right),
            (None, None) => IntersectionForm::Empty,
        },
    })
}

/// Whether `B(p / b^n, radius)` meets `C(b, D)`.
pub fn survives(params: &CantorParams, p: &BigInt, n: u32, radius: &Rational) -> Result<bool> {
    Ok(!classify(params, p, n, radius)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::member;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn c(b: u32, d: &[u32]) -> CantorParams {
        CantorParams::new(b, d).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn shift_values() {
        assert_eq!(shifts(&c(5, &[1, 2]), 1), (r(1, 20), r(2, 20)));
        assert_eq!(shifts(&c(3, &[0, 2]), 7), (r(0, 1), r(0, 1)));
        for n in 1..8 {
            let expect = Rational::new(1, 4) * Rational::integer_pow(5, -n);
            assert_eq!(shifts(&c(5, &[1, 2]), n as u32).0, expect);
        }
    }

    #[test]
    fn example_ball_vanishes() {
        let f = classify(&c(5, &[1, 2]), &big(1), 1, &r(1, 20)).unwrap();
        assert_eq!(f, IntersectionForm::Empty);
    }

    #[test]
    fn zero_shift_keeps_ball() {
        let f = classify(&c(3, &[0, 2]), &big(1), 1, &r(1, 10)).unwrap();
        assert_eq!(f, IntersectionForm::Right(Ball::new(r(1, 3), r(1, 10))));
    }

    #[test]
    fn pair_degrades_to_left() {
        let f = classify(&c(5, &[1, 2]), &big(2), 1, &r(9, 100)).unwrap();
        assert_eq!(f, IntersectionForm::Left(Ball::new(r(9, 20), r(1, 25))));
    }

    #[test]
    fn non_endpoint_is_empty() {
        let f = classify(&c(5, &[1, 2]), &big(0), 1, &r(1, 100)).unwrap();
        assert_eq!(f, IntersectionForm::Empty);
    }

    #[test]
    fn just_above_shift_survives() {
        assert!(survives(&c(5, &[1, 2]), &big(1), 1, &r(1, 19)).unwrap());
    }

    #[test]
    fn large_radius_is_not_applicable() {
        let e = classify(&c(5, &[1, 2]), &big(1), 1, &r(1, 10)).unwrap_err();
        assert!(matches!(e, Error::NotApplicable { .. }));
        assert!(matches!(
            classify(&c(5, &[1, 2]), &big(6), 1, &r(1, 100)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            classify(&c(5, &[1, 2]), &big(1), 1, &r(0, 1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn example_family_never_survives() {
        let p5 = c(5, &[1, 2]);
        for n in 1..=5u32 {
            let radius = Rational::new(1, 4) * Rational::integer_pow(5, -(n as i64));
            for p in 0..=5i64.pow(n) {
                assert!(!survives(&p5, &big(p), n, &radius).unwrap(), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn recentred_centres_are_members() {
        let params = c(6, &[1, 3, 4]);
        for n in 1..=3u32 {
            let radius = Rational::integer_pow(6, -(n as i64)) * r(2, 5);
            for p in 0..=6i64.pow(n) {
                for ball in classify(&params, &big(p), n, &radius).unwrap().balls() {
                    assert!(member(&params, &ball.center).unwrap());
                    assert!(ball.radius.is_positive());
                }
            }
        }
    }
}
