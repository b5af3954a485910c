use num_bigint::BigInt;
use proptest::prelude::*;

use zerofull::ballgeom::survives;
use zerofull::cantor::{distance, level_intervals, CantorParams, ENUMERATION_CAP};
use zerofull::census::{count_surviving, CensusOptions, Method, Radius};
use zerofull::exactnum::expand;
use zerofull::laws::{verdict_base_equal, DimensionFunctionSpec, PsiSpec};
use zerofull::Rational;

fn params() -> impl Strategy<Value = CantorParams> {
    (3u32..=7)
        .prop_flat_map(|b| (Just(b), proptest::sample::subsequence((0..b).collect::<Vec<_>>(), 2..b as usize)))
        .prop_map(|(b, d)| CantorParams::new(b, &d).unwrap())
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..2000).prop_flat_map(|d| (0..=d).prop_map(move |n| Rational::new(n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_sandwiched_by_levels(p in params(), x in unit_rational(), k in 1u32..5) {
        let d = distance(&p, &x).unwrap();
        let cells = level_intervals(&p, k, ENUMERATION_CAP).unwrap();
        let to_cells = cells
            .iter()
            .map(|c| if x < c.left { &c.left - &x } else if x > c.right { &x - &c.right } else { Rational::zero() })
            .min()
            .unwrap();
        // the set lies inside level k and holds the min and max of each cell
        let shift = Rational::integer_pow(p.base() as u64, -(k as i64)) * (p.min_point());
        let to_points = cells.iter().map(|c| (&c.left + &shift - &x).abs()).min().unwrap();
        prop_assert!(to_cells <= d);
        prop_assert!(d <= to_points);
    }

    #[test]
    fn expansion_round_trips(x in unit_rational(), b in 2u32..12) {
        prop_assert_eq!(expand(&x, b).unwrap().value(), x);
    }

    #[test]
    fn census_grows_with_radius(p in params(), t in 2u64..6, n in 1u32..5, a in 1i64..7, extra in 0i64..8) {
        let tn = t.pow(n) as i64;
        let opts = CensusOptions::default();
        let small = Radius::rational(Rational::new(a, 16 * tn)).unwrap();
        let large = Radius::rational(Rational::new(a + extra, 16 * tn)).unwrap();
        let lo = count_surviving(&p, t, n, &small, Method::Exact, &opts).unwrap().count;
        let hi = count_surviving(&p, t, n, &large, Method::Exact, &opts).unwrap().count;
        prop_assert!(lo <= hi);
    }

    #[test]
    fn base_equal_census_matches_classifier(p in params(), n in 1u32..4, k in 1i64..100) {
        let b = p.base() as u64;
        let bn = b.pow(n);
        let radius = Rational::new(k, 200 * bn as i64);
        let by_class = (0..=bn).filter(|&q| survives(&p, &BigInt::from(q), n, &radius).unwrap()).count() as u64;
        let row = count_surviving(&p, b, n, &Radius::rational(radius).unwrap(), Method::Exact, &CensusOptions::default())
            .unwrap();
        prop_assert_eq!(row.count, by_class);
    }

    #[test]
    fn counts_ignore_partitioning(p in params(), t in 2u64..5, n in 1u32..7, parts in 1usize..50, workers in 1usize..4) {
        let radius = Radius::power(Rational::one(), t, Rational::new(6 * n as i64, 5)).unwrap();
        let base = CensusOptions::default();
        let split = CensusOptions { partitions: parts, workers: Some(workers), ..base };
        let a = count_surviving(&p, t, n, &radius, Method::Exact, &base).unwrap().count;
        let b = count_surviving(&p, t, n, &radius, Method::Exact, &split).unwrap().count;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn constant_factor_in_psi_is_irrelevant(p in params(), theta in 2i64..6, s in 0i64..20, c in 1i64..9) {
        // ψ(n) = c b^(-θn) with θ >= 2 never produces large radii
        let f = DimensionFunctionSpec::power(format!("{s}/20").parse().unwrap());
        let plain = PsiSpec::power(Rational::one(), Rational::from(theta)).unwrap();
        let scaled = PsiSpec::power(Rational::new(1, c), Rational::from(theta)).unwrap();
        let a = verdict_base_equal(&p, &f, &plain).unwrap().outcome;
        let b = verdict_base_equal(&p, &f, &scaled).unwrap().outcome;
        prop_assert_eq!(a, b);
    }
}
