use brlab::brf::{
    birkhoff_remainder, birkhoff_sum, decompose_sum, grid_sum_brute, grid_sum_closed_form,
    HatFunction, PeriodizedFunction,
};
use brlab::contfrac::{ostrowski_expand, ostrowski_value, AlphaValue, ContinuedFraction};
use brlab::experiments::random_polygon;
use brlab::flow::Flow;
use brlab::geometry::{tau_profile, triangulate, Point, TorusSet};
use brlab::Rotation;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn quotients() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=12, 1..=14)
}

/// `(D, A, B, H)` for the hat `a = A/D`, `b = B/D` with `b ≤ width`.
fn hat(width: i64) -> impl Strategy<Value = (i64, i64, i64, i64)> {
    (2i64..=40)
        .prop_flat_map(|d| (Just(d), 1..d))
        .prop_flat_map(move |(d, a)| (Just(d), Just(a), a + 1..=width * d, 1i64..=9))
}

fn rational_hat((d, a, b, h): (i64, i64, i64, i64)) -> HatFunction<BigRational> {
    HatFunction::new(ratio(a, d), ratio(b, d), ratio(h, 1)).unwrap()
}

fn polygon(seed: u64, alpha: f64) -> TorusSet<f64> {
    random_polygon(&mut ChaCha8Rng::seed_from_u64(seed), alpha)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinants_alternate(a in prop::collection::vec(1u64..=1_000_000_000, 1..=40)) {
        let cf = ContinuedFraction::from_u64s(&a, AlphaValue::Symbolic).unwrap();
        prop_assert!(cf.determinant_identity_holds());
    }

    #[test]
    fn ostrowski_round_trips(a in quotients(), frac in 0.0f64..1.0) {
        let cf = ContinuedFraction::from_u64s(&a, AlphaValue::Symbolic).unwrap();
        let top = cf.q().last().unwrap().clone();
        let n = BigInt::from((frac * num_traits::ToPrimitive::to_f64(&top).unwrap()) as u64) % &top;
        let e = ostrowski_expand(&n, &cf).unwrap();
        prop_assert_eq!(ostrowski_value(&e, &cf).unwrap(), n);
    }

    #[test]
    fn decomposition_matches_direct_sum(a in quotients(), h in hat(2), x0 in 0i64..100, n in 1u64..3000) {
        let cf = ContinuedFraction::from_u64s(&a, AlphaValue::Symbolic).unwrap();
        prop_assume!(num_traits::ToPrimitive::to_u64(cf.q().last().unwrap()).unwrap() > n);
        let alpha = cf.convergent(cf.depth());
        let rot = Rotation::new(alpha);
        let tau = PeriodizedFunction::hat(rational_hat(h));
        let x0 = ratio(x0, 100);
        let d = decompose_sum(&tau, &cf, &rot, &x0, n, false).unwrap();
        prop_assert_eq!(&d.sum, &birkhoff_sum(&tau, &rot, &x0, n).unwrap());
        prop_assert_eq!(d.remainder, birkhoff_remainder(&tau, &rot, &x0, n).unwrap());
    }

    #[test]
    fn grid_closed_form_is_exact(h in hat(1), q in 1u64..400) {
        let hat = rational_hat(h);
        prop_assert_eq!(grid_sum_closed_form(&hat, q).unwrap(), grid_sum_brute(&hat, q));
    }

    #[test]
    fn triangles_tile_the_polygon(seed in any::<u64>()) {
        let alpha = 0.5f64.sqrt();
        let set = polygon(seed, alpha);
        let TorusSet::Polygon(p) = &set else { unreachable!() };
        let area: f64 = triangulate(p, Some(&alpha))
            .unwrap()
            .iter()
            .map(|[a, b, c]| ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) / 2.0)
            .sum();
        prop_assert!((area - set.measure().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn profile_integrates_to_measure(seed in any::<u64>()) {
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let set = polygon(seed, alpha);
        let tau = tau_profile(&set, &alpha).unwrap();
        prop_assert!((tau.integral().unwrap() - set.measure().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn flow_and_rotation_stay_within_four(seed in any::<u64>(), x in 0.0f64..1.0, y in 0.0f64..1.0, t in 0.0f64..2000.0) {
        let cf = ContinuedFraction::preset("sqrt3m1", 30).unwrap();
        let rot = cf.rotation_f64().unwrap();
        let set = polygon(seed, rot.alpha);
        let flow = Flow::new(&set, rot, Point::new(x, y)).unwrap();
        prop_assert!(flow.equivalence_gap(&t).unwrap().gap <= 4.0);
    }

    #[test]
    fn occupancy_splits_at_any_time(y in 0i64..100, s in 0i64..500, t in 0i64..500) {
        let set = TorusSet::<BigRational>::rectangle(ratio(1, 5), ratio(1, 7), ratio(3, 4), ratio(5, 6)).unwrap();
        let alpha = ratio(89, 144);
        let start = Point::new(BigRational::zero(), ratio(y, 100));
        let (s, t) = (ratio(s, 3), ratio(t, 3));
        let whole = Flow::new(&set, Rotation::new(alpha.clone()), start.clone()).unwrap().occupancy(&(s.clone() + t.clone())).unwrap();
        let first = Flow::new(&set, Rotation::new(alpha.clone()), start.clone()).unwrap().occupancy(&s).unwrap();
        let mid = Point::new(s.clone() - s.floor(), {
            let v = ratio(y, 100) + s.clone() * alpha.clone();
            v.clone() - v.floor()
        });
        let second = Flow::new(&set, Rotation::new(alpha), mid).unwrap().occupancy(&t).unwrap();
        prop_assert_eq!(whole, first + second);
    }
}
