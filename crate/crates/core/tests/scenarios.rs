use std::path::Path;

use brlab::brf::{
    birkhoff_remainder, cohomology_residual, special_triangle_transfer, DomeFunction, HatFunction,
    PeriodizedFunction,
};
use brlab::contfrac::{expand_value, ContinuedFraction, Enclosure};
use brlab::experiments::{
    disc_7b_structure, special_triangle, special_triangle_experiment, GmProfile,
    SpecialTriangleParams,
};
use brlab::flow::Flow;
use brlab::geometry::{tau_profile, Disc, Point, TorusSet};
use brlab::io::read_set;
use brlab::{Quad, Rotation};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn set_file(name: &str) -> TorusSet<BigRational> {
    read_set(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data/sets")
            .join(name),
    )
    .unwrap()
}

#[test]
fn one_over_pi_from_digits() {
    let x = Enclosure::from_decimal(
        "0.318309886183790671537767526745028724068919291480912897495334688117793595",
        256,
    )
    .unwrap();
    let cf = expand_value(&x, 5).unwrap();
    let q: Vec<u64> = cf.quotients().iter().map(|a| a.to_u64().unwrap()).collect();
    assert_eq!(q, [3, 7, 15, 1, 292]);
    assert_eq!(cf.q()[5], BigInt::from(103_993));
}

#[test]
fn special_triangle_is_a_coboundary_in_exact_arithmetic() {
    let cf = ContinuedFraction::preset("sqrt2m1", 30).unwrap();
    let alpha = cf.alpha_quad().unwrap();
    let set = special_triangle::<Quad>();
    let tau = PeriodizedFunction::chord(tau_profile(&set, &alpha).unwrap());
    assert_eq!(tau.integral().unwrap(), Quad::from_ratio(&ratio(1, 2)));
    let g = special_triangle_transfer(&alpha).unwrap();
    assert_eq!(
        cohomology_residual(&tau, &alpha, &*g, 200).unwrap(),
        Quad::from_int(0)
    );

    let rot = Rotation::new(alpha.clone());
    let x0 = Quad::from_int(0);
    for n in [1u64, 10, 99, 1000] {
        let telescoped = g(&x0) - g(&rot.orbit(&x0, n));
        assert_eq!(birkhoff_remainder(&tau, &rot, &x0, n).unwrap(), telescoped);
    }
}

#[test]
fn transfer_at_one_half() {
    let g = special_triangle_transfer(&ratio(1, 2)).unwrap();
    assert_eq!(g(&ratio(1, 2)), ratio(-1, 6));
    assert_eq!(g(&BigRational::zero()), BigRational::zero());
    assert_eq!(g(&ratio(1, 5)), g(&ratio(4, 5)));
}

#[test]
fn disc_dome_through_the_centre() {
    let alpha: f64 = 1.0 / 3.0;
    let d = alpha / (1.0 + alpha * alpha).sqrt();
    let disc = Disc::new(Point::new(0.5, 0.5), d / 2.0).unwrap();
    let dome = DomeFunction::from_disc(&disc, alpha).unwrap();
    let peak = dome.eval(alpha / 2.0);
    assert!((peak - 0.3).abs() < 1e-12, "{peak}");
    let lambda = std::f64::consts::FRAC_PI_4 * alpha * alpha / (1.0 + alpha * alpha);
    assert!((dome.integral() - lambda).abs() < 1e-9);
}

#[test]
fn set_files_load_with_expected_measures() {
    assert_eq!(set_file("square.json").measure().unwrap(), ratio(1, 1));
    assert_eq!(
        set_file("special_triangle.json").measure().unwrap(),
        ratio(1, 2)
    );
    assert_eq!(set_file("pentagon.json").measure().unwrap(), ratio(67, 200));
    assert!(!set_file("centred_disc.json").is_polygon());
}

#[test]
fn vertical_strip_flow_is_linear_in_time() {
    let strip = TorusSet::rectangle(
        BigRational::zero(),
        BigRational::zero(),
        ratio(2, 7),
        ratio(1, 1),
    )
    .unwrap();
    let cf = ContinuedFraction::preset("golden", 30).unwrap();
    let alpha = cf.convergent(30);
    let flow = Flow::new(
        &strip,
        Rotation::new(alpha),
        Point::new(BigRational::zero(), BigRational::zero()),
    )
    .unwrap();
    for t in [1i64, 7, 250] {
        assert_eq!(flow.occupancy(&ratio(t, 1)).unwrap(), ratio(2 * t, 7));
        assert!(flow.delta(&ratio(t, 1)).unwrap().is_zero());
    }
}

#[test]
fn hat_remainder_of_one_step() {
    let hat = HatFunction::new(ratio(1, 4), ratio(1, 2), ratio(1, 1)).unwrap();
    let rot = Rotation::new(ratio(13, 21));
    let r =
        birkhoff_remainder(&PeriodizedFunction::hat(hat), &rot, &BigRational::zero(), 1).unwrap();
    assert_eq!(r, ratio(-1, 4));
}

#[test]
fn gm_profiles() {
    assert_eq!(GmProfile::new(1).unwrap().eval(0.0), 0.5);
    for m in [2u64, 17, 300] {
        let g = GmProfile::new(m).unwrap();
        for i in 0..=24 {
            assert_eq!(g.eval_grid(i, 24), g.eval_grid(24 - i, 24));
        }
    }
    let report = disc_7b_structure(1, 200).unwrap();
    assert!(report.passed(), "{}", report.to_json());
}

#[test]
fn reports_survive_json() {
    let cf = ContinuedFraction::preset("golden", 40).unwrap();
    let params = SpecialTriangleParams {
        t_max: 1e3,
        starts: 2,
        ..SpecialTriangleParams::default()
    };
    let report = special_triangle_experiment(&cf, &params, None).unwrap();
    assert!(report.passed());
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["name"], "special-triangle");
    let ids: Vec<&str> = v["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids.len(), report.criteria.len());
    assert!(ids
        .iter()
        .all(|id| report.criterion(id).is_some_and(|c| c.pass)));
}
