use std::f64::consts::FRAC_PI_4;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::ExperimentReport;
use crate::brf::{remainder_trace, HatFunction, PeriodizedFunction};
use crate::contfrac::{
    counterexample_alpha, ostrowski_value, CounterexampleKind, OstrowskiExpansion,
};
use crate::error::{Error, Result};
use crate::geometry::{tau_profile, Point, TorusSet};
use crate::scalar::Rotation;

#[derive(Debug, Clone, Serialize)]
pub struct Triangle7aParams {
    pub levels: usize,
    /// Grid size for the search over `K`.
    pub k_search: u64,
    pub n_max: u64,
}

impl Default for Triangle7aParams {
    fn default() -> Self {
        Triangle7aParams {
            levels: 3,
            k_search: 1000,
            n_max: 1_000_000,
        }
    }
}

/// `‖x‖`, the distance to the nearest integer.
fn dist_to_int(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    let g = BigRational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// `min_l q_l² ‖q_l a‖` over the realized levels.
fn margin(a: &BigRational, q: &[BigInt], levels: usize) -> BigRational {
    (1..=levels)
        .map(|l| {
            let ql = BigRational::from_integer(q[l].clone());
            &ql * &ql * dist_to_int(&(&ql * a))
        })
        .min()
        .unwrap_or_else(BigRational::zero)
}

/// `Σ_{k<n} T({kα})` for the hat `T = hat(a, 1, h)` and rational `α`, exact.
///
/// Indices are grouped by residue `j` modulo `q_l`: along `k = j + m q_l`
/// the point `{jα} + mδ`, `δ = q_l α − p_l`, drifts linearly, so each run
/// between breakpoints of `T` is an arithmetic series.
pub fn periodic_hat_sum(
    a: &BigRational,
    h: &BigRational,
    alpha: &BigRational,
    p_l: &BigInt,
    q_l: &BigInt,
    n: &BigInt,
) -> BigRational {
    let one = BigRational::one();
    let delta =
        BigRational::from_integer(q_l.clone()) * alpha - BigRational::from_integer(p_l.clone());
    let rising = h / a;
    let falling = h / (&one - a);
    let mut total = BigRational::zero();
    let mut j = BigInt::zero();
    while &j < q_l && &j < n {
        let count = (n - &j + q_l - BigInt::one()) / q_l;
        let x = {
            let v = alpha * BigRational::from_integer(j.clone());
            &v - v.floor()
        };
        let last = &x + &delta * BigRational::from_integer(&count - BigInt::one());
        let (lo, hi) = if last < x {
            (last.clone(), x.clone())
        } else {
            (x.clone(), last.clone())
        };
        let mut cuts = vec![BigInt::zero(), count.clone()];
        if !delta.is_zero() {
            let mut base = lo.floor() - &one;
            while base <= hi {
                for beta in [base.clone(), &base + a] {
                    if beta > lo && beta < hi {
                        cuts.push(((&beta - &x) / &delta).ceil().to_integer());
                    }
                }
                base += &one;
            }
        }
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let (m0, m1) = (&w[0], &w[1]);
            if m0 >= m1 {
                continue;
            }
            let cnt = BigRational::from_integer(m1 - m0);
            let m_sum = BigRational::from_integer((m0 + m1 - BigInt::one()) * (m1 - m0))
                / BigRational::from_integer(2.into());
            let mid = &x
                + &delta * BigRational::from_integer(m0 + m1 - BigInt::one())
                    / BigRational::from_integer(2.into());
            let cell = mid.floor();
            // T(y) = c0 + c1 y on this run.
            let (c0, c1) = if &mid - &cell <= *a {
                (-(&rising * &cell), rising.clone())
            } else {
                (&falling * (&cell + &one), -falling.clone())
            };
            total += &cnt * (&c0 + &c1 * &x) + &c1 * &delta * m_sum;
        }
        j += 1;
    }
    total
}

/// Triangle `(0,0), (0,1), (K,1)` against the slope of the 7a construction.
///
/// The slope's later quotients are astronomically large, so the value used
/// is the last convergent of the construction taken one level deeper. The
/// profile of the triangle is the hat `(a, b, H) = (1 − Kα, 1, K)`.
pub fn triangle_7a_experiment(params: &Triangle7aParams) -> Result<ExperimentReport> {
    let levels = params.levels;
    if levels == 0 || levels > 3 {
        return Err(Error::invalid("triangle 7a recipe supports 1 ≤ levels ≤ 3"));
    }
    if params.k_search < 2 {
        return Err(Error::invalid("K search needs at least 2 grid points"));
    }
    let cf = counterexample_alpha(CounterexampleKind::Triangle7a, levels)?;
    let deep = counterexample_alpha(CounterexampleKind::Triangle7a, levels + 1)?;
    let alpha = deep.convergent(deep.depth());
    let q = deep.q().to_vec();
    let mut report = ExperimentReport::new(
        "triangle-7a",
        json!({ "levels": levels, "k_search": params.k_search, "n_max": params.n_max,
                "quotients": cf.quotients().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "alpha": crate::io::fmt_ratio(&alpha) }),
    );

    // Coarse grid over K ∈ (0, 1), then one refinement around the best point.
    let n = params.k_search;
    let admissible = |k: &BigRational| {
        k > &BigRational::zero() && k < &BigRational::one() && (k * &alpha) < BigRational::one()
    };
    let score = |k: &BigRational| margin(&(BigRational::one() - k * &alpha), &q, levels);
    let mut best: Option<(BigRational, BigRational)> = None;
    let consider = |k: BigRational, best: &mut Option<(BigRational, BigRational)>| {
        if !admissible(&k) {
            return;
        }
        let s = score(&k);
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            *best = Some((k, s));
        }
    };
    for i in 1..=n {
        consider(
            BigRational::new(BigInt::from(i), BigInt::from(n + 1)),
            &mut best,
        );
    }
    if let Some((k0, _)) = best.clone() {
        let step = BigRational::new(BigInt::one(), BigInt::from((n + 1) * n));
        for j in -(n as i64)..=(n as i64) {
            consider(&k0 + &step * BigInt::from(j), &mut best);
        }
    }
    let Some((k, c_k)) = best else {
        report.check("k_found", "some admissible K", "none", false);
        return Ok(report);
    };
    let a = BigRational::one() - &k * &alpha;
    report.derive("K", crate::io::fmt_ratio(&k));
    report.derive("a", crate::io::fmt_ratio(&a));
    report.derive("c_K", c_k.to_f64());

    let xi: Vec<f64> = (1..=levels)
        .map(|l| {
            let v = BigRational::from_integer(q[l].clone()) * &a;
            (&v - v.floor()).to_f64().unwrap_or(f64::NAN)
        })
        .collect();
    report.derive("xi", &xi);
    report.check(
        "xi_in_open_unit",
        "every ξ_l in (0,1)",
        &xi,
        xi.iter().all(|&x| x > 0.0 && x < 1.0),
    );
    report.check(
        "margin_positive",
        "c_K > 0",
        c_k.to_f64(),
        c_k.is_positive(),
    );

    // Digits b_l = q_l^4 at levels 1..=s; legality is the Ostrowski check.
    let mut legal = true;
    let mut n_s: Vec<BigInt> = Vec::new();
    for s in 1..=levels {
        let mut digits = vec![BigInt::zero(); s + 1];
        for (l, d) in digits.iter_mut().enumerate().skip(1) {
            *d = q[l].pow(4);
        }
        legal &= (1..=s).all(|l| digits[l] <= *deep.a(l + 1));
        match ostrowski_value(&OstrowskiExpansion { digits }, &deep) {
            Ok(v) => n_s.push(v),
            Err(_) => legal = false,
        }
    }
    report.check("digits_legal", "b_l = q_l^4 ≤ a_{l+1}", legal, legal);

    // Exact remainders by residue classes modulo q_levels.
    let half_k = &k / BigRational::from_integer(2.into());
    let exact: Vec<(String, BigRational)> = n_s
        .iter()
        .map(|n| {
            let sum = periodic_hat_sum(&a, &k, &alpha, &deep.p()[levels], &q[levels], n);
            (
                n.to_string(),
                sum - BigRational::from_integer(n.clone()) * &half_k,
            )
        })
        .collect();
    let growth: Vec<(String, f64)> = exact
        .iter()
        .map(|(n, r)| (n.clone(), r.to_f64().unwrap_or(f64::NAN)))
        .collect();
    report.derive("remainders", &growth);

    // Direct summation where it is affordable.
    let af = a.to_f64().unwrap_or(f64::NAN);
    let kf = k.to_f64().unwrap_or(f64::NAN);
    let tau = PeriodizedFunction::hat(HatFunction::new(af, 1.0, kf)?);
    let rot = Rotation::<f64>::from_ratio(&alpha);
    let direct_n: Vec<u64> = n_s
        .iter()
        .filter_map(|n| n.to_u64())
        .filter(|&n| n <= params.n_max)
        .collect();
    let top = direct_n.iter().copied().max().unwrap_or(0);
    let trace = if top > 0 {
        remainder_trace(&tau, &rot, &0.0, top)?
    } else {
        Vec::new()
    };
    let worst = direct_n
        .iter()
        .zip(&growth)
        .map(|(&n, (_, r))| (trace[n as usize - 1] - r).abs())
        .fold(0.0, f64::max);
    report.check(
        "direct_sum_agrees",
        format!("direct f64 sum within 1e-9 for N_s ≤ {}", params.n_max),
        json!({ "checked": direct_n.len(), "max_error": worst }),
        worst <= 1e-9,
    );
    let monotone = growth.windows(2).all(|w| w[1].1.abs() >= w[0].1.abs());
    report.check(
        "remainder_growth",
        "|R(N_s)| nondecreasing over s",
        &growth,
        monotone,
    );
    report.derive(
        "note",
        "unboundedness is asymptotic; only the finite structure and realizable growth are checked",
    );

    // The triangle's profile really is this hat.
    let set = TorusSet::polygon(vec![
        Point::new(BigRational::zero(), BigRational::zero()),
        Point::new(k.clone(), BigRational::one()),
        Point::new(BigRational::zero(), BigRational::one()),
    ])?;
    let profile = tau_profile(&set, &alpha)?;
    let hat = HatFunction::new(a.clone(), BigRational::one(), k.clone())?;
    let probes = [
        BigRational::new(1.into(), 7.into()),
        a.clone(),
        (&a + BigRational::one()) / BigRational::from_integer(2.into()),
    ];
    let same = probes.iter().all(|y| profile.evaluate(y) == hat.eval(y));
    report.check("profile_is_hat", "τ_S = hat(1 − Kα, 1, K)", same, same);
    Ok(report)
}

/// `G_m(x) = (1/2m) Σ_{k<2m} √(1 − (1 − k/m − x)²)` on `[0, 1/m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GmProfile {
    pub m: u64,
}

/// Grid points per period `1/m` used by [`disc_7b_structure`].
pub const GM_GRID: u64 = 24;

impl GmProfile {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m must be at least 1"));
        }
        Ok(GmProfile { m })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let m = self.m as f64;
        let s: f64 = (0..2 * self.m)
            .map(|k| {
                let u = 1.0 - k as f64 / m - x;
                (1.0 - u * u).max(0.0).sqrt()
            })
            .sum();
        s / (2.0 * m)
    }

    /// `G_m(i/(mn))`, summed in mirrored pairs so that `G_m(x)` and
    /// `G_m(1/m − x)` are computed from the same rounded terms.
    pub fn eval_grid(&self, i: u64, n: u64) -> f64 {
        let mn = self.m * n;
        let mnf = mn as f64;
        let term = |k: u64, i: u64| {
            let j = (mn as i64 - (k * n) as i64 - i as i64).unsigned_abs();
            let j = j as f64;
            (mnf * mnf - j * j).max(0.0).sqrt() / mnf
        };
        let mut s = 0.0;
        for k in 0..self.m {
            let (a, b) = (term(k, i), term(2 * self.m - 1 - k, i));
            s += a + b;
        }
        s / (2.0 * self.m as f64)
    }
}

/// Which inequality a located `Λ` satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaCondition {
    /// `G_m > π/4 + c/m^{3/2}` on `Λ`.
    Above,
    /// `G_m < π/4 − c/m^{3/2}` on `Λ`.
    Below,
}

#[derive(Debug, Clone, Serialize)]
struct MResult {
    m: u64,
    symmetric: bool,
    monotone: bool,
    c: f64,
    delta: f64,
    lambda: Option<(f64, f64, LambdaCondition)>,
}

fn analyse_m(m: u64) -> MResult {
    let g = GmProfile { m };
    let n = GM_GRID;
    let vals: Vec<f64> = (0..=n).map(|i| g.eval_grid(i, n)).collect();
    let symmetric = (0..=n).all(|i| vals[i as usize] == vals[(n - i) as usize]);
    let half = (n / 2) as usize;
    let monotone = vals[..=half].windows(2).all(|w| w[1] >= w[0]);
    let (i3, i6) = ((n / 3) as usize, (n / 6) as usize);
    let m32 = (m as f64).powf(1.5);
    let c = 0.45 * (vals[i3] - vals[i6]) * m32;
    let delta = vals
        .iter()
        .map(|v| (v - FRAC_PI_4).abs())
        .fold(0.0, f64::max);
    let (hi, lo) = (FRAC_PI_4 + c / m32, FRAC_PI_4 - c / m32);
    // Slide a window of length 1/(6m) (n/6 grid steps) over [0, 1/(2m)].
    let w = (n / 6) as usize;
    let mut lambda = None;
    if c > 0.0 {
        for start in 0..=(half - w) {
            let win = &vals[start..=start + w];
            let cond = if win.iter().all(|&v| v > hi) {
                Some(LambdaCondition::Above)
            } else if win.iter().all(|&v| v < lo) {
                Some(LambdaCondition::Below)
            } else {
                None
            };
            if let Some(cond) = cond {
                let x0 = start as f64 / (m * n) as f64;
                lambda = Some((x0, x0 + w as f64 / (m * n) as f64, cond));
                break;
            }
        }
    }
    MResult {
        m,
        symmetric,
        monotone,
        c,
        delta,
        lambda,
    }
}

/// Structure of the 7b disc argument for every `m` in `m_lo..=m_hi`:
/// symmetry and monotonicity of `G_m`, a fitted deviation constant `c`, an
/// interval `Λ` of length `1/(6m)` where `G_m` stays `c/m^{3/2}` away from
/// `π/4`, and the measure formula of the disc with diameter `α/√(1+α²)`.
pub fn disc_7b_structure(m_lo: u64, m_hi: u64) -> Result<ExperimentReport> {
    if m_lo == 0 || m_lo > m_hi || m_hi > 10_000 {
        return Err(Error::invalid("m range must lie in [1, 10^4]"));
    }
    let mut report = ExperimentReport::new(
        "disc-7b",
        json!({ "m_lo": m_lo, "m_hi": m_hi, "grid": GM_GRID }),
    );
    let results: Vec<MResult> = (m_lo..=m_hi).into_par_iter().map(analyse_m).collect();
    let failing = |f: &dyn Fn(&MResult) -> bool| {
        results
            .iter()
            .filter(|r| !f(r))
            .map(|r| r.m)
            .take(10)
            .collect::<Vec<_>>()
    };

    let asym = failing(&|r| r.symmetric);
    report.check(
        "gm_symmetry",
        "G_m(x) = G_m(1/m − x) exactly at grid pairs",
        json!({ "failing_m": asym }),
        asym.is_empty(),
    );
    let nonmono = failing(&|r| r.monotone);
    report.check(
        "gm_monotone",
        "nondecreasing on [0, 1/(2m)]",
        json!({ "failing_m": nonmono }),
        nonmono.is_empty(),
    );
    let no_lambda = failing(&|r| r.lambda.is_some() && r.c > 0.0);
    report.check(
        "lambda_found",
        "Λ of length ≥ 1/(6m) satisfying one of the two inequalities",
        json!({ "failing_m": no_lambda }),
        no_lambda.is_empty(),
    );
    let above = results
        .iter()
        .filter(|r| matches!(r.lambda, Some((_, _, LambdaCondition::Above))))
        .count();
    report.derive("lambda_above_count", above);
    report.derive("lambda_below_count", results.len() - above);
    let c_min = results.iter().map(|r| r.c).fold(f64::INFINITY, f64::min);
    report.derive("c_min", c_min);
    report.derive(
        "delta_max",
        results.iter().map(|r| r.delta).fold(0.0, f64::max),
    );
    let sample: Vec<_> = results
        .iter()
        .filter(|r| [1, 2, 10, 100, 1000, 10_000].contains(&r.m))
        .map(|r| json!({ "m": r.m, "c": r.c, "delta": r.delta, "lambda": r.lambda }))
        .collect();
    report.derive("samples", sample);
    if m_lo == 1 {
        let g1 = GmProfile { m: 1 }.eval(0.0);
        report.check("g1_at_zero", "G_1(0) = 1/2", g1, (g1 - 0.5).abs() < 1e-15);
    }

    // λ(S) = (π/4) α²/(1+α²) for the disc of diameter α/√(1+α²) whose
    // profile is supported on [0, α].
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let alpha = 0.1 + 0.05 * i as f64;
        let r = alpha / (2.0 * (1.0 + alpha * alpha).sqrt());
        let set = TorusSet::disc(Point::new(0.5, alpha), r)?;
        let formula = FRAC_PI_4 * alpha * alpha / (1.0 + alpha * alpha);
        let profile = tau_profile(&set, &alpha)?;
        let err = (set.measure()? - formula)
            .abs()
            .max((profile.integral()? - formula).abs());
        worst = worst.max(err);
        let peak = profile.evaluate(&(alpha / 2.0));
        worst = worst.max((peak - alpha / (1.0 + alpha * alpha)).abs());
    }
    report.check(
        "negdisc_measure",
        "|λ(S) − (π/4)α²/(1+α²)| ≤ 1e-12",
        worst,
        worst <= 1e-12,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gm_values() {
        assert!((GmProfile::new(1).unwrap().eval(0.0) - 0.5).abs() < 1e-15);
        for m in [1, 3, 17] {
            let g = GmProfile::new(m).unwrap();
            for i in 0..=GM_GRID {
                let x = i as f64 / (m * GM_GRID) as f64;
                assert!((g.eval_grid(i, GM_GRID) - g.eval(x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn disc_7b_small_range() {
        let r = disc_7b_structure(1, 200).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn periodic_hat_sum_matches_direct() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let (a, h) = (r(3, 7), r(5, 4));
        let hat = HatFunction::new(a.clone(), BigRational::one(), h.clone()).unwrap();
        let tau = PeriodizedFunction::hat(hat);
        let cf = counterexample_alpha(CounterexampleKind::Triangle7a, 4).unwrap();
        let alpha = cf.convergent(cf.depth());
        let rot = Rotation::new(alpha.clone());
        let mut direct = BigRational::zero();
        for n in 0..700u64 {
            if n % 37 == 0 || n < 5 {
                for l in 1..=3 {
                    let fast =
                        periodic_hat_sum(&a, &h, &alpha, &cf.p()[l], &cf.q()[l], &BigInt::from(n));
                    assert_eq!(fast, direct, "n = {n}, l = {l}");
                }
            }
            direct += tau.evaluate(&rot.orbit(&BigRational::zero(), n));
        }
    }

    #[test]
    fn triangle_7a_two_levels() {
        let r = triangle_7a_experiment(&Triangle7aParams {
            levels: 2,
            k_search: 200,
            n_max: 1_000_000,
        })
        .unwrap();
        for id in [
            "xi_in_open_unit",
            "digits_legal",
            "profile_is_hat",
            "margin_positive",
            "direct_sum_agrees",
        ] {
            assert!(r.criterion(id).unwrap().pass, "{id}: {}", r.to_json());
        }
    }

    #[test]
    fn triangle_7a_third_level_grows() {
        let r = triangle_7a_experiment(&Triangle7aParams {
            levels: 3,
            k_search: 200,
            n_max: 10_000,
        })
        .unwrap();
        let rem = r.derived["remainders"].as_array().unwrap();
        assert_eq!(rem.len(), 3);
        assert!(rem[2][1].as_f64().unwrap().abs() > 1e6, "{}", r.to_json());
    }
}
