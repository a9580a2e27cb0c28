use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use super::{DomeFunction, HatFunction, PeriodizedFunction};
use crate::error::{Error, Result};
use crate::geometry::GrowthCertificate;
use crate::scalar::Scalar;

/// `u = ⌈xq⌉ − 1` and `ξ = xq − u ∈ (0, 1]`.
fn grid_split<F: Scalar>(x: &F, q: u64) -> (BigInt, F) {
    let xq = x.clone() * F::from_u64(q);
    let u: BigInt = -((-xq.clone()).floor_to_bigint()) - 1;
    let xi = xq - F::from_bigint(&u);
    (u, xi)
}

/// `Σ_{k<q} τ(k/q)` by direct evaluation.
pub fn grid_sum_brute<F: Scalar>(hat: &HatFunction<F>, q: u64) -> F {
    let tau = PeriodizedFunction::hat(hat.clone());
    let qf = F::from_u64(q);
    let (mut sum, mut carry) = (F::zero(), F::zero());
    for k in 0..q {
        F::accumulate(
            &mut sum,
            &mut carry,
            tau.evaluate(&(F::from_u64(k) / qf.clone())),
        );
    }
    crate::scalar::settle(sum, carry)
}

/// `Σ_{k<q} τ(k/q) = Hbq/2 + (Haη(1−η) − Hbξ(1−ξ)) / (2a(b−a)q)` with
/// `a = (u+ξ)/q`, `b = (v+η)/q`, valid once `u < v`; smaller `q` falls back
/// to the direct sum.
pub fn grid_sum_closed_form<F: Scalar>(hat: &HatFunction<F>, q: u64) -> Result<F> {
    if q == 0 {
        return Err(Error::invalid("q must be positive"));
    }
    if hat.b > F::one() {
        return Err(Error::invalid("grid-sum closed form needs b ≤ 1"));
    }
    let (u, xi) = grid_split(&hat.a, q);
    let (v, eta) = grid_split(&hat.b, q);
    if u >= v {
        return Ok(grid_sum_brute(hat, q));
    }
    let (a, b, h) = (hat.a.clone(), hat.b.clone(), hat.h.clone());
    let qf = F::from_u64(q);
    let one = F::one();
    let main = h.clone() * b.clone() * qf.clone() / F::from_i64(2);
    let num = h.clone() * a.clone() * eta.clone() * (one.clone() - eta)
        - h * b.clone() * xi.clone() * (one - xi);
    let den = F::from_i64(2) * a.clone() * (b - a) * qf;
    Ok(main + num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationBound {
    /// `V_I(f_q') = 2(f'(1/q) − f'(B − 1/q))`.
    pub value: f64,
    /// `4c q^{1−1/m}`.
    pub bound: f64,
}

/// Total variation of the derivative of a dome truncated to
/// `[1/q, B − 1/q]`, checked against its growth bound.
pub fn truncated_derivative_variation(dome: &DomeFunction, q: u64) -> Result<VariationBound> {
    let (b, cert) = (dome.support_end(), dome.certificate());
    let qf = q as f64;
    if !(qf > 2.0 / b && qf > 1.0 / cert.eps) {
        return Err(Error::invalid(format!(
            "q = {q} must exceed 2/B = {} and 1/ε = {}",
            2.0 / b,
            1.0 / cert.eps
        )));
    }
    let h = 1.0 / qf;
    let value = 2.0 * (dome.derivative(h) - dome.derivative(b - h));
    let bound = 4.0 * cert.c * qf.powf(1.0 - 1.0 / cert.m);
    if value > bound {
        return Err(Error::InternalConsistency(format!(
            "V_I(f_q') = {value} exceeds 4c q^(1-1/m) = {bound}"
        )));
    }
    Ok(VariationBound { value, bound })
}

/// Grid used to check `T = T1 + T2 + T3`.
pub const DECOMPOSE_GRID: usize = 10_000;

fn fit_certificate(
    f: &dyn Fn(f64) -> f64,
    b: f64,
    template: GrowthCertificate,
) -> GrowthCertificate {
    use super::functions::GROWTH_SAMPLES;
    let eps = template.eps.min(b);
    let mut c = f64::MIN_POSITIVE;
    for i in 1..=GROWTH_SAMPLES {
        let z = eps * i as f64 / (GROWTH_SAMPLES + 1) as f64;
        let scale = z.powf(1.0 / template.m);
        c = c.max(f(z) / scale).max(f(b - z) / scale);
    }
    GrowthCertificate {
        eps,
        m: template.m,
        c: c * (1.0 + 1e-9),
    }
}

/// Split a dome on `(0, B)`, `1 < B ≤ 2`, into the hat `T1 = hat(1, B, T(1))`
/// and two domes `T2` on `(0, 1)` and `T3` on `(0, B − 1)` (the latter
/// shifted by 1), so that `T(z) = T1(z) + T2(z) + T3(z − 1)`.
pub fn dome_decompose(t: &DomeFunction) -> Result<(HatFunction<f64>, DomeFunction, DomeFunction)> {
    let b = t.support_end();
    if !(b > 1.0 && b <= 2.0) {
        return Err(Error::invalid(format!(
            "dome decomposition needs 1 < B ≤ 2, got {b}"
        )));
    }
    let h = t.eval(1.0);
    let hat = HatFunction::new(1.0, b, h)?;
    let tail = b - 1.0;

    let (t2f, t3f) = (t.clone(), t.clone());
    let f2 = move |z: f64| (t2f.eval(z) - h * z).max(0.0);
    let f3 = move |z: f64| (t3f.eval(1.0 + z) - h * (tail - z) / tail).max(0.0);
    let (d2, d3) = (t.clone(), t.clone());
    let df2: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(move |z| d2.derivative(z) - h);
    let df3: Arc<dyn Fn(f64) -> f64 + Send + Sync> =
        Arc::new(move |z| d3.derivative(1.0 + z) + h / tail);
    let c2 = fit_certificate(&f2, 1.0, t.certificate());
    let c3 = fit_certificate(&f3, tail, t.certificate());
    let wrap = |e: Error| Error::Decomposition(e.to_string());
    let dome2 = DomeFunction::new(1.0, f2, Some(df2), c2).map_err(wrap)?;
    let dome3 = DomeFunction::new(tail, f3, Some(df3), c3).map_err(wrap)?;

    for i in 0..=DECOMPOSE_GRID {
        let z = b * i as f64 / DECOMPOSE_GRID as f64;
        let sum = hat.eval(&z) + dome2.eval(z) + dome3.eval(z - 1.0);
        let err = (sum - t.eval(z)).abs();
        if err > 1e-12 {
            return Err(Error::Decomposition(format!(
                "T1 + T2 + T3 misses T by {err:e} at z = {z}"
            )));
        }
    }
    Ok((hat, dome2, dome3))
}

/// A 1-periodic function on the tier `F`.
pub type Transfer<F> = Box<dyn Fn(&F) -> F + Send + Sync>;

/// `max_i |τ(x_i) − ∫τ − g(x_i) + g({x_i + α})|` over `x_i = i/n`.
pub fn cohomology_residual<F: Scalar>(
    tau: &PeriodizedFunction<F>,
    alpha: &F,
    g: &dyn Fn(&F) -> F,
    grid_n: u64,
) -> Result<F> {
    if grid_n < 2 {
        return Err(Error::invalid("grid needs at least 2 points"));
    }
    let mean = tau.integral()?;
    let nf = F::from_u64(grid_n);
    let mut worst = F::zero();
    for i in 0..grid_n {
        let x = F::from_u64(i) / nf.clone();
        let shifted = (x.clone() + alpha.clone()).fract();
        let r = (tau.evaluate(&x) - mean.clone() - g(&x) + g(&shifted)).abs();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// `g(x) = {x}({x} − 1) / (2α(1+α))`, which solves the cohomological
/// equation for the special triangle with vertices `(0,0), (1,0), (0,1)`.
pub fn special_triangle_transfer<F: Scalar>(alpha: &F) -> Result<Transfer<F>> {
    if !(*alpha > F::zero() && *alpha < F::one()) {
        return Err(Error::invalid(format!(
            "special triangle transfer needs 0 < α < 1, got {alpha:?}"
        )));
    }
    let scale = F::one() / (F::from_i64(2) * alpha.clone() * (F::one() + alpha.clone()));
    Ok(Box::new(move |x: &F| {
        let y = x.fract();
        y.clone() * (y - F::one()) * scale.clone()
    }))
}

/// `1/(8α(1+α))`, the sup norm of the special triangle transfer.
pub fn special_triangle_transfer_max(alpha: f64) -> f64 {
    1.0 / (8.0 * alpha * (1.0 + alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn grid_sum_examples() {
        let h = HatFunction::new(r(1, 4), r(1, 2), r(1, 1)).unwrap();
        assert_eq!(grid_sum_closed_form(&h, 4).unwrap(), r(1, 1));
        assert_eq!(grid_sum_brute(&h, 4), r(1, 1));
        let h = HatFunction::new(r(1, 3), r(2, 3), r(1, 1)).unwrap();
        assert_eq!(grid_sum_closed_form(&h, 6).unwrap(), r(2, 1));
        assert_eq!(grid_sum_brute(&h, 6), r(2, 1));
    }

    #[test]
    fn grid_sum_matches_brute_force_exactly() {
        let h = HatFunction::new(r(2, 7), r(9, 11), r(3, 5)).unwrap();
        for q in 1..200 {
            assert_eq!(
                grid_sum_closed_form(&h, q).unwrap(),
                grid_sum_brute(&h, q),
                "q = {q}"
            );
        }
    }

    #[test]
    fn symmetric_dome_variation() {
        let d = DomeFunction::semicircle(1.0).unwrap();
        let v = truncated_derivative_variation(&d, 100).unwrap();
        assert!((v.value - 4.0 * d.derivative(0.01)).abs() < 1e-9);
        assert!(v.value <= v.bound);
        let v2 = truncated_derivative_variation(&d, 200).unwrap();
        assert!(v2.value <= v.value * 2f64.powf(0.5) * 1.01);
        assert!(truncated_derivative_variation(&d, 1).is_err());
    }

    #[test]
    fn semicircle_decomposes() {
        let t = DomeFunction::semicircle(1.6).unwrap();
        let (hat, d2, d3) = dome_decompose(&t).unwrap();
        assert_eq!((hat.a, hat.b), (1.0, 1.6));
        assert!((hat.h - t.eval(1.0)).abs() < 1e-15);
        assert_eq!(d2.support_end(), 1.0);
        assert!((d3.support_end() - 0.6).abs() < 1e-15);
        assert!(dome_decompose(&DomeFunction::semicircle(0.9).unwrap()).is_err());
    }

    #[test]
    fn transfer_values() {
        let g = special_triangle_transfer(&r(1, 2)).unwrap();
        assert_eq!(g(&r(1, 2)), r(-1, 6));
        assert_eq!(g(&r(0, 1)), r(0, 1));
        assert_eq!(g(&r(1, 1)), r(0, 1));
        assert_eq!(g(&r(1, 5)), g(&r(4, 5)));
        assert!(special_triangle_transfer(&r(3, 2)).is_err());
    }

    #[test]
    fn constant_has_zero_residual() {
        let tau = PeriodizedFunction::constant(r(3, 7));
        let zero = |_: &BigRational| r(0, 1);
        assert_eq!(
            cohomology_residual(&tau, &r(1, 3), &zero, 50).unwrap(),
            r(0, 1)
        );
    }
}
