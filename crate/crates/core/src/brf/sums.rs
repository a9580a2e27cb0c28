use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::PeriodizedFunction;
use crate::contfrac::{ostrowski_expand, ContinuedFraction, OstrowskiExpansion};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, Csv};
use crate::scalar::{settle, Rotation, Scalar};

/// Orbit `{x0 + kα}` for `k = 0, 1, ...`.
///
/// Exact tiers step incrementally; `f64` recomputes each point from the
/// split slope so errors do not accumulate along the orbit.
pub struct Orbit<'a, F: Scalar> {
    rot: &'a Rotation<F>,
    x0: F,
    cur: F,
    k: u64,
    unit_step: bool,
}

impl<'a, F: Scalar> Orbit<'a, F> {
    pub fn new(rot: &'a Rotation<F>, x0: &F) -> Self {
        let x0 = x0.fract();
        let unit_step = rot.alpha >= F::zero() && rot.alpha < F::one();
        Orbit {
            rot,
            cur: x0.clone(),
            x0,
            k: 0,
            unit_step,
        }
    }
}

impl<F: Scalar> Iterator for Orbit<'_, F> {
    type Item = F;
    fn next(&mut self) -> Option<F> {
        let out = if F::EXACT {
            let out = self.cur.clone();
            let next = self.cur.clone() + self.rot.alpha.clone();
            self.cur = if !self.unit_step {
                next.fract()
            } else if next >= F::one() {
                next - F::one()
            } else {
                next
            };
            out
        } else {
            self.rot.orbit(&self.x0, self.k)
        };
        self.k += 1;
        Some(out)
    }
}

fn require_exact_capable<F: Scalar>(tau: &PeriodizedFunction<F>) -> Result<()> {
    if F::EXACT && !tau.is_exact() {
        return Err(Error::unsupported(format!(
            "dome terms are evaluated in floating point; use the decimal tier instead of {}",
            F::MODE
        )));
    }
    Ok(())
}

/// `Σ_{k<N} τ({x0 + kα})`, compensated in the `f64` tier.
pub fn birkhoff_sum<F: Scalar>(
    tau: &PeriodizedFunction<F>,
    rot: &Rotation<F>,
    x0: &F,
    n: u64,
) -> Result<F> {
    require_exact_capable(tau)?;
    let (mut sum, mut carry) = (F::zero(), F::zero());
    for x in Orbit::new(rot, x0).take(n as usize) {
        F::accumulate(&mut sum, &mut carry, tau.evaluate(&x));
    }
    Ok(settle(sum, carry))
}

/// `Σ_{k<N} τ({x0 + kα}) − N ∫τ`.
pub fn birkhoff_remainder<F: Scalar>(
    tau: &PeriodizedFunction<F>,
    rot: &Rotation<F>,
    x0: &F,
    n: u64,
) -> Result<F> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let sum = birkhoff_sum(tau, rot, x0, n)?;
    Ok(sum - F::from_u64(n) * tau.integral()?)
}

/// Remainders at every `N = 1..=n_max`, in one pass.
pub fn remainder_trace<F: Scalar>(
    tau: &PeriodizedFunction<F>,
    rot: &Rotation<F>,
    x0: &F,
    n_max: u64,
) -> Result<Vec<F>> {
    require_exact_capable(tau)?;
    let mean = tau.integral()?;
    let (mut sum, mut carry) = (F::zero(), F::zero());
    let mut out = Vec::with_capacity(n_max as usize);
    for x in Orbit::new(rot, x0).take(n_max as usize) {
        F::accumulate(&mut sum, &mut carry, tau.evaluate(&x) - mean.clone());
        out.push(settle(sum.clone(), carry.clone()));
    }
    Ok(out)
}

/// One summand of the block decomposition: index `n(l) + b q_l + k` lands
/// at `(t + ρ)/q_l (mod 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTerm<F> {
    pub l: usize,
    pub b: u64,
    /// Position `k` inside the block.
    pub k: u64,
    /// Residue `t = (m_l + k p_l) mod q_l`.
    pub t: u64,
    pub m_l: u64,
    pub x_l: F,
    pub theta_l: F,
    pub rho: F,
    pub omega: F,
    pub alpha_l: F,
    pub gamma_l: F,
}

#[derive(Debug, Clone)]
pub struct Decomposition<F> {
    pub n: u64,
    pub digits: OstrowskiExpansion,
    /// `Σ_l Σ_b Σ_t τ((t + ρ)/q_l)`.
    pub sum: F,
    /// `sum − N ∫τ`.
    pub remainder: F,
    /// Every summand, when requested.
    pub terms: Vec<DecompositionTerm<F>>,
    pub blocks: usize,
}

/// Largest denominator the `f64` tier splits into residue and offset.
pub const F64_MAX_BLOCK: u64 = 1 << 40;

/// Rewrite `Σ_{k<N} τ({x0 + kα})` block by block along the Ostrowski
/// expansion of `N`.
///
/// In block `(l, b)` the start `s = n(l) + b q_l` has
/// `{x0 + sα} = (m_l + x_l)/q_l`, and index `s + k` maps to
/// `(t + ρ)/q_l` with `t = (m_l + k p_l) mod q_l`,
/// `ω = {(t − m_l)(−1)^{l−1} q_{l−1}/q_l}` and `ρ = ω θ_l/a_{l+1} + x_l`.
pub fn decompose_sum<F: Scalar>(
    tau: &PeriodizedFunction<F>,
    cf: &ContinuedFraction,
    rot: &Rotation<F>,
    x0: &F,
    n: u64,
    keep_terms: bool,
) -> Result<Decomposition<F>> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    require_exact_capable(tau)?;
    let digits = ostrowski_expand(&BigInt::from(n), cf)?;
    let q: Vec<u64> = cf
        .q()
        .iter()
        .map(|v| v.to_u64().unwrap_or(u64::MAX))
        .collect();
    let p: Vec<u64> = cf
        .p()
        .iter()
        .map(|v| v.to_u64().unwrap_or(u64::MAX))
        .collect();
    let thetas = cf.theta_table(rot);
    let (third, one) = (F::one() / F::from_i64(3), F::one());
    let (minus_one, two) = (F::from_i64(-1), F::from_i64(2));

    let (mut sum, mut carry) = (F::zero(), F::zero());
    let mut terms = Vec::new();
    let mut blocks = 0;
    let mut start: u64 = 0;
    for (l, bl) in digits.digits.iter().enumerate() {
        let bl = bl.to_u64().expect("digit below N");
        if bl == 0 {
            continue;
        }
        let ql = q[l];
        if !F::EXACT && ql > F64_MAX_BLOCK {
            return Err(Error::Precision {
                reason: format!(
                    "q_{l} = {ql} is too large to split {{sα}} into residue and offset in f64"
                ),
                last_trusted: l.saturating_sub(1),
            });
        }
        let theta = thetas[l].clone();
        let abs_theta = theta.abs();
        let slack = if F::EXACT {
            F::zero()
        } else {
            F::from_f64(1e-12)
        };
        if abs_theta < third.clone() - slack.clone() || abs_theta > one.clone() + slack {
            return Err(Error::InternalConsistency(format!(
                "θ_{l} = {theta:?} outside [1/3, 1]"
            )));
        }
        let a_next = F::from_bigint(cf.a(l + 1));
        let q_prev = if l == 0 { 0 } else { q[l - 1] };
        let sign_odd = l % 2 == 0; // (−1)^{l−1} = −1 for even l
        let step = if sign_odd {
            (ql - q_prev % ql) % ql
        } else {
            q_prev % ql
        };
        let alpha_l = {
            let v = F::from_ratio(&BigRational::new(BigInt::from(q_prev), BigInt::from(ql)));
            if sign_odd {
                -v
            } else {
                v
            }
        };
        let qf = F::from_u64(ql);
        let pl = p[l] % ql.max(1);
        for b in 0..bl {
            blocks += 1;
            let s = start + b * ql;
            let v = rot.orbit(x0, s);
            let scaled = v * qf.clone();
            let m_big = scaled.floor_to_bigint();
            let m_l = m_big.to_u64().filter(|&m| m < ql).ok_or_else(|| {
                Error::InternalConsistency(format!("residue m_{l} = {m_big} outside [0, {ql})"))
            })?;
            let x_l = scaled - F::from_u64(m_l);
            let gamma_l = -(F::from_u64(m_l) * alpha_l.clone());
            let mut t = m_l;
            for k in 0..ql {
                // ω = ((t − m_l) · step mod q_l) / q_l, kept in integers.
                let diff = (t + ql - m_l) % ql;
                let w = ((diff as u128 * step as u128) % ql as u128) as u64;
                let omega = F::from_ratio(&BigRational::new(BigInt::from(w), BigInt::from(ql)));
                let rho = omega.clone() * theta.clone() / a_next.clone() + x_l.clone();
                if rho <= minus_one || rho >= two {
                    return Err(Error::InternalConsistency(format!(
                        "ρ = {rho:?} outside (−1, 2) at l={l}, t={t}"
                    )));
                }
                let arg = (F::from_u64(t) + rho.clone()) / qf.clone();
                F::accumulate(&mut sum, &mut carry, tau.evaluate(&arg));
                if keep_terms {
                    terms.push(DecompositionTerm {
                        l,
                        b,
                        k,
                        t,
                        m_l,
                        x_l: x_l.clone(),
                        theta_l: theta.clone(),
                        rho,
                        omega,
                        alpha_l: alpha_l.clone(),
                        gamma_l: gamma_l.clone(),
                    });
                }
                t = ((t as u128 + pl as u128) % ql as u128) as u64;
            }
        }
        start += bl * ql;
    }
    debug_assert_eq!(start, n);
    let sum = settle(sum, carry);
    let remainder = sum.clone() - F::from_u64(n) * tau.integral()?;
    Ok(Decomposition {
        n,
        digits,
        sum,
        remainder,
        terms,
        blocks,
    })
}

/// Decomposition table with columns `l, b, k, m_l, x_l, theta_l, rho, omega`.
pub fn decomposition_csv<F: Scalar>(d: &Decomposition<F>) -> Csv {
    let mut csv = Csv::new(&["l", "b", "k", "m_l", "x_l", "theta_l", "rho", "omega"]);
    for t in &d.terms {
        csv.row([
            t.l.to_string(),
            t.b.to_string(),
            t.k.to_string(),
            t.m_l.to_string(),
            fmt_f64(t.x_l.to_f64()),
            fmt_f64(t.theta_l.to_f64()),
            fmt_f64(t.rho.to_f64()),
            fmt_f64(t.omega.to_f64()),
        ]);
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brf::HatFunction;
    use crate::quadratic::Quad;

    fn quarter_hat() -> PeriodizedFunction<Quad> {
        let r =
            |n: i64, d: i64| Quad::from_ratio(&BigRational::new(BigInt::from(n), BigInt::from(d)));
        PeriodizedFunction::hat(HatFunction::new(r(1, 4), r(1, 2), r(1, 1)).unwrap())
    }

    #[test]
    fn first_remainder_of_quarter_hat() {
        let cf = ContinuedFraction::preset("golden", 20).unwrap();
        let rot = Rotation::new(cf.alpha_quad().unwrap());
        let rem = birkhoff_remainder(&quarter_hat(), &rot, &Quad::zero(), 1).unwrap();
        assert_eq!(
            rem,
            Quad::from_ratio(&BigRational::new(BigInt::from(-1), BigInt::from(4)))
        );
    }

    #[test]
    fn decomposition_is_exact_for_golden() {
        let cf = ContinuedFraction::preset("golden", 20).unwrap();
        let rot = Rotation::new(cf.alpha_quad().unwrap());
        let tau = quarter_hat();
        for n in 1..150 {
            let d = decompose_sum(&tau, &cf, &rot, &Quad::zero(), n, true).unwrap();
            assert_eq!(
                d.sum,
                birkhoff_sum(&tau, &rot, &Quad::zero(), n).unwrap(),
                "N = {n}"
            );
            assert_eq!(d.terms.len() as u64, n);
        }
    }

    #[test]
    fn convergent_denominator_is_one_block() {
        let cf = ContinuedFraction::preset("sqrt2m1", 20).unwrap();
        let rot = Rotation::new(cf.alpha_quad().unwrap());
        let d = decompose_sum(&quarter_hat(), &cf, &rot, &Quad::zero(), 29, true).unwrap();
        assert_eq!(d.blocks, 1);
        assert!(d.terms.iter().all(|t| t.l == 4 && t.b == 0));
    }

    #[test]
    fn decimal_tier_agrees() {
        let cf = ContinuedFraction::preset("sqrt2m1", 30).unwrap();
        let rot = cf.rotation_f64().unwrap();
        let tau = PeriodizedFunction::hat(HatFunction::new(0.3, 0.9, 1.5).unwrap());
        for n in [1, 7, 100, 2377, 9999] {
            let d = decompose_sum(&tau, &cf, &rot, &0.2, n, false).unwrap();
            let direct = birkhoff_sum(&tau, &rot, &0.2, n).unwrap();
            assert!((d.sum - direct).abs() < 1e-9 * n as f64);
        }
    }
}
