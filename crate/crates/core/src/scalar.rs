//! The numeric tier shared by every kernel.
//!
//! Geometry, Birkhoff sums and the flow integrator are written once, generic
//! over [`Scalar`]. Three tiers implement it:
//!
//! * `f64`: the performance tier. Orbit points are formed with a split
//!   (double-double) slope and sums use Neumaier compensation.
//! * [`BigRational`]: exact rational arithmetic for purely rational inputs.
//! * [`Quad`](crate::quadratic::Quad): exact arithmetic in a real quadratic
//!   field, the ground truth for identities involving a quadratic slope.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Short tag recorded in manifests and reports.
    const MODE: &'static str;
    /// Whether comparisons and field operations are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn from_ratio(v: &BigRational) -> Self;
    fn floor_to_bigint(&self) -> BigInt;
    fn to_f64(&self) -> f64;

    /// Exact image of a double (rounding only in the `f64` tier, where it
    /// is the identity).
    fn from_f64(v: f64) -> Self {
        Self::from_ratio(&BigRational::from_float(v).expect("finite value"))
    }

    fn floor(&self) -> Self {
        Self::from_bigint(&self.floor_to_bigint())
    }

    /// `{x}`, always in `[0, 1)`.
    fn fract(&self) -> Self {
        self.clone() - self.floor()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn from_u64(v: u64) -> Self {
        Self::from_bigint(&BigInt::from(v))
    }

    /// Square root, when the tier is closed under it.
    fn sqrt(&self) -> Option<Self> {
        None
    }

    fn pi() -> Option<Self> {
        None
    }

    /// Accumulate `x` into `sum`. Exact tiers add directly; `f64` carries a
    /// Neumaier compensation term in `carry`.
    fn accumulate(sum: &mut Self, carry: &mut Self, x: Self) {
        let _ = carry;
        *sum = sum.clone() + x;
    }

    /// `{x0 + k·alpha}` where the true slope is `alpha + alpha_lo`.
    fn orbit_point(x0: &Self, alpha: &Self, alpha_lo: f64, k: u64) -> Self {
        let _ = alpha_lo;
        (x0.clone() + alpha.clone() * Self::from_u64(k)).fract()
    }

    /// `q·alpha − p` for a convergent `p/q` of the slope.
    fn convergent_gap(alpha: &Self, alpha_lo: f64, p: &BigInt, q: &BigInt) -> Self {
        let _ = alpha_lo;
        alpha.clone() * Self::from_bigint(q) - Self::from_bigint(p)
    }
}

/// Finish a compensated sum.
pub fn settle<F: Scalar>(sum: F, carry: F) -> F {
    sum + carry
}

impl Scalar for f64 {
    const MODE: &'static str = "decimal";
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn from_ratio(v: &BigRational) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }
    fn floor_to_bigint(&self) -> BigInt {
        BigInt::from_f64(f64::floor(*self)).expect("finite value")
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn fract(&self) -> Self {
        let r = *self - f64::floor(*self);
        if r >= 1.0 {
            0.0
        } else {
            r
        }
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    fn pi() -> Option<Self> {
        Some(std::f64::consts::PI)
    }

    fn accumulate(sum: &mut Self, carry: &mut Self, x: Self) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *carry += (*sum - t) + x;
        } else {
            *carry += (x - t) + *sum;
        }
        *sum = t;
    }

    fn orbit_point(x0: &Self, alpha: &Self, alpha_lo: f64, k: u64) -> Self {
        // k·alpha is split into its rounded product and the exact rounding
        // error, so the phase stays accurate to a few ulps for k < 2^53.
        let kf = k as f64;
        let prod = kf * alpha;
        let err = kf.mul_add(*alpha, -prod);
        let head = prod - prod.floor();
        (head + (err + kf * alpha_lo + x0)).fract()
    }

    fn convergent_gap(alpha: &Self, alpha_lo: f64, p: &BigInt, q: &BigInt) -> Self {
        let qf = q.to_f64().unwrap_or(f64::INFINITY);
        let pf = p.to_f64().unwrap_or(f64::INFINITY);
        qf.mul_add(*alpha, -pf) + qf * alpha_lo
    }
}

impl Scalar for BigRational {
    const MODE: &'static str = "rational";
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn from_ratio(v: &BigRational) -> Self {
        v.clone()
    }
    fn floor_to_bigint(&self) -> BigInt {
        num_rational::Ratio::floor(self).to_integer()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// A rotation slope in a given numeric tier.
///
/// For `f64` the slope is carried as an unevaluated sum `alpha + alpha_lo`
/// so long orbits keep full phase accuracy; exact tiers leave `alpha_lo`
/// at zero.
#[derive(Debug, Clone)]
pub struct Rotation<F> {
    pub alpha: F,
    pub alpha_lo: f64,
}

impl<F: Scalar> Rotation<F> {
    pub fn new(alpha: F) -> Self {
        Rotation {
            alpha,
            alpha_lo: 0.0,
        }
    }

    /// `{x0 + k·alpha}`.
    pub fn orbit(&self, x0: &F, k: u64) -> F {
        F::orbit_point(x0, &self.alpha, self.alpha_lo, k)
    }

    /// `q·alpha − p`.
    pub fn gap(&self, p: &BigInt, q: &BigInt) -> F {
        F::convergent_gap(&self.alpha, self.alpha_lo, p, q)
    }
}

impl Rotation<f64> {
    pub fn split(alpha: f64, alpha_lo: f64) -> Self {
        Rotation { alpha, alpha_lo }
    }

    /// Best `f64` pair for an exact rational slope.
    pub fn from_ratio(alpha: &BigRational) -> Self {
        let hi = Scalar::to_f64(alpha);
        let rest = alpha - BigRational::from_float(hi).expect("finite slope");
        Rotation::split(hi, Scalar::to_f64(&rest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_lost_bits() {
        let mut sum = 0.0;
        let mut carry = 0.0;
        for x in [1e16, 1.0, -1e16, 1.0] {
            f64::accumulate(&mut sum, &mut carry, x);
        }
        assert_eq!(settle(sum, carry), 2.0);
    }

    #[test]
    fn f64_orbit_matches_exact_rational_orbit() {
        let alpha = BigRational::new(
            BigInt::from(987_654_321_i64),
            BigInt::from(1_597_000_003_i64),
        );
        let rot = Rotation::from_ratio(&alpha);
        let x0 = BigRational::new(BigInt::from(1), BigInt::from(7));
        for k in [0_u64, 1, 17, 123_456, 9_999_991, 1_000_000_007] {
            let exact = BigRational::orbit_point(&x0, &alpha, 0.0, k);
            let approx = rot.orbit(&Scalar::to_f64(&x0), k);
            let d = (Scalar::to_f64(&exact) - approx).abs();
            assert!(d.min(1.0 - d) < 1e-14, "k={k} d={d}");
        }
    }

    #[test]
    fn fract_is_half_open() {
        assert_eq!(Scalar::fract(&-1e-300_f64), 0.0);
        assert_eq!(Scalar::fract(&2.25_f64), 0.25);
        let r = BigRational::new(BigInt::from(-7), BigInt::from(3));
        assert_eq!(
            Scalar::fract(&r),
            BigRational::new(BigInt::from(2), BigInt::from(3))
        );
    }
}
