//! Exact arithmetic in a real quadratic field `Q(√c)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An element `(a + b√c)/d` of `Q(√c)`, kept reduced with `d > 0`.
///
/// Rational elements carry `c = 0` and mix freely with any field; mixing two
/// different nonzero radicands panics, since the result would leave the field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    a: BigInt,
    b: BigInt,
    d: BigInt,
    c: u64,
}

fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|s| s.checked_mul(s) == Some(n))
}

impl Quad {
    /// `(a + b√c)/d`. Panics if `d = 0` or `c` is a perfect square > 1.
    pub fn new(a: BigInt, b: BigInt, c: u64, d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        assert!(
            c <= 1 || !is_square(c) || b.is_zero(),
            "radicand {c} is a perfect square"
        );
        let (a, b) = if c == 1 {
            (a + b, BigInt::zero())
        } else {
            (a, b)
        };
        let mut q = Quad { a, b, d, c };
        q.normalize();
        q
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        Quad::new(r.numer().clone(), BigInt::zero(), 0, r.denom().clone())
    }

    pub fn from_int(v: i64) -> Self {
        Quad::new(BigInt::from(v), BigInt::zero(), 0, BigInt::one())
    }

    /// `√c` itself.
    pub fn sqrt_of(c: u64) -> Self {
        Quad::new(BigInt::zero(), BigInt::one(), c, BigInt::one())
    }

    pub fn radicand(&self) -> u64 {
        self.c
    }

    /// Rational part and coefficient of `√c`.
    pub fn parts(&self) -> (BigRational, BigRational) {
        (
            BigRational::new(self.a.clone(), self.d.clone()),
            BigRational::new(self.b.clone(), self.d.clone()),
        )
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn normalize(&mut self) {
        if self.b.is_zero() {
            self.c = 0;
        }
        let g = self.a.gcd(&self.b).gcd(&self.d);
        if !g.is_one() {
            self.a /= &g;
            self.b /= &g;
            self.d /= &g;
        }
        if self.d.is_negative() {
            self.a = -std::mem::take(&mut self.a);
            self.b = -std::mem::take(&mut self.b);
            self.d = -std::mem::take(&mut self.d);
        }
    }

    fn field(&self, other: &Quad) -> u64 {
        match (self.c, other.c) {
            (0, c) | (c, 0) => c,
            (c1, c2) if c1 == c2 => c1,
            (c1, c2) => panic!("mixed quadratic fields Q(√{c1}) and Q(√{c2})"),
        }
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.sign();
        let sb = self.b.sign();
        match (sa, sb) {
            (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
            (s, Sign::NoSign) | (Sign::NoSign, s) => sign_ord(s),
            (s1, s2) if s1 == s2 => sign_ord(s1),
            (s1, s2) => {
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * BigInt::from(self.c);
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sign_ord(s1),
                    Ordering::Less => sign_ord(s2),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// `floor(a + b√c)` as an integer, before dividing by `d`.
    fn floor_numerator(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.clone();
        }
        let sq = &self.b * &self.b * BigInt::from(self.c);
        let s = sq.sqrt();
        let exact = &s * &s == sq;
        if self.b.is_positive() || exact {
            let s = if self.b.is_positive() { s } else { -s };
            &self.a + s
        } else {
            &self.a - s - 1
        }
    }

    /// Truncation to a dyadic rational with `bits` fractional bits, rounded
    /// toward minus infinity.
    pub fn to_dyadic(&self, bits: u32) -> BigRational {
        let scale = BigInt::one() << bits;
        let scaled = Quad {
            a: &self.a * &scale,
            b: &self.b * &scale,
            d: self.d.clone(),
            c: self.c,
        };
        BigRational::new(scaled.floor_to_bigint(), scale)
    }

    /// Conjugate `(a − b√c)/d`.
    pub fn conjugate(&self) -> Quad {
        Quad {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
            c: self.c,
        }
    }
}

fn sign_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let surd = match (self.b.is_zero(), self.b.abs().is_one()) {
            (true, _) => String::new(),
            (false, true) => format!("√{}", self.c),
            (false, false) => format!("{}√{}", self.b.abs(), self.c),
        };
        let body = match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => self.a.to_string(),
            (true, false) if self.b.is_negative() => format!("-{surd}"),
            (true, false) => surd,
            (false, false) => format!(
                "{} {} {surd}",
                self.a,
                if self.b.is_negative() { "-" } else { "+" }
            ),
        };
        let compound = !self.a.is_zero() && !self.b.is_zero();
        match (self.d.is_one(), compound) {
            (true, _) => write!(f, "{body}"),
            (false, true) => write!(f, "({body})/{}", self.d),
            (false, false) => write!(f, "{body}/{}", self.d),
        }
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.d == other.d && self.c == other.c {
            let diff = Quad {
                a: &self.a - &other.a,
                b: &self.b - &other.b,
                d: BigInt::one(),
                c: self.c,
            };
            return diff.signum();
        }
        (self - other).signum()
    }
}

impl<'a> Add<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn add(self, o: &Quad) -> Quad {
        let c = self.field(o);
        let mut r = if self.d == o.d {
            Quad {
                a: &self.a + &o.a,
                b: &self.b + &o.b,
                d: self.d.clone(),
                c,
            }
        } else {
            Quad {
                a: &self.a * &o.d + &o.a * &self.d,
                b: &self.b * &o.d + &o.b * &self.d,
                d: &self.d * &o.d,
                c,
            }
        };
        r.normalize();
        r
    }
}

impl<'a> Sub<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn sub(self, o: &Quad) -> Quad {
        self + &(-o.clone())
    }
}

impl<'a> Mul<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn mul(self, o: &Quad) -> Quad {
        let c = self.field(o);
        let mut r = Quad {
            a: &self.a * &o.a + &self.b * &o.b * BigInt::from(c),
            b: &self.a * &o.b + &self.b * &o.a,
            d: &self.d * &o.d,
            c,
        };
        r.normalize();
        r
    }
}

impl<'a> Div<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn div(self, o: &Quad) -> Quad {
        assert!(!(o.a.is_zero() && o.b.is_zero()), "division by zero");
        let c = self.field(o);
        let norm = &o.a * &o.a - &o.b * &o.b * BigInt::from(c);
        let num = Quad {
            a: &self.a * &o.d,
            b: &self.b * &o.d,
            d: BigInt::one(),
            c,
        };
        let conj = Quad {
            a: o.a.clone(),
            b: -o.b.clone(),
            d: BigInt::one(),
            c,
        };
        let mut r = &num * &conj;
        r.d = &self.d * norm;
        r.normalize();
        r
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Quad {
            type Output = Quad;
            fn $m(self, o: Quad) -> Quad {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad {
            a: -self.a,
            b: -self.b,
            d: self.d,
            c: self.c,
        }
    }
}

impl Scalar for Quad {
    const MODE: &'static str = "quadratic";
    const EXACT: bool = true;

    fn zero() -> Self {
        Quad::from_int(0)
    }
    fn one() -> Self {
        Quad::from_int(1)
    }
    fn from_i64(v: i64) -> Self {
        Quad::from_int(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        Quad {
            a: v.clone(),
            b: BigInt::zero(),
            d: BigInt::one(),
            c: 0,
        }
    }
    fn from_ratio(v: &BigRational) -> Self {
        Quad::from_ratio(v)
    }
    fn floor_to_bigint(&self) -> BigInt {
        self.floor_numerator().div_floor(&self.d)
    }
    fn to_f64(&self) -> f64 {
        if self.b.is_zero() {
            return ToPrimitive::to_f64(&BigRational::new(self.a.clone(), self.d.clone()))
                .unwrap_or(f64::NAN);
        }
        ToPrimitive::to_f64(&self.to_dyadic(80)).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn sqrt(&self) -> Option<Self> {
        if !self.b.is_zero() || self.a.is_negative() {
            return None;
        }
        let (n, d) = (self.a.sqrt(), self.d.sqrt());
        (&n * &n == self.a && &d * &d == self.d).then(|| Quad::new(n, BigInt::zero(), 0, d))
    }
    fn orbit_point(x0: &Self, alpha: &Self, _alpha_lo: f64, k: u64) -> Self {
        (x0 + &(alpha * &Quad::from_bigint(&BigInt::from(k)))).fract()
    }
}

/// A quadratic irrational `(A + B√C)/D` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticIrrational {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    pub d: i64,
}

impl QuadraticIrrational {
    pub fn new(a: i64, b: i64, c: u64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("zero divisor in quadratic irrational"));
        }
        if b == 0 || c < 2 || is_square(c) {
            return Err(Error::invalid(format!(
                "({a} + {b}√{c})/{d} is rational; a quadratic irrational needs B ≠ 0 and a non-square C"
            )));
        }
        Ok(QuadraticIrrational { a, b, c, d })
    }

    /// `(√5 − 1)/2`.
    pub fn golden() -> Self {
        QuadraticIrrational {
            a: -1,
            b: 1,
            c: 5,
            d: 2,
        }
    }

    /// `√2 − 1`.
    pub fn sqrt2m1() -> Self {
        QuadraticIrrational {
            a: -1,
            b: 1,
            c: 2,
            d: 1,
        }
    }

    /// `√3 − 1`.
    pub fn sqrt3m1() -> Self {
        QuadraticIrrational {
            a: -1,
            b: 1,
            c: 3,
            d: 1,
        }
    }

    pub fn to_quad(&self) -> Quad {
        Quad::new(
            BigInt::from(self.a),
            BigInt::from(self.b),
            self.c,
            BigInt::from(self.d),
        )
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}√{})/{}", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, c: u64, d: i64) -> Quad {
        Quad::new(BigInt::from(a), BigInt::from(b), c, BigInt::from(d))
    }

    #[test]
    fn golden_satisfies_its_minimal_polynomial() {
        let g = QuadraticIrrational::golden().to_quad();
        assert_eq!(&(&g * &g) + &g, Quad::from_int(1));
    }

    #[test]
    fn display_drops_unit_and_zero_parts() {
        assert_eq!(q(0, 1, 2, 4).to_string(), "√2/4");
        assert_eq!(q(-440, 208, 5, 1).to_string(), "-440 + 208√5");
        assert_eq!(q(1, -1, 5, 2).to_string(), "(1 - √5)/2");
        assert_eq!(q(0, -3, 7, 1).to_string(), "-3√7");
        assert_eq!(q(3, 0, 5, 4).to_string(), "3/4");
    }

    #[test]
    fn division_inverts_multiplication() {
        let x = q(3, -2, 7, 5);
        let y = q(-1, 4, 7, 3);
        assert_eq!(&(&x * &y) / &y, x);
        assert_eq!(&x / &x, Quad::from_int(1));
    }

    #[test]
    fn ordering_matches_floating_point() {
        let vals = [
            q(-1, 1, 2, 1),
            q(7, -5, 2, 1),
            q(99, -70, 2, 1),
            q(1, 0, 0, 3),
            q(-3, 2, 2, 1),
        ];
        for x in &vals {
            for y in &vals {
                let exact = x.cmp(y);
                let approx = x.to_f64().partial_cmp(&y.to_f64()).unwrap();
                assert_eq!(exact, approx, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn floor_is_exact_near_integers() {
        // 99 − 70√2 ≈ 0.00505, 70√2 − 99 ≈ −0.00505
        assert_eq!(q(99, -70, 2, 1).floor_to_bigint(), BigInt::from(0));
        assert_eq!(q(-99, 70, 2, 1).floor_to_bigint(), BigInt::from(-1));
        assert_eq!(q(-1, 1, 5, 2).floor_to_bigint(), BigInt::from(0));
        assert_eq!(q(-7, 1, 5, 2).floor_to_bigint(), BigInt::from(-3));
        assert_eq!(Quad::from_int(-4).floor_to_bigint(), BigInt::from(-4));
    }

    #[test]
    fn rational_elements_mix_with_any_field() {
        let half = Quad::from_ratio(&BigRational::new(1.into(), 2.into()));
        let s = Quad::sqrt_of(3);
        assert_eq!((&(&s + &half) - &s), half);
    }

    #[test]
    #[should_panic(expected = "mixed quadratic fields")]
    fn mixing_fields_panics() {
        let _ = &Quad::sqrt_of(2) + &Quad::sqrt_of(3);
    }

    #[test]
    fn rejects_rational_descriptors() {
        assert!(QuadraticIrrational::new(1, 1, 4, 1).is_err());
        assert!(QuadraticIrrational::new(1, 0, 5, 1).is_err());
        assert!(QuadraticIrrational::new(1, 1, 5, 0).is_err());
    }
}
