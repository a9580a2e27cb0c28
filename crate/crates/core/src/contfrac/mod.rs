//! Continued fractions `α = [0; a_1, a_2, ...]`, their convergents, and the
//! Ostrowski numeration built on the convergent denominators.

mod counterexample;
mod ostrowski;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadratic::{Quad, QuadraticIrrational};
use crate::scalar::{Rotation, Scalar};

pub use counterexample::{counterexample_alpha, CounterexampleKind, MAX_LEVELS_7A, MAX_LEVELS_7B};
pub use ostrowski::{ostrowski_expand, ostrowski_value, OstrowskiExpansion};

/// Default working precision, in bits, for decimal-mode values.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Working precision for decimal values, honouring `BRLAB_PRECISION_BITS`.
pub fn precision_bits_from_env() -> Result<u32> {
    match std::env::var("BRLAB_PRECISION_BITS") {
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
        Ok(s) => {
            let bits: u32 = s.trim().parse().map_err(|_| {
                Error::invalid(format!("BRLAB_PRECISION_BITS={s:?} is not an integer"))
            })?;
            if !(53..=65536).contains(&bits) {
                return Err(Error::invalid(format!(
                    "BRLAB_PRECISION_BITS={bits} outside 53..=65536"
                )));
            }
            Ok(bits)
        }
    }
}

/// A closed rational interval known to contain α.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "crate::bigser::ratio")]
    pub lo: BigRational,
    #[serde(with = "crate::bigser::ratio")]
    pub hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid("enclosure with lo > hi"));
        }
        Ok(Enclosure { lo, hi })
    }

    /// Interval for a decimal literal `x` with `k` fractional digits: the
    /// value lies within `10^-k` of `x`, and both ends are then rounded
    /// outward to multiples of `2^-bits`.
    pub fn from_decimal(text: &str, bits: u32) -> Result<Self> {
        let x = crate::io::parse_rational(text)?;
        let k = text.trim().split_once('.').map_or(0, |(_, f)| f.len());
        let ulp = BigRational::new(BigInt::one(), BigInt::from(10).pow(k as u32));
        let scale = BigRational::from_integer(BigInt::one() << bits);
        let lo = ((&x - &ulp) * &scale).floor() / &scale;
        let hi = ((&x + &ulp) * &scale).ceil() / &scale;
        Enclosure::new(lo, hi)
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// How (and whether) the numeric value of α is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaValue {
    /// Exact: `α = (A + B√C)/D`.
    Quadratic(QuadraticIrrational),
    /// High-precision decimal, carried as a rational enclosure.
    Decimal(Enclosure),
    /// Quotients only.
    Symbolic,
}

/// A finite continued fraction `[0; a_1, ..., a_D]` with its convergents.
///
/// `p[n]/q[n]` is the n-th convergent; `quotients[n]` holds `a_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    #[serde(with = "crate::bigser::ints")]
    quotients: Vec<BigInt>,
    #[serde(with = "crate::bigser::ints")]
    p: Vec<BigInt>,
    #[serde(with = "crate::bigser::ints")]
    q: Vec<BigInt>,
    value_mode: AlphaValue,
}

impl ContinuedFraction {
    /// Build from partial quotients `a_1..a_D`.
    ///
    /// When `value` carries a number, the deepest two convergents must
    /// bracket it.
    pub fn from_quotients(quotients: Vec<BigInt>, value: AlphaValue) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::invalid("empty quotient list"));
        }
        if let Some(i) = quotients.iter().position(|a| !a.is_positive()) {
            return Err(Error::invalid(format!(
                "quotient a_{} = {} is not positive",
                i + 1,
                quotients[i]
            )));
        }
        let d = quotients.len();
        let mut p = Vec::with_capacity(d + 1);
        let mut q = Vec::with_capacity(d + 1);
        p.push(BigInt::zero());
        q.push(BigInt::one());
        p.push(BigInt::one());
        q.push(quotients[0].clone());
        for n in 1..d {
            let a = &quotients[n];
            p.push(a * &p[n] + &p[n - 1]);
            q.push(a * &q[n] + &q[n - 1]);
        }
        let cf = ContinuedFraction {
            quotients,
            p,
            q,
            value_mode: value,
        };
        cf.check_bracket()?;
        Ok(cf)
    }

    pub fn from_u64s(quotients: &[u64], value: AlphaValue) -> Result<Self> {
        Self::from_quotients(quotients.iter().map(|&a| BigInt::from(a)).collect(), value)
    }

    /// Exact expansion of a quadratic irrational in `(0, 1)` to `depth`
    /// quotients.
    pub fn from_quadratic(alpha: &QuadraticIrrational, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::invalid("depth must be at least 1"));
        }
        let x0 = alpha.to_quad();
        if x0 <= Quad::zero() || x0 >= Quad::one() {
            return Err(Error::invalid(format!("α = {alpha} is not in (0, 1)")));
        }
        let mut x = x0;
        let mut quotients = Vec::with_capacity(depth);
        for _ in 0..depth {
            let inv = Quad::one() / x;
            let a = inv.floor_to_bigint();
            x = inv - Quad::from_bigint(&a);
            quotients.push(a);
        }
        Self::from_quotients(quotients, AlphaValue::Quadratic(alpha.clone()))
    }

    /// Shortest exact expansion of a quadratic irrational with `q_D > n`.
    pub fn quadratic_covering(alpha: &QuadraticIrrational, n: &BigInt) -> Result<Self> {
        let mut depth = 8;
        loop {
            let cf = Self::from_quadratic(alpha, depth)?;
            if let Some(d) = cf.q.iter().position(|q| q > n) {
                return Self::from_quadratic(alpha, d.max(1));
            }
            depth *= 2;
        }
    }

    /// Named presets: `golden` = (√5−1)/2, `sqrt2m1` = √2−1, `sqrt3m1` = √3−1.
    pub fn preset(name: &str, depth: usize) -> Result<Self> {
        Self::from_quadratic(&preset_value(name)?, depth)
    }

    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    /// `a_1..a_D`.
    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    /// `a_i` (one-based).
    pub fn a(&self, i: usize) -> &BigInt {
        &self.quotients[i - 1]
    }

    pub fn p(&self) -> &[BigInt] {
        &self.p
    }

    pub fn q(&self) -> &[BigInt] {
        &self.q
    }

    pub fn value_mode(&self) -> &AlphaValue {
        &self.value_mode
    }

    /// A copy with a different value mode, re-checked for consistency.
    pub fn with_value(&self, value: AlphaValue) -> Result<Self> {
        let cf = ContinuedFraction {
            value_mode: value,
            ..self.clone()
        };
        cf.check_bracket()?;
        Ok(cf)
    }

    pub fn convergent(&self, n: usize) -> BigRational {
        BigRational::new(self.p[n].clone(), self.q[n].clone())
    }

    /// The interval between the two deepest convergents. It contains every
    /// α whose expansion starts with these quotients.
    pub fn convergent_enclosure(&self) -> Enclosure {
        let d = self.depth();
        let (x, y) = (self.convergent(d), self.convergent(d - 1));
        if x <= y {
            Enclosure { lo: x, hi: y }
        } else {
            Enclosure { lo: y, hi: x }
        }
    }

    /// Rational enclosure of α; symbolic values have none.
    pub fn enclosure(&self, bits: u32) -> Result<Enclosure> {
        match &self.value_mode {
            AlphaValue::Quadratic(qi) => {
                let quad = qi.to_quad();
                let lo = quad.to_dyadic(bits);
                let hi = &lo + BigRational::new(BigInt::one(), BigInt::one() << bits);
                Ok(Enclosure { lo, hi })
            }
            AlphaValue::Decimal(e) => Ok(e.clone()),
            AlphaValue::Symbolic => Err(symbolic_error()),
        }
    }

    /// α as an exact field element.
    pub fn alpha_quad(&self) -> Result<Quad> {
        match &self.value_mode {
            AlphaValue::Quadratic(qi) => Ok(qi.to_quad()),
            AlphaValue::Decimal(_) => Err(Error::unsupported(
                "exact arithmetic needs a quadratic-irrational α",
            )),
            AlphaValue::Symbolic => Err(symbolic_error()),
        }
    }

    /// α in the `f64` tier, split into a head and a tail.
    pub fn rotation_f64(&self) -> Result<Rotation<f64>> {
        match &self.value_mode {
            AlphaValue::Quadratic(qi) => Ok(Rotation::from_ratio(&qi.to_quad().to_dyadic(160))),
            AlphaValue::Decimal(e) => Ok(Rotation::from_ratio(&e.midpoint())),
            AlphaValue::Symbolic => Err(symbolic_error()),
        }
    }

    fn check_bracket(&self) -> Result<()> {
        let enc = match &self.value_mode {
            AlphaValue::Symbolic => return Ok(()),
            AlphaValue::Quadratic(qi) => {
                let x = qi.to_quad();
                let conv = self.convergent_enclosure();
                let (lo, hi) = (Quad::from_ratio(&conv.lo), Quad::from_ratio(&conv.hi));
                if lo <= x && x <= hi {
                    return Ok(());
                }
                return Err(Error::invalid(format!(
                    "quotients are not an expansion of {qi}"
                )));
            }
            AlphaValue::Decimal(e) => e,
        };
        let conv = self.convergent_enclosure();
        if enc.hi < conv.lo || enc.lo > conv.hi {
            return Err(Error::invalid(
                "quotients are not an expansion of the decimal value",
            ));
        }
        Ok(())
    }

    /// Bounds `1/((a_{n+1}+2)q_n²) ≤ |α − p_n/q_n| ≤ 1/(a_{n+1}q_n²)`, checked
    /// against α when its value is known.
    pub fn approx_error_bounds(&self, n: usize) -> Result<(BigRational, BigRational)> {
        if n + 1 > self.depth() {
            return Err(Error::invalid(format!(
                "index {n} needs a_{} but depth is {}",
                n + 1,
                self.depth()
            )));
        }
        let a = &self.quotients[n];
        let q2 = &self.q[n] * &self.q[n];
        let lower = BigRational::new(BigInt::one(), (a + 2) * &q2);
        let upper = BigRational::new(BigInt::one(), a * &q2);
        let conv = self.convergent(n);
        let holds = match &self.value_mode {
            AlphaValue::Symbolic => true,
            AlphaValue::Quadratic(qi) => {
                let err = (qi.to_quad() - Quad::from_ratio(&conv)).abs();
                Quad::from_ratio(&lower) <= err && err <= Quad::from_ratio(&upper)
            }
            AlphaValue::Decimal(e) => {
                let d1 = Signed::abs(&(&e.lo - &conv));
                let d2 = Signed::abs(&(&e.hi - &conv));
                let (near, far) = if e.contains(&conv) {
                    (<BigRational as Zero>::zero(), d1.max(d2))
                } else {
                    (d1.clone().min(d2.clone()), d1.max(d2))
                };
                // Only a contradiction that holds for the whole enclosure is an error.
                !(far < lower || near > upper)
            }
        };
        if !holds {
            return Err(Error::InternalConsistency(format!(
                "approximation bounds violated at n = {n}"
            )));
        }
        Ok((lower, upper))
    }

    /// `p_n q_{n+1} − p_{n+1} q_n` for every `0 ≤ n < D`.
    pub fn determinants(&self) -> Vec<BigInt> {
        (0..self.depth())
            .map(|n| &self.p[n] * &self.q[n + 1] - &self.p[n + 1] * &self.q[n])
            .collect()
    }

    /// Checks `p_n q_{n+1} − p_{n+1} q_n = (−1)^{n+1}` for every n.
    pub fn determinant_identity_holds(&self) -> bool {
        self.determinants().iter().enumerate().all(|(n, d)| {
            let expect = if n % 2 == 0 {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            *d == expect
        })
    }

    /// `θ_l = a_{l+1} q_l (q_l α − p_l)` for `0 ≤ l < D`, which places α at
    /// `p_l/q_l + θ_l/(a_{l+1} q_l²)`.
    pub fn theta_table<F: Scalar>(&self, rot: &Rotation<F>) -> Vec<F> {
        (0..self.depth())
            .map(|l| {
                let gap = rot.gap(&self.p[l], &self.q[l]);
                F::from_bigint(&(&self.quotients[l] * &self.q[l])) * gap
            })
            .collect()
    }

    /// `Σ_{l=0}^s a_{l+1} q_l^{−1/m} Σ_{k=1}^{l+1} a_k`.
    pub fn cfsum_statistic(&self, s: usize, m: f64) -> Result<f64> {
        if s + 1 > self.depth() {
            return Err(Error::invalid(format!(
                "s = {s} needs a_{} but depth is {}",
                s + 1,
                self.depth()
            )));
        }
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::invalid("m must be a positive real"));
        }
        let mut total = 0.0;
        let mut carry = 0.0;
        let mut prefix = BigInt::zero();
        for l in 0..=s {
            prefix += &self.quotients[l];
            let a = big_to_f64(&self.quotients[l]);
            let ql = big_to_f64(&self.q[l]);
            f64::accumulate(
                &mut total,
                &mut carry,
                a * big_to_f64(&prefix) / ql.powf(1.0 / m),
            );
        }
        Ok(total + carry)
    }

    /// The integer `k` with `x ≡ kα (mod 1)`, if any. Exact: in `Q(√C)` the
    /// irrational parts force `k`, and the rational parts must then agree
    /// modulo 1.
    pub fn is_orbit_point(&self, x: &Quad) -> Result<Option<BigInt>> {
        let alpha = self.alpha_quad()?;
        let (ar, as_) = alpha.parts();
        let (xr, xs) = x.parts();
        if !Zero::is_zero(&xs) && x.radicand() != alpha.radicand() {
            return Ok(None);
        }
        let k = &xs / &as_;
        if !k.is_integer() {
            return Ok(None);
        }
        let k = k.to_integer();
        let diff = xr - ar * BigRational::from_integer(k.clone());
        Ok(diff.is_integer().then_some(k))
    }
}

fn symbolic_error() -> Error {
    Error::unsupported("α is symbolic (quotients only); this operation needs its value")
}

pub(crate) fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// Quadratic value of a named preset.
pub fn preset_value(name: &str) -> Result<QuadraticIrrational> {
    match name {
        "golden" => Ok(QuadraticIrrational::golden()),
        "sqrt2m1" => Ok(QuadraticIrrational::sqrt2m1()),
        "sqrt3m1" => Ok(QuadraticIrrational::sqrt3m1()),
        other => Err(Error::invalid(format!(
            "unknown α preset {other:?} (golden, sqrt2m1, sqrt3m1)"
        ))),
    }
}

/// Expand an enclosed value with the interval Gauss map.
///
/// A quotient is accepted only when every point of the current interval
/// yields it; the first ambiguous step stops the expansion with a precision
/// error naming the number of trusted quotients.
pub fn expand_value(x: &Enclosure, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    if !x.lo.is_positive() || x.hi >= <BigRational as One>::one() {
        return Err(Error::invalid("value must lie in (0, 1)"));
    }
    let (mut lo, mut hi) = (x.lo.clone(), x.hi.clone());
    let mut quotients = Vec::with_capacity(depth);
    while quotients.len() < depth {
        let trusted = quotients.len();
        if !lo.is_positive() {
            return Err(Error::Precision {
                reason: format!("enclosure reaches a rational point after {trusted} quotients"),
                last_trusted: trusted,
            });
        }
        let (ilo, ihi) = (hi.recip(), lo.recip());
        let a = ilo.floor().to_integer();
        if ihi.floor().to_integer() != a || ilo.is_integer() {
            return Err(Error::Precision {
                reason: format!("quotient a_{} is ambiguous at this precision", trusted + 1),
                last_trusted: trusted,
            });
        }
        let shift = BigRational::from_integer(a.clone());
        lo = ilo - &shift;
        hi = ihi - &shift;
        quotients.push(a);
    }
    ContinuedFraction::from_quotients(quotients, AlphaValue::Decimal(x.clone()))
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0; ")?;
        for (i, a) in self.quotients.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn fibonacci_convergents() {
        let cf = ContinuedFraction::from_u64s(&[1, 1, 1, 1, 1], AlphaValue::Symbolic).unwrap();
        assert_eq!(cf.q(), big(&[1, 1, 2, 3, 5, 8]).as_slice());
        assert_eq!(cf.p(), big(&[0, 1, 1, 2, 3, 5]).as_slice());
        let cf = ContinuedFraction::from_u64s(&[2], AlphaValue::Symbolic).unwrap();
        assert_eq!(cf.q(), big(&[1, 2]).as_slice());
        assert_eq!(cf.p(), big(&[0, 1]).as_slice());
    }

    #[test]
    fn determinant_chain() {
        let cf = ContinuedFraction::from_u64s(&[1, 2, 3], AlphaValue::Symbolic).unwrap();
        assert_eq!(cf.determinants(), big(&[-1, 1, -1]));
        assert!(cf.determinant_identity_holds());
    }

    #[test]
    fn rejects_non_positive_quotients() {
        assert!(ContinuedFraction::from_u64s(&[], AlphaValue::Symbolic).is_err());
        assert!(ContinuedFraction::from_quotients(big(&[1, 0, 2]), AlphaValue::Symbolic).is_err());
        assert!(ContinuedFraction::from_quotients(big(&[1, -3]), AlphaValue::Symbolic).is_err());
    }

    #[test]
    fn quadratic_presets_expand_exactly() {
        let g = ContinuedFraction::preset("golden", 10).unwrap();
        assert!(g.quotients().iter().all(|a| a.is_one()));
        let s = ContinuedFraction::preset("sqrt2m1", 8).unwrap();
        assert!(s.quotients().iter().all(|a| *a == BigInt::from(2)));
        let t = ContinuedFraction::preset("sqrt3m1", 6).unwrap();
        assert_eq!(t.quotients(), big(&[1, 2, 1, 2, 1, 2]).as_slice());
    }

    #[test]
    fn inconsistent_value_is_rejected() {
        let qi = QuadraticIrrational::golden();
        assert!(ContinuedFraction::from_u64s(&[2, 2, 2], AlphaValue::Quadratic(qi)).is_err());
    }

    #[test]
    fn convergents_alternate_around_alpha() {
        let cf = ContinuedFraction::preset("sqrt2m1", 12).unwrap();
        let alpha = cf.alpha_quad().unwrap();
        for n in 0..=12 {
            let c = Quad::from_ratio(&cf.convergent(n));
            if n % 2 == 0 {
                assert!(c < alpha);
            } else {
                assert!(c > alpha);
            }
        }
    }

    #[test]
    fn error_bounds_examples() {
        let g = ContinuedFraction::preset("golden", 6).unwrap();
        let (lo, hi) = g.approx_error_bounds(2).unwrap();
        assert_eq!(lo, BigRational::new(1.into(), 12.into()));
        assert_eq!(hi, BigRational::new(1.into(), 4.into()));
        let s = ContinuedFraction::preset("sqrt2m1", 4).unwrap();
        let (lo, hi) = s.approx_error_bounds(1).unwrap();
        assert_eq!(lo, BigRational::new(1.into(), 16.into()));
        assert_eq!(hi, BigRational::new(1.into(), 8.into()));
        assert!(s.approx_error_bounds(4).is_err());
    }

    #[test]
    fn error_bounds_with_huge_next_quotient() {
        let cf =
            ContinuedFraction::from_u64s(&[3, 1_000_000_000, 1], AlphaValue::Symbolic).unwrap();
        let enc = cf.convergent_enclosure();
        let cf = cf.with_value(AlphaValue::Decimal(enc)).unwrap();
        let (_, hi) = cf.approx_error_bounds(1).unwrap();
        assert!(hi < BigRational::new(1.into(), 1_000_000_000.into()));
    }

    #[test]
    fn interval_gauss_map_on_one_over_pi() {
        let enc =
            Enclosure::from_decimal("0.31830988618379067153776752674502872406891929148091", 160)
                .unwrap();
        let cf = expand_value(&enc, 5).unwrap();
        assert_eq!(cf.quotients(), big(&[3, 7, 15, 1, 292]).as_slice());
        match expand_value(&enc, 200) {
            Err(Error::Precision { last_trusted, .. }) => {
                assert!(last_trusted > 20 && last_trusted < 200)
            }
            other => panic!("expected a precision error, got {other:?}"),
        }
    }

    #[test]
    fn interval_gauss_map_matches_exact_expansion() {
        let exact = ContinuedFraction::preset("sqrt3m1", 30).unwrap();
        let enc = exact.enclosure(256).unwrap();
        let approx = expand_value(&enc, 30).unwrap();
        assert_eq!(approx.quotients(), exact.quotients());
    }

    #[test]
    fn cfsum_examples() {
        let g = ContinuedFraction::preset("golden", 6).unwrap();
        let v = g.cfsum_statistic(3, 2.0).unwrap();
        let expect = 1.0 + 2.0 + 3.0 / 2f64.sqrt() + 4.0 / 3f64.sqrt();
        assert!((v - expect).abs() < 1e-12);
        let cf = ContinuedFraction::from_u64s(&[5, 1], AlphaValue::Symbolic).unwrap();
        assert_eq!(cf.cfsum_statistic(0, 1.0).unwrap(), 25.0);
    }

    #[test]
    fn theta_within_bounds() {
        let cf = ContinuedFraction::preset("sqrt3m1", 20).unwrap();
        let rot = Rotation::new(cf.alpha_quad().unwrap());
        let third = Quad::from_ratio(&BigRational::new(1.into(), 3.into()));
        for t in cf.theta_table(&rot) {
            assert!(t.abs() >= third && t.abs() <= Quad::one(), "{t}");
        }
    }

    #[test]
    fn orbit_point_detection() {
        let cf = ContinuedFraction::preset("sqrt2m1", 10).unwrap();
        let three_alpha = (cf.alpha_quad().unwrap() * Quad::from_i64(3)).fract();
        assert_eq!(
            cf.is_orbit_point(&three_alpha).unwrap(),
            Some(BigInt::from(3))
        );
        let p = (Quad::sqrt_of(2) - Quad::one()) / Quad::from_i64(5);
        assert_eq!(cf.is_orbit_point(&p).unwrap(), None);
    }

    #[test]
    fn json_round_trip() {
        let cf = ContinuedFraction::preset("golden", 5).unwrap();
        let text = serde_json::to_string(&cf).unwrap();
        assert!(text.contains("\"quotients\":[\"1\""));
        let back: ContinuedFraction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cf);
    }
}
