use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{dome_growth_certificate, ChordProfile, Disc, GrowthCertificate};
use crate::quadrature::adaptive_simpson;
use crate::scalar::Scalar;

/// Tent on `[0, b]` rising linearly to `h` at `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct HatFunction<F> {
    pub a: F,
    pub b: F,
    pub h: F,
}

impl<F: Scalar> HatFunction<F> {
    pub fn new(a: F, b: F, h: F) -> Result<Self> {
        if !(F::zero() < a && a < b && h > F::zero()) {
            return Err(Error::invalid(format!(
                "hat needs 0 < a < b and H > 0, got a={a:?} b={b:?} H={h:?}"
            )));
        }
        Ok(HatFunction { a, b, h })
    }

    /// `T(x)`; zero outside `[0, b]`.
    pub fn eval(&self, x: &F) -> F {
        if *x <= F::zero() || *x >= self.b {
            F::zero()
        } else if *x <= self.a {
            self.h.clone() * x.clone() / self.a.clone()
        } else {
            self.h.clone() * (self.b.clone() - x.clone()) / (self.b.clone() - self.a.clone())
        }
    }

    /// `Hb/2`.
    pub fn integral(&self) -> F {
        self.h.clone() * self.b.clone() / F::from_i64(2)
    }
}

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Concave function on `(0, B)`, zero at both ends, with a growth
/// certificate `T(z), T(B − z) ≤ c z^{1/m}` for `z < ε`.
///
/// Domes are evaluated in `f64`; a derivative handle is optional and
/// otherwise replaced by central differences.
#[derive(Clone)]
pub struct DomeFunction {
    b: f64,
    f: Func,
    df: Option<Func>,
    cert: GrowthCertificate,
    integral: Option<f64>,
}

impl fmt::Debug for DomeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomeFunction")
            .field("b", &self.b)
            .field("cert", &self.cert)
            .finish_non_exhaustive()
    }
}

/// Sampled points for the concavity check.
pub const CONCAVITY_SAMPLES: usize = 1000;
/// Allowed positive second difference in the concavity check.
pub const CONCAVITY_TOL: f64 = 1e-9;
/// Grid points per endpoint for the growth check.
pub const GROWTH_SAMPLES: usize = 10_000;

impl DomeFunction {
    /// Validate concavity and the growth certificate on sample grids.
    pub fn new(
        b: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: Option<Func>,
        cert: GrowthCertificate,
    ) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("dome support end must be positive"));
        }
        if !(cert.eps > 0.0 && cert.m >= 1.0 && cert.c > 0.0) {
            return Err(Error::invalid(format!(
                "malformed growth certificate {cert:?}"
            )));
        }
        let dome = DomeFunction {
            b,
            f: Arc::new(f),
            df,
            cert,
            integral: None,
        };
        dome.check_concave().map_err(Error::invalid)?;
        dome.check_growth().map_err(Error::invalid)?;
        Ok(dome)
    }

    /// Attach a closed-form integral.
    pub fn with_integral(mut self, v: f64) -> Self {
        self.integral = Some(v);
        self
    }

    /// `√(z(B − z))`, a semicircle-like dome.
    pub fn semicircle(b: f64) -> Result<Self> {
        let cert = GrowthCertificate {
            eps: b / 2.0,
            m: 2.0,
            c: b.sqrt(),
        };
        let df: Func = Arc::new(move |z: f64| (b - 2.0 * z) / (2.0 * (z * (b - z)).sqrt()));
        Ok(
            DomeFunction::new(b, move |z| (z * (b - z)).max(0.0).sqrt(), Some(df), cert)?
                .with_integral(std::f64::consts::PI * b * b / 8.0),
        )
    }

    /// The chord profile of a disc, in local coordinates `z ∈ (0, B)`.
    pub fn from_disc(disc: &Disc<f64>, alpha: f64) -> Result<Self> {
        let cert = dome_growth_certificate(disc, alpha)?;
        let norm = (1.0 + alpha * alpha).sqrt();
        let w = 2.0 * disc.radius * norm;
        let h = 2.0 * disc.radius / norm;
        let k = 2.0 * h / w;
        let df: Func = Arc::new(move |z: f64| k * (w - 2.0 * z) / (2.0 * (z * (w - z)).sqrt()));
        Ok(DomeFunction::new(
            w,
            move |z| k * (z * (w - z)).max(0.0).sqrt(),
            Some(df),
            cert,
        )?
        .with_integral(std::f64::consts::PI * disc.radius * disc.radius))
    }

    /// The dome part of a disc chord profile, with its lifted start.
    pub fn from_profile(profile: &ChordProfile<f64>, disc: &Disc<f64>) -> Result<(Self, f64)> {
        Ok((Self::from_disc(disc, profile.alpha)?, profile.support.0))
    }

    pub fn support_end(&self) -> f64 {
        self.b
    }

    pub fn certificate(&self) -> GrowthCertificate {
        self.cert
    }

    /// `T(z)`; zero outside `(0, B)`.
    pub fn eval(&self, z: f64) -> f64 {
        if z <= 0.0 || z >= self.b {
            0.0
        } else {
            (self.f)(z)
        }
    }

    /// `T'(z)` on `(0, B)`, from the handle or by central differences.
    pub fn derivative(&self, z: f64) -> f64 {
        if let Some(df) = &self.df {
            return df(z);
        }
        // Step balancing truncation against rounding, clipped to the support.
        let h = (f64::EPSILON.cbrt() * z.abs().max(1e-3))
            .min(z / 2.0)
            .min((self.b - z) / 2.0);
        (self.eval(z + h) - self.eval(z - h)) / (2.0 * h)
    }

    pub fn has_derivative(&self) -> bool {
        self.df.is_some()
    }

    pub fn integral(&self) -> f64 {
        self.integral
            .unwrap_or_else(|| adaptive_simpson(&|z| self.eval(z), 0.0, self.b, 1e-13))
    }

    fn check_concave(&self) -> std::result::Result<(), String> {
        let n = CONCAVITY_SAMPLES;
        let h = self.b / (n + 1) as f64;
        for i in 1..n {
            let z = h * i as f64;
            let d2 = self.eval(z - h) - 2.0 * self.eval(z) + self.eval(z + h);
            if d2 > CONCAVITY_TOL {
                return Err(format!(
                    "dome is not concave near z = {z} (second difference {d2:e})"
                ));
            }
        }
        if (0..=n).any(|i| self.eval(self.b * i as f64 / n as f64) < 0.0) {
            return Err("dome takes negative values".into());
        }
        Ok(())
    }

    fn check_growth(&self) -> std::result::Result<(), String> {
        let eps = self.cert.eps.min(self.b);
        for i in 1..=GROWTH_SAMPLES {
            let z = eps * i as f64 / (GROWTH_SAMPLES + 1) as f64;
            let bound = self.cert.c * z.powf(1.0 / self.cert.m) * (1.0 + 1e-12) + 1e-15;
            let (left, right) = (self.eval(z), self.eval(self.b - z));
            if left > bound || right > bound {
                return Err(format!(
                    "growth certificate fails at z = {z}: {left:e}, {right:e} > {bound:e}"
                ));
            }
        }
        Ok(())
    }
}

/// A compactly supported base function.
#[derive(Debug, Clone)]
pub enum Profile<F> {
    Hat(HatFunction<F>),
    Dome(DomeFunction),
    /// A set's chord profile `T_S`, already on its lifted support.
    Chord(ChordProfile<F>),
    /// A constant, which needs no periodization.
    Constant(F),
}

impl<F: Scalar> Profile<F> {
    fn support(&self) -> Option<(F, F)> {
        match self {
            Profile::Hat(h) => Some((F::zero(), h.b.clone())),
            Profile::Dome(d) => Some((F::zero(), F::from_f64(d.support_end()))),
            Profile::Chord(c) => Some(c.support.clone()),
            Profile::Constant(_) => None,
        }
    }

    fn local(&self, y: &F) -> F {
        match self {
            Profile::Hat(h) => h.eval(y),
            Profile::Dome(d) => F::from_f64(d.eval(y.to_f64())),
            Profile::Chord(c) => c.chord(y),
            Profile::Constant(v) => v.clone(),
        }
    }

    fn integral(&self) -> Result<F> {
        match self {
            Profile::Hat(h) => Ok(h.integral()),
            Profile::Dome(d) => Ok(F::from_f64(d.integral())),
            Profile::Chord(c) => c.integral(),
            Profile::Constant(v) => Ok(v.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Term<F> {
    pub weight: F,
    pub shift: F,
    pub base: Profile<F>,
}

/// `τ(x) = Σ_terms w · Σ_{m∈ℤ} T(x − shift + m)`, a 1-periodic function.
#[derive(Debug, Clone)]
pub struct PeriodizedFunction<F> {
    pub terms: Vec<Term<F>>,
}

impl<F: Scalar> PeriodizedFunction<F> {
    pub fn single(base: Profile<F>) -> Self {
        PeriodizedFunction {
            terms: vec![Term {
                weight: F::one(),
                shift: F::zero(),
                base,
            }],
        }
    }

    pub fn hat(h: HatFunction<F>) -> Self {
        Self::single(Profile::Hat(h))
    }

    pub fn constant(v: F) -> Self {
        Self::single(Profile::Constant(v))
    }

    pub fn chord(profile: ChordProfile<F>) -> Self {
        Self::single(Profile::Chord(profile))
    }

    pub fn add(mut self, weight: F, shift: F, base: Profile<F>) -> Self {
        self.terms.push(Term {
            weight,
            shift,
            base,
        });
        self
    }

    /// Whether evaluation stays inside the tier's exact arithmetic (domes
    /// are always evaluated in `f64`).
    pub fn is_exact(&self) -> bool {
        F::EXACT
            && !self
                .terms
                .iter()
                .any(|t| matches!(t.base, Profile::Dome(_)))
    }

    pub fn evaluate(&self, x: &F) -> F {
        let mut total = F::zero();
        for t in &self.terms {
            let v = match t.base.support() {
                None => t.base.local(x),
                Some((lo, hi)) => {
                    let mut y = (x.clone() - t.shift.clone() - lo.clone()).fract() + lo;
                    let mut s = F::zero();
                    while y < hi {
                        s = s + t.base.local(&y);
                        y = y + F::one();
                    }
                    s
                }
            };
            total = total + t.weight.clone() * v;
        }
        total
    }

    /// Integral over one period.
    pub fn integral(&self) -> Result<F> {
        let mut total = F::zero();
        for t in &self.terms {
            total = total + t.weight.clone() * t.base.integral()?;
        }
        Ok(total)
    }
}
