use brlab::contfrac::{AlphaValue, ContinuedFraction};
use brlab::io::{fmt_f64, fmt_ratio, parse_rational};
use brlab::{Quad, Result, Rotation, Scalar};
use num_rational::BigRational;

/// A scalar tier the CLI can build slopes in and print.
pub trait Tier: Scalar {
    fn rotation(cf: &ContinuedFraction) -> Result<Rotation<Self>>;
    fn render(&self) -> String;

    fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_ratio(&parse_rational(text)?))
    }
}

impl Tier for f64 {
    fn rotation(cf: &ContinuedFraction) -> Result<Rotation<f64>> {
        match cf.value_mode() {
            AlphaValue::Symbolic => Ok(Rotation::from_ratio(&cf.convergent(cf.depth()))),
            _ => cf.rotation_f64(),
        }
    }

    fn render(&self) -> String {
        fmt_f64(*self)
    }
}

impl Tier for Quad {
    fn rotation(cf: &ContinuedFraction) -> Result<Rotation<Quad>> {
        Ok(Rotation::new(cf.alpha_quad()?))
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Tier for BigRational {
    fn rotation(cf: &ContinuedFraction) -> Result<Rotation<BigRational>> {
        Ok(Rotation::new(cf.convergent(cf.depth())))
    }

    fn render(&self) -> String {
        fmt_ratio(self)
    }
}

/// Run a generic body in the tier named by a [`Mode`](crate::alpha::Mode).
macro_rules! with_tier {
    ($mode:expr, $f:ident ( $($arg:expr),* $(,)? )) => {
        match $mode {
            $crate::alpha::Mode::Quadratic => $f::<brlab::Quad>($($arg),*),
            $crate::alpha::Mode::Rational => $f::<num_rational::BigRational>($($arg),*),
            $crate::alpha::Mode::Decimal => $f::<f64>($($arg),*),
        }
    };
}
pub(crate) use with_tier;
