use brlab::contfrac::{
    expand_value, precision_bits_from_env, AlphaValue, ContinuedFraction, Enclosure,
};
use brlab::{Error, Result};
use clap::{Args, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact arithmetic in Q(√c).
    Quadratic,
    /// Exact rational arithmetic; α is the deepest convergent.
    Rational,
    /// Double precision with compensated sums.
    Decimal,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AlphaArgs {
    /// Named slope: golden, sqrt2m1 or sqrt3m1.
    #[arg(long, group = "slope")]
    pub alpha: Option<String>,
    /// Partial quotients a_1,a_2,...
    #[arg(long, group = "slope", value_delimiter = ',')]
    #[serde(serialize_with = "as_strings")]
    pub quotients: Option<Vec<BigInt>>,
    /// Decimal digits of α, e.g. 0.3183098861837906715.
    #[arg(long, group = "slope")]
    pub decimal: Option<String>,
    /// Number of partial quotients to expand.
    #[arg(long, default_value_t = 40)]
    pub depth: usize,
    /// Arithmetic tier; by default quadratic for presets, rational for
    /// quotient lists and decimal for decimal input.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

fn as_strings<S: serde::Serializer>(
    v: &Option<Vec<BigInt>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strings: Option<Vec<String>> = v
        .as_ref()
        .map(|q| q.iter().map(BigInt::to_string).collect());
    strings.serialize(s)
}

impl AlphaArgs {
    pub fn is_given(&self) -> bool {
        self.alpha.is_some() || self.quotients.is_some() || self.decimal.is_some()
    }

    /// The continued fraction at exactly the requested depth.
    pub fn cf_strict(&self) -> Result<ContinuedFraction> {
        if let Some(name) = &self.alpha {
            return ContinuedFraction::preset(name, self.depth);
        }
        if let Some(q) = &self.quotients {
            return ContinuedFraction::from_quotients(q.clone(), AlphaValue::Symbolic);
        }
        if let Some(text) = &self.decimal {
            let enclosure = Enclosure::from_decimal(text, precision_bits_from_env()?)?;
            return expand_value(&enclosure, self.depth);
        }
        Err(Error::InvalidInput(
            "one of --alpha, --quotients or --decimal is required".into(),
        ))
    }

    /// Like [`cf_strict`](Self::cf_strict), but a decimal value is cut to
    /// its trusted quotients instead of failing.
    pub fn cf(&self) -> Result<ContinuedFraction> {
        match self.cf_strict() {
            Err(Error::Precision { last_trusted, .. })
                if self.decimal.is_some() && last_trusted > 0 =>
            {
                let enclosure = Enclosure::from_decimal(
                    self.decimal.as_deref().unwrap_or(""),
                    precision_bits_from_env()?,
                )?;
                expand_value(&enclosure, last_trusted)
            }
            other => other,
        }
    }

    pub fn default_mode(&self) -> Mode {
        if self.alpha.is_some() {
            Mode::Quadratic
        } else if self.quotients.is_some() {
            Mode::Rational
        } else {
            Mode::Decimal
        }
    }

    /// The tier to use; discs force the decimal tier unless one was asked
    /// for explicitly.
    pub fn resolve_mode(&self, has_disc: bool) -> Mode {
        match self.mode {
            Some(m) => m,
            None if has_disc => Mode::Decimal,
            None => self.default_mode(),
        }
    }
}
