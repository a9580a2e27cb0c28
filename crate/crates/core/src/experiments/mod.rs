//! Reproducible experiment recipes. Each returns an [`ExperimentReport`]
//! listing its parameters, derived quantities and per-criterion verdicts.

mod constructions;
mod flows;
mod sampling;
mod sweep;

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use crate::contfrac::{AlphaValue, ContinuedFraction};
use crate::error::{Error, Result};

pub use constructions::{
    disc_7b_structure, periodic_hat_sum, triangle_7a_experiment, GmProfile, LambdaCondition,
    Triangle7aParams,
};
pub use flows::{
    kesten_sum, parallelogram, parallelogram_counterexample, special_triangle,
    special_triangle_experiment, ParallelogramParams, SpecialTriangleParams,
};
pub use sampling::{random_disc, random_polygon, random_rectangle, SetClass, DEFAULT_SEED};
pub use sweep::{class_discrepancy_sweep, plateau_experiment, PlateauParams, SweepParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: String,
    pub expected: String,
    pub observed: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: Value,
    pub derived: Value,
    pub criteria: Vec<Criterion>,
    pub artifacts: Vec<String>,
}

impl ExperimentReport {
    pub fn new(name: &str, params: Value) -> Self {
        ExperimentReport {
            name: name.into(),
            params,
            derived: Value::Object(Default::default()),
            criteria: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn check(
        &mut self,
        id: &str,
        expected: impl Into<String>,
        observed: impl Serialize,
        pass: bool,
    ) {
        let observed = serde_json::to_value(observed).unwrap_or(Value::Null);
        self.criteria.push(Criterion {
            id: id.into(),
            expected: expected.into(),
            observed,
            pass,
        });
    }

    pub fn derive(&mut self, key: &str, value: impl Serialize) {
        if let Value::Object(map) = &mut self.derived {
            map.insert(
                key.into(),
                serde_json::to_value(value).unwrap_or(Value::Null),
            );
        }
    }

    pub fn criterion(&self, id: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.id == id)
    }

    /// All criteria passed.
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub(crate) fn artifact(&mut self, path: PathBuf) {
        self.artifacts.push(path.display().to_string());
    }
}

/// Reject slopes that are visibly rational: quadratic values pass, decimal
/// values fail if their enclosure holds a fraction with denominator at most
/// `RATIONAL_PROBE`.
pub const RATIONAL_PROBE: u64 = 1000;

pub(crate) fn require_irrational(cf: &ContinuedFraction) -> Result<()> {
    match cf.value_mode() {
        AlphaValue::Quadratic(_) => Ok(()),
        AlphaValue::Symbolic => Err(Error::unsupported("experiment needs the value of α")),
        AlphaValue::Decimal(e) => {
            for q in 1..=RATIONAL_PROBE {
                let qb = num_bigint::BigInt::from(q);
                let p = (&e.lo * BigRational::from_integer(qb.clone()))
                    .ceil()
                    .to_integer();
                if e.contains(&BigRational::new(p.clone(), qb)) {
                    return Err(Error::invalid(format!(
                        "α is indistinguishable from the rational {p}/{q}"
                    )));
                }
            }
            Ok(())
        }
    }
}

/// `10^lo, 10^(lo+1), ..., ` up to `t_max`, plus `t_max` itself.
pub fn decades(lo: u32, t_max: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (lo..)
        .map(|d| 10f64.powi(d as i32))
        .take_while(|&t| t <= t_max)
        .collect();
    if v.last().is_none_or(|&t| t < t_max) {
        v.push(t_max);
    }
    v
}
