use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{decades, require_irrational, ExperimentReport, SetClass, DEFAULT_SEED};
use crate::contfrac::ContinuedFraction;
use crate::error::Result;
use crate::flow::{DiscrepancyTrace, Flow};
use crate::geometry::{Point, TorusSet};
use crate::io::{fmt_f64, Csv};

#[derive(Debug, Clone, Serialize)]
pub struct SweepParams {
    pub class: SetClass,
    pub start: (f64, f64),
    pub t_max: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            class: SetClass::AxisRectangles,
            start: (0.0, 0.0),
            t_max: 1e5,
            samples: 200,
            seed: DEFAULT_SEED,
        }
    }
}

fn sample_sets(class: SetClass, samples: usize, seed: u64, alpha: f64) -> Vec<TorusSet<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| class.sample(&mut rng, alpha))
        .collect()
}

/// Sup of `|Δ_T|` over a random sample of a class, at each decade.
pub fn class_discrepancy_sweep(
    cf: &ContinuedFraction,
    params: &SweepParams,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    require_irrational(cf)?;
    if params.samples == 0 {
        return Err(crate::error::Error::invalid("samples must be at least 1"));
    }
    let rot = cf.rotation_f64()?;
    let sets = sample_sets(params.class, params.samples, params.seed, rot.alpha);
    let checkpoints = decades(1, params.t_max);
    let start = Point::new(params.start.0, params.start.1);
    let traces: Vec<DiscrepancyTrace<f64>> = sets
        .par_iter()
        .map(|s| Flow::new(s, rot.clone(), start.clone())?.trace(&params.t_max, &checkpoints))
        .collect::<Result<_>>()?;
    let class_sup: Vec<(f64, f64)> = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            (
                t,
                traces
                    .iter()
                    .map(|tr| tr.checkpoints[i].running_sup)
                    .fold(0.0, f64::max),
            )
        })
        .collect();
    let mut report = ExperimentReport::new(
        "class-sweep",
        json!({ "class": params.class, "alpha": cf.to_string(), "start": [params.start.0, params.start.1],
                "t_max": params.t_max, "samples": params.samples, "seed": params.seed }),
    );
    report.derive("class_sup", &class_sup);
    let growth: Vec<f64> = class_sup
        .windows(2)
        .map(|w| w[1].1 / w[0].1.max(f64::MIN_POSITIVE))
        .collect();
    report.derive("decade_growth", &growth);
    let finite = class_sup.iter().all(|(_, s)| s.is_finite());
    report.check(
        "trace_emitted",
        "finite class sup at every decade",
        finite,
        finite,
    );
    if let Some(dir) = out_dir {
        let mut csv = Csv::new(&["T", "class_sup"]);
        for (t, s) in &class_sup {
            csv.row([fmt_f64(*t), fmt_f64(*s)]);
        }
        let path = dir.join("class_sweep.csv");
        csv.write(&path)?;
        report.artifact(path);
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct PlateauParams {
    pub polygons: usize,
    pub discs: usize,
    pub t_split: f64,
    pub t_max: f64,
    /// Allowed relative excess of the late sup over the early sup.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for PlateauParams {
    fn default() -> Self {
        PlateauParams {
            polygons: 20,
            discs: 20,
            t_split: 1e5,
            t_max: 1e6,
            tolerance: 0.05,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct PlateauRow {
    set: String,
    early: f64,
    late: f64,
    excess: f64,
}

/// For each sampled polygon (no edge of slope α) and disc, compare
/// `sup |Δ|` over `(t_split, t_max]` with the sup over `[0, t_split]`.
pub fn plateau_experiment(
    cf: &ContinuedFraction,
    params: &PlateauParams,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    require_irrational(cf)?;
    let rot = cf.rotation_f64()?;
    let mut sets: Vec<(String, TorusSet<f64>)> = Vec::new();
    for (class, n, tag) in [
        (SetClass::Polygons, params.polygons, "polygon"),
        (SetClass::Discs, params.discs, "disc"),
    ] {
        let sampled = sample_sets(class, n, params.seed, rot.alpha);
        sets.extend(
            sampled
                .into_iter()
                .enumerate()
                .map(|(i, s)| (format!("{tag}{i}"), s)),
        );
    }
    let checkpoints = [params.t_split, params.t_max];
    let rows: Vec<PlateauRow> = sets
        .par_iter()
        .map(|(name, s)| {
            let tr = Flow::new(s, rot.clone(), Point::new(0.0, 0.0))?
                .trace(&params.t_max, &checkpoints)?;
            let (early, late) = (tr.checkpoints[0].running_sup, tr.checkpoints[1].window_sup);
            Ok(PlateauRow {
                set: name.clone(),
                early,
                late,
                excess: late / early - 1.0,
            })
        })
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(
        "plateau",
        json!({ "alpha": cf.to_string(), "polygons": params.polygons, "discs": params.discs,
                "t_split": params.t_split, "t_max": params.t_max, "tolerance": params.tolerance, "seed": params.seed }),
    );
    let worst = rows
        .iter()
        .map(|r| r.excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let failing: Vec<&PlateauRow> = rows
        .iter()
        .filter(|r| r.excess >= params.tolerance)
        .collect();
    report.derive("rows", &rows);
    report.derive("worst_excess", worst);
    report.check(
        "plateau_per_set",
        format!(
            "late sup < (1 + {}) × early sup for every set",
            params.tolerance
        ),
        json!({ "worst_excess": worst, "failing": failing }),
        failing.is_empty(),
    );
    let class_early = rows.iter().map(|r| r.early).fold(0.0, f64::max);
    let class_late = rows.iter().map(|r| r.late).fold(0.0, f64::max);
    let class_excess = class_late / class_early - 1.0;
    report.check(
        "plateau_class",
        format!(
            "class-wide late sup < (1 + {}) × early sup",
            params.tolerance
        ),
        class_excess,
        class_excess < params.tolerance,
    );
    if let Some(dir) = out_dir {
        let mut csv = Csv::new(&["set", "early_sup", "late_sup", "excess"]);
        for r in &rows {
            csv.row([
                r.set.clone(),
                fmt_f64(r.early),
                fmt_f64(r.late),
                fmt_f64(r.excess),
            ]);
        }
        let path = dir.join("plateau.csv");
        csv.write(&path)?;
        report.artifact(path);
    }
    Ok(report)
}
