use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{decades, require_irrational, ExperimentReport, DEFAULT_SEED};
use crate::brf::{cohomology_residual, special_triangle_transfer, PeriodizedFunction};
use crate::contfrac::{AlphaValue, ContinuedFraction};
use crate::error::{Error, Result};
use crate::flow::{DiscrepancyTrace, Flow};
use crate::geometry::{tau_profile, Point, TorusSet};
use crate::quadratic::Quad;
use crate::scalar::{Rotation, Scalar};

/// The triangle with vertices `(0,0), (1,0), (0,1)`.
pub fn special_triangle<F: Scalar>() -> TorusSet<F> {
    TorusSet::polygon(vec![
        Point::new(F::zero(), F::zero()),
        Point::new(F::one(), F::zero()),
        Point::new(F::zero(), F::one()),
    ])
    .expect("special triangle")
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecialTriangleParams {
    pub t_max: f64,
    /// Random starting points, drawn after the origin.
    pub starts: usize,
    pub seed: u64,
    pub grid_n: u64,
}

impl Default for SpecialTriangleParams {
    fn default() -> Self {
        SpecialTriangleParams {
            t_max: 1e5,
            starts: 20,
            seed: DEFAULT_SEED,
            grid_n: 10_000,
        }
    }
}

/// The special triangle is a bounded remainder set for every slope: check
/// the transfer function on a grid and bound `sup |Δ_T|` along flows from
/// the origin and from random starts.
pub fn special_triangle_experiment(
    cf: &ContinuedFraction,
    params: &SpecialTriangleParams,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    require_irrational(cf)?;
    let rot = cf.rotation_f64()?;
    let alpha = rot.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("special triangle recipe assumes 0 < α < 1"));
    }
    let mut report = ExperimentReport::new(
        "special-triangle",
        json!({ "alpha": cf.to_string(), "t_max": params.t_max, "starts": params.starts,
                "seed": params.seed, "grid_n": params.grid_n }),
    );

    let set = special_triangle::<f64>();
    let tau = PeriodizedFunction::chord(tau_profile(&set, &alpha)?);
    let g = special_triangle_transfer(&alpha)?;
    let residual = cohomology_residual(&tau, &alpha, &*g, params.grid_n)?;
    report.check(
        "cohomology_residual",
        "<= 1e-12",
        residual,
        residual <= 1e-12,
    );
    if let AlphaValue::Quadratic(_) = cf.value_mode() {
        let a = cf.alpha_quad()?;
        let tau_q = PeriodizedFunction::chord(tau_profile(&special_triangle::<Quad>(), &a)?);
        let gq = special_triangle_transfer(&a)?;
        let exact = cohomology_residual(&tau_q, &a, &*gq, params.grid_n.min(2_000))?;
        report.check(
            "cohomology_residual_exact",
            "== 0",
            exact.to_string(),
            exact.is_zero(),
        );
    }

    let bound = 1.0 / (4.0 * alpha * (1.0 + alpha)) + 4.0;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut starts = vec![Point::new(0.0, 0.0)];
    starts.extend(
        (0..params.starts).map(|_| Point::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))),
    );
    let checkpoints = decades(1, params.t_max);
    let traces: Vec<DiscrepancyTrace<f64>> = starts
        .par_iter()
        .map(|x| Flow::new(&set, rot.clone(), x.clone())?.trace(&params.t_max, &checkpoints))
        .collect::<Result<_>>()?;
    let (worst_i, worst) = traces
        .iter()
        .enumerate()
        .map(|(i, t)| (i, t.running_sup))
        .fold((0, 0.0), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
    report.derive("bound", bound);
    report.derive(
        "sup_per_start",
        traces.iter().map(|t| t.running_sup).collect::<Vec<_>>(),
    );
    report.derive("worst_start", [starts[worst_i].x, starts[worst_i].y]);
    report.derive("worst_at_t", traces[worst_i].sup_at);
    report.check(
        "sup_delta",
        format!("<= 1/(4α(1+α)) + 4 = {bound}"),
        worst,
        worst <= bound,
    );

    if let Some(dir) = out_dir {
        let path = dir.join("special_triangle_trace.csv");
        traces[0].to_csv().write(&path)?;
        report.artifact(path);
    }
    Ok(report)
}

/// The parallelogram `(0,0), (1,α), (1,α+p), (0,p)` with two edges of
/// slope α.
pub fn parallelogram(alpha: f64, p: f64) -> Result<TorusSet<f64>> {
    TorusSet::polygon(vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, alpha),
        Point::new(1.0, alpha + p),
        Point::new(0.0, p),
    ])
}

/// `#{1 ≤ n ≤ N : {nα} < p}` for every `N = 1..=n_max`.
pub fn kesten_sum(rot: &Rotation<f64>, p: f64, n_max: u64) -> Vec<u64> {
    let mut count = 0;
    (1..=n_max)
        .map(|n| {
            if rot.orbit(&0.0, n) < p {
                count += 1;
            }
            count
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ParallelogramParams {
    pub p: f64,
    pub t_max: u64,
    /// Largest `|k|` for the `p ∉ ℤα (mod 1)` check.
    pub lattice_depth: u64,
    pub tolerance: f64,
}

impl Default for ParallelogramParams {
    fn default() -> Self {
        ParallelogramParams {
            p: (3f64.sqrt() - 1.0) / 2.0,
            t_max: 100_000,
            lattice_depth: 100_000,
            tolerance: 1e-9,
        }
    }
}

/// Not a bounded remainder set: along the flow from the origin the
/// occupancy tracks a Kesten sum within 1, and `sup |Δ_T|` keeps growing.
pub fn parallelogram_counterexample(
    cf: &ContinuedFraction,
    params: &ParallelogramParams,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    require_irrational(cf)?;
    let rot = cf.rotation_f64()?;
    let (alpha, p) = (rot.alpha, params.p);
    if !(p > 0.0 && alpha + p < 1.0) {
        return Err(Error::invalid("parallelogram needs p > 0 and α + p < 1"));
    }
    for k in 0..=params.lattice_depth {
        let v = rot.orbit(&0.0, k);
        for d in [(v - p).abs(), (1.0 - v - p).abs()] {
            if d.min(1.0 - d) < 1e-10 {
                return Err(Error::invalid(format!(
                    "p = {p} is within 1e-10 of ±{{{k}α}} (mod 1)"
                )));
            }
        }
    }
    let mut report = ExperimentReport::new(
        "parallelogram",
        json!({ "alpha": cf.to_string(), "p": p, "t_max": params.t_max,
                "lattice_depth": params.lattice_depth, "tolerance": params.tolerance }),
    );
    let set = parallelogram(alpha, p)?;
    let flow = Flow::new(&set, rot.clone(), Point::new(0.0, 0.0))?;
    let checkpoints: Vec<f64> = (1..=params.t_max).map(|t| t as f64).collect();
    let trace = flow.trace(&(params.t_max as f64), &checkpoints)?;
    let kesten = kesten_sum(&rot, p, params.t_max);
    let mut worst = (0.0f64, 0u64);
    for (tp, &k) in trace.checkpoints.iter().zip(&kesten) {
        let occ = tp.delta + p * tp.t;
        let gap = (occ - k as f64).abs();
        if gap > worst.0 {
            worst = (gap, tp.t as u64);
        }
    }
    report.check(
        "kesten_coupling",
        format!("<= 1 (+{:e})", params.tolerance),
        json!({ "max": worst.0, "at_t": worst.1 }),
        worst.0 <= 1.0 + params.tolerance,
    );

    let sups: Vec<(f64, f64)> = decades(2, params.t_max as f64)
        .into_iter()
        .map(|t| (t, trace.checkpoints[t as usize - 1].running_sup))
        .collect();
    report.derive("running_sup", &sups);
    let increasing = sups.windows(2).all(|w| w[1].1 > w[0].1);
    report.check(
        "running_sup_increasing",
        "strictly increasing across decades",
        &sups,
        increasing,
    );
    if let (Some(first), Some(last)) = (sups.first(), sups.last()) {
        report.check(
            "running_sup_growth",
            "sup(T_max) >= sup(1e2) + 0.5",
            last.1 - first.1,
            last.1 >= first.1 + 0.5,
        );
    }
    if let Some(dir) = out_dir {
        let mut csv = crate::io::Csv::new(&["T", "delta", "running_sup"]);
        for t in decades(0, params.t_max as f64) {
            let tp = &trace.checkpoints[t as usize - 1];
            csv.row([tp.t, tp.delta, tp.running_sup].map(crate::io::fmt_f64));
        }
        let path = dir.join("parallelogram_trace.csv");
        csv.write(&path)?;
        report.artifact(path);
    }
    Ok(report)
}
