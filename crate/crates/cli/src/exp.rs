use brlab::experiments::{
    class_discrepancy_sweep, disc_7b_structure, parallelogram_counterexample, plateau_experiment,
    special_triangle_experiment, triangle_7a_experiment, ExperimentReport, ParallelogramParams,
    PlateauParams, SetClass, SpecialTriangleParams, SweepParams, Triangle7aParams,
};
use brlab::{Error, Result};
use clap::{Args, ValueEnum};

use crate::alpha::AlphaArgs;
use crate::brf::record_alpha;
use crate::manifest::Run;
use crate::SeedArg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Recipe {
    SpecialTriangle,
    Parallelogram,
    #[value(name = "triangle-7a")]
    Triangle7a,
    #[value(name = "disc-7b")]
    Disc7b,
    ClassSweep,
    Plateau,
}

impl Recipe {
    pub fn name(&self) -> &'static str {
        match self {
            Recipe::SpecialTriangle => "special-triangle",
            Recipe::Parallelogram => "parallelogram",
            Recipe::Triangle7a => "triangle-7a",
            Recipe::Disc7b => "disc-7b",
            Recipe::ClassSweep => "class-sweep",
            Recipe::Plateau => "plateau",
        }
    }
}

#[derive(Debug, Args)]
pub struct ExpArgs {
    pub recipe: Recipe,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Time horizon.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Random starting points (special-triangle).
    #[arg(long)]
    pub starts: Option<usize>,
    /// Grid size for the cohomology residual (special-triangle).
    #[arg(long)]
    pub grid: Option<u64>,
    /// Parallelogram height.
    #[arg(long)]
    pub p: Option<f64>,
    /// Construction depth (triangle-7a).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Grid size of the K search (triangle-7a).
    #[arg(long)]
    pub k_search: Option<u64>,
    /// Largest N summed (triangle-7a).
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Range of m (disc-7b).
    #[arg(long, default_value_t = 1)]
    pub m_lo: u64,
    #[arg(long, default_value_t = 10_000)]
    pub m_hi: u64,
    /// Set class: axis_rectangles, discs or polygons (class-sweep).
    #[arg(long, default_value = "axis_rectangles")]
    pub class: String,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Starting point `x,y` (class-sweep).
    #[arg(long)]
    pub x: Option<String>,
    /// Sample sizes and split time (plateau).
    #[arg(long)]
    pub polygons: Option<usize>,
    #[arg(long)]
    pub discs: Option<usize>,
    #[arg(long)]
    pub t_split: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

fn parse_start(text: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidInput(format!("--x expects x,y; got {text:?}"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn report_for(args: &ExpArgs, run: &mut Run) -> Result<ExperimentReport> {
    let dir = run.dir.clone();
    std::fs::create_dir_all(&dir)?;
    let seed = args.seed.seed;
    match args.recipe {
        Recipe::SpecialTriangle => {
            let cf = record_alpha(&args.alpha, run)?;
            let d = SpecialTriangleParams::default();
            let params = SpecialTriangleParams {
                t_max: args.tmax.unwrap_or(d.t_max),
                starts: args.starts.unwrap_or(d.starts),
                seed,
                grid_n: args.grid.unwrap_or(d.grid_n),
            };
            special_triangle_experiment(&cf, &params, Some(&dir))
        }
        Recipe::Parallelogram => {
            let cf = record_alpha(&args.alpha, run)?;
            let d = ParallelogramParams::default();
            let t_max = args.tmax.map_or(d.t_max, |t| t as u64);
            let params = ParallelogramParams {
                p: args.p.unwrap_or(d.p),
                t_max,
                lattice_depth: t_max,
                ..d
            };
            parallelogram_counterexample(&cf, &params, Some(&dir))
        }
        Recipe::Triangle7a => {
            let d = Triangle7aParams::default();
            triangle_7a_experiment(&Triangle7aParams {
                levels: args.levels.unwrap_or(d.levels),
                k_search: args.k_search.unwrap_or(d.k_search),
                n_max: args.n_max.unwrap_or(d.n_max),
            })
        }
        Recipe::Disc7b => disc_7b_structure(args.m_lo, args.m_hi),
        Recipe::ClassSweep => {
            let cf = record_alpha(&args.alpha, run)?;
            let class = SetClass::parse(&args.class).ok_or_else(|| {
                Error::InvalidInput(format!("unknown set class {:?}", args.class))
            })?;
            let d = SweepParams::default();
            let params = SweepParams {
                class,
                start: args
                    .x
                    .as_deref()
                    .map(parse_start)
                    .transpose()?
                    .unwrap_or(d.start),
                t_max: args.tmax.unwrap_or(d.t_max),
                samples: args.samples.unwrap_or(d.samples),
                seed,
            };
            class_discrepancy_sweep(&cf, &params, Some(&dir))
        }
        Recipe::Plateau => {
            let cf = record_alpha(&args.alpha, run)?;
            let d = PlateauParams::default();
            let params = PlateauParams {
                polygons: args.polygons.unwrap_or(d.polygons),
                discs: args.discs.unwrap_or(d.discs),
                t_split: args.t_split.unwrap_or(d.t_split),
                t_max: args.tmax.unwrap_or(d.t_max),
                tolerance: args.tolerance.unwrap_or(d.tolerance),
                seed,
            };
            plateau_experiment(&cf, &params, Some(&dir))
        }
    }
}

/// Runs the recipe and writes `report.json`; the result says whether every
/// criterion passed.
pub fn run(args: &ExpArgs, run: &mut Run) -> Result<bool> {
    run.manifest.seed = Some(args.seed.seed);
    run.mode(crate::alpha::Mode::Decimal);
    let report = report_for(args, run)?;
    run.param("recipe", args.recipe.name());
    run.param("recipe_params", &report.params);
    for a in &report.artifacts {
        run.record_output(a);
    }
    let path = run.write_json("report.json", &report)?;
    for c in &report.criteria {
        println!(
            "{} {} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.id,
            c.observed
        );
    }
    println!("{}", path.display());
    Ok(report.passed())
}
