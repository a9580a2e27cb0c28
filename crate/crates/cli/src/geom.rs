use std::path::{Path, PathBuf};

use brlab::geometry::{tau_profile, triangulate, TorusSet};
use brlab::io::{fmt_f64, fmt_ratio, read_set, set_to_json, Csv};
use brlab::{Error, Result};
use clap::Subcommand;
use num_rational::BigRational;

use crate::alpha::AlphaArgs;
use crate::manifest::Run;
use crate::tier::{with_tier, Tier};

#[derive(Debug, Subcommand)]
pub enum GeomCommand {
    /// Evaluate τ_S at `--x`, or tabulate it on a grid.
    Tau {
        #[arg(long)]
        set: PathBuf,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Print λ(S): exact for polygons, double precision for discs.
    Measure {
        #[arg(long)]
        set: PathBuf,
    },
    /// Write a triangulation, avoiding diagonals of slope α when given.
    Triangulate {
        #[arg(long)]
        set: PathBuf,
        #[command(flatten)]
        alpha: AlphaArgs,
    },
}

impl GeomCommand {
    pub fn name(&self) -> &'static str {
        match self {
            GeomCommand::Tau { .. } => "tau",
            GeomCommand::Measure { .. } => "measure",
            GeomCommand::Triangulate { .. } => "triangulate",
        }
    }
}

/// Read a set file and record it in the manifest.
pub fn load_set(path: &Path, run: &mut Run) -> Result<TorusSet<BigRational>> {
    let set = read_set(path)?;
    run.param("set_file", path.display().to_string());
    run.param("set", set_to_json(&set));
    Ok(set)
}

fn tau<F: Tier>(
    set: &TorusSet<BigRational>,
    alpha: &AlphaArgs,
    x: Option<&str>,
    samples: u64,
    run: &mut Run,
) -> Result<()> {
    let cf = alpha.cf()?;
    let rot = F::rotation(&cf)?;
    let profile = tau_profile(&set.to_tier::<F>()?, &rot.alpha)?;
    match x {
        Some(x) => println!("{}", profile.evaluate(&F::parse(x)?).render()),
        None => {
            if samples == 0 {
                return Err(Error::InvalidInput("samples must be at least 1".into()));
            }
            let mut csv = Csv::new(&["x", "tau"]);
            for k in 0..samples {
                let x = F::from_u64(k) / F::from_u64(samples);
                csv.row([x.render(), profile.evaluate(&x).render()]);
            }
            let path = run.output("tau.csv")?;
            csv.write(&path)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn write_triangles<F: Tier>(
    set: &TorusSet<BigRational>,
    alpha: &AlphaArgs,
    run: &mut Run,
) -> Result<()> {
    let poly = match set.to_tier::<F>()? {
        TorusSet::Polygon(p) => p,
        TorusSet::Disc(_) => {
            return Err(Error::InvalidInput(
                "only polygons can be triangulated".into(),
            ))
        }
    };
    let slope = if alpha.is_given() {
        Some(F::rotation(&alpha.cf()?)?.alpha)
    } else {
        None
    };
    let tris = triangulate(&poly, slope.as_ref())?;
    let json: Vec<Vec<[String; 2]>> = tris
        .iter()
        .map(|t| t.iter().map(|p| [p.x.render(), p.y.render()]).collect())
        .collect();
    run.write_json("triangles.json", &json)?;
    println!("{}", tris.len());
    Ok(())
}

pub fn run(cmd: &GeomCommand, run: &mut Run) -> Result<bool> {
    match cmd {
        GeomCommand::Tau {
            set,
            alpha,
            x,
            samples,
        } => {
            let s = load_set(set, run)?;
            let mode = alpha.resolve_mode(!s.is_polygon());
            run.mode(mode);
            run.param("alpha", alpha);
            run.param("x", x);
            run.param("samples", samples);
            with_tier!(mode, tau(&s, alpha, x.as_deref(), *samples, run))?;
        }
        GeomCommand::Measure { set } => {
            let s = load_set(set, run)?;
            if s.is_polygon() {
                println!("{}", fmt_ratio(&s.measure()?));
            } else {
                println!("{}", fmt_f64(s.to_tier::<f64>()?.measure()?));
            }
        }
        GeomCommand::Triangulate { set, alpha } => {
            let s = load_set(set, run)?;
            let mode = if alpha.is_given() {
                alpha.resolve_mode(false)
            } else {
                crate::alpha::Mode::Rational
            };
            run.mode(mode);
            run.param("alpha", alpha);
            with_tier!(mode, write_triangles(&s, alpha, run))?;
        }
    }
    Ok(true)
}
