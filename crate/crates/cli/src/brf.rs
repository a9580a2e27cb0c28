use std::path::PathBuf;

use brlab::brf::{
    birkhoff_remainder, birkhoff_sum, cohomology_residual, decompose_sum, decomposition_csv,
    grid_sum_brute, grid_sum_closed_form, special_triangle_transfer, HatFunction,
    PeriodizedFunction,
};
use brlab::contfrac::ContinuedFraction;
use brlab::experiments::special_triangle;
use brlab::geometry::tau_profile;
use brlab::{Error, Result, Rotation};
use clap::{Args, Subcommand};

use crate::alpha::{AlphaArgs, Mode};
use crate::geom::load_set;
use crate::manifest::Run;
use crate::tier::{with_tier, Tier};

/// Where τ comes from: a hat `a,b,H` or a set file.
#[derive(Debug, Clone, Args)]
pub struct TauSource {
    /// Hat function `a,b,H` (rising on [0,a], falling on [a,b]).
    #[arg(long, group = "tau")]
    pub hat: Option<String>,
    /// Set definition file; τ is its chord profile.
    #[arg(long, group = "tau")]
    pub set: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BrfCommand {
    /// Print the Birkhoff remainder Σ_{k<N} τ({x + kα}) − N∫τ.
    Sum {
        #[command(flatten)]
        tau: TauSource,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "0")]
        x: String,
        /// Print the plain sum instead of the remainder.
        #[arg(long)]
        raw: bool,
    },
    /// Split the sum along the Ostrowski expansion of N; writes every term.
    Decompose {
        #[command(flatten)]
        tau: TauSource,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "0")]
        x: String,
    },
    /// Print Σ_{k<q} τ(k/q) for a hat with b ≤ 1, from the closed form.
    Gridsum {
        #[arg(long)]
        hat: String,
        #[arg(long)]
        q: u64,
        /// Sum directly instead.
        #[arg(long)]
        brute: bool,
        #[arg(long, value_enum, default_value_t = Mode::Rational)]
        mode: Mode,
    },
    /// Print the worst residual of the special triangle's coboundary on a grid.
    Cohom {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 10_000)]
        grid: u64,
    },
}

impl BrfCommand {
    pub fn name(&self) -> &'static str {
        match self {
            BrfCommand::Sum { .. } => "sum",
            BrfCommand::Decompose { .. } => "decompose",
            BrfCommand::Gridsum { .. } => "gridsum",
            BrfCommand::Cohom { .. } => "cohom",
        }
    }
}

fn parse_hat<F: Tier>(text: &str) -> Result<HatFunction<F>> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [a, b, h] => HatFunction::new(F::parse(a)?, F::parse(b)?, F::parse(h)?),
        _ => Err(Error::InvalidInput(format!(
            "--hat expects a,b,H; got {text:?}"
        ))),
    }
}

fn build_tau<F: Tier>(
    src: &TauSource,
    rot: &Rotation<F>,
    run: &mut Run,
) -> Result<PeriodizedFunction<F>> {
    if let Some(h) = &src.hat {
        run.param("hat", h);
        return Ok(PeriodizedFunction::hat(parse_hat(h)?));
    }
    if let Some(path) = &src.set {
        let set = load_set(path, run)?;
        return Ok(PeriodizedFunction::chord(tau_profile(
            &set.to_tier::<F>()?,
            &rot.alpha,
        )?));
    }
    Err(Error::InvalidInput(
        "one of --hat or --set is required".into(),
    ))
}

fn sum<F: Tier>(
    src: &TauSource,
    cf: &ContinuedFraction,
    n: u64,
    x: &str,
    raw: bool,
    run: &mut Run,
) -> Result<()> {
    let rot = F::rotation(cf)?;
    let tau = build_tau(src, &rot, run)?;
    let x0 = F::parse(x)?;
    let v = if raw {
        birkhoff_sum(&tau, &rot, &x0, n)?
    } else {
        birkhoff_remainder(&tau, &rot, &x0, n)?
    };
    println!("{}", v.render());
    Ok(())
}

fn decompose<F: Tier>(
    src: &TauSource,
    cf: &ContinuedFraction,
    n: u64,
    x: &str,
    run: &mut Run,
) -> Result<()> {
    let rot = F::rotation(cf)?;
    let tau = build_tau(src, &rot, run)?;
    let d = decompose_sum(&tau, cf, &rot, &F::parse(x)?, n, true)?;
    let path = run.output("decomposition.csv")?;
    decomposition_csv(&d).write(&path)?;
    run.write_json("ostrowski.json", &d.digits)?;
    println!("{}", d.sum.render());
    Ok(())
}

fn gridsum<F: Tier>(hat: &str, q: u64, brute: bool) -> Result<()> {
    let hat = parse_hat::<F>(hat)?;
    let v = if brute {
        grid_sum_brute(&hat, q)
    } else {
        grid_sum_closed_form(&hat, q)?
    };
    println!("{}", v.render());
    Ok(())
}

fn cohom<F: Tier>(cf: &ContinuedFraction, grid: u64) -> Result<()> {
    let alpha = F::rotation(cf)?.alpha;
    let tau = PeriodizedFunction::chord(tau_profile(&special_triangle::<F>(), &alpha)?);
    let g = special_triangle_transfer(&alpha)?;
    println!("{}", cohomology_residual(&tau, &alpha, &*g, grid)?.render());
    Ok(())
}

pub fn record_alpha(alpha: &AlphaArgs, run: &mut Run) -> Result<ContinuedFraction> {
    run.param("alpha", alpha);
    let cf = alpha.cf()?;
    run.param(
        "alpha_quotients",
        cf.quotients()
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>(),
    );
    Ok(cf)
}

pub fn run(cmd: &BrfCommand, run: &mut Run) -> Result<bool> {
    match cmd {
        BrfCommand::Sum {
            tau,
            alpha,
            n,
            x,
            raw,
        } => {
            let cf = record_alpha(alpha, run)?;
            let mode = alpha.resolve_mode(is_disc(tau)?);
            run.mode(mode);
            run.param("n", n);
            run.param("x", x);
            with_tier!(mode, sum(tau, &cf, *n, x, *raw, run))?;
        }
        BrfCommand::Decompose { tau, alpha, n, x } => {
            let cf = record_alpha(alpha, run)?;
            let mode = alpha.resolve_mode(is_disc(tau)?);
            run.mode(mode);
            run.param("n", n);
            run.param("x", x);
            with_tier!(mode, decompose(tau, &cf, *n, x, run))?;
        }
        BrfCommand::Gridsum {
            hat,
            q,
            brute,
            mode,
        } => {
            run.mode(*mode);
            run.param("hat", hat);
            run.param("q", q);
            run.param("brute", brute);
            with_tier!(*mode, gridsum(hat, *q, *brute))?;
        }
        BrfCommand::Cohom { alpha, grid } => {
            let cf = record_alpha(alpha, run)?;
            let mode = alpha.resolve_mode(false);
            run.mode(mode);
            run.param("grid", grid);
            with_tier!(mode, cohom(&cf, *grid))?;
        }
    }
    Ok(true)
}

fn is_disc(src: &TauSource) -> Result<bool> {
    match &src.set {
        Some(path) => Ok(!brlab::io::read_set(path)?.is_polygon()),
        None => Ok(false),
    }
}
