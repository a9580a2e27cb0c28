use std::path::PathBuf;

use brlab::contfrac::ContinuedFraction;
use brlab::experiments::decades;
use brlab::flow::Flow;
use brlab::geometry::{Point, TorusSet};
use brlab::{Error, Result};
use clap::{Args, Subcommand};
use num_rational::BigRational;

use crate::alpha::AlphaArgs;
use crate::brf::record_alpha;
use crate::geom::load_set;
use crate::manifest::Run;
use crate::tier::{with_tier, Tier};

#[derive(Debug, Clone, Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub set: PathBuf,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Starting point `x,y`.
    #[arg(long, default_value = "0,0")]
    pub x: String,
}

#[derive(Debug, Subcommand)]
pub enum FlowCommand {
    /// Print Δ_T = ∫_0^T χ_S(X(t)) dt − T λ(S).
    Delta {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long)]
        t: String,
    },
    /// Write Δ_T and its running sup at checkpoints (decades by default).
    Trace {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long)]
        tmax: String,
        /// Explicit checkpoints, comma separated.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<String>>,
    },
    /// Print |S_N(x) − Δ_T| with N = ⌊T⌋; exits 4 if it exceeds 4.
    Gap {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long)]
        t: String,
    },
}

impl FlowCommand {
    pub fn name(&self) -> &'static str {
        match self {
            FlowCommand::Delta { .. } => "delta",
            FlowCommand::Trace { .. } => "trace",
            FlowCommand::Gap { .. } => "gap",
        }
    }

    fn flow_args(&self) -> &FlowArgs {
        match self {
            FlowCommand::Delta { flow, .. }
            | FlowCommand::Trace { flow, .. }
            | FlowCommand::Gap { flow, .. } => flow,
        }
    }
}

fn parse_point<F: Tier>(text: &str) -> Result<Point<F>> {
    match text.split(',').collect::<Vec<_>>().as_slice() {
        [x, y] => Ok(Point::new(F::parse(x)?, F::parse(y)?)),
        _ => Err(Error::InvalidInput(format!(
            "--x expects x,y; got {text:?}"
        ))),
    }
}

fn build<F: Tier>(set: &TorusSet<BigRational>, cf: &ContinuedFraction, x: &str) -> Result<Flow<F>> {
    Flow::new(&set.to_tier::<F>()?, F::rotation(cf)?, parse_point(x)?)
}

fn execute<F: Tier>(
    cmd: &FlowCommand,
    set: &TorusSet<BigRational>,
    cf: &ContinuedFraction,
    run: &mut Run,
) -> Result<()> {
    let flow = build::<F>(set, cf, &cmd.flow_args().x)?;
    match cmd {
        FlowCommand::Delta { t, .. } => println!("{}", flow.delta(&F::parse(t)?)?.render()),
        FlowCommand::Gap { t, .. } => {
            println!("{}", flow.equivalence_gap(&F::parse(t)?)?.gap.render())
        }
        FlowCommand::Trace {
            tmax, checkpoints, ..
        } => {
            let horizon = F::parse(tmax)?;
            let points: Vec<F> = match checkpoints {
                Some(list) => list.iter().map(|c| F::parse(c)).collect::<Result<_>>()?,
                None => decades(0, horizon.to_f64())
                    .into_iter()
                    .map(F::from_f64)
                    .collect(),
            };
            let trace = flow.trace(&horizon, &points)?;
            let path = run.output("trace.csv")?;
            trace.to_csv().write(&path)?;
            println!("{}", trace.running_sup.render());
        }
    }
    Ok(())
}

pub fn run(cmd: &FlowCommand, run: &mut Run) -> Result<bool> {
    let args = cmd.flow_args();
    let set = load_set(&args.set, run)?;
    let cf = record_alpha(&args.alpha, run)?;
    let mode = args.alpha.resolve_mode(!set.is_polygon());
    run.mode(mode);
    run.param("x", &args.x);
    match cmd {
        FlowCommand::Delta { t, .. } | FlowCommand::Gap { t, .. } => run.param("T", t),
        FlowCommand::Trace {
            tmax, checkpoints, ..
        } => {
            run.param("T_max", tmax);
            run.param("checkpoints", checkpoints);
        }
    }
    with_tier!(mode, execute(cmd, &set, &cf, run))?;
    Ok(true)
}
