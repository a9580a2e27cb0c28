use brlab::contfrac::ostrowski_expand;
use brlab::io::{fmt_f64, fmt_ratio, Csv};
use brlab::Result;
use clap::Subcommand;
use num_bigint::BigInt;

use crate::alpha::AlphaArgs;
use crate::manifest::Run;

#[derive(Debug, Subcommand)]
pub enum CfCommand {
    /// Print the partial quotients of α.
    Expand {
        #[command(flatten)]
        alpha: AlphaArgs,
    },
    /// Write the table n, a_n, p_n, q_n and the approximation bounds.
    Convergents {
        #[command(flatten)]
        alpha: AlphaArgs,
    },
    /// Print the Ostrowski digits b_0,...,b_s of N.
    Ostrowski {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        n: BigInt,
    },
    /// Print Σ_{l≤s} a_{l+1} q_l^{-1/m} Σ_{k≤l+1} a_k.
    Stat {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        m: f64,
    },
}

impl CfCommand {
    pub fn name(&self) -> &'static str {
        match self {
            CfCommand::Expand { .. } => "expand",
            CfCommand::Convergents { .. } => "convergents",
            CfCommand::Ostrowski { .. } => "ostrowski",
            CfCommand::Stat { .. } => "stat",
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn run(cmd: &CfCommand, run: &mut Run) -> Result<bool> {
    match cmd {
        CfCommand::Expand { alpha } => {
            run.param("alpha", alpha);
            let cf = alpha.cf_strict()?;
            run.param("alpha_quotients", join(cf.quotients()));
            run.write_json("cf.json", &cf)?;
            println!("{}", join(cf.quotients()));
        }
        CfCommand::Convergents { alpha } => {
            run.param("alpha", alpha);
            let cf = alpha.cf()?;
            run.param("alpha_quotients", join(cf.quotients()));
            let mut csv = Csv::new(&["n", "a_next", "p", "q", "lower_bound", "upper_bound"]);
            for n in 0..cf.depth() {
                let (lo, hi) = cf.approx_error_bounds(n)?;
                csv.row([
                    n.to_string(),
                    cf.a(n + 1).to_string(),
                    cf.p()[n].to_string(),
                    cf.q()[n].to_string(),
                    fmt_ratio(&lo),
                    fmt_ratio(&hi),
                ]);
            }
            let path = run.output("convergents.csv")?;
            csv.write(&path)?;
            println!("{}", path.display());
        }
        CfCommand::Ostrowski { alpha, n } => {
            run.param("alpha", alpha);
            run.param("n", n.to_string());
            let cf = alpha.cf()?;
            run.param("alpha_quotients", join(cf.quotients()));
            let exp = ostrowski_expand(n, &cf)?;
            run.write_json("ostrowski.json", &exp)?;
            println!("{}", join(&exp.digits));
        }
        CfCommand::Stat { alpha, s, m } => {
            run.param("alpha", alpha);
            run.param("s", s);
            run.param("m", m);
            let cf = alpha.cf()?;
            run.param("alpha_quotients", join(cf.quotients()));
            println!("{}", fmt_f64(cf.cfsum_statistic(*s, *m)?));
        }
    }
    Ok(true)
}
