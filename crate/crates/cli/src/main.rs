//! `volterra` — classification, norms, operator criteria, and sweeps for
//! radial weights on the unit disc.

mod commands;
mod json;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "volterra",
    about = "Radial-weight calculus and Volterra operator criteria on the unit disc",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Exit nonzero when the result is inconclusive-only
    #[arg(long, global = true)]
    strict: bool,

    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for random corpora
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Doubling-class membership and growth exponents of a weight
    Classify {
        /// Weight spec, e.g. std:alpha=1 or derived:dualw:p=0.5:base=std:alpha=0
        #[arg(long)]
        weight: String,
        /// Ladder depth in octaves of 1-r
        #[arg(long)]
        grid_depth: Option<u32>,
        /// Ladder nodes per octave
        #[arg(long)]
        grid_refine: Option<u32>,
    },
    /// Norm table of a polynomial in every space
    Norm {
        /// Polynomial: `poly:c0,c1,...`, a bare coefficient list, or a
        /// csv/json file path
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value = "std:alpha=0")]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Evaluate one criterion and render a verdict
    Criterion {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        weight: String,
        /// Symbol polynomial (required by tg / tg-xspaces)
        #[arg(long)]
        symbol: Option<String>,
        /// trivial-dirichlet | trivial-bergman | tg | tg-xspaces | pililo | embedding
        #[arg(long, default_value = "trivial-dirichlet")]
        which: String,
        #[arg(long)]
        grid_depth: Option<u32>,
        /// Truncation override (p = 1 double sums)
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Criterion matrix over a p (and optionally alpha) grid
    Sweep {
        /// p range `start:end:step` or a single value
        #[arg(long)]
        p: String,
        /// Weight spec; parameter values may be linear expressions in p,
        /// e.g. std:alpha=2p-2
        #[arg(long)]
        weight: Option<String>,
        /// Standard-weight alpha range `start:end:step` (crossed with p)
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long, default_value = "trivial-dirichlet")]
        which: String,
        #[arg(long)]
        grid_depth: Option<u32>,
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Run the invariant verification suite
    Verify {
        /// weights | classify | spaces | kernels | criteria | dyadic | volterra | all
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if cli.strict && outcome.inconclusive_only {
                eprintln!("strict: result is inconclusive-only");
                ExitCode::from(3)
            } else if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub struct Outcome {
    pub inconclusive_only: bool,
    pub failed: bool,
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let (text, outcome) = match &cli.cmd {
        Cmd::Classify {
            weight,
            grid_depth,
            grid_refine,
        } => commands::cmd_classify(weight, *grid_depth, *grid_refine, cli.format, cli.seed)?,
        Cmd::Norm { symbol, weight, p } => {
            commands::cmd_norm(symbol, weight, *p, cli.format, cli.seed)?
        }
        Cmd::Criterion {
            p,
            weight,
            symbol,
            which,
            grid_depth,
            trunc,
        } => commands::cmd_criterion(
            *p,
            weight,
            symbol.as_deref(),
            which,
            *grid_depth,
            *trunc,
            cli.format,
            cli.seed,
        )?,
        Cmd::Sweep {
            p,
            weight,
            alpha,
            symbol,
            which,
            grid_depth,
            trunc,
        } => commands::cmd_sweep(
            p,
            weight.as_deref(),
            alpha.as_deref(),
            symbol.as_deref(),
            which,
            *grid_depth,
            *trunc,
            cli.format,
            cli.seed,
        )?,
        Cmd::Verify { suite } => commands::cmd_verify(suite, cli.seed, cli.format)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(outcome)
}
