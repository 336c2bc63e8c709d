//! `hifbe`: envelope sampling, descent runs, property checks and figure data.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_UNDEFINED: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "hifbe", version, about = "High-order forward-backward envelopes of composite problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Shared {
    /// Catalog problem id.
    #[arg(long)]
    pub problem: Option<String>,
    /// Order of the proximity term, in (1, 2].
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write an SVG plot here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample phi and its envelope on a uniform grid.
    Envelope {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, allow_hyphen_values = true)]
        xmin: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        xmax: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the descent iteration from a starting point.
    Solve {
        #[command(flatten)]
        shared: Shared,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite of property checks and write a JSON array of reports.
    Check {
        #[command(flatten)]
        shared: Shared,
        /// all, envelope, calm, regularity, majorant, kappa or algo.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data and plot behind one figure (1a, 1b, 2a, 2b, 2c).
    Repro {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        figure: Option<String>,
        #[arg(long)]
        outdir: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check,
    Undefined(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Check => EXIT_CHECK,
            Failure::Undefined(_) => EXIT_UNDEFINED,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl From<hifbe::Error> for Failure {
    fn from(e: hifbe::Error) -> Self {
        use hifbe::Error::*;
        match e {
            CatalogMiss { .. } | InvalidConfig(_) | DimensionMismatch { .. } | Capability(_) | GammaTooLarge { .. } => {
                Failure::Usage(e.to_string())
            }
            EnvelopeUndefined { .. } => Failure::Undefined(e.to_string()),
            e => Failure::Solver(e.to_string()),
        }
    }
}

pub fn usage(sub: &str) -> String {
    let mut cmd = Cli::command();
    match cmd.find_subcommand_mut(sub) {
        Some(c) => c.clone().bin_name(format!("hifbe {sub}")).render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HIFBE_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("HIFBE_THREADS must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_threads().and_then(|_| match cli.command {
        Command::Envelope { shared, xmin, xmax, n, out } => commands::envelope(shared, xmin, xmax, n, out),
        Command::Solve { shared, x0, tol, max_iters, out } => commands::solve(shared, x0, tol, max_iters, out),
        Command::Check { shared, suite, out } => commands::check(shared, suite, out),
        Command::Repro { shared, figure, outdir } => commands::repro(shared, figure, outdir),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Check => eprintln!("one or more checks failed"),
                Failure::Undefined(m) => eprintln!("envelope undefined: {m}"),
                Failure::Solver(m) => eprintln!("solver fault: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
