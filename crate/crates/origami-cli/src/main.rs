//! Command-line front end for the fold machinery.
//!
//! One binary, five subcommands:
//!
//! * `fold` — run the greedy coarsening on a loss-matrix file and write the
//!   fold tree, partition, and folded matrix;
//! * `gap` — score an existing fold tree's cumulative H-entropy gap over a
//!   probe;
//! * `inspect` — dump the objective matrix of a single fold decision;
//! * `surrogate` — train / evaluate / latency-bench the amortized objective;
//! * `bench` — the seeded pipeline, active-learning, and oracle-agreement
//!   benchmarks.
//!
//! Every flag can come from a JSON config file (`--config`); explicit flags
//! win. Exit codes: 0 success, 2 malformed input, 3 bad configuration,
//! 4 numerical failure.

mod commands;
mod config;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "origami", version, about = "Decision-aware outcome folding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Fold(commands::fold::FoldArgs),
    Gap(commands::gap::GapArgs),
    Inspect(commands::inspect::InspectArgs),
    #[command(subcommand)]
    Surrogate(commands::surrogate::SurrogateCmd),
    #[command(subcommand)]
    Bench(commands::bench::BenchCmd),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fold(args) => commands::fold::run(args),
        Command::Gap(args) => commands::gap::run(args),
        Command::Inspect(args) => commands::inspect::run(args),
        Command::Surrogate(cmd) => commands::surrogate::run(cmd),
        Command::Bench(cmd) => commands::bench::run(cmd),
    };
    match result {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

/// CLI-level error: either a library error or a configuration problem.
#[derive(Debug)]
pub enum CliError {
    Lib(origami::Error),
    Config(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<origami::Error> for CliError {
    fn from(e: origami::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(origami::Error::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Lib(origami::Error::Json(e))
    }
}

impl CliError {
    /// Stable exit-code contract: 2 input, 3 config, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        use origami::Error as E;
        match self {
            CliError::Config(_) => 3,
            CliError::Lib(e) => match e {
                E::Parse { .. }
                | E::Io(_)
                | E::Csv(_)
                | E::Json(_)
                | E::InvalidProbVector(_)
                | E::InvalidLossMatrix(_)
                | E::DimensionMismatch { .. }
                | E::IndexOutOfRange { .. } => 2,
                E::UnsatisfiableStop(_)
                | E::InvalidArgument(_)
                | E::MissingWeightContext
                | E::FoldSourceEqualsTarget(_)
                | E::ShapeMismatch(_) => 3,
                E::LpInfeasible | E::LpUnbounded | E::Divergence(_) => 4,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
