use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use sns_cli::commands::{self, EncodeOptions, RunOptions};
use sns_core::engine::{Scheduler, DEFAULT_MAX_STEPS};

#[derive(Parser)]
#[command(
    name = "sns",
    version,
    about = "Run and inspect semantic numeration systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a file; diagnostics go to stderr.
    Check { path: PathBuf },
    /// Run to a fixpoint and print the final cardinals.
    Run {
        path: PathBuf,
        /// sync, seq or perm:SEED
        #[arg(long, default_value = "sync")]
        scheduler: Scheduler,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Write the step-by-step trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Print the classification features and entity roles.
    Classify { path: PathBuf },
    /// Encode a value on a chain and decode it back.
    Encode {
        #[arg(long)]
        value: BigUint,
        #[arg(long, value_delimiter = ',', required = true)]
        radices: Vec<BigUint>,
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<BigUint>>,
        /// Number of positions; a single radix or rate is repeated to fit.
        #[arg(long)]
        width: Option<usize>,
    },
    /// Export a Graphviz digraph.
    Dot {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let code = match cli.command {
        Command::Check { path } => commands::check(&path, &mut err),
        Command::Run {
            path,
            scheduler,
            max_steps,
            trace,
            quiet,
        } => {
            let opts = RunOptions {
                scheduler,
                max_steps,
                trace: trace.as_deref(),
                quiet,
            };
            commands::run(&path, &opts, &mut out, &mut err)
        }
        Command::Classify { path } => commands::classify(&path, &mut out, &mut err),
        Command::Encode {
            value,
            radices,
            rates,
            width,
        } => {
            let opts = EncodeOptions {
                value,
                radices,
                rates,
                width,
            };
            commands::encode_value(&opts, &mut out, &mut err)
        }
        Command::Dot { path, out: target } => {
            commands::dot(&path, target.as_deref(), &mut out, &mut err)
        }
    };
    ExitCode::from(code)
}
