//! Command line front end.
//!
//! Every subcommand accepts the same option set; flags override values read
//! from a JSON file given with `--config`. Exit status is 0 on success, 2
//! for invalid usage or configuration and 3 for unreadable or malformed
//! data.

mod config;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{
    parse_family, parse_grid, parse_thetas, Command, ConstraintSpec, GridSpec, Method, RunConfig,
    ThetaSpec, SEED_ENV,
};
pub use run::{run, RunOutcome};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "fdrcurve",
    version,
    about = "FDR-curve control for location families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run the generalized BH procedure on data
    Test(Flags),
    /// Evaluate q and q* on a grid (no data needed)
    Qstar(Flags),
    /// Monte Carlo estimate of the FDR curve
    Simulate(Flags),
    /// Choose a subset of constraints whose q* controls every constraint
    SelectConstraints(Flags),
    /// Per-gene two-group summaries of an expression matrix
    Summarize(Flags),
}

impl CliCommand {
    fn split(self) -> (Command, Flags) {
        match self {
            CliCommand::Test(f) => (Command::Test, f),
            CliCommand::Qstar(f) => (Command::Qstar, f),
            CliCommand::Simulate(f) => (Command::Simulate, f),
            CliCommand::SelectConstraints(f) => (Command::SelectConstraints, f),
            CliCommand::Summarize(f) => (Command::Summarize, f),
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// JSON run configuration; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Target constraints `theta:q[,theta:q...]`
    #[arg(long, allow_hyphen_values = true)]
    pub constraints: Option<String>,

    /// gaussian | gaussian:<scale> | logistic | tabulated:<csv> | tabulated-monotone:<csv>
    #[arg(long)]
    pub family: Option<String>,

    /// Number of hypotheses (qstar / select-constraints without --scales)
    #[arg(long)]
    pub m: Option<usize>,

    /// Evaluation grid `start:stop:count`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,

    /// Master seed for simulation [env: FDRCURVE_SEED]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Monte Carlo replications
    #[arg(long)]
    pub replications: Option<usize>,

    /// True locations for simulation, `value` or `count*value` items
    #[arg(long, allow_hyphen_values = true)]
    pub thetas: Option<String>,

    /// Expression matrix (genes x samples, comma or tab delimited)
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Per-sample group labels `A,A,B,B,...`
    #[arg(long)]
    pub groups: Option<String>,

    /// Two-column `sample_id,label` file
    #[arg(long)]
    pub groups_file: Option<PathBuf>,

    /// Statistics CSV with an `x` column and optional `sigma_hat`
    #[arg(long)]
    pub statistics: Option<PathBuf>,

    /// CSV with a `sigma_hat` column giving per-hypothesis scales
    #[arg(long)]
    pub scales: Option<PathBuf>,

    /// effect-size | snr
    #[arg(long)]
    pub mode: Option<String>,

    /// Reverse the default orientation of gene summaries
    #[arg(long)]
    pub flip_sign: bool,

    /// Constraint selection: minimal | greedy
    #[arg(long)]
    pub method: Option<String>,

    /// Known rejection count to compare against; reported in the manifest
    #[arg(long)]
    pub reference_rejections: Option<usize>,

    /// Output directory; without it the main table goes to stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs, and maps the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_VALIDATION,
            };
        }
    };
    let (command, flags) = cli.command.split();
    let result = RunConfig::from_flags(command, flags).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            for path in &outcome.written {
                log::info!("wrote {}", path.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_DATA
    }
}
