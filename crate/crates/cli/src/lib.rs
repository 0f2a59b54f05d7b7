//! The `alphaproj` command line.

// Negated comparisons are used so that NaN fails tolerance checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod input;
pub mod report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_INFEASIBLE: i32 = 5;
pub const EXIT_NO_CONVERGENCE: i32 = 6;
pub const EXIT_DIMENSION_TOO_HIGH: i32 = 7;
pub const EXIT_NO_LATTICE_POINT: i32 = 8;
pub const EXIT_REPRODUCTION: i32 = 9;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "alphaproj",
    version,
    about = "Relative alpha-entropy projections onto linear families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Auto,
    Parametric,
    Descent,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print I_alpha(P,Q), the Renyi entropy of P and KL(P||Q).
    Divergence {
        file: PathBuf,
        /// P as a comma-separated list.
        #[arg(long, conflicts_with = "p_file")]
        p: Option<String>,
        /// File holding P as a list of numbers.
        #[arg(long)]
        p_file: Option<PathBuf>,
    },
    /// Project Q onto the family, certify and verify the result.
    Project {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        solver: Solver,
        /// Random family members used for the Pythagorean check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include wall-clock time (the report is then no longer reproducible byte for byte).
        #[arg(long)]
        timing: bool,
    },
    /// Brute-force lattice search over the feasible set.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        /// A report from `project` to compare against.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Project for each alpha and print CSV.
    Sweep {
        file: PathBuf,
        /// `start:step:stop` or a comma-separated list.
        #[arg(long, allow_hyphen_values = true)]
        alphas: String,
        /// Solve rows concurrently (output order is unchanged).
        #[arg(long)]
        parallel: bool,
    },
    /// Reproduce the alpha = 2 counterexample with Supp(P*) smaller than Supp(L).
    Counterexample,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match cli.command {
        Command::Divergence { file, p, p_file } => {
            commands::divergence(&file, p.as_deref(), p_file.as_deref(), out)
        }
        Command::Project {
            file,
            solver,
            samples,
            seed,
            out: out_path,
            timing,
        } => commands::project(
            &file,
            &commands::ProjectArgs {
                solver,
                samples,
                seed,
                out: out_path,
                timing,
            },
            out,
        ),
        Command::Oracle { file, step, report } => {
            commands::oracle(&file, step, report.as_deref(), out)
        }
        Command::Sweep {
            file,
            alphas,
            parallel,
        } => commands::sweep(&file, &alphas, parallel, out),
        Command::Counterexample => commands::counterexample(out),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if !e.message.is_empty() {
                let _ = writeln!(err, "error: {}", e.message);
            }
            e.code
        }
    }
}
