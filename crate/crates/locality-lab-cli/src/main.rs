//! `locality-lab` — reproducible experiment runner.
//!
//! Every command reads its parameters from flags or `--config file.json`
//! (flags win field by field), derives all randomness from one master seed,
//! prints the primary JSON report to stdout, and optionally mirrors it to
//! `PREFIX.json` / `PREFIX.csv` via `--out PREFIX`. Identical configs
//! produce byte-identical reports.
//!
//! Exit codes: 0 success; 1 config/schema violation; 2 scale-guard or
//! execution failure. Failures emit a one-line JSON error record on stderr.

mod commands;
mod spec;

use clap::{Parser, Subcommand};
use serde::Serialize;
use std::process::ExitCode;

use commands::{
    DerandomizeSearchArgs, EstimateFailureArgs, GenGraphArgs, LocalizeArgs, LowerboundArgs,
    PermTestArgs, RunLcaArgs, RunLocalArgs, RunPartreeArgs, TwoPathGapArgs,
};

#[derive(Debug, Parser)]
#[command(
    name = "locality-lab",
    version,
    about = "Experiment runner for centralised local graph algorithms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a graph, report its structure, optionally write the file format.
    GenGraph(GenGraphArgs),
    /// Run a message-passing algorithm on every vertex.
    RunLocal(RunLocalArgs),
    /// Run a probe routine as one independent tree per vertex.
    RunPartree(RunPartreeArgs),
    /// Run a probe routine as an LCA over a query stream with seed and state.
    RunLca(RunLcaArgs),
    /// Run an LCA inside seeded relabelled worlds and certify locality.
    Localize(LocalizeArgs),
    /// Estimate the simulation failure rate against its proven bound.
    EstimateFailure(EstimateFailureArgs),
    /// Exhaustively search the permutation space for an always-good seed.
    DerandomizeSearch(DerandomizeSearchArgs),
    /// Compare probe-transcript distributions on copies vs. double cover.
    Lowerbound(LowerboundArgs),
    /// Measure a permutation family against its uniformity contract.
    PermTest(PermTestArgs),
    /// Measure the state vs. stateless probe gap on two-path instances.
    TwoPathGap(TwoPathGapArgs),
}

/// Failures are split by exit code: schema violations (1) are config
/// mistakes the caller can fix; guard failures (2) are runs the harness
/// refused or aborted.
#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Guard(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Guard(_) => "guard",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Schema(m) | CliError::Guard(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 1,
            CliError::Guard(_) => 2,
        }
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

fn emit_error(err: &CliError) {
    let record = ErrorRecord {
        error: ErrorBody {
            kind: err.kind(),
            message: err.message(),
        },
    };
    eprintln!(
        "{}",
        serde_json::to_string(&record).expect("error records always serialize")
    );
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::GenGraph(args) => commands::gen_graph(args),
        Command::RunLocal(args) => commands::run_local_cmd(args),
        Command::RunPartree(args) => commands::run_partree_cmd(args),
        Command::RunLca(args) => commands::run_lca_cmd(args),
        Command::Localize(args) => commands::localize(args),
        Command::EstimateFailure(args) => commands::estimate_failure_cmd(args),
        Command::DerandomizeSearch(args) => commands::derandomize_search_cmd(args),
        Command::Lowerbound(args) => commands::lowerbound(args),
        Command::PermTest(args) => commands::perm_test(args),
        Command::TwoPathGap(args) => commands::two_path_gap(args),
    }
}

fn main() -> ExitCode {
    locality_lab::par::init_thread_cap_from_env();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // Anything else is a flag-level schema violation.
            let err = CliError::Schema(e.to_string());
            emit_error(&err);
            return ExitCode::from(err.exit_code());
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            emit_error(&err);
            ExitCode::from(err.exit_code())
        }
    }
}
