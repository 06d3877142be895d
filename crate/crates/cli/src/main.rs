// SPDX-License-Identifier: Apache-2.0

//! `bgpmv`: verify BGP route policies against a network-wide property.
//!
//! Exit status is 0 when everything passes (or the property holds), 1 when a
//! check fails or the property is violated, and 2 on usage or input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "bgpmv",
    version,
    about = "Modular verification of BGP route policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate and discharge every local check.
    Verify(VerifyArgs),
    /// Compute reachable route sets directly and test the property on them.
    Oracle(OracleArgs),
    /// Write a synthetic full-mesh network and spec.
    Gen(GenArgs),
    /// Re-check only what changed since a previous report.
    Incremental(IncrementalArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct Inputs {
    /// Network file (JSON).
    #[arg(long)]
    pub network: PathBuf,
    /// Spec file with the property and invariants (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Worker threads for discharging checks.
    #[arg(long, default_value_t = default_jobs(), value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Paths longer than this are widened during the fixpoint; defaults to
    /// the node count plus two.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub aspath_bound: Option<u32>,
    /// Write per-location set statistics and a sample route to this file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Also explore bounded traces and cross-check them against the fixpoint.
    #[arg(long)]
    pub traces: bool,
    /// Event bound for `--traces`.
    #[arg(long, default_value_t = 12, requires = "traces")]
    pub max_events: usize,
    /// JSON list of routes announced by every external neighbour in
    /// `--traces` mode; defaults to a single empty route for 0.0.0.0/0.
    #[arg(long, requires = "traces")]
    pub seeds: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Number of routers (at least 2).
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the network; defaults to `mesh<N>.network.json`.
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Where to write the spec; defaults to `mesh<N>.spec.json`.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct IncrementalArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// JSON report from an earlier `verify` or `incremental` run.
    #[arg(long)]
    pub prev_report: PathBuf,
    /// Network the previous report was computed for.
    #[arg(long)]
    pub prev_network: PathBuf,
    /// Spec the previous report was computed for; defaults to `--spec`.
    #[arg(long)]
    pub prev_spec: Option<PathBuf>,
    #[arg(long, default_value_t = default_jobs(), value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
}

fn default_jobs() -> u32 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u32)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Verify(a) => commands::verify(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Gen(a) => commands::gen(&a),
        Command::Incremental(a) => commands::incremental(&a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
