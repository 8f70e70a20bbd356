//! `ssrk`: single runs, sweeps, closure fuzzing and configuration checks.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "ssrk",
    version,
    about = "Self-stabilizing ranking protocol simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print its report as JSON.
    Run(RunArgs),
    /// Run an experiment grid and write a CSV table.
    Sweep(SweepArgs),
    /// Check that safe configurations stay safe under every interaction.
    FuzzClosure(FuzzArgs),
    /// Validate a snapshot, an experiment spec, or a constants file.
    CheckConfig(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    rho: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Starting-configuration generator.
    #[arg(long, default_value = "uniform_random")]
    init: String,
    #[arg(long, default_value_t = 100_000_000)]
    max_interactions: u64,
    /// JSON file with constant overrides.
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Write the final configuration here.
    #[arg(long)]
    snapshot_out: Option<PathBuf>,
    /// Start from this configuration instead of a generator.
    #[arg(long, conflicts_with = "init")]
    snapshot_in: Option<PathBuf>,
    /// For `--init initialized`: distinct ranks instead of a forced collision.
    #[arg(long)]
    distinct_ranks: bool,
    /// Interactions between safe-set checks (default n).
    #[arg(long)]
    stride: Option<u64>,
    /// Confirmation tail after safe entry.
    #[arg(long, default_value_t = ssrk_core::harness::DEFAULT_TAIL)]
    tail: u64,
    #[arg(long, default_value = "baseline")]
    finder: String,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Output CSV; overrides the spec's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "SSRK_DEFAULT_JOBS", default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    rho: u32,
    #[arg(long)]
    configs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Self-test: corrupt every transition so the fuzzer must fail.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    snapshot: Option<PathBuf>,
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Population size; defaults to the snapshot's length.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    rho: Option<u32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", line.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::FuzzClosure(a) => commands::fuzz_closure(a),
        Command::CheckConfig(a) => commands::check_config(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}: {}", e.kind, e.message.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
