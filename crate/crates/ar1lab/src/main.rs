//! `ar1lab` — batch front door for the AR(1) persistence laboratory.
//!
//! One TOML config describes the chain, the grid, and the pipeline
//! parameters; each subcommand drives one pipeline and drops
//! machine-readable artifacts (JSON scalars, plot-ready CSV) into the
//! output directory. Exit codes: 0 success, 2 config error, 3
//! numerical-domain refusal, 4 non-convergence, 1 other failures.

mod commands;
mod config;
mod errors;
mod report;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use errors::CliError;
use report::Repro;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ar1lab",
    version,
    about = "Persistence laboratory for killed AR(1) chains: eigen, excursion and Monte Carlo \
             pipelines behind one config file"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Assemble the killed kernel and extract rate, quasi-stationary law and harmonic function
    Spectrum(RunArgs),
    /// Locate the decay rate as the root of the excursion-return radius, with a sweep trace
    Renewal(RunArgs),
    /// Simulate killed paths: survival curve with confidence bands and a slope fit
    Mc(RunArgs),
    /// Particle (Fleming-Viot) estimate of the decay rate
    Fv(RunArgs),
    /// Print the closed-form anchor values available for the configured model
    Oracle(RunArgs),
    /// Run every configured pipeline and judge the cross-checks against budgets
    Compare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the TOML run configuration
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory for artifacts (overrides the config)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed (overrides the config)
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for the parallel inner loops (0 = runtime default)
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

/// Everything a command needs: validated config, effective seed,
/// prepared output directory, and the provenance block.
pub struct Context {
    pub cfg: RunConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub repro: Repro,
}

const DEFAULT_SEED: u64 = 1;

fn prepare(command: &'static str, args: &RunArgs) -> Result<Context, CliError> {
    let cfg = config::load(&args.config)?;
    if let Some(n) = args.threads {
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        }
    }
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("artifacts"));
    std::fs::create_dir_all(&out)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", out.display())))?;
    let config_value = serde_json::to_value(&cfg)
        .map_err(|e| CliError::Io(format!("echoing config: {e}")))?;
    let repro = Repro {
        command,
        seed,
        threads_requested: args.threads,
        config: config_value,
    };
    Ok(Context { cfg, seed, out, repro })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Spectrum(a) => commands::spectrum::run(&prepare("spectrum", a)?),
        Cmd::Renewal(a) => commands::renewal::run(&prepare("renewal", a)?),
        Cmd::Mc(a) => commands::mc::run(&prepare("mc", a)?),
        Cmd::Fv(a) => commands::fv::run(&prepare("fv", a)?),
        Cmd::Oracle(a) => commands::oracle::run(&prepare("oracle", a)?),
        Cmd::Compare(a) => commands::compare::run(&prepare("compare", a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.stderr_json());
            ExitCode::from(e.exit_code())
        }
    }
}
