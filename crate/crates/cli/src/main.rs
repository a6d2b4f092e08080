//! `dduet` — config-driven driver for the Zakharov / Klein-Gordon-Schrödinger
//! numerical laboratory.
//!
//! Subcommands:
//!
//! * `run <config.toml>`    — globalized simulation, CSV + JSON + checkpoint
//! * `sweep <config.toml>`  — trilinear exponent sweep, CSV table
//! * `verify <checkpoint>`  — recompute state invariants
//! * `info <checkpoint>`    — print header and norms
//!
//! Exit codes: 0 ok, 1 invariant violation (`verify`), 2 config/schema
//! error, 3 solver failed to contract, 4 step-size underflow, 5 io error.
//! The output directory is the `--out-dir` flag, else `DDUET_OUT_DIR`,
//! else the working directory.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod checkpoint;
mod config;
mod runner;

#[derive(Debug)]
pub enum CliError {
    Schema(String),
    NoContraction(String),
    StepUnderflow(String),
    Io(String),
    Invariant(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Schema(_) => 2,
            CliError::NoContraction(_) => 3,
            CliError::StepUnderflow(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::NoContraction(m) => write!(f, "no contraction: {m}"),
            CliError::StepUnderflow(m) => write!(f, "step underflow: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "dduet", version, about = "Zakharov / Klein-Gordon-Schrödinger lab driver")]
struct Cli {
    /// Output directory (overrides DDUET_OUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a globalized zakharov or kgs simulation from a TOML config.
    Run { config: PathBuf },
    /// Run a trilinear-form exponent sweep from a TOML config.
    Sweep { config: PathBuf },
    /// Reload a checkpoint and recompute its invariants.
    Verify { checkpoint: PathBuf },
    /// Print checkpoint header fields and norms.
    Info { checkpoint: PathBuf },
}

fn load_config(path: &Path) -> Result<config::RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    config::parse_config(&text).map_err(|e| CliError::Schema(e.to_string()))
}

fn cmd_run(path: &Path, out_dir: Option<PathBuf>, want_sweep: bool) -> Result<(), CliError> {
    let cfg = load_config(path)?;
    match (&cfg, want_sweep) {
        (config::RunConfig::Simulation(_), false) | (config::RunConfig::Sweep(_), true) => {}
        (config::RunConfig::Sweep(_), false) => {
            return Err(CliError::Schema(
                "this is a sweep config; use the `sweep` subcommand".into(),
            ))
        }
        (config::RunConfig::Simulation(_), true) => {
            return Err(CliError::Schema(
                "this is a simulation config; use the `run` subcommand".into(),
            ))
        }
    }
    runner::execute(&cfg, &runner::resolve_out_dir(out_dir))
}

fn cmd_verify(path: &Path) -> Result<(), CliError> {
    let state = checkpoint::load_checkpoint(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let report = checkpoint::verify_state(&state);
    println!("system:              {}", report.system);
    println!("time:                {}", report.time);
    println!("values finite:       {}", report.finite);
    println!("parseval residual:   {:.3e}", report.parseval_residual);
    println!("round-trip residual: {:.3e}", report.round_trip_residual);
    println!("mass:                {:.17e}", report.mass);
    println!("wave norm:           {:.17e}", report.wave_norm);
    match report.hamiltonian {
        Some(h) => println!("hamiltonian:         {h:.17e}"),
        None => println!("hamiltonian:         undefined for this state"),
    }
    if report.passed() {
        println!("verify: ok");
        Ok(())
    } else {
        Err(CliError::Invariant("stored state fails its invariants".into()))
    }
}

fn cmd_info(path: &Path) -> Result<(), CliError> {
    let state = checkpoint::load_checkpoint(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    match &state {
        checkpoint::CheckpointState::Zakharov(s) => {
            println!("system:    zakharov");
            println!("grid:      {} points, period {}", s.grid().n_points(), s.grid().period());
            println!("coupling:  {}", s.coupling);
            println!("time:      {}", s.time);
            println!("mass:      {:.6e}", dduet_core::mass(&s.u));
            println!("w-norm:    {:.6e}", s.wave.w_norm());
        }
        checkpoint::CheckpointState::Kgs(s) => {
            let shape = s.grid().shape();
            let periods = s.grid().periods();
            println!("system:    kgs");
            println!("grid:      {}x{}x{} points", shape[0], shape[1], shape[2]);
            println!("periods:   {:?}", periods);
            println!(
                "couplings: alpha = {}, beta = {}, gamma = {}",
                s.couplings.alpha, s.couplings.beta, s.couplings.gamma
            );
            println!("time:      {}", s.time);
            println!("mass:      {:.6e}", dduet_core::mass(&s.u));
            println!("g-norm:    {:.6e}", s.wave.g_norm());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => cmd_run(config, cli.out_dir.clone(), false),
        Command::Sweep { config } => cmd_run(config, cli.out_dir.clone(), true),
        Command::Verify { checkpoint } => cmd_verify(checkpoint),
        Command::Info { checkpoint } => cmd_info(checkpoint),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dduet: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
