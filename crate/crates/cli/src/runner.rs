//! Drivers behind the `run` and `sweep` subcommands: build the initial
//! state, drive the globalizer, and serialize CSV/JSON/checkpoint outputs.
//!
//! Time-series CSV columns: t, dt, mass, hamiltonian, n_norm, picard_iters,
//! retries. Floats are printed with 17 significant digits so the CSV is a
//! lossless record of the f64 values; identical config and seed reproduce
//! identical bytes. A failed run still writes its partial log and summary
//! before the process exits nonzero.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use dduet_core::field::{Field, Repr, WavePair};
use dduet_core::globalizer::{self, BoundFit, RunFailure, RunLog, SystemKind};
use dduet_core::grid::{Grid, Grid1D, Grid3D};
use dduet_core::kgs::{self, KGSState};
use dduet_core::zakharov::{self, ZakharovState};
use dduet_core::estimates::{exponent_sweep, SweepRow};

use crate::checkpoint::{self, CheckpointState};
use crate::config::{InitialData, RunConfig, SimulationConfig, SweepRunConfig};
use crate::CliError;

/// 17 significant digits: lossless decimal image of an f64.
fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

fn write_run_csv(path: &Path, log: &RunLog) -> Result<(), CliError> {
    let mut out = String::from("t,dt,mass,hamiltonian,n_norm,picard_iters,retries\n");
    for rec in &log.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_f64(rec.time),
            fmt_f64(rec.dt),
            fmt_f64(rec.mass),
            fmt_f64(rec.hamiltonian.unwrap_or(f64::NAN)),
            fmt_f64(rec.n_norm),
            rec.picard_iters,
            rec.retries
        ));
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct Summary {
    system: &'static str,
    status: &'static str,
    seed: u64,
    t_end_requested: f64,
    t_reached: f64,
    steps: usize,
    mass_drift: f64,
    bound_c: Option<f64>,
    bound_pass: bool,
    final_n_norm: f64,
    doubling_times: Vec<f64>,
    wall_time_s: f64,
}

fn write_summary(
    path: &Path,
    cfg: &SimulationConfig,
    log: &RunLog,
    status: &'static str,
    wall: f64,
) -> Result<(), CliError> {
    let fit = globalizer::bound_check(log, log.initial().mass, log.initial().n_norm)
        .unwrap_or(BoundFit { c: f64::INFINITY, pass: false });
    let summary = Summary {
        system: match log.system {
            SystemKind::Zakharov => "zakharov",
            SystemKind::Kgs => "kgs",
        },
        status,
        seed: cfg.seed,
        t_end_requested: cfg.t_end,
        t_reached: log.last().time,
        steps: log.total_steps(),
        mass_drift: log.mass_drift(),
        bound_c: fit.c.is_finite().then_some(fit.c),
        bound_pass: fit.pass,
        final_n_norm: log.last().n_norm,
        doubling_times: log.doubling_times.clone(),
        wall_time_s: wall,
    };
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Io(format!("summary serialization: {e}")))?;
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn build_zakharov(cfg: &SimulationConfig) -> Result<ZakharovState, CliError> {
    let grid = Grid1D::new(cfg.grid_n[0], cfg.grid_length[0]);
    let state = match &cfg.initial {
        InitialData::Zero => ZakharovState::new(
            0.0,
            Field::zeros(&grid, Repr::Spectral),
            WavePair::zeros(&grid, Repr::Spectral),
        ),
        InitialData::Soliton { eta, speed, center } => {
            zakharov::soliton(*eta, *speed, *center, &grid)
                .map_err(|e| CliError::Schema(format!("initial data: {e}")))?
        }
        InitialData::LowRegularity { amplitude } => {
            zakharov::low_regularity_state(&grid, cfg.seed, *amplitude)
        }
        InitialData::Checkpoint { path } => {
            let s = checkpoint::load_zakharov(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if !s.grid().same_grid(&grid) {
                return Err(CliError::Schema(
                    "checkpoint grid differs from the configured grid".into(),
                ));
            }
            s
        }
        InitialData::PlaneWave { .. } => unreachable!("rejected by config validation"),
    };
    Ok(state.with_coupling(cfg.coupling_sign))
}

fn build_kgs(cfg: &SimulationConfig) -> Result<KGSState, CliError> {
    let grid = Grid3D::new(cfg.grid_n, cfg.grid_length);
    match &cfg.initial {
        InitialData::Zero => Ok(KGSState::new(
            0.0,
            Field::zeros(&grid, Repr::Spectral),
            WavePair::zeros(&grid, Repr::Spectral),
            cfg.couplings,
        )),
        InitialData::PlaneWave { amplitude, wave_vector } => {
            kgs::plane_wave(*amplitude, *wave_vector, &grid, cfg.couplings)
                .map_err(|e| CliError::Schema(format!("initial data: {e}")))
        }
        InitialData::LowRegularity { amplitude } => {
            Ok(kgs::low_regularity_state(&grid, cfg.seed, *amplitude, cfg.couplings))
        }
        InitialData::Checkpoint { path } => {
            let s = checkpoint::load_kgs(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if !s.grid().same_grid(&grid) {
                return Err(CliError::Schema(
                    "checkpoint grid differs from the configured grid".into(),
                ));
            }
            Ok(s)
        }
        InitialData::Soliton { .. } => unreachable!("rejected by config validation"),
    }
}

fn finish_run(
    cfg: &SimulationConfig,
    out_dir: &Path,
    outcome: Result<(RunLog, CheckpointState), RunFailure>,
    wall: f64,
) -> Result<(), CliError> {
    let csv = out_dir.join(&cfg.output.csv);
    let summary = out_dir.join(&cfg.output.summary);
    match outcome {
        Ok((log, state)) => {
            write_run_csv(&csv, &log)?;
            write_summary(&summary, cfg, &log, "ok", wall)?;
            let ckpt = out_dir.join(&cfg.output.checkpoint);
            checkpoint::save_checkpoint(&state, &ckpt)
                .map_err(|e| CliError::Io(format!("{}: {e}", ckpt.display())))?;
            println!(
                "run complete: t = {}, {} steps, mass drift {:.3e}",
                log.last().time,
                log.total_steps(),
                log.mass_drift()
            );
            Ok(())
        }
        Err(failure) => {
            // Post-mortem artifacts for the partial run.
            write_run_csv(&csv, &failure.log)?;
            let status = match failure.kind {
                globalizer::RunErrorKind::NoContraction => "no_contraction",
                globalizer::RunErrorKind::StepUnderflow => "step_underflow",
            };
            write_summary(&summary, cfg, &failure.log, status, wall)?;
            Err(match failure.kind {
                globalizer::RunErrorKind::NoContraction => {
                    CliError::NoContraction(failure.message)
                }
                globalizer::RunErrorKind::StepUnderflow => {
                    CliError::StepUnderflow(failure.message)
                }
            })
        }
    }
}

pub fn execute_simulation(cfg: &SimulationConfig, out_dir: &Path) -> Result<(), CliError> {
    let start = Instant::now();
    match cfg.system {
        SystemKind::Zakharov => {
            let s0 = build_zakharov(cfg)?;
            let outcome = globalizer::run(&s0, cfg.t_end, &cfg.schedule, &cfg.picard)
                .map(|(log, s)| (log, CheckpointState::Zakharov(s)));
            finish_run(cfg, out_dir, outcome, start.elapsed().as_secs_f64())
        }
        SystemKind::Kgs => {
            let s0 = build_kgs(cfg)?;
            let outcome = globalizer::run(&s0, cfg.t_end, &cfg.schedule, &cfg.picard)
                .map(|(log, s)| (log, CheckpointState::Kgs(s)));
            finish_run(cfg, out_dir, outcome, start.elapsed().as_secs_f64())
        }
    }
}

fn kind_label(row: &SweepRow) -> &'static str {
    match row.kind {
        dduet_core::estimates::FormKind::SchrodingerBracket => "schrodinger_bracket",
        dduet_core::estimates::FormKind::SchrodingerHomogeneous => "schrodinger_homogeneous",
        dduet_core::estimates::FormKind::WaveCoupling => "wave_coupling",
    }
}

pub fn execute_sweep(cfg: &SweepRunConfig, out_dir: &Path) -> Result<(), CliError> {
    let rows = exponent_sweep(&cfg.sweep);
    let mut out =
        String::from("kind,b,b1,c1,exponent_sum,lattice_size,family,max_ratio,above_threshold\n");
    for row in &rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            kind_label(row),
            fmt_f64(row.b),
            fmt_f64(row.b1),
            fmt_f64(row.c1),
            fmt_f64(row.exponent_sum),
            row.lattice_size,
            row.family.label(),
            fmt_f64(row.max_ratio),
            row.above_threshold
        ));
    }
    let path = out_dir.join(&cfg.csv);
    std::fs::write(&path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    println!("sweep complete: {} rows -> {}", rows.len(), path.display());
    Ok(())
}

pub fn execute(cfg: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    match cfg {
        RunConfig::Simulation(sim) => execute_simulation(sim, out_dir),
        RunConfig::Sweep(sw) => execute_sweep(sw, out_dir),
    }
}

/// Resolve the output directory: flag wins over `DDUET_OUT_DIR`, which wins
/// over the current directory.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("DDUET_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
