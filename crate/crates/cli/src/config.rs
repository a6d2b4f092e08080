//! Declarative run configuration (TOML).
//!
//! Unknown keys anywhere in the document are schema errors; missing keys
//! fall back to per-system defaults:
//!
//! * zakharov: grid n = 1024, length = 100, schedule γ = β = 2, δ = 1/2
//! * kgs:      grid n = 32³, length = 16π per axis, schedule γ = β = 4, δ = 3/4
//! * both:     c_step = 0.5, min_step = 1e−9, picard M = 16, tol = 1e−10,
//!   max_iter = 50, seed = 0
//!
//! See the README for the full schema and examples.

use std::path::PathBuf;

use serde::Deserialize;

use dduet_core::estimates::{ExponentTriple, FamilyKind, FormKind, SweepConfig};
use dduet_core::globalizer::{ScheduleParams, SystemKind};
use dduet_core::kgs::Couplings;
use dduet_core::PicardParams;

/// Schema violation; the message carries the offending key path.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config schema error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: String,
    seed: Option<u64>,
    t_end: Option<f64>,
    /// Zakharov coupling sign of the n·u term.
    coupling: Option<f64>,
    grid: Option<RawGrid>,
    initial: Option<RawInitial>,
    couplings: Option<RawCouplings>,
    schedule: Option<RawSchedule>,
    picard: Option<RawPicard>,
    output: Option<RawOutput>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrThree<T> {
    One(T),
    Three([T; 3]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Option<OneOrThree<usize>>,
    length: Option<OneOrThree<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    kind: String,
    eta: Option<f64>,
    speed: Option<f64>,
    center: Option<f64>,
    amplitude: Option<f64>,
    wave_vector: Option<[i64; 3]>,
    path: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCouplings {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    gamma: Option<f64>,
    beta: Option<f64>,
    delta: Option<f64>,
    c_step: Option<f64>,
    min_step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPicard {
    substeps: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv: Option<PathBuf>,
    summary: Option<PathBuf>,
    checkpoint: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    kind: Option<String>,
    triples: Option<Vec<[f64; 3]>>,
    lattice_sizes: Option<Vec<usize>>,
    families: Option<Vec<String>>,
    samples_per_family: Option<usize>,
    csv: Option<PathBuf>,
}

/// Initial data selector, after validation.
#[derive(Debug, Clone)]
pub enum InitialData {
    Zero,
    Soliton { eta: f64, speed: f64, center: f64 },
    PlaneWave { amplitude: f64, wave_vector: [i64; 3] },
    LowRegularity { amplitude: f64 },
    Checkpoint { path: PathBuf },
}

#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub checkpoint: PathBuf,
}

/// A validated simulation run.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub system: SystemKind,
    pub seed: u64,
    pub t_end: f64,
    pub grid_n: [usize; 3],
    pub grid_length: [f64; 3],
    pub initial: InitialData,
    pub coupling_sign: f64,
    pub couplings: Couplings,
    pub schedule: ScheduleParams,
    pub picard: PicardParams,
    pub output: OutputPaths,
}

#[derive(Debug, Clone)]
pub struct SweepRunConfig {
    pub sweep: SweepConfig,
    pub csv: PathBuf,
}

#[derive(Debug, Clone)]
pub enum RunConfig {
    Simulation(SimulationConfig),
    Sweep(SweepRunConfig),
}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

const KGS_DEFAULT_LENGTH: f64 = 16.0 * std::f64::consts::PI;

/// Parse and validate a TOML document into a run description.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| err(e.to_string()))?;
    let seed = raw.seed.unwrap_or(0);

    match raw.system.as_str() {
        "zakharov" | "kgs" => {
            let system =
                if raw.system == "zakharov" { SystemKind::Zakharov } else { SystemKind::Kgs };
            if raw.sweep.is_some() {
                return Err(err("[sweep] is only valid for system = \"estimate_sweep\""));
            }
            let (grid_n, grid_length) = resolve_grid(system, raw.grid.as_ref())?;
            let schedule = resolve_schedule(system, raw.schedule.as_ref());
            let picard = resolve_picard(raw.picard.as_ref());
            let couplings = match system {
                SystemKind::Zakharov => {
                    if raw.couplings.is_some() {
                        return Err(err(
                            "[couplings] is a kgs section; zakharov takes the top-level \
                             `coupling` sign",
                        ));
                    }
                    Couplings::unit()
                }
                SystemKind::Kgs => {
                    if raw.coupling.is_some() {
                        return Err(err("`coupling` is a zakharov key; kgs uses [couplings]"));
                    }
                    let rc = raw.couplings.as_ref();
                    Couplings {
                        alpha: rc.and_then(|c| c.alpha).unwrap_or(1.0),
                        beta: rc.and_then(|c| c.beta).unwrap_or(1.0),
                        gamma: rc.and_then(|c| c.gamma).unwrap_or(1.0),
                    }
                }
            };
            let coupling_sign = raw.coupling.unwrap_or(1.0);
            let initial = resolve_initial(system, raw.initial.as_ref(), &grid_length)?;
            let t_end = raw.t_end.ok_or_else(|| err("missing key `t_end`"))?;
            if !t_end.is_finite() || t_end <= 0.0 {
                return Err(err("`t_end` must be positive"));
            }
            let output = raw.output.as_ref();
            Ok(RunConfig::Simulation(SimulationConfig {
                system,
                seed,
                t_end,
                grid_n,
                grid_length,
                initial,
                coupling_sign,
                couplings,
                schedule,
                picard,
                output: OutputPaths {
                    csv: output
                        .and_then(|o| o.csv.clone())
                        .unwrap_or_else(|| PathBuf::from("run.csv")),
                    summary: output
                        .and_then(|o| o.summary.clone())
                        .unwrap_or_else(|| PathBuf::from("summary.json")),
                    checkpoint: output
                        .and_then(|o| o.checkpoint.clone())
                        .unwrap_or_else(|| PathBuf::from("final.ckpt")),
                },
            }))
        }
        "estimate_sweep" => {
            for (present, name) in [
                (raw.grid.is_some(), "[grid]"),
                (raw.initial.is_some(), "[initial]"),
                (raw.schedule.is_some(), "[schedule]"),
                (raw.picard.is_some(), "[picard]"),
                (raw.t_end.is_some(), "t_end"),
                (raw.coupling.is_some(), "coupling"),
                (raw.couplings.is_some(), "[couplings]"),
                (raw.output.is_some(), "[output]"),
            ] {
                if present {
                    return Err(err(format!("{name} is not valid for estimate_sweep")));
                }
            }
            let sw = raw.sweep.as_ref().ok_or_else(|| err("missing [sweep] section"))?;
            let kind = match sw.kind.as_deref().unwrap_or("schrodinger_bracket") {
                "schrodinger_bracket" => FormKind::SchrodingerBracket,
                "schrodinger_homogeneous" => FormKind::SchrodingerHomogeneous,
                "wave_coupling" => FormKind::WaveCoupling,
                other => return Err(err(format!("unknown sweep.kind `{other}`"))),
            };
            let defaults = SweepConfig::default();
            let triples = match &sw.triples {
                None => defaults.triples,
                Some(ts) => ts
                    .iter()
                    .map(|&[b, b1, c1]| ExponentTriple::unchecked(b, b1, c1))
                    .collect(),
            };
            let families = match &sw.families {
                None => defaults.families,
                Some(fs) => fs
                    .iter()
                    .map(|f| match f.as_str() {
                        "gaussian" => Ok(FamilyKind::Gaussian),
                        "characteristic" => Ok(FamilyKind::Characteristic),
                        "random_phase" => Ok(FamilyKind::RandomPhase),
                        other => Err(err(format!("unknown sweep family `{other}`"))),
                    })
                    .collect::<Result<_, _>>()?,
            };
            Ok(RunConfig::Sweep(SweepRunConfig {
                sweep: SweepConfig {
                    kind,
                    triples,
                    lattice_sizes: sw.lattice_sizes.clone().unwrap_or(defaults.lattice_sizes),
                    families,
                    samples_per_family: sw
                        .samples_per_family
                        .unwrap_or(defaults.samples_per_family),
                    seed,
                },
                csv: sw.csv.clone().unwrap_or_else(|| PathBuf::from("sweep.csv")),
            }))
        }
        other => Err(err(format!(
            "unknown system `{other}` (expected zakharov, kgs, or estimate_sweep)"
        ))),
    }
}

fn resolve_grid(
    system: SystemKind,
    raw: Option<&RawGrid>,
) -> Result<([usize; 3], [f64; 3]), ConfigError> {
    let (default_n, default_l) = match system {
        SystemKind::Zakharov => (1024, 100.0),
        SystemKind::Kgs => (32, KGS_DEFAULT_LENGTH),
    };
    let n = match raw.and_then(|g| g.n.as_ref()) {
        None => [default_n; 3],
        Some(OneOrThree::One(n)) => [*n; 3],
        Some(OneOrThree::Three(ns)) => {
            if system == SystemKind::Zakharov {
                return Err(err("zakharov grids are one-dimensional; give a single `n`"));
            }
            *ns
        }
    };
    let length = match raw.and_then(|g| g.length.as_ref()) {
        None => [default_l; 3],
        Some(OneOrThree::One(l)) => [*l; 3],
        Some(OneOrThree::Three(ls)) => {
            if system == SystemKind::Zakharov {
                return Err(err("zakharov grids are one-dimensional; give a single `length`"));
            }
            *ls
        }
    };
    for (i, &ni) in n.iter().enumerate() {
        if ni < 4 || !ni.is_power_of_two() {
            return Err(err(format!("grid.n[{i}] = {ni} must be a power of two >= 4")));
        }
        if !length[i].is_finite() || length[i] <= 0.0 {
            return Err(err(format!("grid.length[{i}] must be positive")));
        }
    }
    Ok((n, length))
}

fn resolve_schedule(system: SystemKind, raw: Option<&RawSchedule>) -> ScheduleParams {
    let d = ScheduleParams::for_system(system);
    match raw {
        None => d,
        Some(s) => ScheduleParams {
            gamma_exp: s.gamma.unwrap_or(d.gamma_exp),
            beta_exp: s.beta.unwrap_or(d.beta_exp),
            delta_exp: s.delta.unwrap_or(d.delta_exp),
            c_step: s.c_step.unwrap_or(d.c_step),
            min_step: s.min_step.unwrap_or(d.min_step),
        },
    }
}

fn resolve_picard(raw: Option<&RawPicard>) -> PicardParams {
    let d = PicardParams::default();
    match raw {
        None => d,
        Some(p) => PicardParams {
            substeps: p.substeps.unwrap_or(d.substeps),
            tol: p.tol.unwrap_or(d.tol),
            max_iter: p.max_iter.unwrap_or(d.max_iter),
        },
    }
}

fn resolve_initial(
    system: SystemKind,
    raw: Option<&RawInitial>,
    grid_length: &[f64; 3],
) -> Result<InitialData, ConfigError> {
    let raw = raw.ok_or_else(|| err("missing [initial] section"))?;
    match (system, raw.kind.as_str()) {
        (_, "zero") => Ok(InitialData::Zero),
        (_, "checkpoint") => Ok(InitialData::Checkpoint {
            path: raw.path.clone().ok_or_else(|| err("initial.kind = checkpoint needs `path`"))?,
        }),
        (SystemKind::Zakharov, "soliton") => {
            let eta = raw.eta.unwrap_or(1.0);
            let speed = raw.speed.unwrap_or(0.0);
            let center = raw.center.unwrap_or(grid_length[0] / 2.0);
            Ok(InitialData::Soliton { eta, speed, center })
        }
        (SystemKind::Kgs, "plane_wave") => Ok(InitialData::PlaneWave {
            amplitude: raw.amplitude.unwrap_or(1.0),
            wave_vector: raw.wave_vector.unwrap_or([1, 0, 0]),
        }),
        (_, "low_regularity") => {
            Ok(InitialData::LowRegularity { amplitude: raw.amplitude.unwrap_or(1.0) })
        }
        (s, kind) => Err(err(format!("initial.kind `{kind}` is not valid for {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_zakharov_gets_defaults() {
        let cfg = parse_config(
            r#"
system = "zakharov"
t_end = 1.0
[initial]
kind = "soliton"
"#,
        )
        .unwrap();
        let RunConfig::Simulation(sim) = cfg else { panic!("expected a simulation") };
        assert_eq!(sim.grid_n[0], 1024);
        assert_eq!(sim.grid_length[0], 100.0);
        assert_eq!(sim.schedule.gamma_exp, 2.0);
        assert_eq!(sim.schedule.beta_exp, 2.0);
        assert_eq!(sim.schedule.c_step, 0.5);
        assert_eq!(sim.picard.substeps, 16);
        assert_eq!(sim.seed, 0);
        assert!(matches!(sim.initial, InitialData::Soliton { center, .. } if center == 50.0));
    }

    #[test]
    fn kgs_inherits_quartic_exponents() {
        let cfg = parse_config(
            r#"
system = "kgs"
t_end = 0.5
[initial]
kind = "plane_wave"
"#,
        )
        .unwrap();
        let RunConfig::Simulation(sim) = cfg else { panic!() };
        assert_eq!(sim.schedule.gamma_exp, 4.0);
        assert_eq!(sim.schedule.beta_exp, 4.0);
        assert_eq!(sim.schedule.delta_exp, 0.75);
        assert_eq!(sim.grid_n, [32; 3]);
    }

    #[test]
    fn unknown_key_is_a_schema_error() {
        let out = parse_config(
            r#"
system = "zakharov"
t_end = 1.0
[schedule]
betta = 2.0
[initial]
kind = "zero"
"#,
        );
        let msg = out.unwrap_err().to_string();
        assert!(msg.contains("betta"), "message should carry the key path: {msg}");
    }

    #[test]
    fn sweep_config_parses() {
        let cfg = parse_config(
            r#"
system = "estimate_sweep"
seed = 3
[sweep]
kind = "wave_coupling"
triples = [[0.3, 0.3, 0.3], [0.34, 0.34, 0.34]]
lattice_sizes = [16, 32]
families = ["characteristic"]
samples_per_family = 1
"#,
        )
        .unwrap();
        let RunConfig::Sweep(sw) = cfg else { panic!() };
        assert_eq!(sw.sweep.lattice_sizes, vec![16, 32]);
        assert_eq!(sw.sweep.seed, 3);
        assert_eq!(sw.sweep.triples.len(), 2);
    }

    #[test]
    fn cross_system_keys_are_rejected() {
        assert!(parse_config(
            r#"
system = "zakharov"
t_end = 1.0
[initial]
kind = "plane_wave"
"#,
        )
        .is_err());
        assert!(parse_config(
            r#"
system = "estimate_sweep"
t_end = 1.0
[sweep]
"#,
        )
        .is_err());
    }
}
