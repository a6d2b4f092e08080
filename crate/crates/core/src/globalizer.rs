//! Mass-driven globalization of the local solves.
//!
//! The driver repeats: measure ‖u‖_{L²} and the wave norm (𝒲 for Zakharov,
//! 𝒢 for KGS), choose a step
//!
//! ```text
//! Δ = c·min((1+‖u‖)^{−γ}, (1+‖n‖)^{−β}, 1)
//! ```
//!
//! run the Picard local solver over Δ, and retry with Δ/2 when the
//! iteration refuses to contract. The exponents are γ = β = 2 for Zakharov
//! and γ = β = 4 for KGS; the wave-norm increment per local step scales
//! like Δ^δ with δ = 1/2 resp. 3/4, so the doubling count
//!
//! ```text
//! m ~ ‖n‖ / (Δ^δ (‖u‖² + 1))        (Zakharov; no +1 for KGS)
//! ```
//!
//! makes the product m·Δ ~ ‖n‖^{1−β+δβ}/(‖u‖²+1) independent of ‖n‖
//! precisely because 1 − β + δβ = 0 for both exponent sets. Iterating the
//! doubling argument yields the exponential envelope
//! ‖n(t)‖ ≤ exp(c·t·‖u₀‖²)·max(‖n₀‖, ‖u₀‖²), which [`bound_check`] fits
//! against a run log.

use thiserror::Error;

use crate::kgs::{self, KGSState};
use crate::picard::{LocalSolution, PicardParams, SolveError};
use crate::zakharov::{self, ZakharovState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Zakharov,
    Kgs,
}

/// Step-size exponents and safety constants.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleParams {
    /// Exponent γ on (1+‖u‖_{L²}).
    pub gamma_exp: f64,
    /// Exponent β on (1+‖n‖).
    pub beta_exp: f64,
    /// Increment exponent δ (diagnostic; the doubling-count formula uses
    /// the per-system value).
    pub delta_exp: f64,
    /// Multiplicative safety constant, ≤ 1.
    pub c_step: f64,
    /// Floor below which the run aborts with [`RunErrorKind::StepUnderflow`].
    pub min_step: f64,
}

impl ScheduleParams {
    pub fn zakharov_defaults() -> Self {
        Self { gamma_exp: 2.0, beta_exp: 2.0, delta_exp: 0.5, c_step: 0.5, min_step: 1e-9 }
    }

    pub fn kgs_defaults() -> Self {
        Self { gamma_exp: 4.0, beta_exp: 4.0, delta_exp: 0.75, c_step: 0.5, min_step: 1e-9 }
    }

    pub fn for_system(kind: SystemKind) -> Self {
        match kind {
            SystemKind::Zakharov => Self::zakharov_defaults(),
            SystemKind::Kgs => Self::kgs_defaults(),
        }
    }

    pub fn validate(&self) {
        assert!(self.gamma_exp > 0.0 && self.beta_exp > 0.0 && self.delta_exp > 0.0);
        assert!(self.c_step > 0.0 && self.c_step <= 1.0);
        assert!(self.min_step > 0.0);
    }

    /// 1 − β + δβ; the scheme covers arbitrary times exactly when ≥ 0.
    pub fn progress_exponent(&self) -> f64 {
        1.0 - self.beta_exp + self.delta_exp * self.beta_exp
    }
}

#[derive(Debug, Error)]
pub enum GlobalizerError {
    #[error("step size {dt:.3e} fell below the floor {min_step:.3e}")]
    StepUnderflow { dt: f64, min_step: f64 },
    #[error("run log is empty")]
    EmptyLog,
}

/// Δ = c·min((1+u)^{−γ}, (1+n)^{−β}, 1); the +1 shifts keep zero data from
/// producing an unbounded step.
pub fn step_size(u_norm: f64, n_norm: f64, p: &ScheduleParams) -> Result<f64, GlobalizerError> {
    assert!(u_norm >= 0.0 && n_norm >= 0.0, "norms must be nonnegative");
    let du = (1.0 + u_norm).powf(-p.gamma_exp);
    let dn = (1.0 + n_norm).powf(-p.beta_exp);
    let dt = p.c_step * du.min(dn).min(1.0);
    if dt < p.min_step {
        return Err(GlobalizerError::StepUnderflow { dt, min_step: p.min_step });
    }
    Ok(dt)
}

/// Number of uniform steps of length Δ before the wave norm doubles:
/// ‖n‖/(Δ^{1/2}(‖u‖²+1)) for Zakharov, ‖n‖/(Δ^{3/4}‖u‖²) for KGS
/// (+∞ at zero Schrödinger data, which never forces the wave).
pub fn predicted_doubling_count(n_norm: f64, u_norm: f64, dt: f64, system: SystemKind) -> f64 {
    assert!(dt > 0.0);
    match system {
        SystemKind::Zakharov => n_norm / (dt.sqrt() * (u_norm * u_norm + 1.0)),
        SystemKind::Kgs => n_norm / (dt.powf(0.75) * (u_norm * u_norm)),
    }
}

/// One accepted step of a globalized run.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub time: f64,
    pub dt: f64,
    pub u_l2: f64,
    pub n_norm: f64,
    pub mass: f64,
    /// Running max of |mass − mass₀|/mass₀.
    pub mass_drift: f64,
    pub hamiltonian: Option<f64>,
    pub picard_iters: usize,
    pub retries: usize,
}

#[derive(Debug, Clone)]
pub struct RunLog {
    pub system: SystemKind,
    pub records: Vec<StepRecord>,
    /// Times at which the wave norm first exceeded twice its value at the
    /// start of the current super-interval (monitored, not enforced).
    pub doubling_times: Vec<f64>,
}

impl RunLog {
    pub fn initial(&self) -> &StepRecord {
        &self.records[0]
    }

    pub fn last(&self) -> &StepRecord {
        self.records.last().unwrap()
    }

    pub fn mass_drift(&self) -> f64 {
        self.last().mass_drift
    }

    pub fn total_steps(&self) -> usize {
        self.records.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunErrorKind {
    /// 8 halvings were not enough to restore contraction.
    NoContraction,
    /// The scheduled step fell below `min_step`.
    StepUnderflow,
}

/// A failed run still surfaces its partial log for post-mortems.
#[derive(Debug)]
pub struct RunFailure {
    pub kind: RunErrorKind,
    pub log: RunLog,
    pub message: String,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for RunFailure {}

/// A state the globalizer can drive: norms, conserved diagnostics, and the
/// local solver, uniformly over the two systems.
pub trait Evolve: Clone {
    fn system() -> SystemKind;
    fn time(&self) -> f64;
    fn u_l2(&self) -> f64;
    /// 𝒲 norm (Zakharov) or 𝒢 norm (KGS) of the wave pair.
    fn wave_norm(&self) -> f64;
    fn mass(&self) -> f64;
    fn hamiltonian_value(&self) -> Option<f64>;
    fn solve_local(&self, horizon: f64, p: &PicardParams)
        -> Result<LocalSolution<Self>, SolveError>;
}

impl Evolve for ZakharovState {
    fn system() -> SystemKind {
        SystemKind::Zakharov
    }

    fn time(&self) -> f64 {
        self.time
    }

    fn u_l2(&self) -> f64 {
        self.u.l2_norm()
    }

    fn wave_norm(&self) -> f64 {
        self.wave.w_norm()
    }

    fn mass(&self) -> f64 {
        zakharov::mass(&self.u)
    }

    fn hamiltonian_value(&self) -> Option<f64> {
        zakharov::hamiltonian(self).ok()
    }

    fn solve_local(
        &self,
        horizon: f64,
        p: &PicardParams,
    ) -> Result<LocalSolution<Self>, SolveError> {
        zakharov::local_solve(self, horizon, p)
    }
}

impl Evolve for KGSState {
    fn system() -> SystemKind {
        SystemKind::Kgs
    }

    fn time(&self) -> f64 {
        self.time
    }

    fn u_l2(&self) -> f64 {
        self.u.l2_norm()
    }

    fn wave_norm(&self) -> f64 {
        self.wave.g_norm()
    }

    fn mass(&self) -> f64 {
        crate::field::mass(&self.u)
    }

    fn hamiltonian_value(&self) -> Option<f64> {
        kgs::hamiltonian(self).ok()
    }

    fn solve_local(
        &self,
        horizon: f64,
        p: &PicardParams,
    ) -> Result<LocalSolution<Self>, SolveError> {
        kgs::local_solve(self, horizon, p)
    }
}

const MAX_RETRIES: usize = 8;

/// Drive `state` to `t_end`, logging one record per accepted step plus an
/// initial record. Never reports a time beyond `t_end`.
pub fn run<S: Evolve>(
    state: &S,
    t_end: f64,
    sched: &ScheduleParams,
    picard: &PicardParams,
) -> Result<(RunLog, S), RunFailure> {
    sched.validate();
    picard.validate();
    assert!(t_end > state.time(), "t_end must lie beyond the initial time");

    let mut state = state.clone();
    let mass0 = state.mass();
    let mut log = RunLog {
        system: S::system(),
        records: vec![StepRecord {
            time: state.time(),
            dt: 0.0,
            u_l2: state.u_l2(),
            n_norm: state.wave_norm(),
            mass: mass0,
            mass_drift: 0.0,
            hamiltonian: state.hamiltonian_value(),
            picard_iters: 0,
            retries: 0,
        }],
        doubling_times: Vec::new(),
    };
    let mut drift_max = 0.0_f64;
    let mut super_interval_norm = state.wave_norm();

    let time_tol = 1e-12 * t_end.abs().max(1.0);
    while state.time() < t_end - time_tol {
        let scheduled = match step_size(state.u_l2(), state.wave_norm(), sched) {
            Ok(dt) => dt,
            Err(GlobalizerError::StepUnderflow { dt, min_step }) => {
                return Err(RunFailure {
                    kind: RunErrorKind::StepUnderflow,
                    message: format!("step {dt:.3e} below floor {min_step:.3e}"),
                    log,
                });
            }
            Err(e) => unreachable!("step_size only underflows: {e}"),
        };
        let mut dt = scheduled.min(t_end - state.time());
        let mut retries = 0usize;
        let solved = loop {
            match state.solve_local(dt, picard) {
                Ok(sol) => break sol,
                Err(SolveError::NoContraction { iterations, last_increment }) => {
                    retries += 1;
                    if retries > MAX_RETRIES {
                        return Err(RunFailure {
                            kind: RunErrorKind::NoContraction,
                            message: format!(
                                "no contraction after {retries} halvings at t = {} \
                                 ({iterations} iterations, last increment {last_increment:.3e})",
                                state.time()
                            ),
                            log,
                        });
                    }
                    dt *= 0.5;
                    if dt < sched.min_step {
                        return Err(RunFailure {
                            kind: RunErrorKind::StepUnderflow,
                            message: format!(
                                "retry step {dt:.3e} below floor {:.3e}",
                                sched.min_step
                            ),
                            log,
                        });
                    }
                }
            }
        };

        state = solved.trajectory.last().clone();
        let mass = state.mass();
        drift_max = drift_max.max((mass - mass0).abs() / mass0.abs().max(f64::MIN_POSITIVE));
        let n_norm = state.wave_norm();
        log.records.push(StepRecord {
            time: state.time(),
            dt,
            u_l2: state.u_l2(),
            n_norm,
            mass,
            mass_drift: drift_max,
            hamiltonian: state.hamiltonian_value(),
            picard_iters: solved.stats.iterations,
            retries,
        });
        if n_norm > 2.0 * super_interval_norm {
            log.doubling_times.push(state.time());
            super_interval_norm = n_norm;
        }
    }
    Ok((log, state))
}

/// Fit of the exponential envelope to a run log.
#[derive(Debug, Clone, Copy)]
pub struct BoundFit {
    /// Smallest c ≥ 0 with n_norm(t) ≤ exp(c·(t−t₀)·u0_mass)·max(n₀, u0_mass)
    /// over every record.
    pub c: f64,
    pub pass: bool,
}

/// `u0_mass` is ‖u₀‖²_{L²}; the fit is a sup over records, so extending a
/// log can only raise `c`.
pub fn bound_check(
    log: &RunLog,
    u0_mass: f64,
    n0_norm: f64,
) -> Result<BoundFit, GlobalizerError> {
    if log.records.is_empty() {
        return Err(GlobalizerError::EmptyLog);
    }
    let t0 = log.records[0].time;
    let base = n0_norm.max(u0_mass);
    let mut c = 0.0_f64;
    let mut finite = true;
    for rec in &log.records {
        if rec.n_norm <= base {
            continue;
        }
        let span = (rec.time - t0) * u0_mass;
        if span <= 0.0 {
            finite = false;
            continue;
        }
        c = c.max((rec.n_norm / base).ln() / span);
    }
    // Extrapolate the envelope one step past the end.
    let last = log.last();
    let t_next = last.time + last.dt;
    let pass = finite
        && c.is_finite()
        && last.n_norm <= (c * (t_next - t0) * u0_mass).exp() * base * (1.0 + 1e-12);
    Ok(BoundFit { c: if finite { c } else { f64::INFINITY }, pass })
}
