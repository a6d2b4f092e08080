//! Shared pieces of the two Picard local solvers.
//!
//! Both systems are solved on a local interval [t₀, t₀+T] by iterating the
//! Duhamel integral maps from the free flows until the relative L² change
//! of the iterates drops below a tolerance. The integral operators use the
//! composite trapezoid rule on M uniform substeps, so the converged local
//! solution carries an O((T/M)²) time-quadrature error while all linear
//! flows stay exact per mode.

use num_complex::Complex64;
use thiserror::Error;

use crate::propagators::Trajectory;

/// Knobs of the local fixed-point iteration.
#[derive(Debug, Clone, Copy)]
pub struct PicardParams {
    /// Number M of uniform substeps; a local solve yields M+1 snapshots.
    pub substeps: usize,
    /// Successive relative L² change below which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardParams {
    fn default() -> Self {
        Self { substeps: 16, tol: 1e-10, max_iter: 50 }
    }
}

impl PicardParams {
    pub fn validate(&self) {
        assert!(self.substeps >= 2, "need at least two substeps");
        assert!(self.tol > 0.0, "tolerance must be positive");
        assert!(self.max_iter >= 1, "need at least one iteration");
    }

    pub fn with_substeps(self, substeps: usize) -> Self {
        Self { substeps, ..self }
    }
}

/// Convergence record of one local solve.
#[derive(Debug, Clone)]
pub struct SolveStats {
    pub iterations: usize,
    /// Relative change after each iteration; geometric decay of this
    /// sequence is the practical contraction certificate.
    pub increments: Vec<f64>,
}

pub struct LocalSolution<S> {
    pub trajectory: Trajectory<S>,
    pub stats: SolveStats,
}

#[derive(Debug, Error)]
pub enum SolveError {
    /// The iteration hit `max_iter` or the increments grew three times in a
    /// row; the step was too long for a contraction. Callers halve the step.
    #[error("Picard iteration failed to contract after {iterations} iterations (last increment {last_increment:.3e})")]
    NoContraction { iterations: usize, last_increment: f64 },
}

/// Tracks the increment sequence and decides convergence/divergence.
pub(crate) struct ContractionWatch {
    pub increments: Vec<f64>,
    tol: f64,
    max_iter: usize,
    growth_streak: usize,
}

pub(crate) enum WatchVerdict {
    Converged,
    Continue,
    Diverged,
}

impl ContractionWatch {
    pub fn new(p: &PicardParams) -> Self {
        Self { increments: Vec::new(), tol: p.tol, max_iter: p.max_iter, growth_streak: 0 }
    }

    pub fn record(&mut self, delta: f64) -> WatchVerdict {
        let prev = self.increments.last().copied();
        self.increments.push(delta);
        if !delta.is_finite() {
            return WatchVerdict::Diverged;
        }
        if delta <= self.tol {
            return WatchVerdict::Converged;
        }
        if let Some(p) = prev {
            if delta > p {
                self.growth_streak += 1;
                if self.growth_streak >= 3 {
                    return WatchVerdict::Diverged;
                }
            } else {
                self.growth_streak = 0;
            }
        }
        if self.increments.len() >= self.max_iter {
            return WatchVerdict::Diverged;
        }
        WatchVerdict::Continue
    }

    pub fn fail(self) -> SolveError {
        SolveError::NoContraction {
            iterations: self.increments.len(),
            last_increment: self.increments.last().copied().unwrap_or(f64::NAN),
        }
    }

    pub fn into_stats(self) -> SolveStats {
        SolveStats { iterations: self.increments.len(), increments: self.increments }
    }
}

/// √(Σ|v|²·w) over a raw spectral array.
pub(crate) fn weighted_l2(data: &[Complex64], weight: f64) -> f64 {
    (data.iter().map(|v| v.norm_sqr()).sum::<f64>() * weight).sqrt()
}

pub(crate) fn weighted_l2_diff(a: &[Complex64], b: &[Complex64], weight: f64) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() * weight).sqrt()
}
