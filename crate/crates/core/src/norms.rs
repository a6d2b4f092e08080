//! Space-time Lebesgue norms over sampled trajectories.
//!
//! A trajectory is a time-ordered list of snapshots; time integrals are
//! composite trapezoid sums over the stored times (the spacing need not be
//! uniform). `L^q_t L^r_x` norms with q = ∞ take the max over snapshots.

use thiserror::Error;

use crate::field::Field;
use crate::grid::Grid;

#[derive(Debug, Error)]
pub enum NormError {
    #[error("trajectory has too few snapshots for a time integral")]
    EmptyTrajectory,
    #[error("snapshot times must be strictly increasing")]
    UnorderedTimes,
}

/// Trapezoid quadrature of v(t)^q over the sample times, then the q-th root;
/// q = ∞ gives max |v|.
pub fn time_lebesgue(times: &[f64], values: &[f64], q: f64) -> Result<f64, NormError> {
    assert!(q >= 1.0, "Lebesgue exponent must satisfy q >= 1");
    assert_eq!(times.len(), values.len());
    if q.is_infinite() {
        if times.is_empty() {
            return Err(NormError::EmptyTrajectory);
        }
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    if times.len() < 2 {
        return Err(NormError::EmptyTrajectory);
    }
    let mut acc = 0.0;
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        if dt <= 0.0 {
            return Err(NormError::UnorderedTimes);
        }
        acc += 0.5 * dt * (values[i - 1].abs().powf(q) + values[i].abs().powf(q));
    }
    Ok(acc.powf(1.0 / q))
}

/// ‖f‖_{L^q_t L^r_x} over parallel slices of times and fields.
pub fn spacetime_norm<G: Grid>(
    times: &[f64],
    fields: &[Field<G>],
    q: f64,
    r: f64,
) -> Result<f64, NormError> {
    assert_eq!(times.len(), fields.len());
    let spatial: Vec<f64> = fields.iter().map(|f| f.lp_norm(r)).collect();
    time_lebesgue(times, &spatial, q)
}

/// ‖f‖_{L¹_t H^s_x}, the time integral of the Sobolev norm.
pub fn spacetime_l1_sobolev<G: Grid>(
    times: &[f64],
    fields: &[Field<G>],
    s: f64,
) -> Result<f64, NormError> {
    assert_eq!(times.len(), fields.len());
    let spatial: Vec<f64> = fields.iter().map(|f| f.sobolev_norm(s)).collect();
    time_lebesgue(times, &spatial, 1.0)
}
