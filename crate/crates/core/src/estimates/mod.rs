//! Numerical exploration of the space-time multilinear machinery behind the
//! Zakharov local theory: Bourgain weights, the constrained trilinear
//! forms, the calculus facts they rest on, and exponent-threshold sweeps.
//!
//! Everything here produces evidence, not proofs: quadratures carry stated
//! tail bounds, and refinement trends are reported rather than asserted.

pub mod calculus;
pub mod forms;
pub mod sweep;

use thiserror::Error;

pub use calculus::{
    adaptive_simpson, bracket, bracket_decay_check, convolution_shape_check, lambda_plus,
    resonance_identity, xsb_weight, ConvolutionCheck, DecayCheck, DecayOptions, DecayRow,
    Dispersion, SampledProfile,
};
pub use forms::{
    form_ratio, trilinear_form, ExponentTriple, FormKind, FormMethod, LatticeFunction,
    SpaceTimeLattice,
};
pub use sweep::{exponent_sweep, growth_factors, FamilyKind, SweepConfig, SweepRow};

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("lattice functions live on different lattices")]
    LatticeMismatch,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("exponent {name} = {value} outside (1/4, 1/2)")]
    ExponentRange { name: &'static str, value: f64 },
}
