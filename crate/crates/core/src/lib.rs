//! Numerical laboratory for two coupled dispersive systems on periodic grids:
//! the one-dimensional Zakharov system
//!
//! ```text
//! i ∂ₜu + ∂ₓ²u = n u
//! ∂ₜ²n − ∂ₓ²n = ∂ₓ²|u|²
//! ```
//!
//! and the three-dimensional Klein-Gordon-Schrödinger system with Yukawa
//! coupling
//!
//! ```text
//! i ∂ₜu + Δu        = −γ n u
//! ∂ₜ²n + αβ(1−Δ)n  = −βγ |u|²
//! ```
//!
//! Both are driven at low regularity, where the only robust a priori
//! quantity is the conserved Schrödinger mass ∫|u|². The crate provides
//!
//! * exact per-mode linear flows (Schrödinger, reduced wave, Klein-Gordon
//!   groups) and their retarded Duhamel operators ([`propagators`]),
//! * the Sobolev-type norm functionals used to size the wave component
//!   ([`field`], [`norms`]),
//! * Picard local solvers for both systems ([`zakharov`], [`kgs`]),
//! * a mass-driven globalization driver with norm-power step sizes
//!   Δ ~ min(‖u‖⁻ᵞ, ‖n‖⁻ᵝ) and exponential-envelope bookkeeping
//!   ([`globalizer`]),
//! * numerical probes of the space-time trilinear forms and calculus
//!   inequalities behind the local theory ([`estimates`]).

pub mod estimates;
pub mod field;
pub mod globalizer;
pub mod grid;
pub mod kgs;
pub mod norms;
pub mod picard;
pub mod propagators;
pub mod sampling;
pub mod zakharov;

pub use field::{mass, Field, Repr, WavePair};
pub use grid::{Grid, Grid1D, Grid3D};
pub use picard::{LocalSolution, PicardParams, SolveError, SolveStats};
pub use propagators::Trajectory;
