//! Seeded data generators for tests, sweeps, and low-regularity experiments.
//!
//! Everything is driven by `ChaCha8` streams keyed on a `u64`, so the same
//! seed reproduces the same data on every platform. Generators leave the
//! Nyquist slot empty: it has no conjugate partner, and the characteristic
//! split of the wave flow is only defined on the symmetric band.
//!
//! The low-regularity laws put |f̂(ξ)| = |ξ|^{−s−d/2} (1+|ξ|)^{−ε} with
//! uniform random phases, which places the sample right at the edge of H^s
//! on ℝ^d; ε > 0 keeps the norms finite on the truncated grid.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{Field, WavePair};
use crate::grid::{Grid, Grid1D, Grid3D};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Complex field with Gaussian-decaying random spectrum e^{−(|ξ|/scale)²}.
pub fn random_complex_field_1d(grid: &Arc<Grid1D>, seed: u64, scale: f64) -> Field<Grid1D> {
    let mut rng = seeded_rng(seed);
    let mut coef = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, c) in coef.iter_mut().enumerate() {
        if i == grid.nyquist_index() {
            continue;
        }
        let xi = grid.freqs()[i];
        let amp: f64 = rng.gen_range(0.1..1.0);
        *c = random_phase(&mut rng) * amp * (-(xi / scale).powi(2)).exp();
    }
    Field::from_spectral(grid, coef)
}

pub fn random_complex_field_3d(grid: &Arc<Grid3D>, seed: u64, scale: f64) -> Field<Grid3D> {
    let mut rng = seeded_rng(seed);
    let mut coef = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, c) in coef.iter_mut().enumerate() {
        if grid.conj_index(i) == i && i != 0 {
            continue; // Nyquist-type slots
        }
        let a2 = Grid3D::freq_abs2(grid.freq(i));
        let amp: f64 = rng.gen_range(0.1..1.0);
        *c = random_phase(&mut rng) * amp * (-a2 / (scale * scale)).exp();
    }
    Field::from_spectral(grid, coef)
}

/// Real field: conjugate-symmetric random spectrum.
pub fn random_real_field_1d(grid: &Arc<Grid1D>, seed: u64, scale: f64) -> Field<Grid1D> {
    let f = random_complex_field_1d(grid, seed, scale);
    symmetrize(f)
}

pub fn random_real_field_3d(grid: &Arc<Grid3D>, seed: u64, scale: f64) -> Field<Grid3D> {
    let f = random_complex_field_3d(grid, seed, scale);
    symmetrize(f)
}

/// Project onto the conjugate-symmetric (real-valued) part:
/// f̂(ξ) ← (f̂(ξ) + conj f̂(−ξ))/2.
pub fn symmetrize<G: Grid>(f: Field<G>) -> Field<G> {
    let grid = f.grid().clone();
    let data = f.spectral_vec();
    let sym: Vec<Complex64> = (0..data.len())
        .map(|i| 0.5 * (data[i] + data[grid.conj_index(i)].conj()))
        .collect();
    Field::from_spectral(&grid, sym)
}

/// Real wave pair with Gaussian-decaying spectra.
///
/// With `zero_mean_velocity` the ∂ₜn component has no ξ = 0 mode, which is
/// what the Zakharov Hamiltonian requires.
pub fn random_wave_pair_1d(
    grid: &Arc<Grid1D>,
    seed: u64,
    scale: f64,
    zero_mean_velocity: bool,
) -> WavePair<Grid1D> {
    let n = random_real_field_1d(grid, seed.wrapping_mul(2).wrapping_add(1), scale);
    let mut nt = random_real_field_1d(grid, seed.wrapping_mul(2).wrapping_add(2), scale);
    if zero_mean_velocity {
        nt = drop_mean(nt);
    }
    WavePair::new(n, nt)
}

pub fn random_wave_pair_3d(
    grid: &Arc<Grid3D>,
    seed: u64,
    scale: f64,
    zero_mean_velocity: bool,
) -> WavePair<Grid3D> {
    let n = random_real_field_3d(grid, seed.wrapping_mul(2).wrapping_add(1), scale);
    let mut nt = random_real_field_3d(grid, seed.wrapping_mul(2).wrapping_add(2), scale);
    if zero_mean_velocity {
        nt = drop_mean(nt);
    }
    WavePair::new(n, nt)
}

fn drop_mean<G: Grid>(f: Field<G>) -> Field<G> {
    let grid = f.grid().clone();
    let mut data = f.spectral_vec();
    data[0] = Complex64::new(0.0, 0.0);
    Field::from_spectral(&grid, data)
}

/// Spectrum |ξ|^{−s−d/2}(1+|ξ|)^{−ε} with seeded phases; complex-valued.
///
/// The ξ = 0 and Nyquist slots are left empty.
fn low_regularity_raw<G: Grid>(
    grid: &Arc<G>,
    s: f64,
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Field<G> {
    let d = grid.dim() as f64;
    let mut coef = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, c) in coef.iter_mut().enumerate() {
        if i == 0 || grid.conj_index(i) == i {
            continue;
        }
        let r = G::freq_abs2(grid.freq(i)).sqrt();
        let amp = r.powf(-s - d / 2.0) * (1.0 + r).powf(-eps);
        *c = random_phase(rng) * amp;
    }
    Field::from_spectral(grid, coef)
}

/// Complex sample at the edge of H^s, rescaled to the requested L² norm.
pub fn low_regularity_complex<G: Grid>(
    grid: &Arc<G>,
    s: f64,
    eps: f64,
    seed: u64,
    l2: f64,
) -> Field<G> {
    let mut rng = seeded_rng(seed);
    let f = low_regularity_raw(grid, s, eps, &mut rng);
    let cur = f.l2_norm();
    f.scale(Complex64::new(l2 / cur, 0.0))
}

/// Real sample at the edge of H^s, rescaled so a stated norm functional hits
/// the target value.
pub fn low_regularity_real<G: Grid>(
    grid: &Arc<G>,
    s: f64,
    eps: f64,
    seed: u64,
    target: f64,
    norm: impl Fn(&Field<G>) -> f64,
) -> Field<G> {
    let mut rng = seeded_rng(seed);
    let f = symmetrize(low_regularity_raw(grid, s, eps, &mut rng));
    let cur = norm(&f);
    f.scale(Complex64::new(target / cur, 0.0))
}
