//! The one-dimensional Zakharov system
//!
//! ```text
//! i ∂ₜu + ∂ₓ²u = g·n u
//! ∂ₜ²n − ∂ₓ²n  = ∂ₓ²|u|²
//! ```
//!
//! with the physical coupling g = +1 by default; g = −1 selects the
//! sign-flipped Hamiltonian variant, whose local theory is identical but
//! whose energy is indefinite.
//!
//! The local solver works on the reduced characteristic system. With the
//! split of [`crate::propagators::split_wave_data`] the components
//!
//! ```text
//! (∂ₜ ± ∂ₓ) n± = ∓ ½ ∂ₓ|u|² + ½ n₁ᴸ,      n = n₊ + n₋
//! ```
//!
//! reproduce ∂ₜ²n − ∂ₓ²n = ∂ₓ²|u|², and the fixed point iterated here is
//!
//! ```text
//! u  ← U(t)u₀ − i g·U∗ᵣ[(n₊+n₋)u]
//! n± ← W±(t)(n₀,n₁) ∓ W±∗ᵣ(∂ₓ|u|²)
//! ```
//!
//! starting from the free flows. Products are formed in physical space with
//! 2/3-rule dealiasing of both factors and the product, which keeps the
//! semidiscrete mass ∫|u|² exactly conserved; the only mass drift left is
//! the O(h²) time quadrature of the Duhamel integrals.
//!
//! Conserved functionals: the mass M[u] = ∫|u|² and the Hamiltonian
//! H = ∫ |∂ₓu|² + g(½n² + ½ν² + n|u|²) with ∂ₓν = ∂ₜn.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{Field, WavePair};
use crate::grid::{Grid, Grid1D};
use crate::picard::{
    weighted_l2, weighted_l2_diff, ContractionWatch, LocalSolution, PicardParams, SolveError,
    WatchVerdict,
};
use crate::propagators::{window_kernel_minus, window_kernel_plus, Trajectory};
use crate::sampling;

pub use crate::field::mass;

#[derive(Debug, Error)]
pub enum ZakharovError {
    #[error("mean of ∂ₜn is {mean:.3e}; ν and the Hamiltonian are undefined")]
    NonzeroMeanVelocity { mean: f64 },
    #[error("soliton not representable on this grid: {reason}")]
    UnresolvedSoliton { reason: String },
}

/// Full Zakharov state at one time stamp.
pub struct ZakharovState {
    pub time: f64,
    pub u: Field<Grid1D>,
    pub wave: WavePair<Grid1D>,
    /// Coupling sign g of the Schrödinger nonlinearity g·nu.
    pub coupling: f64,
}

impl Clone for ZakharovState {
    fn clone(&self) -> Self {
        Self {
            time: self.time,
            u: self.u.clone(),
            wave: self.wave.clone(),
            coupling: self.coupling,
        }
    }
}

impl ZakharovState {
    pub fn new(time: f64, u: Field<Grid1D>, wave: WavePair<Grid1D>) -> Self {
        assert!(u.grid().same_grid(wave.grid()), "state components on different grids");
        Self { time, u, wave, coupling: 1.0 }
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.coupling = g;
        self
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        self.u.grid()
    }
}

/// Hamiltonian ∫ |∂ₓu|² + g(½n² + ½ν² + n|u|²) dx, where ν̂ = ∂ₜn̂/(iξ)
/// for ξ ≠ 0 and ν̂(0) = 0; requires mean ∂ₜn = 0.
pub fn hamiltonian(s: &ZakharovState) -> Result<f64, ZakharovError> {
    let grid = s.grid().clone();
    let mw = grid.mode_weight();

    let nt_spec = s.wave.nt.spectral_vec();
    let mean = (nt_spec[0] / grid.volume()).norm();
    let rms = weighted_l2(&nt_spec, mw) / grid.volume().sqrt();
    if mean > 1e-12 * (1.0 + rms) {
        return Err(ZakharovError::NonzeroMeanVelocity { mean });
    }

    let u_spec = s.u.spectral_vec();
    let mut grad_sq = 0.0;
    let mut nu_sq = 0.0;
    for (i, &xi) in grid.freqs().iter().enumerate() {
        grad_sq += xi * xi * u_spec[i].norm_sqr();
        if xi != 0.0 {
            nu_sq += nt_spec[i].norm_sqr() / (xi * xi);
        }
    }
    grad_sq *= mw;
    nu_sq *= mw;

    let n_sq = s.wave.n.l2_norm().powi(2);

    let u_phys = s.u.to_physical();
    let n_phys = s.wave.n.to_physical();
    let cubic: f64 = n_phys
        .data()
        .iter()
        .zip(u_phys.data())
        .map(|(n, u)| n.re * u.norm_sqr())
        .sum::<f64>()
        * grid.cell_volume();

    Ok(grad_sq + s.coupling * (0.5 * n_sq + 0.5 * nu_sq + cubic))
}

/// Exact soliton family of the g = +1 system. With A = η√(2(1−c²)),
///
/// ```text
/// u(x,t) = A sech(η(x−ct−x₀)) e^{i(cx/2 + (η²−c²/4)t)}
/// n(x,t) = −2η² sech²(η(x−ct−x₀))
/// ```
///
/// travels at speed c with phase rotation rate η² − c²/4; its mass is
/// 4η(1−c²) up to the periodization tail.
pub fn soliton(
    eta: f64,
    speed: f64,
    center: f64,
    grid: &Arc<Grid1D>,
) -> Result<ZakharovState, ZakharovError> {
    soliton_at(eta, speed, center, grid, 0.0)
}

/// The soliton evaluated at time `t` (closed form; the oracle for solver
/// accuracy tests).
pub fn soliton_at(
    eta: f64,
    speed: f64,
    center: f64,
    grid: &Arc<Grid1D>,
    t: f64,
) -> Result<ZakharovState, ZakharovError> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(ZakharovError::UnresolvedSoliton { reason: "η must be positive".into() });
    }
    if !speed.is_finite() || speed.abs() >= 1.0 {
        return Err(ZakharovError::UnresolvedSoliton { reason: "|c| must be below 1".into() });
    }
    if eta * grid.dx() > 0.2 {
        return Err(ZakharovError::UnresolvedSoliton {
            reason: format!("η·dx = {:.3} exceeds 0.2", eta * grid.dx()),
        });
    }
    // Tail at half a period from the peak.
    let tail = 2.0 * (-eta * grid.period() / 2.0).exp();
    if tail > 1e-12 {
        return Err(ZakharovError::UnresolvedSoliton {
            reason: format!("boundary tail {tail:.3e} above 1e-12"),
        });
    }

    let amp = eta * (2.0 * (1.0 - speed * speed)).sqrt();
    let phase_rate = eta * eta - 0.25 * speed * speed;
    let l = grid.period();
    let mut u = Vec::with_capacity(grid.len());
    let mut n = Vec::with_capacity(grid.len());
    for x in grid.points() {
        // nearest periodic image of the peak
        let raw = x - speed * t - center;
        let arg = raw - l * (raw / l).round();
        let sech = 1.0 / (eta * arg).cosh();
        u.push(Complex64::from_polar(amp * sech, 0.5 * speed * x + phase_rate * t));
        n.push(Complex64::new(-2.0 * eta * eta * sech * sech, 0.0));
    }
    let u = Field::from_physical(grid, u);
    let n = Field::from_physical(grid, n);
    // ∂ₜn = c (|u|²)′ / (1−c²), taken spectrally from the constructed n.
    let nt = n
        .scale(Complex64::new(-speed, 0.0))
        .apply_multiplier(|xi| Complex64::new(0.0, xi))
        .expect("finite symbol");
    Ok(ZakharovState::new(t, u, WavePair::new(n, nt)))
}

/// Rough random data at the edge of L² × H^{−1/2} × H^{−3/2}, normalized to
/// ‖u₀‖_{L²} = `u_l2` and unit A-norms of the wave pair. Mean ∂ₜn is zero.
pub fn low_regularity_state(grid: &Arc<Grid1D>, seed: u64, u_l2: f64) -> ZakharovState {
    let eps = 0.01;
    let u = sampling::low_regularity_complex(grid, 0.0, eps, seed.wrapping_mul(3), u_l2);
    let n = sampling::low_regularity_real(grid, -0.5, eps, seed.wrapping_mul(3) + 1, 1.0, |f| {
        f.a_norm(-0.5)
    });
    let nt = sampling::low_regularity_real(grid, -1.5, eps, seed.wrapping_mul(3) + 2, 1.0, |f| {
        f.a_norm(-1.5)
    });
    ZakharovState::new(0.0, u, WavePair::new(n, nt))
}

struct NonlinearSnapshots {
    /// dealiased (n₊+n₋)·u, spectral
    z: Vec<Vec<Complex64>>,
    /// dealiased ∂ₓ|u|², spectral
    w: Vec<Vec<Complex64>>,
}

fn nonlinear_snapshots(
    grid: &Arc<Grid1D>,
    u: &[Vec<Complex64>],
    np: &[Vec<Complex64>],
    nm: &[Vec<Complex64>],
) -> NonlinearSnapshots {
    let nn = grid.len();
    let dv = grid.cell_volume();
    let mw = grid.mode_weight();
    let mut z = Vec::with_capacity(u.len());
    let mut w = Vec::with_capacity(u.len());
    for k in 0..u.len() {
        let mut ud = vec![Complex64::new(0.0, 0.0); nn];
        let mut nd = vec![Complex64::new(0.0, 0.0); nn];
        for i in 0..nn {
            if grid.dealias_keep(i) {
                ud[i] = u[k][i];
                nd[i] = np[k][i] + nm[k][i];
            }
        }
        grid.fft_inverse(&mut ud);
        grid.fft_inverse(&mut nd);
        let mut zp = vec![Complex64::new(0.0, 0.0); nn];
        let mut wp = vec![Complex64::new(0.0, 0.0); nn];
        for i in 0..nn {
            let uphys = ud[i] * mw;
            let nphys = nd[i].re * mw;
            zp[i] = nphys * uphys;
            wp[i] = Complex64::new(uphys.norm_sqr(), 0.0);
        }
        grid.fft_forward(&mut zp);
        grid.fft_forward(&mut wp);
        for (i, &xi) in grid.freqs().iter().enumerate() {
            if grid.dealias_keep(i) {
                zp[i] *= dv;
                wp[i] *= dv * Complex64::new(0.0, xi);
            } else {
                zp[i] = Complex64::new(0.0, 0.0);
                wp[i] = Complex64::new(0.0, 0.0);
            }
        }
        z.push(zp);
        w.push(wp);
    }
    NonlinearSnapshots { z, w }
}

/// Picard local solve on [t₀, t₀+horizon] with M+1 stored snapshots.
///
/// Errors with [`SolveError::NoContraction`] when the horizon is too long
/// for the iteration to contract; callers are expected to halve it.
pub fn local_solve(
    s0: &ZakharovState,
    horizon: f64,
    p: &PicardParams,
) -> Result<LocalSolution<ZakharovState>, SolveError> {
    p.validate();
    assert!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive");
    let grid = s0.grid().clone();
    let nn = grid.len();
    let m = p.substeps;
    let h = horizon / m as f64;
    let mw = grid.mode_weight();
    let g = s0.coupling;

    let u0 = s0.u.spectral_vec();
    let n0 = s0.wave.n.spectral_vec();
    let n1 = s0.wave.nt.spectral_vec();

    // Characteristic split of the wave data.
    let mut n1l = vec![Complex64::new(0.0, 0.0); nn];
    let mut aplus = vec![Complex64::new(0.0, 0.0); nn];
    let mut aminus = vec![Complex64::new(0.0, 0.0); nn];
    for (i, &xi) in grid.freqs().iter().enumerate() {
        let half_n0 = 0.5 * n0[i];
        let half_nu = if xi.abs() > 1.0 {
            0.5 * n1[i] / Complex64::new(0.0, xi)
        } else {
            n1l[i] = n1[i];
            Complex64::new(0.0, 0.0)
        };
        aplus[i] = half_n0 - half_nu;
        aminus[i] = half_n0 + half_nu;
    }

    // Free-flow snapshot tables (exact per mode).
    let mut ugrp = Vec::with_capacity(m + 1);
    let mut wp_grp = Vec::with_capacity(m + 1);
    let mut wm_grp = Vec::with_capacity(m + 1);
    let mut vgrp = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let t = k as f64 * h;
        let mut uk = vec![Complex64::new(0.0, 0.0); nn];
        let mut pk = vec![Complex64::new(0.0, 0.0); nn];
        let mut mk = vec![Complex64::new(0.0, 0.0); nn];
        let mut vk = vec![Complex64::new(0.0, 0.0); nn];
        for (i, &xi) in grid.freqs().iter().enumerate() {
            uk[i] = Complex64::from_polar(1.0, -xi * xi * t) * u0[i];
            let ep = Complex64::from_polar(1.0, -xi * t);
            let em = Complex64::from_polar(1.0, xi * t);
            pk[i] = ep * aplus[i] + 0.5 * n1l[i] * window_kernel_plus(xi, t);
            mk[i] = em * aminus[i] + 0.5 * n1l[i] * window_kernel_minus(xi, t);
            let ixi = Complex64::new(0.0, xi);
            vk[i] = -ixi * ep * aplus[i] + ixi * em * aminus[i] + 0.5 * (ep + em) * n1l[i];
        }
        ugrp.push(uk);
        wp_grp.push(pk);
        wm_grp.push(mk);
        vgrp.push(vk);
    }

    // One-substep propagator phases.
    let ps1: Vec<Complex64> =
        grid.freqs().iter().map(|&xi| Complex64::from_polar(1.0, -xi * xi * h)).collect();
    let pw1: Vec<Complex64> =
        grid.freqs().iter().map(|&xi| Complex64::from_polar(1.0, -xi * h)).collect();

    let mut u = ugrp.clone();
    let mut np = wp_grp.clone();
    let mut nm = wm_grp.clone();
    let mut jp = vec![vec![Complex64::new(0.0, 0.0); nn]; m + 1];
    let mut jm = vec![vec![Complex64::new(0.0, 0.0); nn]; m + 1];

    let mut watch = ContractionWatch::new(p);
    loop {
        let nl = nonlinear_snapshots(&grid, &u, &np, &nm);

        let mut u_new = Vec::with_capacity(m + 1);
        let mut np_new = Vec::with_capacity(m + 1);
        let mut nm_new = Vec::with_capacity(m + 1);
        u_new.push(ugrp[0].clone());
        np_new.push(wp_grp[0].clone());
        nm_new.push(wm_grp[0].clone());
        let mut i_acc = vec![Complex64::new(0.0, 0.0); nn];
        let mut jp_acc = vec![Complex64::new(0.0, 0.0); nn];
        let mut jm_acc = vec![Complex64::new(0.0, 0.0); nn];
        jp[0].iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        jm[0].iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for k in 0..m {
            let mut uk = vec![Complex64::new(0.0, 0.0); nn];
            let mut pk = vec![Complex64::new(0.0, 0.0); nn];
            let mut mk = vec![Complex64::new(0.0, 0.0); nn];
            for i in 0..nn {
                i_acc[i] = ps1[i] * i_acc[i]
                    + 0.5 * h * (ps1[i] * nl.z[k][i] + nl.z[k + 1][i]);
                jp_acc[i] = pw1[i] * jp_acc[i]
                    + 0.25 * h * (pw1[i] * nl.w[k][i] + nl.w[k + 1][i]);
                let pm = pw1[i].conj();
                jm_acc[i] = pm * jm_acc[i] + 0.25 * h * (pm * nl.w[k][i] + nl.w[k + 1][i]);
                uk[i] = ugrp[k + 1][i] - Complex64::new(0.0, g) * i_acc[i];
                pk[i] = wp_grp[k + 1][i] - jp_acc[i];
                mk[i] = wm_grp[k + 1][i] + jm_acc[i];
            }
            jp[k + 1].copy_from_slice(&jp_acc);
            jm[k + 1].copy_from_slice(&jm_acc);
            u_new.push(uk);
            np_new.push(pk);
            nm_new.push(mk);
        }

        let mut delta = 0.0_f64;
        for k in 0..=m {
            let change = weighted_l2_diff(&u_new[k], &u[k], mw)
                + weighted_l2_diff(&np_new[k], &np[k], mw)
                + weighted_l2_diff(&nm_new[k], &nm[k], mw);
            let size = weighted_l2(&u_new[k], mw)
                + weighted_l2(&np_new[k], mw)
                + weighted_l2(&nm_new[k], mw);
            delta = delta.max(change / size.max(f64::MIN_POSITIVE));
        }
        u = u_new;
        np = np_new;
        nm = nm_new;

        match watch.record(delta) {
            WatchVerdict::Converged => break,
            WatchVerdict::Continue => {}
            WatchVerdict::Diverged => return Err(watch.fail()),
        }
    }

    let mut times = Vec::with_capacity(m + 1);
    let mut states = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let mut n_k = vec![Complex64::new(0.0, 0.0); nn];
        let mut v_k = vec![Complex64::new(0.0, 0.0); nn];
        for (i, &xi) in grid.freqs().iter().enumerate() {
            n_k[i] = np[k][i] + nm[k][i];
            v_k[i] = vgrp[k][i] + Complex64::new(0.0, xi) * (jp[k][i] + jm[k][i]);
        }
        let t = s0.time + k as f64 * h;
        times.push(t);
        states.push(
            ZakharovState::new(
                t,
                Field::from_spectral(&grid, u[k].clone()),
                WavePair::new(
                    Field::from_spectral(&grid, n_k),
                    Field::from_spectral(&grid, v_k),
                ),
            )
            .with_coupling(g),
        );
    }
    Ok(LocalSolution { trajectory: Trajectory::new(times, states), stats: watch.into_stats() })
}
