//! The three-dimensional Klein-Gordon-Schrödinger system with Yukawa
//! coupling and real constants (α, β, γ):
//!
//! ```text
//! i ∂ₜu + Δu        = −γ n u
//! ∂ₜ²n + αβ(1−Δ)n  = −βγ |u|²
//! ```
//!
//! The Picard fixed point iterated on a local interval is
//!
//! ```text
//! u      ← U(t)u₀ + iγ·U∗ᵣ[n u]
//! (n,∂ₜn) ← G_{αβ}(t)(n₀,n₁) + G_{αβ}∗ᵣ[−βγ|u|²]
//! ```
//!
//! where G_κ is the per-mode flow of n̂″ + κ(1+|ξ|²)n̂ = f̂: trigonometric
//! for κ > 0, hyperbolic for κ < 0 (per-mode growth is physical there) and
//! polynomial at κ = 0. Products use the 2/3 rule on both factors and the
//! product, which preserves the semidiscrete mass identity for every sign
//! choice of the couplings — no Hamiltonian coercivity enters anywhere.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{Field, WavePair};
use crate::grid::{Grid, Grid3D};
use crate::norms::{self, NormError};
use crate::picard::{
    weighted_l2, weighted_l2_diff, ContractionWatch, LocalSolution, PicardParams, SolveError,
    WatchVerdict,
};
use crate::propagators::{oscillator_kernel, Trajectory};
use crate::sampling;

#[derive(Debug, Error)]
pub enum KgsError {
    #[error("β = 0 leaves the Hamiltonian undefined")]
    ZeroBeta,
    #[error("α = 0 leaves no plane-wave background")]
    DegenerateCouplings,
    #[error("wave vector {k:?} is not representable on the grid")]
    OffGridWaveVector { k: [i64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Couplings {
    pub fn unit() -> Self {
        Self { alpha: 1.0, beta: 1.0, gamma: 1.0 }
    }

    /// Stiffness κ = αβ of the free wave flow.
    pub fn kappa(&self) -> f64 {
        self.alpha * self.beta
    }
}

pub struct KGSState {
    pub time: f64,
    pub u: Field<Grid3D>,
    pub wave: WavePair<Grid3D>,
    pub couplings: Couplings,
}

impl Clone for KGSState {
    fn clone(&self) -> Self {
        Self {
            time: self.time,
            u: self.u.clone(),
            wave: self.wave.clone(),
            couplings: self.couplings,
        }
    }
}

impl KGSState {
    pub fn new(time: f64, u: Field<Grid3D>, wave: WavePair<Grid3D>, couplings: Couplings) -> Self {
        assert!(u.grid().same_grid(wave.grid()), "state components on different grids");
        Self { time, u, wave, couplings }
    }

    pub fn grid(&self) -> &Arc<Grid3D> {
        self.u.grid()
    }
}

/// H = ∫ |∇u|² + (1/2β)|∂ₜn|² + (α/2)|⟨∇⟩n|² + γ n|u|² dx.
///
/// For α, β < 0 the quadratic part is negative definite; the functional is
/// still well defined and conserved, just useless as a norm.
pub fn hamiltonian(s: &KGSState) -> Result<f64, KgsError> {
    let Couplings { alpha, beta, gamma } = s.couplings;
    if beta == 0.0 {
        return Err(KgsError::ZeroBeta);
    }
    let grid = s.grid().clone();
    let mw = grid.mode_weight();

    let u_spec = s.u.spectral_vec();
    let n_spec = s.wave.n.spectral_vec();
    let mut grad_sq = 0.0;
    let mut bracket_sq = 0.0;
    for i in 0..grid.len() {
        let a2 = Grid3D::freq_abs2(grid.freq(i));
        grad_sq += a2 * u_spec[i].norm_sqr();
        bracket_sq += (1.0 + a2) * n_spec[i].norm_sqr();
    }
    grad_sq *= mw;
    bracket_sq *= mw;

    let nt_sq = s.wave.nt.l2_norm().powi(2);

    let u_phys = s.u.to_physical();
    let n_phys = s.wave.n.to_physical();
    let cubic: f64 = n_phys
        .data()
        .iter()
        .zip(u_phys.data())
        .map(|(n, u)| n.re * u.norm_sqr())
        .sum::<f64>()
        * grid.cell_volume();

    Ok(grad_sq + nt_sq / (2.0 * beta) + 0.5 * alpha * bracket_sq + gamma * cubic)
}

/// Exact plane-wave solution: u = A e^{i(k·x − ωt)} over the constant
/// background n ≡ −γA²/α, with dispersion ω = |k|² + γ²A²/α.
pub fn plane_wave(
    amplitude: f64,
    k: [i64; 3],
    grid: &Arc<Grid3D>,
    couplings: Couplings,
) -> Result<KGSState, KgsError> {
    if couplings.alpha == 0.0 {
        return Err(KgsError::DegenerateCouplings);
    }
    for a in 0..3 {
        let half = grid.shape()[a] as i64 / 2;
        if k[a] < -half || k[a] >= half {
            return Err(KgsError::OffGridWaveVector { k });
        }
    }
    let kvec = [0, 1, 2].map(|a| {
        2.0 * std::f64::consts::PI * k[a] as f64 / grid.periods()[a]
    });
    let u = Field::from_physical(
        grid,
        (0..grid.len())
            .map(|idx| {
                let x = grid.point(idx);
                Complex64::from_polar(
                    amplitude,
                    kvec[0] * x[0] + kvec[1] * x[1] + kvec[2] * x[2],
                )
            })
            .collect(),
    );
    let level = -couplings.gamma * amplitude * amplitude / couplings.alpha;
    let n = Field::from_physical(grid, vec![Complex64::new(level, 0.0); grid.len()]);
    let nt = Field::zeros(grid, crate::field::Repr::Physical);
    Ok(KGSState::new(0.0, u, WavePair::new(n, nt), couplings))
}

/// Dispersion relation of [`plane_wave`].
pub fn plane_wave_frequency(amplitude: f64, k: [f64; 3], couplings: Couplings) -> f64 {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    k2 + couplings.gamma * couplings.gamma * amplitude * amplitude / couplings.alpha
}

/// Rough random data at the edge of L² × L² × H^{−1}, normalized to
/// ‖u₀‖ = `u_l2` and unit wave norms; mean ∂ₜn is zero.
pub fn low_regularity_state(
    grid: &Arc<Grid3D>,
    seed: u64,
    u_l2: f64,
    couplings: Couplings,
) -> KGSState {
    let eps = 0.01;
    let u = sampling::low_regularity_complex(grid, 0.0, eps, seed.wrapping_mul(3), u_l2);
    let n = sampling::low_regularity_real(grid, 0.0, eps, seed.wrapping_mul(3) + 1, 1.0, |f| {
        f.l2_norm()
    });
    let nt = sampling::low_regularity_real(grid, -1.0, eps, seed.wrapping_mul(3) + 2, 1.0, |f| {
        f.sobolev_norm(-1.0)
    });
    KGSState::new(0.0, u, WavePair::new(n, nt), couplings)
}

/// Space-time norms of the Schrödinger component over a trajectory:
/// the Strichartz pair L^{10/3}L^{10/3} and L⁸L^{12/5}, the energy norm
/// L^∞L², and ‖|u|²‖_{L¹H^{−1}} feeding the wave increment.
#[derive(Debug, Clone)]
pub struct StrichartzReport {
    pub l_10_3: f64,
    pub l8_l12_5: f64,
    pub linf_l2: f64,
    pub usq_l1_hm1: f64,
}

pub fn strichartz_report(tr: &Trajectory<KGSState>) -> Result<StrichartzReport, NormError> {
    if tr.is_empty() {
        return Err(NormError::EmptyTrajectory);
    }
    let times = tr.times();
    let us: Vec<&Field<Grid3D>> = tr.states().iter().map(|s| &s.u).collect();
    let lr = |r: f64| -> Vec<f64> { us.iter().map(|u| u.lp_norm(r)).collect() };
    let l_10_3 = norms::time_lebesgue(times, &lr(10.0 / 3.0), 10.0 / 3.0)?;
    let l8_l12_5 = norms::time_lebesgue(times, &lr(12.0 / 5.0), 8.0)?;
    let linf_l2 = norms::time_lebesgue(times, &lr(2.0), f64::INFINITY)?;
    let usq: Vec<f64> = us
        .iter()
        .map(|u| {
            let up = u.to_physical();
            let data: Vec<Complex64> =
                up.data().iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
            Field::from_physical(up.grid(), data).sobolev_norm(-1.0)
        })
        .collect();
    let usq_l1_hm1 = norms::time_lebesgue(times, &usq, 1.0)?;
    Ok(StrichartzReport { l_10_3, l8_l12_5, linf_l2, usq_l1_hm1 })
}

/// Picard local solve on [t₀, t₀+horizon] with M+1 stored snapshots.
pub fn local_solve(
    s0: &KGSState,
    horizon: f64,
    p: &PicardParams,
) -> Result<LocalSolution<KGSState>, SolveError> {
    p.validate();
    assert!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive");
    let grid = s0.grid().clone();
    let nn = grid.len();
    let m = p.substeps;
    let h = horizon / m as f64;
    let mw = grid.mode_weight();
    let Couplings { beta, gamma, .. } = s0.couplings;
    let kappa = s0.couplings.kappa();

    let u0 = s0.u.spectral_vec();
    let n0 = s0.wave.n.spectral_vec();
    let v0 = s0.wave.nt.spectral_vec();

    let abs2: Vec<f64> = (0..nn).map(|i| Grid3D::freq_abs2(grid.freq(i))).collect();

    // Free-flow tables.
    let mut ugrp = Vec::with_capacity(m + 1);
    let mut ngrp = Vec::with_capacity(m + 1);
    let mut vgrp = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let t = k as f64 * h;
        let mut uk = vec![Complex64::new(0.0, 0.0); nn];
        let mut nk = vec![Complex64::new(0.0, 0.0); nn];
        let mut vk = vec![Complex64::new(0.0, 0.0); nn];
        for i in 0..nn {
            uk[i] = Complex64::from_polar(1.0, -abs2[i] * t) * u0[i];
            let (c, s, ms) = oscillator_kernel(kappa * (1.0 + abs2[i]), t);
            nk[i] = c * n0[i] + s * v0[i];
            vk[i] = -ms * n0[i] + c * v0[i];
        }
        ugrp.push(uk);
        ngrp.push(nk);
        vgrp.push(vk);
    }

    // One-substep kernels.
    let ps1: Vec<Complex64> =
        abs2.iter().map(|&a2| Complex64::from_polar(1.0, -a2 * h)).collect();
    let kg1: Vec<(f64, f64, f64)> =
        abs2.iter().map(|&a2| oscillator_kernel(kappa * (1.0 + a2), h)).collect();

    let mut u = ugrp.clone();
    let mut nw = ngrp.clone();
    let mut vw = vgrp.clone();

    let mut watch = ContractionWatch::new(p);
    loop {
        // Dealiased products per snapshot: z = n·u and f = −βγ|u|².
        let mut zhat = Vec::with_capacity(m + 1);
        let mut fhat = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let mut ud = vec![Complex64::new(0.0, 0.0); nn];
            let mut nd = vec![Complex64::new(0.0, 0.0); nn];
            for i in 0..nn {
                if grid.dealias_keep(i) {
                    ud[i] = u[k][i];
                    nd[i] = nw[k][i];
                }
            }
            grid.fft_inverse(&mut ud);
            grid.fft_inverse(&mut nd);
            let mut zp = vec![Complex64::new(0.0, 0.0); nn];
            let mut fp = vec![Complex64::new(0.0, 0.0); nn];
            for i in 0..nn {
                let uphys = ud[i] * mw;
                let nphys = nd[i].re * mw;
                zp[i] = nphys * uphys;
                fp[i] = Complex64::new(-beta * gamma * uphys.norm_sqr(), 0.0);
            }
            grid.fft_forward(&mut zp);
            grid.fft_forward(&mut fp);
            let dv = grid.cell_volume();
            for i in 0..nn {
                if grid.dealias_keep(i) {
                    zp[i] *= dv;
                    fp[i] *= dv;
                } else {
                    zp[i] = Complex64::new(0.0, 0.0);
                    fp[i] = Complex64::new(0.0, 0.0);
                }
            }
            zhat.push(zp);
            fhat.push(fp);
        }

        let mut u_new = Vec::with_capacity(m + 1);
        let mut n_new = Vec::with_capacity(m + 1);
        let mut v_new = Vec::with_capacity(m + 1);
        u_new.push(ugrp[0].clone());
        n_new.push(ngrp[0].clone());
        v_new.push(vgrp[0].clone());
        let mut i_acc = vec![Complex64::new(0.0, 0.0); nn];
        let mut nd_acc = vec![Complex64::new(0.0, 0.0); nn];
        let mut vd_acc = vec![Complex64::new(0.0, 0.0); nn];
        for k in 0..m {
            let mut uk = vec![Complex64::new(0.0, 0.0); nn];
            let mut nk = vec![Complex64::new(0.0, 0.0); nn];
            let mut vk = vec![Complex64::new(0.0, 0.0); nn];
            for i in 0..nn {
                i_acc[i] =
                    ps1[i] * i_acc[i] + 0.5 * h * (ps1[i] * zhat[k][i] + zhat[k + 1][i]);
                let (c1, s1, ms1) = kg1[i];
                let nd_next = c1 * nd_acc[i] + s1 * vd_acc[i] + 0.5 * h * s1 * fhat[k][i];
                let vd_next = -ms1 * nd_acc[i]
                    + c1 * vd_acc[i]
                    + 0.5 * h * (c1 * fhat[k][i] + fhat[k + 1][i]);
                nd_acc[i] = nd_next;
                vd_acc[i] = vd_next;
                uk[i] = ugrp[k + 1][i] + Complex64::new(0.0, gamma) * i_acc[i];
                nk[i] = ngrp[k + 1][i] + nd_acc[i];
                vk[i] = vgrp[k + 1][i] + vd_acc[i];
            }
            u_new.push(uk);
            n_new.push(nk);
            v_new.push(vk);
        }

        let mut delta = 0.0_f64;
        for k in 0..=m {
            let change = weighted_l2_diff(&u_new[k], &u[k], mw)
                + weighted_l2_diff(&n_new[k], &nw[k], mw)
                + weighted_l2_diff(&v_new[k], &vw[k], mw);
            let size = weighted_l2(&u_new[k], mw)
                + weighted_l2(&n_new[k], mw)
                + weighted_l2(&v_new[k], mw);
            delta = delta.max(change / size.max(f64::MIN_POSITIVE));
        }
        u = u_new;
        nw = n_new;
        vw = v_new;

        match watch.record(delta) {
            WatchVerdict::Converged => break,
            WatchVerdict::Continue => {}
            WatchVerdict::Diverged => return Err(watch.fail()),
        }
    }

    let mut times = Vec::with_capacity(m + 1);
    let mut states = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let t = s0.time + k as f64 * h;
        times.push(t);
        states.push(KGSState::new(
            t,
            Field::from_spectral(&grid, u[k].clone()),
            WavePair::new(
                Field::from_spectral(&grid, nw[k].clone()),
                Field::from_spectral(&grid, vw[k].clone()),
            ),
            s0.couplings,
        ));
    }
    Ok(LocalSolution { trajectory: Trajectory::new(times, states), stats: watch.into_stats() })
}
