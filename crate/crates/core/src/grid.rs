//! Periodic grids and the discrete Fourier transform convention.
//!
//! The line (or ℝ³) is truncated to a torus of period `L` per axis. With
//! `n` points per axis, `dx = L/n` and the discrete frequencies are
//! ξ_k = 2πk/L for k ∈ {−n/2, …, n/2 − 1}, stored in FFT order
//! (k = 0, 1, …, n/2−1, −n/2, …, −1).
//!
//! Transform convention:
//!
//! * forward:  f̂(ξ) = Σ_j f(x_j) e^{−iξ·x_j} dV    (approximates ∫ f e^{−iξx} dx)
//! * inverse:  f(x) = Σ_k f̂(ξ_k) e^{iξ_k·x} / V     (approximates (2π)^{−d} ∫ f̂ e^{iξx} dξ)
//!
//! so the spectral measure per mode, Π_a dξ_a / (2π)^d, equals 1/V. Under
//! this convention Parseval reads Σ_j |f_j|² dV = Σ_k |f̂_k|² / V.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Signed mode number of the `i`-th FFT slot of an `n`-point transform.
#[inline]
pub fn mode_number(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plan_pair(n: usize) -> PlanPair {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

/// A periodic grid together with its FFT plans and frequency table.
///
/// All methods are `&self`; plans from `rustfft` are internally `Send + Sync`
/// so one grid can serve many threads.
pub trait Grid: Send + Sync + Sized + 'static {
    /// Frequency of a single mode: `f64` in 1d, `[f64; 3]` in 3d.
    type Freq: Copy + Send + Sync;

    fn dim(&self) -> usize;
    /// Total number of points (= number of modes).
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Product of the periods.
    fn volume(&self) -> f64;
    /// Physical quadrature weight dV per point.
    fn cell_volume(&self) -> f64;
    /// Spectral quadrature weight per mode: Π dξ / (2π)^d = 1/V.
    fn mode_weight(&self) -> f64 {
        1.0 / self.volume()
    }
    fn freq(&self, idx: usize) -> Self::Freq;
    fn freq_abs2(freq: Self::Freq) -> f64;
    /// Keep-mask of the 2/3 dealiasing rule: true iff 3|k| < n on every axis.
    fn dealias_keep(&self, idx: usize) -> bool;
    /// Unnormalized DFT, in place (no dV factor).
    fn fft_forward(&self, buf: &mut [Complex64]);
    /// Unnormalized inverse DFT, in place (no 1/n factor).
    fn fft_inverse(&self, buf: &mut [Complex64]);
    /// Slot of the mode with frequency −ξ(idx).
    fn conj_index(&self, idx: usize) -> usize;
    fn same_grid(&self, other: &Self) -> bool;
}

/// One-dimensional periodic grid with a power-of-two point count.
pub struct Grid1D {
    n: usize,
    period: f64,
    freqs: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Grid1D {
    /// Panics unless `n` is a power of two ≥ 4 and `period > 0`.
    pub fn new(n: usize, period: f64) -> Arc<Self> {
        assert!(n >= 4 && n.is_power_of_two(), "grid size must be a power of two >= 4");
        assert!(period > 0.0 && period.is_finite(), "period must be positive");
        let freqs = (0..n)
            .map(|i| 2.0 * std::f64::consts::PI * mode_number(i, n) as f64 / period)
            .collect();
        let (fwd, inv) = plan_pair(n);
        Arc::new(Self { n, period, freqs, fwd, inv })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Grid point x_j = j·dx.
    pub fn point(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }

    /// FFT-ordered frequencies ξ_k.
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    /// Slot of the (negative) Nyquist mode k = −n/2.
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }
}

impl Grid for Grid1D {
    type Freq = f64;

    fn dim(&self) -> usize {
        1
    }

    fn len(&self) -> usize {
        self.n
    }

    fn volume(&self) -> f64 {
        self.period
    }

    fn cell_volume(&self) -> f64 {
        self.dx()
    }

    fn freq(&self, idx: usize) -> f64 {
        self.freqs[idx]
    }

    fn freq_abs2(freq: f64) -> f64 {
        freq * freq
    }

    fn dealias_keep(&self, idx: usize) -> bool {
        3 * (mode_number(idx, self.n).unsigned_abs() as usize) < self.n
    }

    fn fft_forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.fwd.process(buf);
    }

    fn fft_inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inv.process(buf);
    }

    fn conj_index(&self, idx: usize) -> usize {
        if idx == 0 {
            0
        } else {
            self.n - idx
        }
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && self.period == other.period
    }
}

/// Three-dimensional periodic grid, row-major with z fastest:
/// `idx = (ix·ny + iy)·nz + iz`.
pub struct Grid3D {
    n: [usize; 3],
    period: [f64; 3],
    axis_freqs: [Vec<f64>; 3],
    plans: [PlanPair; 3],
}

impl Grid3D {
    pub fn new(n: [usize; 3], period: [f64; 3]) -> Arc<Self> {
        for a in 0..3 {
            assert!(n[a] >= 4 && n[a].is_power_of_two(), "grid size must be a power of two >= 4");
            assert!(period[a] > 0.0 && period[a].is_finite(), "period must be positive");
        }
        let axis_freqs = [0, 1, 2].map(|a| {
            (0..n[a])
                .map(|i| 2.0 * std::f64::consts::PI * mode_number(i, n[a]) as f64 / period[a])
                .collect()
        });
        let plans = [0, 1, 2].map(|a| plan_pair(n[a]));
        Arc::new(Self { n, period, axis_freqs, plans })
    }

    /// Cube with `n` points and period `l` per axis.
    pub fn cube(n: usize, l: f64) -> Arc<Self> {
        Self::new([n; 3], [l; 3])
    }

    pub fn shape(&self) -> [usize; 3] {
        self.n
    }

    pub fn periods(&self) -> [f64; 3] {
        self.period
    }

    #[inline]
    pub fn decompose(&self, idx: usize) -> [usize; 3] {
        let [_, ny, nz] = self.n;
        [idx / (ny * nz), (idx / nz) % ny, idx % nz]
    }

    /// Flat slot of the mode with per-axis numbers `k` (negative allowed).
    pub fn index_of_mode(&self, k: [i64; 3]) -> usize {
        let mut idx = 0;
        for a in 0..3 {
            let na = self.n[a] as i64;
            let half = na / 2;
            assert!(k[a] >= -half && k[a] < half, "mode {k:?} not on the grid");
            let slot = k[a].rem_euclid(na) as usize;
            idx = idx * self.n[a] + slot;
        }
        idx
    }

    /// Grid point of a flat index.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ijk = self.decompose(idx);
        [0, 1, 2].map(|a| ijk[a] as f64 * self.period[a] / self.n[a] as f64)
    }

    fn transform_axis(&self, buf: &mut [Complex64], axis: usize, forward: bool) {
        let [nx, ny, nz] = self.n;
        let plan = if forward { &self.plans[axis].0 } else { &self.plans[axis].1 };
        match axis {
            2 => {
                for line in buf.chunks_exact_mut(nz) {
                    plan.process(line);
                }
            }
            1 => {
                let mut line = vec![Complex64::new(0.0, 0.0); ny];
                for ix in 0..nx {
                    for iz in 0..nz {
                        let base = ix * ny * nz + iz;
                        for iy in 0..ny {
                            line[iy] = buf[base + iy * nz];
                        }
                        plan.process(&mut line);
                        for iy in 0..ny {
                            buf[base + iy * nz] = line[iy];
                        }
                    }
                }
            }
            0 => {
                let stride = ny * nz;
                let mut line = vec![Complex64::new(0.0, 0.0); nx];
                for rest in 0..stride {
                    for ix in 0..nx {
                        line[ix] = buf[rest + ix * stride];
                    }
                    plan.process(&mut line);
                    for ix in 0..nx {
                        buf[rest + ix * stride] = line[ix];
                    }
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Grid for Grid3D {
    type Freq = [f64; 3];

    fn dim(&self) -> usize {
        3
    }

    fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    fn volume(&self) -> f64 {
        self.period[0] * self.period[1] * self.period[2]
    }

    fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    fn freq(&self, idx: usize) -> [f64; 3] {
        let ijk = self.decompose(idx);
        [0, 1, 2].map(|a| self.axis_freqs[a][ijk[a]])
    }

    fn freq_abs2(freq: [f64; 3]) -> f64 {
        freq[0] * freq[0] + freq[1] * freq[1] + freq[2] * freq[2]
    }

    fn dealias_keep(&self, idx: usize) -> bool {
        let ijk = self.decompose(idx);
        (0..3).all(|a| 3 * (mode_number(ijk[a], self.n[a]).unsigned_abs() as usize) < self.n[a])
    }

    fn fft_forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len());
        for axis in 0..3 {
            self.transform_axis(buf, axis, true);
        }
    }

    fn fft_inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len());
        for axis in 0..3 {
            self.transform_axis(buf, axis, false);
        }
    }

    fn conj_index(&self, idx: usize) -> usize {
        let ijk = self.decompose(idx);
        let conj = [0, 1, 2].map(|a| if ijk[a] == 0 { 0 } else { self.n[a] - ijk[a] });
        (conj[0] * self.n[1] + conj[1]) * self.n[2] + conj[2]
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && self.period == other.period
    }
}
