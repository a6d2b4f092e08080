//! Constrained trilinear forms on a bounded (ξ, τ) lattice.
//!
//! The three forms share the structure
//!
//! ```text
//! Σ*  v̂(ξ,τ) v̂₁(ξ₁,τ₁) v̂₂(ξ₂,τ₂) · w(ξ) / (⟨σ⟩^{e₀} ⟨σ₁⟩^{e₁} ⟨σ₂⟩^{e₂})
//! ```
//!
//! over the convolution constraint ξ₁ = ξ+ξ₂, τ₁ = τ+τ₂, with σ = τ+ξ
//! (reduced-wave variable on the v slot) and σᵢ = τᵢ+ξᵢ² (Schrödinger on
//! the v₁, v₂ slots). The kinds differ in the ξ weight and exponent layout:
//!
//! * Schrödinger-coupling, bracket weight:      w = ⟨ξ⟩^{1/2}, (b, c₁, b₁)
//! * Schrödinger-coupling, homogeneous weight:  w = |ξ|^{1/2}, (b, c₁, b₁)
//! * wave-coupling:                             w = |ξ|⟨ξ⟩^{−1/2}, (c, b₁, b₁)
//!
//! `Direct` is the O(N⁴) reference sum; `Fast` evaluates the same sum with
//! one zero-padded 2d FFT convolution. Both carry the (dξ·dτ)² measure of
//! the double integral.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::calculus::bracket;
use super::EstimateError;

/// Uniform lattice on [−Ξ, Ξ) × [−Θ, Θ): ξ_i = (i − N_ξ/2)·dξ with
/// dξ = 2Ξ/N_ξ, and likewise in τ. Sums of lattice points stay on the
/// lattice, which is what realizes the convolution constraint exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeLattice {
    xi_max: f64,
    n_xi: usize,
    tau_max: f64,
    n_tau: usize,
}

impl SpaceTimeLattice {
    pub fn new(xi_max: f64, n_xi: usize, tau_max: f64, n_tau: usize) -> Arc<Self> {
        assert!(n_xi >= 2 && n_xi.is_multiple_of(2), "need an even ξ point count");
        assert!(n_tau >= 2 && n_tau.is_multiple_of(2), "need an even τ point count");
        assert!(xi_max > 0.0 && tau_max > 0.0);
        Arc::new(Self { xi_max, n_xi, tau_max, n_tau })
    }

    /// Square-count lattice scaled so the Schrödinger characteristic fits:
    /// dτ = 1, Θ = n/2 and Ξ = √Θ.
    pub fn characteristic_scaled(n: usize) -> Arc<Self> {
        let tau_max = n as f64 / 2.0;
        Self::new(tau_max.sqrt(), n, tau_max, n)
    }

    pub fn n_xi(&self) -> usize {
        self.n_xi
    }

    pub fn n_tau(&self) -> usize {
        self.n_tau
    }

    pub fn len(&self) -> usize {
        self.n_xi * self.n_tau
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dxi(&self) -> f64 {
        2.0 * self.xi_max / self.n_xi as f64
    }

    pub fn dtau(&self) -> f64 {
        2.0 * self.tau_max / self.n_tau as f64
    }

    pub fn xi(&self, i: usize) -> f64 {
        (i as f64 - self.n_xi as f64 / 2.0) * self.dxi()
    }

    pub fn tau(&self, j: usize) -> f64 {
        (j as f64 - self.n_tau as f64 / 2.0) * self.dtau()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_tau + j
    }
}

/// Complex function on a [`SpaceTimeLattice`].
pub struct LatticeFunction {
    lattice: Arc<SpaceTimeLattice>,
    values: Vec<Complex64>,
}

impl Clone for LatticeFunction {
    fn clone(&self) -> Self {
        Self { lattice: self.lattice.clone(), values: self.values.clone() }
    }
}

impl LatticeFunction {
    pub fn new(lattice: &Arc<SpaceTimeLattice>, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), lattice.len());
        assert!(
            values.iter().all(|v| v.re.is_finite() && v.im.is_finite()),
            "lattice values must be finite"
        );
        Self { lattice: lattice.clone(), values }
    }

    pub fn from_fn(lattice: &Arc<SpaceTimeLattice>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(lattice.len());
        for i in 0..lattice.n_xi() {
            for j in 0..lattice.n_tau() {
                values.push(f(lattice.xi(i), lattice.tau(j)));
            }
        }
        Self::new(lattice, values)
    }

    pub fn lattice(&self) -> &Arc<SpaceTimeLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            lattice: self.lattice.clone(),
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }

    /// (Σ |v|² dξ dτ)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        let cell = self.lattice.dxi() * self.lattice.dtau();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// Weight ⟨ξ⟩^{1/2}, exponents (b, c₁, b₁).
    SchrodingerBracket,
    /// Weight |ξ|^{1/2}, exponents (b, c₁, b₁).
    SchrodingerHomogeneous,
    /// Weight |ξ|⟨ξ⟩^{−1/2}, exponents (c, b₁, b₁).
    WaveCoupling,
}

impl FormKind {
    fn xi_weight(self, xi: f64) -> f64 {
        match self {
            FormKind::SchrodingerBracket => bracket(xi).sqrt(),
            FormKind::SchrodingerHomogeneous => xi.abs().sqrt(),
            FormKind::WaveCoupling => xi.abs() / bracket(xi).sqrt(),
        }
    }

    fn exponents(self, t: ExponentTriple) -> (f64, f64, f64) {
        match self {
            FormKind::SchrodingerBracket | FormKind::SchrodingerHomogeneous => (t.b, t.c1, t.b1),
            FormKind::WaveCoupling => (t.b, t.b1, t.b1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormMethod {
    /// O(N⁴) reference sum.
    Direct,
    /// FFT-based linear convolution.
    Fast,
}

/// Denominator exponents of one form. The Schrödinger-coupling forms read
/// all three fields; the wave-coupling form reads (c, b₁) via
/// [`ExponentTriple::wave_coupling`] and repeats b₁ on both σ-slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTriple {
    pub b: f64,
    pub b1: f64,
    pub c1: f64,
}

impl ExponentTriple {
    /// All indices restricted to the open interval (1/4, 1/2).
    pub fn new(b: f64, b1: f64, c1: f64) -> Result<Self, EstimateError> {
        for (name, v) in [("b", b), ("b1", b1), ("c1", c1)] {
            if !(0.25 < v && v < 0.5) {
                return Err(EstimateError::ExponentRange { name, value: v });
            }
        }
        Ok(Self { b, b1, c1 })
    }

    /// Unvalidated triple for sweeps past the admissible range.
    pub fn unchecked(b: f64, b1: f64, c1: f64) -> Self {
        Self { b, b1, c1 }
    }

    /// Wave-coupling layout (c, b₁).
    pub fn wave_coupling(c: f64, b1: f64) -> Result<Self, EstimateError> {
        Self::new(c, b1, b1)
    }

    /// b + b₁ + c₁ (equals c + 2b₁ in the wave-coupling layout); the
    /// estimates hold on sums ≥ 1.
    pub fn sum(&self) -> f64 {
        self.b + self.b1 + self.c1
    }
}

struct PreparedForm {
    /// v(ξ,τ)·w(ξ)/⟨τ+ξ⟩^{e₀}
    a: Vec<Complex64>,
    /// v₂(ξ₂,τ₂)/⟨τ₂+ξ₂²⟩^{e₂}
    b: Vec<Complex64>,
    /// v₁(ξ₁,τ₁)/⟨τ₁+ξ₁²⟩^{e₁}
    c: Vec<Complex64>,
}

fn prepare(
    v: &LatticeFunction,
    v1: &LatticeFunction,
    v2: &LatticeFunction,
    exps: ExponentTriple,
    kind: FormKind,
) -> PreparedForm {
    let lat = v.lattice();
    let (e0, e1, e2) = kind.exponents(exps);
    let mut a = vec![Complex64::new(0.0, 0.0); lat.len()];
    let mut b = vec![Complex64::new(0.0, 0.0); lat.len()];
    let mut c = vec![Complex64::new(0.0, 0.0); lat.len()];
    for i in 0..lat.n_xi() {
        let xi = lat.xi(i);
        for j in 0..lat.n_tau() {
            let tau = lat.tau(j);
            let idx = lat.index(i, j);
            a[idx] = v.values()[idx] * kind.xi_weight(xi) / bracket(tau + xi).powf(e0);
            let schrodinger = bracket(tau + xi * xi);
            b[idx] = v2.values()[idx] / schrodinger.powf(e2);
            c[idx] = v1.values()[idx] / schrodinger.powf(e1);
        }
    }
    PreparedForm { a, b, c }
}

fn direct_sum(lat: &SpaceTimeLattice, p: &PreparedForm) -> Complex64 {
    let (nx, nt) = (lat.n_xi(), lat.n_tau());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..nx {
        for j in 0..nt {
            let av = p.a[lat.index(i, j)];
            if av == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..nx {
                let i1 = i + i2;
                if i1 < nx / 2 || i1 >= nx + nx / 2 {
                    continue;
                }
                let i1 = i1 - nx / 2;
                for j2 in 0..nt {
                    let j1 = j + j2;
                    if j1 < nt / 2 || j1 >= nt + nt / 2 {
                        continue;
                    }
                    let j1 = j1 - nt / 2;
                    acc += av * p.b[lat.index(i2, j2)] * p.c[lat.index(i1, j1)];
                }
            }
        }
    }
    acc
}

/// In-place 2d DFT of a rows×cols row-major array.
fn fft2(data: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let row_plan =
        if inverse { planner.plan_fft_inverse(cols) } else { planner.plan_fft_forward(cols) };
    for row in data.chunks_exact_mut(cols) {
        row_plan.process(row);
    }
    let col_plan =
        if inverse { planner.plan_fft_inverse(rows) } else { planner.plan_fft_forward(rows) };
    let mut line = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            line[r] = data[r * cols + c];
        }
        col_plan.process(&mut line);
        for r in 0..rows {
            data[r * cols + c] = line[r];
        }
    }
}

fn fast_sum(lat: &SpaceTimeLattice, p: &PreparedForm) -> Complex64 {
    let (nx, nt) = (lat.n_xi(), lat.n_tau());
    // Zero-padded linear convolution conv[k,l] = Σ A[i,j]·B[k−i, l−j].
    let (px, pt) = (2 * nx, 2 * nt);
    let mut fa = vec![Complex64::new(0.0, 0.0); px * pt];
    let mut fb = vec![Complex64::new(0.0, 0.0); px * pt];
    for i in 0..nx {
        for j in 0..nt {
            fa[i * pt + j] = p.a[lat.index(i, j)];
            fb[i * pt + j] = p.b[lat.index(i, j)];
        }
    }
    fft2(&mut fa, px, pt, false);
    fft2(&mut fb, px, pt, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft2(&mut fa, px, pt, true);
    let norm = 1.0 / (px * pt) as f64;
    // Constraint i + i2 = i1 + nx/2, j + j2 = j1 + nt/2.
    let mut acc = Complex64::new(0.0, 0.0);
    for i1 in 0..nx {
        for j1 in 0..nt {
            acc += p.c[lat.index(i1, j1)] * fa[(i1 + nx / 2) * pt + (j1 + nt / 2)] * norm;
        }
    }
    acc
}

/// |Σ*| with the kind's weight and denominators; see the module docs.
pub fn trilinear_form(
    v: &LatticeFunction,
    v1: &LatticeFunction,
    v2: &LatticeFunction,
    exps: ExponentTriple,
    kind: FormKind,
    method: FormMethod,
) -> Result<f64, EstimateError> {
    let lat = v.lattice();
    if **lat != **v1.lattice() || **lat != **v2.lattice() {
        return Err(EstimateError::LatticeMismatch);
    }
    let prepared = prepare(v, v1, v2, exps, kind);
    let raw = match method {
        FormMethod::Direct => direct_sum(lat, &prepared),
        FormMethod::Fast => fast_sum(lat, &prepared),
    };
    let cell = lat.dxi() * lat.dtau();
    Ok(raw.norm() * cell * cell)
}

/// |form| / (‖v‖‖v₁‖‖v₂‖); the statistic the estimates bound.
pub fn form_ratio(
    v: &LatticeFunction,
    v1: &LatticeFunction,
    v2: &LatticeFunction,
    exps: ExponentTriple,
    kind: FormKind,
    method: FormMethod,
) -> Result<f64, EstimateError> {
    let denom = v.l2_norm() * v1.l2_norm() * v2.l2_norm();
    let num = trilinear_form(v, v1, v2, exps, kind, method)?;
    Ok(num / denom.max(f64::MIN_POSITIVE))
}
