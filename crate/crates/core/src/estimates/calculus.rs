//! Bracket weights and the two calculus facts the trilinear estimates rest
//! on, checked numerically:
//!
//! * decay of ∫ ⟨y−s⟩^{−2a₊} ⟨y+s⟩^{−2a₋} dy like ⟨s⟩^{−α} with
//!   α = 2a₋ − [1−2a₊]₊, for 0 ≤ a₋ ≤ a₊ and a₊+a₋ > ½;
//! * convolution of nonnegative, even, nonincreasing profiles keeps all
//!   three properties.
//!
//! The integral is evaluated by adaptive Simpson quadrature on a truncated
//! domain; the discarded tail is controlled by the closed-form bound
//! 2(Y−s)^{1−2p}/(2p−1) with p = a₊+a₋, reported alongside each value.

use super::EstimateError;

/// Japanese bracket ⟨x⟩ = (1+x²)^{1/2}.
#[inline]
pub fn bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// [λ]₊ = λ for λ > 0, ε at λ = 0, and 0 for λ < 0.
pub fn lambda_plus(lambda: f64, eps: f64) -> f64 {
    assert!(eps > 0.0, "ε must be positive");
    if lambda > 0.0 {
        lambda
    } else if lambda == 0.0 {
        eps
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dispersion {
    Schrodinger,
    WavePlus,
    WaveMinus,
}

/// Bourgain weight ⟨σ⟩ with σ = τ + ξ² (Schrödinger) or σ = τ ± ξ
/// (reduced wave); equals 1 exactly on the characteristic set.
pub fn xsb_weight(xi: f64, tau: f64, dispersion: Dispersion) -> f64 {
    let sigma = match dispersion {
        Dispersion::Schrodinger => tau + xi * xi,
        Dispersion::WavePlus => tau + xi,
        Dispersion::WaveMinus => tau - xi,
    };
    bracket(sigma)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(&f, a, fa, b, fb, fm, whole, tol, 40)
}

#[derive(Debug, Clone, Copy)]
pub struct DecayRow {
    pub s: f64,
    pub integral: f64,
    /// integral · ⟨s⟩^α
    pub weighted: f64,
    /// closed-form bound on the discarded tail
    pub tail_bound: f64,
}

#[derive(Debug, Clone)]
pub struct DecayCheck {
    pub alpha: f64,
    pub sup_weighted: f64,
    pub rows: Vec<DecayRow>,
}

#[derive(Debug, Clone, Copy)]
pub struct DecayOptions {
    /// Multiplies the default truncation Y(s) = 4·max(s,1) + 100.
    pub domain_scale: f64,
    pub quad_tol: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self { domain_scale: 1.0, quad_tol: 1e-10 }
    }
}

/// sup over `s_values` of ⟨s⟩^α ∫ ⟨y−s⟩^{−2a₊}⟨y+s⟩^{−2a₋} dy.
pub fn bracket_decay_check(
    a_plus: f64,
    a_minus: f64,
    s_values: &[f64],
    eps: f64,
    options: DecayOptions,
) -> Result<DecayCheck, EstimateError> {
    if !(0.0 <= a_minus && a_minus <= a_plus) {
        return Err(EstimateError::HypothesisViolated(format!(
            "need 0 ≤ a₋ ≤ a₊, got a₊ = {a_plus}, a₋ = {a_minus}"
        )));
    }
    let p = a_plus + a_minus;
    if p <= 0.5 {
        return Err(EstimateError::HypothesisViolated(format!(
            "need a₊ + a₋ > 1/2, got {p}"
        )));
    }
    let alpha = 2.0 * a_minus - lambda_plus(1.0 - 2.0 * a_plus, eps);

    let mut rows = Vec::with_capacity(s_values.len());
    let mut sup = 0.0_f64;
    for &s in s_values {
        assert!(s >= 0.0, "s grid must be nonnegative (the integral is even in s)");
        let y_max = options.domain_scale * (4.0 * s.max(1.0) + 100.0);
        let f = |y: f64| bracket(y - s).powf(-2.0 * a_plus) * bracket(y + s).powf(-2.0 * a_minus);
        // Segment boundaries at the integrand peaks ±s.
        let mut cuts = vec![-y_max, -s, 0.0, s, y_max];
        cuts.dedup_by(|a, b| a == b);
        let mut integral = 0.0;
        for w in cuts.windows(2) {
            integral += adaptive_simpson(f, w[0], w[1], options.quad_tol);
        }
        let tail_bound = 2.0 * (y_max - s).powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
        let weighted = integral * bracket(s).powf(alpha);
        sup = sup.max(weighted);
        rows.push(DecayRow { s, integral, weighted, tail_bound });
    }
    Ok(DecayCheck { alpha, sup_weighted: sup, rows })
}

/// Real profile sampled on the symmetric grid y_i = (i − (len−1)/2)·spacing,
/// with odd length.
#[derive(Debug, Clone)]
pub struct SampledProfile {
    spacing: f64,
    values: Vec<f64>,
}

impl SampledProfile {
    pub fn new(spacing: f64, values: Vec<f64>) -> Self {
        assert!(spacing > 0.0, "spacing must be positive");
        assert!(values.len() % 2 == 1, "profile grid must be symmetric (odd length)");
        Self { spacing, values }
    }

    /// Sample y ↦ f(y) on `half_points` points either side of zero.
    pub fn from_fn(spacing: f64, half_points: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..=2 * half_points)
            .map(|i| f((i as f64 - half_points as f64) * spacing))
            .collect();
        Self::new(spacing, values)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn half(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn shape_violation(&self, tol: f64) -> Option<String> {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let half = self.half();
        let v = &self.values;
        for (i, &x) in v.iter().enumerate() {
            if x < -tol * scale {
                return Some(format!("negative value {x:.3e} at slot {i}"));
            }
        }
        for i in 0..v.len() {
            let j = v.len() - 1 - i;
            if (v[i] - v[j]).abs() > tol * scale {
                return Some(format!("not even at slot {i}: {} vs {}", v[i], v[j]));
            }
        }
        for i in half..v.len() - 1 {
            if v[i + 1] > v[i] + tol * scale {
                return Some(format!(
                    "increasing on y > 0 at slot {}: {} -> {}",
                    i,
                    v[i],
                    v[i + 1]
                ));
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
pub struct ConvolutionCheck {
    pub convolution: SampledProfile,
    pub nonnegative: bool,
    pub even: bool,
    pub nonincreasing: bool,
}

impl ConvolutionCheck {
    pub fn passed(&self) -> bool {
        self.nonnegative && self.even && self.nonincreasing
    }
}

/// Discrete f∗g on the common grid (out-of-range samples treated as zero),
/// asserting that nonnegativity, evenness and monotone decay survive the
/// convolution to within 1e−10.
pub fn convolution_shape_check(
    f: &SampledProfile,
    g: &SampledProfile,
) -> Result<ConvolutionCheck, EstimateError> {
    if (f.spacing - g.spacing).abs() > 1e-12 * f.spacing {
        return Err(EstimateError::PreconditionViolated(
            "profiles sampled with different spacings".into(),
        ));
    }
    for (name, p) in [("f", f), ("g", g)] {
        if let Some(why) = p.shape_violation(1e-12) {
            return Err(EstimateError::PreconditionViolated(format!("{name}: {why}")));
        }
    }
    let h = f.spacing;
    let n = f.values.len();
    let m = g.values.len();
    let gh = g.half() as i64;
    let mut out = vec![0.0_f64; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (i, &fv) in f.values.iter().enumerate() {
            let j = k as i64 - i as i64 + gh;
            if j >= 0 && (j as usize) < m {
                acc += fv * g.values[j as usize];
            }
        }
        *slot = acc * h;
    }
    let convolution = SampledProfile::new(h, out);
    let tol = 1e-10;
    let scale = convolution.max_abs().max(f64::MIN_POSITIVE);
    let half = convolution.half();
    let v = &convolution.values;
    let nonnegative = v.iter().all(|&x| x >= -tol * scale);
    let even = (0..v.len()).all(|i| (v[i] - v[v.len() - 1 - i]).abs() <= tol * scale);
    let nonincreasing = (half..v.len() - 1).all(|i| v[i + 1] <= v[i] + tol * scale);
    Ok(ConvolutionCheck { convolution, nonnegative, even, nonincreasing })
}

/// The algebraic resonance relation on the convolution-constrained set:
/// returns ((ξ₁−½)² − (ξ₂−½)², σ₁ − σ − σ₂) for ξ = ξ₁−ξ₂, τ = τ₁−τ₂.
pub fn resonance_identity(xi1: f64, tau1: f64, xi2: f64, tau2: f64) -> (f64, f64) {
    let xi = xi1 - xi2;
    let tau = tau1 - tau2;
    let sigma = tau + xi;
    let sigma1 = tau1 + xi1 * xi1;
    let sigma2 = tau2 + xi2 * xi2;
    let closed = (xi1 - 0.5).powi(2) - (xi2 - 0.5).powi(2);
    (closed, sigma1 - sigma - sigma2)
}
