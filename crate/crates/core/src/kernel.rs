//! Truncated causal predictor kernels and their spectral diagnostics.
//!
//! [`build_kernel`] synthesizes `k̂ = Z⁻¹K̂` along two independent routes:
//!
//! * **spectral**: sample `K̂(e^{iω})` on `N` uniform nodes and apply an
//!   inverse DFT. This route measures causality (mass at negative lags) and
//!   the imaginary residue.
//! * **Laurent**: the coefficients of `zV(z)` in powers of `z⁻¹`, generated
//!   by a three-term recurrence in double-double arithmetic.
//!
//! The two must agree to `1e-9 · max|k̂|`. The stored taps are the Laurent
//! values, kept as `hi + lo` pairs: for large `gamma` the taps reach `1e14`
//! and more while their sum stays below one, so double precision alone
//! cannot represent the filter.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleF64;
use crate::error::{Error, Result};
use crate::quadrature::{romberg, DEFAULT_REL_TOL};
use crate::spectral_core::{
    alpha_for, log_abs_error_gain, log_abs_khat, transfer_khat, AlphaRule, FrequencyGrid, PredictorParams,
};

/// Accepted causality defect and route disagreement, relative to `max|k̂|`.
pub const CAUSALITY_TOLERANCE: f64 = 1e-9;
/// Automatic truncation stops once the remaining tap mass drops below this.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorKernel {
    params: PredictorParams,
    fft_size: usize,
    truncation: usize,
    coeffs: Vec<f64>,
    coeffs_lo: Vec<f64>,
    causality_defect: f64,
    imaginary_residue: f64,
    synthesis_residual: f64,
    tail_bound: f64,
    l1_norm: f64,
}

impl PredictorKernel {
    pub fn params(&self) -> &PredictorParams {
        &self.params
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma()
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha()
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    /// Largest lag `T`; the kernel holds `T + 1` taps.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Leading (double precision) part of the taps `k̂(0..=T)`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Low-order parts; `coeffs[t] + coeffs_lo[t]` is the tap to ~32 digits.
    pub fn coeffs_lo(&self) -> &[f64] {
        &self.coeffs_lo
    }

    pub fn tap(&self, t: usize) -> DoubleF64 {
        DoubleF64::new(self.coeffs[t], self.coeffs_lo[t])
    }

    /// Largest tap magnitude at a negative lag on the spectral route.
    pub fn causality_defect(&self) -> f64 {
        self.causality_defect
    }

    /// Largest imaginary part left by the inverse transform.
    pub fn imaginary_residue(&self) -> f64 {
        self.imaginary_residue
    }

    /// `max_t |k̂_spectral(t) - k̂_laurent(t)|`.
    pub fn synthesis_residual(&self) -> f64 {
        self.synthesis_residual
    }

    /// Bound on `Σ_{t>T} |k̂(t)|`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `Σ_{t=0..=T} |k̂(t)|`.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `Σ_{M<t<=T} |k̂(t)| + tail_bound`: the tap mass a memory-`M` predictor drops.
    pub fn tail_l1_beyond(&self, memory: usize) -> f64 {
        let inside: f64 = self.coeffs.iter().skip(memory + 1).map(|c| c.abs()).sum();
        inside + self.tail_bound
    }

    /// `Σ_{t=0..=T} k̂(t)`, which approximates `K̂(1)`.
    pub fn dc_sum(&self) -> DoubleF64 {
        (0..=self.truncation).fold(DoubleF64::ZERO, |acc, t| acc + self.tap(t))
    }

    /// `Σ_{t=0..=T} k̂(t)²`.
    pub fn energy(&self) -> f64 {
        (0..=self.truncation)
            .fold(DoubleF64::ZERO, |acc, t| {
                let c = self.tap(t);
                acc + c * c
            })
            .to_f64()
    }

    pub fn to_record(&self) -> KernelRecord {
        KernelRecord {
            gamma: self.params.gamma(),
            q: self.params.q(),
            mu: self.params.mu(),
            alpha_rule: self.params.rule(),
            alpha: self.params.alpha(),
            fft_size: self.fft_size,
            truncation: self.truncation,
            causality_defect: self.causality_defect,
            imaginary_residue: self.imaginary_residue,
            synthesis_residual: self.synthesis_residual,
            tail_bound: self.tail_bound,
            l1_norm: self.l1_norm,
            coeffs: self.coeffs.clone(),
            coeffs_lo: self.coeffs_lo.clone(),
            metadata: None,
        }
    }

    pub fn from_record(record: KernelRecord) -> Result<Self> {
        let params = PredictorParams::new(record.gamma, record.q, record.mu, record.alpha_rule)?;
        let alpha = alpha_for(record.gamma, record.q, record.mu, record.alpha_rule)?;
        if alpha.to_bits() != record.alpha.to_bits() && (alpha - record.alpha).abs() > 1e-15 {
            return Err(Error::Format(format!(
                "recorded alpha {} does not match parameters (expected {alpha})",
                record.alpha
            )));
        }
        let n = record.truncation + 1;
        if record.coeffs.len() != n {
            return Err(Error::Format(format!(
                "kernel record has {} coefficients, expected T + 1 = {n}",
                record.coeffs.len()
            )));
        }
        let coeffs_lo = if record.coeffs_lo.is_empty() {
            vec![0.0; n]
        } else if record.coeffs_lo.len() == n {
            record.coeffs_lo
        } else {
            return Err(Error::Format("coeffs_lo length does not match coeffs".into()));
        };
        if record.coeffs.iter().chain(&coeffs_lo).any(|c| !c.is_finite()) {
            return Err(Error::Format("kernel record contains non-finite coefficients".into()));
        }
        let l1_norm = record.coeffs.iter().map(|c| c.abs()).sum();
        Ok(Self {
            params,
            fft_size: record.fft_size,
            truncation: record.truncation,
            coeffs: record.coeffs,
            coeffs_lo,
            causality_defect: record.causality_defect,
            imaginary_residue: record.imaginary_residue,
            synthesis_residual: record.synthesis_residual,
            tail_bound: record.tail_bound,
            l1_norm,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_record(serde_json::from_str(s)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// On-disk form of a kernel. Floats are written in shortest round-trip form,
/// so reading a record back reproduces every coefficient bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRecord {
    pub gamma: f64,
    pub q: f64,
    pub mu: f64,
    pub alpha_rule: AlphaRule,
    pub alpha: f64,
    pub fft_size: usize,
    #[serde(rename = "T")]
    pub truncation: usize,
    #[serde(default)]
    pub causality_defect: f64,
    #[serde(default)]
    pub imaginary_residue: f64,
    #[serde(default)]
    pub synthesis_residual: f64,
    #[serde(default, deserialize_with = "null_as_infinity")]
    pub tail_bound: f64,
    #[serde(default)]
    pub l1_norm: f64,
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub coeffs_lo: Vec<f64>,
    /// Provenance written by the command-line tool; ignored when loading.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// Non-finite floats are written as `null`; an unbounded tail reads back as `+inf`.
fn null_as_infinity<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// Wraps `ω ∈ [0, 2π)` into `[-π, π)`.
fn fft_node(j: usize, n: usize) -> f64 {
    if 2 * j <= n {
        2.0 * PI * j as f64 / n as f64
    } else {
        -2.0 * PI * (n - j) as f64 / n as f64
    }
}

/// Spectral route: `c_n = (1/N) Σ_j K̂(e^{iω_j}) e^{iω_j n}`, lag `n - N` for `n >= N/2`.
pub fn spectral_taps(p: &PredictorParams, fft_size: usize) -> Result<Vec<Complex64>> {
    let mut buf = (0..fft_size)
        .map(|j| transfer_khat(fft_node(j, fft_size), p.gamma(), p.alpha()))
        .collect::<Result<Vec<_>>>()?;
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(fft_size).process(&mut buf);
    let scale = 1.0 / fft_size as f64;
    for c in &mut buf {
        *c *= scale;
    }
    Ok(buf)
}

/// Laurent route: `zV(z) = Σ_{t>=0} k̂(t) z^{-t}` with `k̂(t) = -a_{t+1}`, where
/// `a_n` are the power-series coefficients of `exp(-γu / (1 + αu))` in
/// `u = z⁻¹`. From `(1 + αu)² f' = -γ f`:
/// `(n+1) a_{n+1} = -(γ + 2αn) a_n - α²(n-1) a_{n-1}`.
pub fn laurent_taps(gamma: f64, alpha: f64, count: usize) -> Vec<DoubleF64> {
    let g = DoubleF64::from(gamma);
    let a2 = DoubleF64::from_prod(alpha, alpha);
    let mut taps = Vec::with_capacity(count);
    let mut prev = DoubleF64::ONE; // a_0
    let mut cur = -g; // a_1
    for n in 1..=count {
        taps.push(-cur);
        let nf = n as f64;
        let lin = g + DoubleF64::from_prod(2.0 * alpha, nf);
        let next = -(lin * cur + a2.mul_f64(nf - 1.0) * prev).div_f64(nf + 1.0);
        prev = cur;
        cur = next;
    }
    taps
}

/// Geometric bound on `Σ_{t>=len} |k(t)|` from the last two decades of magnitudes.
fn geometric_tail(mags: &[f64]) -> f64 {
    // Ignore the region where the recurrence has decayed into subnormals.
    let len = mags.iter().rposition(|&m| m > 1e-280).map_or(0, |i| i + 1);
    if len < mags.len() && len >= 20 {
        let beyond: f64 = mags[len..].iter().sum();
        return beyond + geometric_tail(&mags[..len]);
    }
    if len < 20 {
        return f64::INFINITY;
    }
    let last = mags[len - 10..].iter().cloned().fold(0.0, f64::max);
    if last == 0.0 {
        return 0.0;
    }
    let before = mags[len - 20..len - 10].iter().cloned().fold(0.0, f64::max);
    let ratio = (last / before).powf(0.1);
    if !(ratio < 1.0) {
        return f64::INFINITY;
    }
    last * ratio / (1.0 - ratio)
}

/// Synthesizes the truncated kernel. `truncation = None` picks the smallest
/// `T` whose remaining tap mass is below [`TAIL_TOLERANCE`], capped at `N/4`.
pub fn build_kernel(p: &PredictorParams, fft_size: usize, truncation: Option<usize>) -> Result<PredictorKernel> {
    if !fft_size.is_power_of_two() || fft_size < 16 {
        return Err(Error::InvalidParameter(format!(
            "fft_size must be a power of two >= 16, got {fft_size}"
        )));
    }
    if let Some(t) = truncation {
        if t == 0 || 2 * t > fft_size {
            return Err(Error::InvalidParameter(format!(
                "truncation must satisfy 1 <= T <= fft_size/2, got T = {t}, fft_size = {fft_size}"
            )));
        }
    }

    let spectral = spectral_taps(p, fft_size)?;
    let half = fft_size / 2;
    let laurent = laurent_taps(p.gamma(), p.alpha(), half + 1);
    let mags: Vec<f64> = laurent.iter().map(|c| c.hi.abs()).collect();
    let max_abs = mags.iter().cloned().fold(0.0, f64::max);

    let causality_defect = spectral[half..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let threshold = CAUSALITY_TOLERANCE * max_abs;
    if causality_defect > threshold {
        return Err(Error::NonCausal {
            defect: causality_defect,
            threshold,
        });
    }
    let imaginary_residue = spectral[..half].iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let synthesis_residual = spectral[..half]
        .iter()
        .zip(&laurent)
        .map(|(s, l)| (s.re - l.hi).abs())
        .fold(0.0, f64::max);
    if synthesis_residual > threshold {
        return Err(Error::SynthesisMismatch {
            residual: synthesis_residual,
            tolerance: threshold,
        });
    }

    // suffix[t] = Σ_{s>t} |k(s)| including the extrapolated tail.
    let mut suffix = vec![0.0; mags.len()];
    let mut acc = geometric_tail(&mags);
    for t in (0..mags.len()).rev() {
        suffix[t] = acc;
        acc += mags[t];
    }
    let total = acc;
    let truncation = match truncation {
        Some(t) => t,
        None => {
            let tol = TAIL_TOLERANCE * total.min(1.0);
            let cap = (fft_size / 4).max(1);
            (1..=cap).find(|&t| suffix[t] <= tol).unwrap_or(cap)
        }
    };

    let taps = &laurent[..=truncation];
    Ok(PredictorKernel {
        params: *p,
        fft_size,
        truncation,
        coeffs: taps.iter().map(|c| c.hi).collect(),
        coeffs_lo: taps.iter().map(|c| c.lo).collect(),
        causality_defect,
        imaginary_residue,
        synthesis_residual,
        tail_bound: suffix[truncation],
        l1_norm: mags[..=truncation].iter().sum(),
    })
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = f(a).max(f(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    best = best.max(f1).max(f2);
    best
}

/// `ln κ` with `κ = sup_ω |K̂(e^{iω})|`: grid maximum refined by golden-section
/// search on the neighbouring cells.
pub fn log_kappa(p: &PredictorParams, grid: &FrequencyGrid) -> f64 {
    let (gamma, alpha) = (p.gamma(), p.alpha());
    let f = |w: f64| log_abs_khat(w, gamma, alpha);
    let (j_best, v_best) = grid
        .nodes()
        .map(f)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bj, bv), (j, v)| if v > bv { (j, v) } else { (bj, bv) });
    let center = grid.node(j_best);
    let h = grid.spacing();
    let left = golden_max(&f, (center - h).max(-PI), center);
    let right = golden_max(&f, center, (center + h).min(PI));
    let mut best = v_best.max(left).max(right);
    if j_best == 0 {
        // -π and π are the same point; search the cell just below π as well.
        best = best.max(golden_max(&f, PI - h, PI));
    }
    best
}

/// `κ = sup_ω |K̂(e^{iω})|`; `+inf` once it exceeds the double range.
pub fn kappa(p: &PredictorParams, grid: &FrequencyGrid) -> f64 {
    log_kappa(p, grid).exp()
}

/// `ψ(γ) = ∫_{D₊(α)} |1 - V(e^{iω})|^ρ dω` (the factor `|K| = 1` drops out).
pub fn psi(p: &PredictorParams, rho: u32, grid: &FrequencyGrid) -> f64 {
    let (gamma, alpha) = (p.gamma(), p.alpha());
    let boundary = (-alpha).acos();
    let rho = f64::from(rho.max(1));
    let panels = ((grid.size() as f64 * boundary / (2.0 * PI)).ceil() as usize).max(8);
    let half = romberg(
        |w| (rho * log_abs_error_gain(w, gamma, alpha)).exp(),
        0.0,
        boundary,
        panels,
        DEFAULT_REL_TOL,
    );
    2.0 * half
}

/// `(2 arccos α)^{1/ρ}`, the factor multiplying `‖X h‖_∞` in the bound on `I₁^{1/ρ}`.
pub fn i1_bound_factor(alpha: f64, rho: f64) -> f64 {
    (2.0 * alpha.acos()).powf(1.0 / rho)
}

/// `(1/2π) ∫ |K̂(e^{iω})|² dω`, the energy of the untruncated kernel.
pub fn spectral_energy(p: &PredictorParams, grid: &FrequencyGrid) -> f64 {
    let (gamma, alpha) = (p.gamma(), p.alpha());
    let half = romberg(
        |w| (2.0 * log_abs_khat(w, gamma, alpha)).exp(),
        0.0,
        PI,
        grid.size() / 2,
        DEFAULT_REL_TOL,
    );
    half / PI
}
