//! One-step-ahead prediction by finite-memory causal convolution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::{DoubleF64, ProductAccumulator};
use crate::error::{Error, Result};
use crate::kernel::PredictorKernel;
use crate::signals::{fmt_f64, Series, Sinusoid};
use crate::spectral_core::{exponent, transfer_khat, PredictorParams};

/// `x̂(t) = Σ_{s=0..=M} k̂(s) x(t-s)` on the valid window `[t₀+M, t₁-1]`,
/// where `x̂(t)` estimates `x(t+1)`.
#[derive(Debug, Clone)]
pub struct PredictionRun<'a> {
    input: &'a Series,
    kernel: &'a PredictorKernel,
    memory: usize,
    predicted: Series,
}

impl<'a> PredictionRun<'a> {
    pub fn input(&self) -> &'a Series {
        self.input
    }

    pub fn kernel(&self) -> &'a PredictorKernel {
        self.kernel
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn predicted(&self) -> &Series {
        &self.predicted
    }

    /// Inclusive `(first, last)` times at which `x̂` is defined.
    pub fn valid_window(&self) -> (i64, i64) {
        (self.predicted.start_time(), self.predicted.end_time())
    }

    /// `(t, x(t+1), x̂(t))` over the valid window.
    pub fn triples(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        self.predicted
            .iter()
            .map(|(t, xh)| (t, self.input.get(t + 1).expect("target inside input window"), xh))
    }

    /// `x(t+1) - x̂(t)` over the valid window.
    pub fn residuals(&self) -> Vec<f64> {
        self.triples().map(|(_, y, xh)| y - xh).collect()
    }

    /// Three columns `t  x(t+1)  x̂(t)`.
    pub fn to_text(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str("# t x(t+1) xhat(t)\n");
        for (t, y, xh) in self.triples() {
            out.push_str(&format!("{t} {} {}\n", fmt_f64(y), fmt_f64(xh)));
        }
        out
    }
}

/// Runs the kernel with memory `M <= T` over the series.
pub fn predict<'a>(x: &'a Series, kernel: &'a PredictorKernel, memory: usize) -> Result<PredictionRun<'a>> {
    if memory > kernel.truncation() {
        return Err(Error::InvalidParameter(format!(
            "memory {memory} exceeds kernel truncation {}",
            kernel.truncation()
        )));
    }
    if x.len() <= memory + 1 {
        return Err(Error::WindowTooShort { len: x.len(), memory });
    }
    let samples = x.samples();
    let hi = &kernel.coeffs()[..=memory];
    let lo = &kernel.coeffs_lo()[..=memory];
    let predicted = (memory..samples.len() - 1)
        .map(|i| {
            let mut acc = ProductAccumulator::default();
            for s in 0..=memory {
                acc.add_product(hi[s], lo[s], samples[i - s]);
            }
            acc.value().to_f64()
        })
        .collect();
    Ok(PredictionRun {
        input: x,
        kernel,
        memory,
        predicted: Series::new(x.start_time() + memory as i64, predicted)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorNorm {
    Linf,
    /// Raw `ℓ₂` sum over the window; grows with window length for persistent errors.
    L2,
    /// `ℓ₂` divided by the square root of the number of samples.
    Rms,
}

impl ErrorNorm {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorNorm::Linf => "linf",
            ErrorNorm::L2 => "l2",
            ErrorNorm::Rms => "rms",
        }
    }
}

pub fn prediction_error(run: &PredictionRun<'_>, norm: ErrorNorm) -> Result<f64> {
    let residuals = run.residuals();
    if residuals.is_empty() {
        return Err(Error::EmptyWindow);
    }
    Ok(match norm {
        ErrorNorm::Linf => residuals.iter().fold(0.0, |m, r| m.max(r.abs())),
        ErrorNorm::L2 => l2(&residuals),
        ErrorNorm::Rms => l2(&residuals) / (residuals.len() as f64).sqrt(),
    })
}

fn l2(v: &[f64]) -> f64 {
    v.iter()
        .fold(DoubleF64::ZERO, |acc, r| acc + DoubleF64::from_prod(*r, *r))
        .to_f64()
        .sqrt()
}

/// Gains of the ideal (infinite-memory) predictor at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGain {
    pub omega: f64,
    /// `K̂(e^{iω})`.
    pub khat: Complex64,
    /// `(K̂ - K)(e^{iω}) = e^{iω}(V - 1)`.
    pub error_gain: Complex64,
}

/// Frequency-domain reference predictor for a sum of sinusoids.
pub fn predict_spectral(components: &[Sinusoid], p: &PredictorParams) -> Result<Vec<SpectralGain>> {
    let (gamma, alpha) = (p.gamma(), p.alpha());
    components
        .iter()
        .map(|c| {
            let khat = transfer_khat(c.omega, gamma, alpha)?;
            // V - 1 = -e^{w}
            let error_gain = -Complex64::from_polar(1.0, c.omega) * exponent(c.omega, gamma, alpha).exp();
            Ok(SpectralGain {
                omega: c.omega,
                khat,
                error_gain,
            })
        })
        .collect()
}

/// Exact steady-state error `x(t+1) - x̂(t)` of the infinite-memory predictor
/// for a sum of sinusoids.
pub fn spectral_error_at(components: &[Sinusoid], gains: &[SpectralGain], t: i64) -> f64 {
    components
        .iter()
        .zip(gains)
        .map(|(c, g)| {
            // a cos(ωt+φ) = Re(a e^{iφ} e^{iωt}); the error filter multiplies by -(K̂ - K)
            let phasor = Complex64::from_polar(c.amplitude, c.omega * t as f64 + c.phase);
            -(g.error_gain * phasor).re
        })
        .sum()
}
