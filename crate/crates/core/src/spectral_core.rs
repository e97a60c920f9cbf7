//! Closed-form frequency-domain quantities of the predictor family.
//!
//! The predictor with parameters `(gamma, alpha)` has transfer function
//! `K̂(z) = z V(z)` with `V(z) = 1 - exp(-gamma / (z + alpha))`, approximating
//! the ideal one-step-ahead operator `K(z) = z`. Everything here is a pure
//! function evaluated on the unit circle `z = e^{iω}`.
//!
//! Near `ω = ±π` the exponent `w = -gamma / (e^{iω} + alpha)` has a large
//! positive real part. The complex evaluators refuse `Re w > 700`; magnitude
//! consumers go through [`log_abs_khat`], which never forms `exp(Re w)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent real part the complex evaluators accept.
pub const MAX_SAFE_EXPONENT: f64 = 700.0;

/// Schedule mapping `gamma` to the pole location `-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRule {
    /// `alpha = 1 - gamma^(2 mu / (1 - q))`.
    PowerLaw,
    /// `alpha = 1 - gamma^(2 / (1 - q)) / ln(gamma)`; needs `gamma > 1`.
    LogCorrected,
    /// `alpha = 1 - (2 gamma / c0)^(2 / (1 - q)) / 2`, targeting the class bounded by `c0`.
    Uniform { c0: f64 },
}

impl AlphaRule {
    pub fn name(&self) -> &'static str {
        match self {
            AlphaRule::PowerLaw => "power_law",
            AlphaRule::LogCorrected => "log_corrected",
            AlphaRule::Uniform { .. } => "uniform",
        }
    }
}

/// One member of the predictor family. Validated on construction, so
/// `alpha()` is always inside `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct PredictorParams {
    gamma: f64,
    q: f64,
    mu: f64,
    rule: AlphaRule,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    gamma: f64,
    q: f64,
    mu: f64,
    alpha_rule: AlphaRule,
}

impl TryFrom<RawParams> for PredictorParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        PredictorParams::new(r.gamma, r.q, r.mu, r.alpha_rule)
    }
}

impl From<PredictorParams> for RawParams {
    fn from(p: PredictorParams) -> Self {
        RawParams {
            gamma: p.gamma,
            q: p.q,
            mu: p.mu,
            alpha_rule: p.rule,
        }
    }
}

impl Default for PredictorParams {
    /// `gamma = 1, q = 2, mu = 1.5`, power-law schedule (`alpha = 0`).
    fn default() -> Self {
        PredictorParams::power_law(1.0, 2.0, 1.5).expect("default parameters are valid")
    }
}

impl PredictorParams {
    pub fn new(gamma: f64, q: f64, mu: f64, rule: AlphaRule) -> Result<Self> {
        let alpha = alpha_for(gamma, q, mu, rule)?;
        Ok(Self {
            gamma,
            q,
            mu,
            rule,
            alpha,
        })
    }

    pub fn power_law(gamma: f64, q: f64, mu: f64) -> Result<Self> {
        Self::new(gamma, q, mu, AlphaRule::PowerLaw)
    }

    /// Same `q`, `mu` and rule with a different `gamma`.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(gamma, self.q, self.mu, self.rule)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn rule(&self) -> AlphaRule {
        self.rule
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Evaluates the selected schedule, rejecting parameters that leave `(-1, 1)`.
pub fn alpha_for(gamma: f64, q: f64, mu: f64, rule: AlphaRule) -> Result<f64> {
    let finite = gamma.is_finite() && q.is_finite() && mu.is_finite();
    if !finite || gamma <= 0.0 {
        return Err(Error::InvalidParameter(format!("gamma must be positive and finite, got {gamma}")));
    }
    if q <= 1.0 {
        return Err(Error::InvalidParameter(format!("q must exceed 1, got {q}")));
    }
    let alpha = match rule {
        AlphaRule::PowerLaw => {
            if mu <= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "mu must exceed 1 for the power_law rule, got {mu}"
                )));
            }
            1.0 - gamma.powf(2.0 * mu / (1.0 - q))
        }
        AlphaRule::LogCorrected => {
            if gamma <= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "gamma must exceed 1 for the log_corrected rule, got {gamma}"
                )));
            }
            1.0 - gamma.powf(2.0 / (1.0 - q)) / gamma.ln()
        }
        AlphaRule::Uniform { c0 } => {
            if !(c0 > 0.0 && c0.is_finite()) {
                return Err(Error::InvalidParameter(format!("c0 must be positive, got {c0}")));
            }
            1.0 - 0.5 * (2.0 * gamma / c0).powf(2.0 / (1.0 - q))
        }
    };
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            alpha,
            gamma,
            rule: rule.name().to_string(),
        });
    }
    Ok(alpha)
}

/// Parameters `(c, q)` of the weight `h(ω, c) = exp(c / |e^{iω} + 1|^q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    c: f64,
    q: f64,
}

impl WeightParams {
    pub fn new(c: f64, q: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q must exceed 1, got {q}")));
        }
        Ok(Self { c, q })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// `|e^{iω} + 1|`, evaluated as `2 sin((π - |ω|) / 2)` to keep precision near `±π`.
#[inline]
pub fn distance_to_minus_one(omega: f64) -> f64 {
    let theta = (PI - omega.abs()).max(0.0);
    2.0 * (0.5 * theta).sin()
}

/// `ln h(ω, c) = c / |e^{iω} + 1|^q`; `+inf` at `ω = ±π`.
pub fn log_weight_h(omega: f64, w: WeightParams) -> f64 {
    let d = distance_to_minus_one(omega);
    if d == 0.0 {
        return f64::INFINITY;
    }
    w.c / d.powf(w.q)
}

/// The weight `h(ω, c)`. Returns `+inf` at `ω = ±π` (and wherever it overflows).
pub fn weight_h(omega: f64, w: WeightParams) -> f64 {
    log_weight_h(omega, w).exp()
}

/// `1 / h(ω, c)`, which is exactly zero at `ω = ±π`.
pub fn inv_weight_h(omega: f64, w: WeightParams) -> f64 {
    (-log_weight_h(omega, w)).exp()
}

/// Real and imaginary parts of `w = -gamma / (e^{iω} + alpha)`.
///
/// Uses `Re w = -gamma (cos ω + alpha) / |e^{iω} + alpha|^2`, with both the
/// numerator and denominator rewritten around `ω = π` so that `alpha → 1`
/// does not cancel.
pub fn exponent(omega: f64, gamma: f64, alpha: f64) -> Complex64 {
    let theta = PI - omega.abs();
    let s = (0.5 * theta).sin();
    let s2 = s * s;
    let one_minus_alpha = 1.0 - alpha;
    // cos ω + α = 2 sin²(θ/2) − (1 − α)
    let cos_plus_alpha = 2.0 * s2 - one_minus_alpha;
    // |e^{iω} + α|² = (1 − α)² + 4α sin²(θ/2)
    let denom = one_minus_alpha * one_minus_alpha + 4.0 * alpha * s2;
    Complex64::new(-gamma * cos_plus_alpha / denom, gamma * omega.sin() / denom)
}

/// `e^w - 1` without cancellation for small `|w|`.
fn expm1_complex(w: Complex64) -> Complex64 {
    let (sin_b, cos_b) = w.im.sin_cos();
    let half_sin = (0.5 * w.im).sin();
    let em1 = w.re.exp_m1();
    Complex64::new(em1 * cos_b - 2.0 * half_sin * half_sin, w.re.exp() * sin_b)
}

fn checked_exponent(omega: f64, gamma: f64, alpha: f64) -> Result<Complex64> {
    let w = exponent(omega, gamma, alpha);
    if w.re > MAX_SAFE_EXPONENT || !w.re.is_finite() {
        return Err(Error::Overflow {
            omega,
            real_part: w.re,
            limit: MAX_SAFE_EXPONENT,
        });
    }
    Ok(w)
}

/// `V(e^{iω}) = 1 - exp(-gamma / (e^{iω} + alpha))`.
pub fn transfer_v(omega: f64, gamma: f64, alpha: f64) -> Result<Complex64> {
    let w = checked_exponent(omega, gamma, alpha)?;
    Ok(-expm1_complex(w))
}

/// `K̂(e^{iω}) = e^{iω} V(e^{iω})`.
pub fn transfer_khat(omega: f64, gamma: f64, alpha: f64) -> Result<Complex64> {
    let v = transfer_v(omega, gamma, alpha)?;
    Ok(Complex64::from_polar(1.0, omega) * v)
}

/// `ln |V(e^{iω}) - 1| = Re w`: the log of the per-frequency error gain.
pub fn log_abs_error_gain(omega: f64, gamma: f64, alpha: f64) -> f64 {
    exponent(omega, gamma, alpha).re
}

/// `ln |K̂(e^{iω})|`, finite for every `ω` and any `gamma`.
pub fn log_abs_khat(omega: f64, gamma: f64, alpha: f64) -> f64 {
    let w = exponent(omega, gamma, alpha);
    if w.re > 30.0 {
        // |1 - e^w| = e^{Re w} |1 - e^{-w}|
        w.re + expm1_complex(-w).norm().ln()
    } else {
        expm1_complex(w).norm().ln()
    }
}

/// Split of `[-π, π]` into `D₊(α) = (-Ω, Ω)` and its complement `D(α)`,
/// with `Ω = arccos(-α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSplit {
    pub alpha: f64,
    pub omega_boundary: f64,
    pub d_minus_measure: f64,
}

impl RegionSplit {
    pub fn d_plus(&self) -> (f64, f64) {
        (-self.omega_boundary, self.omega_boundary)
    }

    pub fn d_plus_measure(&self) -> f64 {
        2.0 * self.omega_boundary
    }

    pub fn in_d_plus(&self, omega: f64) -> bool {
        omega.abs() < self.omega_boundary
    }
}

pub fn region_split(alpha: f64) -> Result<RegionSplit> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (-1, 1), got {alpha}")));
    }
    Ok(RegionSplit {
        alpha,
        omega_boundary: (-alpha).acos(),
        d_minus_measure: 2.0 * alpha.acos(),
    })
}

/// Uniform nodes `ω_j = -π + 2πj/N`, `j = 0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    size: usize,
}

impl FrequencyGrid {
    pub const MIN_SIZE: usize = 8;

    pub fn new(size: usize) -> Result<Self> {
        if size < Self::MIN_SIZE {
            return Err(Error::InvalidParameter(format!(
                "frequency grid needs at least {} nodes, got {size}",
                Self::MIN_SIZE
            )));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.size as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / self.size as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(|j| self.node(j))
    }
}
