//! Test processes and class-membership diagnostics.
//!
//! Every generator evaluates its samples in double-double arithmetic and
//! rounds once. The predictors at the upper end of the usable `gamma` range
//! amplify components near `ω = π` by up to `1e15`, so a generator that
//! injected ordinary floating-point noise (for example by forming `cos(ω t)`
//! from a rounded phase) would swamp the quantity being measured.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleF64;
use crate::error::{Error, Result};
use crate::spectral_core::{distance_to_minus_one, log_weight_h, FrequencyGrid, WeightParams};

/// A finite window `x(t₀), …, x(t₁)` of a real discrete-time signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    start_time: i64,
    samples: Vec<f64>,
}

impl Series {
    pub fn new(start_time: i64, samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("series must hold at least one sample".into()));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample at t = {} is not finite",
                start_time + i as i64
            )));
        }
        Ok(Self { start_time, samples })
    }

    pub fn zeros(start_time: i64, len: usize) -> Result<Self> {
        Self::new(start_time, vec![0.0; len])
    }

    pub fn start_time(&self) -> i64 {
        self.start_time
    }

    /// Last time index (inclusive).
    pub fn end_time(&self) -> i64 {
        self.start_time + self.samples.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn get(&self, t: i64) -> Option<f64> {
        let i = t.checked_sub(self.start_time)?;
        usize::try_from(i).ok().and_then(|i| self.samples.get(i).copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.samples.iter().enumerate().map(move |(i, &x)| (self.start_time + i as i64, x))
    }

    /// Same samples, relabelled to start at `start_time + dt`.
    pub fn shifted(&self, dt: i64) -> Self {
        Self {
            start_time: self.start_time + dt,
            samples: self.samples.clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.start_time, self.samples.iter().map(|x| x * factor).collect())
    }

    /// Samplewise sum of two series on the same window.
    pub fn try_add(&self, other: &Series) -> Result<Self> {
        if self.start_time != other.start_time || self.len() != other.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot add series on windows [{}, {}] and [{}, {}]",
                self.start_time,
                self.end_time(),
                other.start_time,
                other.end_time()
            )));
        }
        Self::new(
            self.start_time,
            self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
        )
    }

    /// Two whitespace-separated columns `t x`; `#` starts a comment line.
    pub fn to_text(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        for (t, x) in self.iter() {
            out.push_str(&format!("{t} {}\n", fmt_f64(x)));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut start = None;
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let bad = || Error::Format(format!("line {}: expected `t x`, got {line:?}", lineno + 1));
            let t: i64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let x: f64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if cols.next().is_some() {
                return Err(bad());
            }
            let t0 = *start.get_or_insert(t);
            if t != t0 + samples.len() as i64 {
                return Err(Error::Format(format!(
                    "line {}: time index {t} breaks the consecutive sequence",
                    lineno + 1
                )));
            }
            samples.push(x);
        }
        Self::new(start.ok_or_else(|| Error::Format("series file holds no samples".into()))?, samples)
    }

    /// JSON array of `[t, x]` pairs.
    pub fn to_json(&self) -> String {
        let pairs: Vec<(i64, f64)> = self.iter().collect();
        serde_json::to_string(&pairs).expect("finite samples serialize")
    }

    /// `{"metadata": ..., "samples": [[t, x], ...]}`.
    pub fn to_json_with_metadata(&self, metadata: &serde_json::Value) -> String {
        let pairs: Vec<(i64, f64)> = self.iter().collect();
        serde_json::to_string(&serde_json::json!({ "metadata": metadata, "samples": pairs }))
            .expect("finite samples serialize")
    }

    /// Accepts a bare `[[t, x], ...]` array or an object with a `samples` field.
    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Pairs(Vec<(i64, f64)>),
            Wrapped { samples: Vec<(i64, f64)> },
        }
        let pairs = match serde_json::from_str::<Form>(s)? {
            Form::Pairs(p) | Form::Wrapped { samples: p } => p,
        };
        let Some(&(t0, _)) = pairs.first() else {
            return Err(Error::Format("series array is empty".into()));
        };
        for (i, &(t, _)) in pairs.iter().enumerate() {
            if t != t0 + i as i64 {
                return Err(Error::Format(format!("time index {t} breaks the consecutive sequence")));
            }
        }
        Self::new(t0, pairs.into_iter().map(|(_, x)| x).collect())
    }

    /// Reads either format; JSON is recognised by a leading `[` or `{`.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if text.trim_start().starts_with(['[', '{']) {
            Self::from_json(&text)
        } else {
            Self::from_text(&text)
        }
    }
}

/// Floats are written with 17 significant digits, which round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `a cos(ω t + φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sinusoid {
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Sinusoid {
    pub fn new(omega: f64, amplitude: f64, phase: f64) -> Self {
        Self { omega, amplitude, phase }
    }

    /// `cos(ω t + φ)` with the phase carried in double-double.
    fn cos_at(&self, t: i64) -> DoubleF64 {
        let phase = DoubleF64::from_prod(self.omega, t as f64) + self.phase;
        phase.cos()
    }
}

/// `‖X‖_{L₁(-π,π)} = 2π Σ|a_k|` for a real trigonometric polynomial with
/// frequencies strictly inside `(0, π)` in absolute value.
pub fn line_spectrum_l1(components: &[Sinusoid]) -> f64 {
    2.0 * PI * components.iter().map(|c| c.amplitude.abs()).sum::<f64>()
}

/// Frequency-domain description of a test signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSpec {
    Sinusoids {
        components: Vec<Sinusoid>,
    },
    BandLimitedNoise {
        omega1: f64,
        components: usize,
        seed: u64,
    },
    EnergyDecay {
        c: f64,
        q: f64,
        seed: u64,
        /// Time of the packet centre; defaults to the middle of the window.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<i64>,
    },
    NoiseL1 {
        nu: f64,
        components: usize,
        seed: u64,
    },
}

impl SpectrumSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SpectrumSpec::Sinusoids { components } => {
                if let Some(c) = components.iter().find(|c| !(c.omega.abs() <= PI)) {
                    return Err(Error::InvalidParameter(format!("sinusoid frequency {} outside [-π, π]", c.omega)));
                }
                if components.iter().any(|c| !c.amplitude.is_finite() || !c.phase.is_finite()) {
                    return Err(Error::InvalidParameter("sinusoid amplitude and phase must be finite".into()));
                }
            }
            SpectrumSpec::BandLimitedNoise { omega1, components, .. } => {
                if !(*omega1 > 0.0 && *omega1 < PI) {
                    return Err(Error::InvalidParameter(format!("omega1 must lie in (0, π), got {omega1}")));
                }
                if *components == 0 {
                    return Err(Error::InvalidParameter("band-limited noise needs at least one component".into()));
                }
            }
            SpectrumSpec::EnergyDecay { c, q, .. } => {
                WeightParams::new(*c, *q)?;
            }
            SpectrumSpec::NoiseL1 { nu, components, .. } => {
                if !(*nu >= 0.0 && nu.is_finite()) {
                    return Err(Error::InvalidParameter(format!("nu must be non-negative, got {nu}")));
                }
                if *components < 2 {
                    return Err(Error::InvalidParameter("noise needs at least two components".into()));
                }
            }
        }
        Ok(())
    }

    /// Samples on `[t0, t1]`.
    pub fn generate(&self, t0: i64, t1: i64) -> Result<Series> {
        self.validate()?;
        match self {
            SpectrumSpec::Sinusoids { components } => gen_sinusoids(components, t0, t1),
            SpectrumSpec::BandLimitedNoise {
                omega1,
                components,
                seed,
            } => gen_bandlimited_noise(*omega1, *seed, t0, t1, *components),
            SpectrumSpec::EnergyDecay { c, q, seed, center } => {
                EnergyDecaySignal::new(*c, *q, *seed, center.unwrap_or(midpoint(t0, t1)))?.generate(t0, t1)
            }
            SpectrumSpec::NoiseL1 { nu, components, seed } => {
                gen_sinusoids(&noise_l1_components(*nu, *components, *seed)?, t0, t1)
            }
        }
    }

    /// The sinusoidal components actually generated on `[t0, t1]`, for line spectra.
    pub fn line_components(&self, t0: i64, t1: i64) -> Result<Option<Vec<Sinusoid>>> {
        self.validate()?;
        Ok(match self {
            SpectrumSpec::Sinusoids { components } => Some(components.clone()),
            SpectrumSpec::BandLimitedNoise {
                omega1,
                components,
                seed,
            } => Some(bandlimited_components(*omega1, *components, *seed, t0, t1)?),
            SpectrumSpec::NoiseL1 { nu, components, seed } => Some(noise_l1_components(*nu, *components, *seed)?),
            SpectrumSpec::EnergyDecay { .. } => None,
        })
    }

    /// The continuous spectral density, for energy-decay signals.
    pub fn energy_decay(&self, t0: i64, t1: i64) -> Result<Option<EnergyDecaySignal>> {
        Ok(match self {
            SpectrumSpec::EnergyDecay { c, q, seed, center } => {
                Some(EnergyDecaySignal::new(*c, *q, *seed, center.unwrap_or(midpoint(t0, t1)))?)
            }
            _ => None,
        })
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SpectrumSpec::Sinusoids { .. } => None,
            SpectrumSpec::BandLimitedNoise { seed, .. }
            | SpectrumSpec::EnergyDecay { seed, .. }
            | SpectrumSpec::NoiseL1 { seed, .. } => Some(*seed),
        }
    }
}

fn midpoint(t0: i64, t1: i64) -> i64 {
    t0 + (t1 - t0) / 2
}

fn check_window(t0: i64, t1: i64) -> Result<()> {
    if t1 < t0 {
        return Err(Error::InvalidParameter(format!("window end {t1} precedes start {t0}")));
    }
    Ok(())
}

fn sinusoid_sum_dd(components: &[Sinusoid], t: i64) -> DoubleF64 {
    components
        .iter()
        .fold(DoubleF64::ZERO, |acc, c| acc + c.cos_at(t).mul_f64(c.amplitude))
}

/// `x(t) = Σ_k a_k cos(ω_k t + φ_k)` on `[t0, t1]`.
pub fn gen_sinusoids(components: &[Sinusoid], t0: i64, t1: i64) -> Result<Series> {
    check_window(t0, t1)?;
    if let Some(c) = components.iter().find(|c| !(c.omega.abs() <= PI)) {
        return Err(Error::InvalidParameter(format!("sinusoid frequency {} outside [-π, π]", c.omega)));
    }
    let samples = (t0..=t1).map(|t| sinusoid_sum_dd(components, t).to_f64()).collect();
    Series::new(t0, samples)
}

/// Random components with frequencies uniform in `(-ω₁, ω₁)`, scaled so the
/// generated window satisfies `‖x‖_∞ <= 1`.
pub fn bandlimited_components(
    omega1: f64,
    n_components: usize,
    seed: u64,
    t0: i64,
    t1: i64,
) -> Result<Vec<Sinusoid>> {
    check_window(t0, t1)?;
    if !(omega1 > 0.0 && omega1 < PI) || n_components == 0 {
        return Err(Error::InvalidParameter(format!(
            "band-limited noise needs omega1 in (0, π) and at least one component, got {omega1}, {n_components}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut components: Vec<Sinusoid> = (0..n_components)
        .map(|_| {
            let omega = rng.random_range(-omega1..omega1);
            let amplitude = rng.random_range(0.5..1.0);
            let phase = rng.random_range(0.0..2.0 * PI);
            Sinusoid::new(omega, amplitude, phase)
        })
        .collect();
    let peak = (t0..=t1)
        .map(|t| sinusoid_sum_dd(&components, t).abs())
        .fold(DoubleF64::ZERO, |m, v| if v.hi > m.hi { v } else { m });
    if peak.hi > 0.0 {
        let mut scale = (DoubleF64::ONE / peak).hi;
        loop {
            for (c, a) in components.iter_mut().zip(raw_amplitudes(omega1, n_components, seed)) {
                c.amplitude = a * scale;
            }
            let max = (t0..=t1)
                .map(|t| sinusoid_sum_dd(&components, t).to_f64().abs())
                .fold(0.0, f64::max);
            if max <= 1.0 {
                break;
            }
            scale *= 1.0 - 4.0 * f64::EPSILON;
        }
    }
    Ok(components)
}

fn raw_amplitudes(omega1: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let _ = rng.random_range(-omega1..omega1);
            let a = rng.random_range(0.5..1.0);
            let _ = rng.random_range(0.0..2.0 * PI);
            a
        })
        .collect()
}

/// Band-limited trigonometric polynomial with `‖x‖_∞ <= 1` on the window.
pub fn gen_bandlimited_noise(omega1: f64, seed: u64, t0: i64, t1: i64, n_components: usize) -> Result<Series> {
    gen_sinusoids(&bandlimited_components(omega1, n_components, seed, t0, t1)?, t0, t1)
}

/// Width of the band next to `±π` that receives half of the noise components.
pub const NOISE_EDGE_BAND: f64 = 0.25;

/// Noise components with `‖X_N‖_{L₁} = ν`. Half of the frequencies are drawn
/// uniformly over `(0, π)`, half from the band `(π - 0.25, π)`.
pub fn noise_l1_components(nu: f64, n_components: usize, seed: u64) -> Result<Vec<Sinusoid>> {
    if !(nu >= 0.0 && nu.is_finite()) || n_components < 2 {
        return Err(Error::InvalidParameter(format!(
            "noise needs nu >= 0 and at least two components, got {nu}, {n_components}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut components: Vec<Sinusoid> = (0..n_components)
        .map(|k| {
            let omega = if k % 2 == 0 {
                rng.random_range(0.0..PI)
            } else {
                rng.random_range(PI - NOISE_EDGE_BAND..PI)
            };
            let amplitude = rng.random_range(0.5..1.0);
            let phase = rng.random_range(0.0..2.0 * PI);
            Sinusoid::new(omega, amplitude, phase)
        })
        .collect();
    let scale = nu / line_spectrum_l1(&components);
    for c in &mut components {
        c.amplitude *= scale;
    }
    Ok(components)
}

/// Noise with spectral `L₁` norm `ν`; deterministic in `seed` and linear in `ν`.
pub fn gen_noise_l1(nu: f64, seed: u64, t0: i64, t1: i64, n_components: usize) -> Result<Series> {
    gen_sinusoids(&noise_l1_components(nu, n_components, seed)?, t0, t1)
}

/// Number of cosine terms in the random factor `G`.
const G_TERMS: usize = 7;
/// Quadrature nodes used to synthesize the packet.
const PACKET_NODES: usize = 8192;

/// A wave packet with spectrum `X(e^{iω}) = h(ω, c)⁻¹ g(ω) e^{-iωd}`, where
/// `g(ω) = Σ_m b_m cos(mω)` with `Σ|b_m| = 1` is a random smooth even
/// function bounded by one and `d` is the packet centre. Hence
/// `ess sup |X| h(·, c) <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDecaySignal {
    weight: WeightParams,
    g_coeffs: Vec<f64>,
    center: i64,
}

impl EnergyDecaySignal {
    pub fn new(c: f64, q: f64, seed: u64, center: i64) -> Result<Self> {
        let weight = WeightParams::new(c, q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g_coeffs: Vec<f64> = (0..G_TERMS).map(|_| rng.random_range(-1.0..1.0)).collect();
        g_coeffs[0] = rng.random_range(0.5..1.0);
        let norm: f64 = g_coeffs.iter().map(|b| b.abs()).sum();
        for b in &mut g_coeffs {
            *b /= norm;
        }
        Ok(Self {
            weight,
            g_coeffs,
            center,
        })
    }

    pub fn weight(&self) -> WeightParams {
        self.weight
    }

    pub fn center(&self) -> i64 {
        self.center
    }

    /// `g(ω)`, the even factor with `|g| <= 1`.
    pub fn g(&self, omega: f64) -> f64 {
        self.g_coeffs
            .iter()
            .enumerate()
            .map(|(m, b)| b * (m as f64 * omega).cos())
            .sum()
    }

    /// `X(e^{iω})`; exactly zero at `ω = ±π`.
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let mag = (-log_weight_h(omega, self.weight)).exp() * self.g(omega);
        Complex64::from_polar(mag, -omega * self.center as f64)
    }

    /// `ln|X(e^{iω})|`, finite wherever `g(ω) != 0` and `ω != ±π`.
    pub fn log_abs_spectrum(&self, omega: f64) -> f64 {
        self.g(omega).abs().ln() - log_weight_h(omega, self.weight)
    }

    /// `p(τ) = (1/2π) ∫ h(ω,c)⁻¹ cos(ωτ) dω` by the periodic trapezoid rule,
    /// for `τ = 0..` until the values fall below `1e-40 p(0)`.
    fn pulse(&self) -> Vec<DoubleF64> {
        let n = PACKET_NODES;
        let nodes: Vec<f64> = (0..=n / 2)
            .map(|j| (-log_weight_h(2.0 * PI * j as f64 / n as f64, self.weight)).exp())
            .collect();
        let cos_table: Vec<DoubleF64> = (0..n)
            .map(|m| DoubleF64::TWO_PI.mul_f64(m as f64 / n as f64).cos())
            .collect();
        let mut pulse = Vec::new();
        let mut quiet = 0;
        for tau in 0..n / 2 {
            let mut acc = DoubleF64::from(nodes[0]);
            for (j, f) in nodes.iter().enumerate().take(n / 2).skip(1) {
                acc += cos_table[(j * tau) % n].mul_f64(2.0 * f);
            }
            // node n/2 is ω = π where 1/h vanishes
            let value = acc.div_f64(n as f64);
            pulse.push(value);
            if value.hi.abs() < 1e-40 * pulse[0].hi.abs() {
                quiet += 1;
                if quiet >= 32 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        pulse
    }

    pub fn generate(&self, t0: i64, t1: i64) -> Result<Series> {
        check_window(t0, t1)?;
        let pulse = self.pulse();
        let p = |tau: i64| -> DoubleF64 {
            pulse
                .get(tau.unsigned_abs() as usize)
                .copied()
                .unwrap_or(DoubleF64::ZERO)
        };
        let samples = (t0..=t1)
            .map(|t| {
                let tau = t - self.center;
                self.g_coeffs
                    .iter()
                    .enumerate()
                    .fold(DoubleF64::ZERO, |acc, (m, &b)| {
                        let m = m as i64;
                        acc + (p(tau - m) + p(tau + m)).mul_f64(0.5 * b)
                    })
                    .to_f64()
            })
            .collect();
        Series::new(t0, samples)
    }
}

pub fn gen_energy_decay(c: f64, q: f64, seed: u64, t0: i64, t1: i64) -> Result<Series> {
    check_window(t0, t1)?;
    EnergyDecaySignal::new(c, q, seed, midpoint(t0, t1))?.generate(t0, t1)
}

/// Bins whose windowed DFT magnitude is below this fraction of the peak
/// are treated as empty by [`class_diagnostic`].
pub const DIAGNOSTIC_FLOOR: f64 = 1e-12;

/// `ln` of the estimate of `ess sup |X(e^{iω})| h(ω, c)` from a Hann-windowed
/// DFT of the series; `-inf` for an all-zero series.
///
/// The estimate covers grid nodes other than `-π` (a null set) whose DFT
/// magnitude is above [`DIAGNOSTIC_FLOOR`] times the peak, since below that
/// level the finite window and rounding dominate the true spectrum.
pub fn log_class_diagnostic(x: &Series, w: WeightParams, grid: &FrequencyGrid) -> f64 {
    let n = grid.size();
    let len = x.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, &v) in x.samples().iter().enumerate() {
        let hann = if len > 1 {
            let s = (PI * i as f64 / (len - 1) as f64).sin();
            s * s
        } else {
            1.0
        };
        // e^{-i(-π + 2πj/N)i} = (-1)^i e^{-2πi ji/N}
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        buf[i % n] += Complex64::new(sign * hann * v, 0.0);
    }
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf.iter().map(|c| c.norm()).collect();
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return f64::NEG_INFINITY;
    }
    let floor = DIAGNOSTIC_FLOOR * peak;
    (1..n)
        .filter(|&j| mags[j] > floor)
        .map(|j| mags[j].ln() + log_weight_h(grid.node(j), w))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Estimate of `ess sup |X| h(·, c)`; saturates at `f64::MAX` when the
/// estimate leaves the double range (non-membership).
pub fn class_diagnostic(x: &Series, w: WeightParams, grid: &FrequencyGrid) -> f64 {
    saturating_exp(log_class_diagnostic(x, w, grid))
}

/// `ess sup |X| h(·, c)` on the grid, straight from a continuous spectrum.
/// `None` for line spectra, which have no density.
pub fn class_diagnostic_spectrum(spec: &SpectrumSpec, w: WeightParams, grid: &FrequencyGrid) -> Result<Option<f64>> {
    let Some(signal) = spec.energy_decay(0, 0)? else {
        return Ok(None);
    };
    let log_max = grid
        .nodes()
        .skip(1)
        .filter(|&omega| distance_to_minus_one(omega) > 0.0)
        .map(|omega| signal.log_abs_spectrum(omega) + log_weight_h(omega, w))
        .filter(|v| !v.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Some(saturating_exp(log_max)))
}

fn saturating_exp(log_value: f64) -> f64 {
    if log_value >= f64::MAX.ln() {
        f64::MAX
    } else {
        log_value.exp()
    }
}
