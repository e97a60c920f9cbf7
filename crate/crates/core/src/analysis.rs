//! Experiments: γ sweeps with bound overlays, noise robustness, truncation
//! studies, spectral error decomposition, and report emission.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{build_kernel, i1_bound_factor, log_kappa, psi, PredictorKernel};
use crate::predictor::{predict, prediction_error, ErrorNorm};
use crate::quadrature::{romberg, DEFAULT_REL_TOL};
use crate::signals::{fmt_f64, gen_noise_l1, EnergyDecaySignal, Series, Sinusoid, SpectrumSpec, NOISE_EDGE_BAND};
use crate::spectral_core::{log_abs_error_gain, log_weight_h, region_split, FrequencyGrid, PredictorParams, WeightParams};

/// Numerical settings shared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub fft_size: usize,
    /// Fixed kernel length `T`; automatic when absent.
    pub truncation: Option<usize>,
    /// Memory `M`; defaults to `T`.
    pub memory: Option<usize>,
    pub window: usize,
    pub t0: i64,
    pub grid_size: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            fft_size: 1 << 16,
            truncation: None,
            memory: None,
            window: 8192,
            t0: 0,
            grid_size: 8192,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidParameter(format!("window must hold at least 2 samples, got {}", self.window)));
        }
        FrequencyGrid::new(self.grid_size)?;
        if !self.fft_size.is_power_of_two() || self.fft_size < 16 {
            return Err(Error::InvalidParameter(format!(
                "fft_size must be a power of two >= 16, got {}",
                self.fft_size
            )));
        }
        if let (Some(m), Some(t)) = (self.memory, self.truncation) {
            if m > t {
                return Err(Error::InvalidParameter(format!("memory {m} exceeds truncation {t}")));
            }
        }
        Ok(())
    }

    /// Last sample time of the generated window.
    pub fn t1(&self) -> i64 {
        self.t0 + self.window as i64 - 1
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.grid_size)
    }

    fn memory_for(&self, kernel: &PredictorKernel) -> usize {
        self.memory.unwrap_or(kernel.truncation()).min(kernel.truncation())
    }
}

/// Settings of the additive noise in robustness runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSettings {
    pub seed: u64,
    pub components: usize,
}

impl Default for NoiseSettings {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            components: 32,
        }
    }
}

pub fn version() -> &'static str {
    option_env!("DECAY_PREDICT_VERSION").unwrap_or(env!("CARGO_PKG_VERSION"))
}

/// Seconds since the epoch, taken from `SOURCE_DATE_EPOCH` when set.
pub fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub version: String,
    pub timestamp_unix: u64,
    pub signal: SpectrumSpec,
    pub predictor: PredictorParams,
    pub config: SweepConfig,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseMetadata>,
    /// Fully resolved command configuration, filled in by the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_config: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseMetadata {
    pub seed: u64,
    pub components: usize,
    pub spectrum: String,
}

impl Metadata {
    fn new(experiment: &str, signal: &SpectrumSpec, p: &PredictorParams, config: &SweepConfig) -> Self {
        Self {
            experiment: experiment.to_string(),
            version: version().to_string(),
            timestamp_unix: timestamp(),
            signal: signal.clone(),
            predictor: *p,
            config: *config,
            seeds: signal.seed().into_iter().collect(),
            noise: None,
            resolved_config: None,
        }
    }
}

/// Spectral description of a generated test signal.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpectrum {
    Lines(Vec<Sinusoid>),
    Density(EnergyDecaySignal),
}

impl SignalSpectrum {
    pub fn from_spec(spec: &SpectrumSpec, t0: i64, t1: i64) -> Result<Self> {
        if let Some(lines) = spec.line_components(t0, t1)? {
            return Ok(SignalSpectrum::Lines(lines));
        }
        let density = spec.energy_decay(t0, t1)?.expect("non-line spectra are densities");
        Ok(SignalSpectrum::Density(density))
    }
}

fn panels_for(grid: &FrequencyGrid, length: f64) -> usize {
    ((grid.size() as f64 * length / (2.0 * PI)).ceil() as usize).max(8)
}

/// `2 ∫` of an even integrand over `D(α)` and `D₊(α)`, given as `ln` of the integrand.
fn region_integrals<F: Fn(f64) -> f64>(log_f: F, alpha: f64, grid: &FrequencyGrid) -> (f64, f64) {
    let boundary = (-alpha).acos();
    let f = |w: f64| log_f(w).exp();
    let d_minus = romberg(f, boundary, PI, panels_for(grid, PI - boundary), DEFAULT_REL_TOL);
    let d_plus = romberg(f, 0.0, boundary, panels_for(grid, boundary), DEFAULT_REL_TOL);
    (2.0 * d_minus, 2.0 * d_plus)
}

/// Split of the `ℓ∞` error bound `(1/2π) ∫ |V - 1||X| dω` (for line spectra
/// `Σ_k |a_k||V(e^{iω_k}) - 1|`) into the contributions of `D(α)` and `D₊(α)`.
pub fn error_bound_terms(spectrum: &SignalSpectrum, p: &PredictorParams, grid: &FrequencyGrid) -> Result<(f64, f64)> {
    let (gamma, alpha) = (p.gamma(), p.alpha());
    let split = region_split(alpha)?;
    Ok(match spectrum {
        SignalSpectrum::Lines(lines) => lines.iter().fold((0.0, 0.0), |(d, dp), c| {
            let term = c.amplitude.abs() * log_abs_error_gain(c.omega, gamma, alpha).exp();
            if c.amplitude == 0.0 {
                (d, dp)
            } else if split.in_d_plus(c.omega) {
                (d, dp + term)
            } else {
                (d + term, dp)
            }
        }),
        SignalSpectrum::Density(sig) => {
            let (i1, i2) = region_integrals(
                |w| log_abs_error_gain(w, gamma, alpha) + sig.log_abs_spectrum(w),
                alpha,
                grid,
            );
            (i1 / (2.0 * PI), i2 / (2.0 * PI))
        }
    })
}

/// The two pieces of `‖Ŷ - Y‖^ρ_{L_ρ}` and their bounds in terms of `‖X h‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub gamma: f64,
    pub alpha: f64,
    pub rho: f64,
    /// `∫_{D(α)} |Ŷ - Y|^ρ dω`.
    pub i1: f64,
    /// `∫_{D₊(α)} |Ŷ - Y|^ρ dω`.
    pub i2: f64,
    /// Grid estimate of `ess sup |X| h(·, c)`.
    pub xh_sup: f64,
    /// `2 arccos(α) ‖X h‖^ρ_∞`.
    pub i1_bound: f64,
    /// `ψ(γ) ‖X h‖^ρ_∞`.
    pub i2_bound: f64,
}

pub fn spectral_error_decomposition(
    signal: &EnergyDecaySignal,
    p: &PredictorParams,
    w: WeightParams,
    rho: u32,
    grid: &FrequencyGrid,
) -> Result<Decomposition> {
    let (gamma, alpha) = (p.gamma(), p.alpha());
    let r = f64::from(rho.max(1));
    let (i1, i2) = region_integrals(
        |om| r * (log_abs_error_gain(om, gamma, alpha) + signal.log_abs_spectrum(om)),
        alpha,
        grid,
    );
    let log_sup = grid
        .nodes()
        .skip(1)
        .map(|om| signal.log_abs_spectrum(om) + log_weight_h(om, w))
        .filter(|v| !v.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    let xh_sup = log_sup.exp();
    let scale = xh_sup.powf(r);
    Ok(Decomposition {
        gamma,
        alpha,
        rho: r,
        i1,
        i2,
        xh_sup,
        i1_bound: i1_bound_factor(alpha, 1.0) * scale,
        i2_bound: psi(p, rho, grid) * scale,
    })
}

/// `∫_{D(α)} |V - 1|^ρ h(ω, c)^{-ρ} dω`.
pub fn d_region_integral(p: &PredictorParams, w: WeightParams, rho: u32, grid: &FrequencyGrid) -> f64 {
    let (gamma, alpha) = (p.gamma(), p.alpha());
    let r = f64::from(rho.max(1));
    region_integrals(
        |om| r * (log_abs_error_gain(om, gamma, alpha) - log_weight_h(om, w)),
        alpha,
        grid,
    )
    .0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DRegionRow {
    pub gamma: f64,
    pub alpha: f64,
    pub rho: u32,
    pub integral: f64,
    /// `2 arccos α`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gamma0Scan {
    /// Smallest scanned `γ` from which the inequality holds at every larger scanned `γ`.
    pub gamma0: Option<f64>,
    pub rows: Vec<DRegionRow>,
}

/// Relative slack allowed in the `2 arccos α` comparison.
pub const D_REGION_SLACK: f64 = 1e-6;

/// Scans `gammas` (sorted internally) for the threshold past which
/// `∫_{D(α)} |V-1|^ρ h^{-ρ} <= 2 arccos α` holds for all `rhos`. Values of `γ`
/// with no valid `α` are skipped.
pub fn detect_gamma0(
    p_base: &PredictorParams,
    w: WeightParams,
    rhos: &[u32],
    gammas: &[f64],
    grid: &FrequencyGrid,
) -> Gamma0Scan {
    let mut gammas = gammas.to_vec();
    gammas.sort_by(f64::total_cmp);
    let rows: Vec<DRegionRow> = gammas
        .par_iter()
        .filter_map(|&g| p_base.with_gamma(g).ok())
        .flat_map_iter(|p| {
            rhos.iter()
                .map(|&rho| {
                    let integral = d_region_integral(&p, w, rho, grid);
                    let bound = 2.0 * p.alpha().acos();
                    DRegionRow {
                        gamma: p.gamma(),
                        alpha: p.alpha(),
                        rho,
                        integral,
                        bound,
                        holds: integral <= bound * (1.0 + D_REGION_SLACK),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut gamma0 = None;
    for row in rows.iter().rev() {
        if !row.holds {
            break;
        }
        gamma0 = Some(row.gamma);
    }
    // a γ only qualifies once every ρ at that γ holds
    if let Some(g0) = gamma0 {
        if rows.iter().any(|r| r.gamma == g0 && !r.holds) {
            gamma0 = rows.iter().map(|r| r.gamma).find(|&g| g > g0);
        }
    }
    Gamma0Scan { gamma0, rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// The kernel could not be built; only frequency-domain diagnostics are present.
    LogDomainOnly,
    /// No valid `α` exists for this `γ`.
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub alpha: f64,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub log_kappa: f64,
    pub kappa: f64,
    pub psi_rho1: f64,
    pub psi_rho2: f64,
    /// `2 arccos α`.
    pub i1_factor: f64,
    pub truncation: Option<usize>,
    pub memory: Option<usize>,
    /// Tap mass beyond the memory, `Σ_{s>M} |k̂(s)|`.
    pub tail_l1: Option<f64>,
    pub error_linf: Option<f64>,
    pub error_rms: Option<f64>,
    /// `ℓ∞` error bound contributions from `D(α)` and `D₊(α)`.
    pub i1_term: f64,
    pub i2_term: f64,
    /// `error_linf <= i1_term + i2_term + ‖x‖_∞ tail_l1 + 1e-9`.
    pub bound_ok: Option<bool>,
}

impl SweepRow {
    fn invalid(gamma: f64, message: String) -> Self {
        Self {
            gamma,
            alpha: f64::NAN,
            status: RowStatus::Invalid,
            message: Some(message),
            log_kappa: f64::NAN,
            kappa: f64::NAN,
            psi_rho1: f64::NAN,
            psi_rho2: f64::NAN,
            i1_factor: f64::NAN,
            truncation: None,
            memory: None,
            tail_l1: None,
            error_linf: None,
            error_rms: None,
            i1_term: f64::NAN,
            i2_term: f64::NAN,
            bound_ok: None,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.status == RowStatus::Ok
    }
}

/// Absolute slack added to measured-versus-bound comparisons in the sweep.
pub const SWEEP_BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub metadata: Metadata,
    pub rows: Vec<SweepRow>,
}

fn sweep_row(
    x: &Series,
    spectrum: &SignalSpectrum,
    p_base: &PredictorParams,
    gamma: f64,
    config: &SweepConfig,
    grid: &FrequencyGrid,
) -> SweepRow {
    let p = match p_base.with_gamma(gamma) {
        Ok(p) => p,
        Err(e) => return SweepRow::invalid(gamma, e.to_string()),
    };
    let alpha = p.alpha();
    let lk = log_kappa(&p, grid);
    let (i1_term, i2_term) = error_bound_terms(spectrum, &p, grid).unwrap_or((f64::NAN, f64::NAN));
    let mut row = SweepRow {
        gamma,
        alpha,
        status: RowStatus::Ok,
        message: None,
        log_kappa: lk,
        kappa: lk.exp(),
        psi_rho1: psi(&p, 1, grid),
        psi_rho2: psi(&p, 2, grid),
        i1_factor: i1_bound_factor(alpha, 1.0),
        truncation: None,
        memory: None,
        tail_l1: None,
        error_linf: None,
        error_rms: None,
        i1_term,
        i2_term,
        bound_ok: None,
    };
    let measured = build_kernel(&p, config.fft_size, config.truncation).and_then(|k| {
        let m = config.memory_for(&k);
        let run = predict(x, &k, m)?;
        let linf = prediction_error(&run, ErrorNorm::Linf)?;
        let rms = prediction_error(&run, ErrorNorm::Rms)?;
        Ok((k.truncation(), m, k.tail_l1_beyond(m), linf, rms))
    });
    match measured {
        Ok((t, m, tail, linf, rms)) => {
            row.truncation = Some(t);
            row.memory = Some(m);
            row.tail_l1 = Some(tail);
            row.error_linf = Some(linf);
            row.error_rms = Some(rms);
            row.bound_ok = Some(linf <= i1_term + i2_term + x.max_abs() * tail + SWEEP_BOUND_SLACK);
        }
        Err(e) => {
            row.status = RowStatus::LogDomainOnly;
            row.message = Some(e.to_string());
        }
    }
    row
}

/// One row per `γ` (sorted ascending). Rows whose kernel cannot be built keep
/// their frequency-domain columns and are flagged instead of failing the sweep.
pub fn gamma_sweep(
    signal: &SpectrumSpec,
    gammas: &[f64],
    p_base: &PredictorParams,
    config: &SweepConfig,
) -> Result<SweepReport> {
    config.validate()?;
    let x = signal.generate(config.t0, config.t1())?;
    let spectrum = SignalSpectrum::from_spec(signal, config.t0, config.t1())?;
    let grid = config.grid()?;
    let mut gammas = gammas.to_vec();
    gammas.sort_by(f64::total_cmp);
    let rows = gammas
        .par_iter()
        .map(|&g| sweep_row(&x, &spectrum, p_base, g, config, &grid))
        .collect();
    Ok(SweepReport {
        metadata: Metadata::new("gamma_sweep", signal, p_base, config),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub nu: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub kappa: f64,
    pub epsilon_clean: f64,
    pub error_noisy: f64,
    /// `error_noisy - epsilon_clean`.
    pub added_error: f64,
    /// Error on the noise alone; linear in `ν` and at least `|added_error|`.
    pub noise_error: f64,
    /// `ε + ν(κ + 1)`.
    pub bound: f64,
    pub bound_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub metadata: Metadata,
    pub rows: Vec<RobustnessRow>,
}

/// Relative slack in the robustness bound check.
pub const ROBUSTNESS_SLACK: f64 = 1e-6;

/// For each `γ` and `ν`: predicts `x₀ + x_N` where `x_N` is the noise draw
/// scaled to spectral `L₁` norm `ν`, and checks `‖ŷ - y‖_∞ <= ε + ν(κ+1)`
/// with `ε` the measured error on `x₀` alone.
pub fn robustness_sweep(
    clean: &SpectrumSpec,
    nus: &[f64],
    gammas: &[f64],
    p_base: &PredictorParams,
    config: &SweepConfig,
    noise: &NoiseSettings,
) -> Result<RobustnessReport> {
    config.validate()?;
    if let Some(nu) = nus.iter().find(|nu| !(**nu >= 0.0 && nu.is_finite())) {
        return Err(Error::InvalidParameter(format!("noise level must be non-negative, got {nu}")));
    }
    let (t0, t1) = (config.t0, config.t1());
    let x0 = clean.generate(t0, t1)?;
    let grid = config.grid()?;
    let noisy: Vec<(f64, Series, Series)> = nus
        .iter()
        .map(|&nu| {
            let xn = gen_noise_l1(nu, noise.seed, t0, t1, noise.components)?;
            Ok((nu, x0.try_add(&xn)?, xn))
        })
        .collect::<Result<_>>()?;
    let mut gammas = gammas.to_vec();
    gammas.sort_by(f64::total_cmp);
    let rows = gammas
        .par_iter()
        .flat_map_iter(|&gamma| robustness_rows(&x0, &noisy, p_base, gamma, config, &grid))
        .collect();
    let mut metadata = Metadata::new("robustness_sweep", clean, p_base, config);
    metadata.seeds.push(noise.seed);
    metadata.noise = Some(NoiseMetadata {
        seed: noise.seed,
        components: noise.components,
        spectrum: format!(
            "half of the frequencies uniform on (0, pi), half uniform on (pi - {NOISE_EDGE_BAND}, pi); amplitudes rescaled so the spectral L1 norm equals nu"
        ),
    });
    Ok(RobustnessReport { metadata, rows })
}

fn robustness_rows(
    x0: &Series,
    noisy: &[(f64, Series, Series)],
    p_base: &PredictorParams,
    gamma: f64,
    config: &SweepConfig,
    grid: &FrequencyGrid,
) -> Vec<RobustnessRow> {
    let failed = |alpha: f64, kappa: f64, status: RowStatus, msg: String| {
        noisy
            .iter()
            .map(|(nu, _, _)| RobustnessRow {
                nu: *nu,
                gamma,
                alpha,
                status,
                message: Some(msg.clone()),
                kappa,
                epsilon_clean: f64::NAN,
                error_noisy: f64::NAN,
                added_error: f64::NAN,
                noise_error: f64::NAN,
                bound: f64::NAN,
                bound_violated: false,
            })
            .collect()
    };
    let p = match p_base.with_gamma(gamma) {
        Ok(p) => p,
        Err(e) => return failed(f64::NAN, f64::NAN, RowStatus::Invalid, e.to_string()),
    };
    let kappa = log_kappa(&p, grid).exp();
    let linf = |x: &Series, k: &PredictorKernel| -> Result<f64> {
        prediction_error(&predict(x, k, config.memory_for(k))?, ErrorNorm::Linf)
    };
    let measured = build_kernel(&p, config.fft_size, config.truncation).and_then(|k| {
        let eps = linf(x0, &k)?;
        let noisy_errors = noisy
            .iter()
            .map(|(_, x, xn)| Ok((linf(x, &k)?, linf(xn, &k)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok((eps, noisy_errors))
    });
    match measured {
        Ok((eps, noisy_errors)) => noisy
            .iter()
            .zip(noisy_errors)
            .map(|((nu, _, _), (err, noise_error))| {
                let bound = eps + nu * (kappa + 1.0);
                RobustnessRow {
                    nu: *nu,
                    gamma,
                    alpha: p.alpha(),
                    status: RowStatus::Ok,
                    message: None,
                    kappa,
                    epsilon_clean: eps,
                    error_noisy: err,
                    added_error: err - eps,
                    noise_error,
                    bound,
                    bound_violated: err > bound + ROBUSTNESS_SLACK * bound,
                }
            })
            .collect(),
        Err(e) => failed(p.alpha(), kappa, RowStatus::LogDomainOnly, e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRow {
    pub memory: usize,
    pub error_linf: f64,
    /// `Σ_{s>M} |k̂(s)|`, including the kernel's tail bound beyond `T`.
    pub tail_l1: f64,
    /// `error(M) - error(T)`.
    pub excess: f64,
    /// `‖x‖_∞ · tail_l1`.
    pub excess_bound: f64,
    pub bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub metadata: Metadata,
    pub gamma: f64,
    pub alpha: f64,
    pub truncation: usize,
    /// `error(T)` on the common window.
    pub error_full: f64,
    /// First and last time of the common evaluation window.
    pub window: (i64, i64),
    pub rows: Vec<TruncationRow>,
}

/// Errors of memory-`M` predictors, all measured on the valid window of the
/// longest one, `[t₀+T, t₁-1]`. The kernel is lengthened when a requested `M`
/// exceeds its automatic truncation.
pub fn truncation_study(
    signal: &SpectrumSpec,
    gamma: f64,
    memories: &[usize],
    p_base: &PredictorParams,
    config: &SweepConfig,
) -> Result<TruncationReport> {
    config.validate()?;
    let p = p_base.with_gamma(gamma)?;
    let x = signal.generate(config.t0, config.t1())?;
    let mut kernel = build_kernel(&p, config.fft_size, config.truncation)?;
    let longest = memories.iter().copied().max().unwrap_or(0);
    if longest > kernel.truncation() {
        kernel = build_kernel(&p, config.fft_size, Some(longest))?;
    }
    let t = kernel.truncation();
    let errors_from = |m: usize| -> Result<Vec<f64>> {
        let run = predict(&x, &kernel, m)?;
        Ok(run.residuals()[t - m..].to_vec())
    };
    let linf = |r: &[f64]| r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let error_full = linf(&errors_from(t)?);
    let x_sup = x.max_abs();
    let rows = memories
        .par_iter()
        .map(|&m| {
            let error_linf = linf(&errors_from(m)?);
            let tail_l1 = kernel.tail_l1_beyond(m);
            let excess = error_linf - error_full;
            let excess_bound = x_sup * tail_l1;
            Ok(TruncationRow {
                memory: m,
                error_linf,
                tail_l1,
                excess,
                excess_bound,
                bound_ok: excess <= excess_bound + SWEEP_BOUND_SLACK,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut config = *config;
    config.truncation = Some(t);
    Ok(TruncationReport {
        metadata: Metadata::new("truncation_study", signal, p_base, &config),
        gamma,
        alpha: p.alpha(),
        truncation: t,
        error_full,
        window: (config.t0 + t as i64, config.t1() - 1),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformClassRow {
    pub gamma: f64,
    pub alpha: f64,
    pub draws: usize,
    pub max_error_linf: f64,
    pub mean_error_linf: f64,
}

/// Worst `ℓ∞` error over random members of the class bounded by `c0`
/// (energy-decay draws with seeds `0..draws`).
pub fn uniform_class_study(
    c0: f64,
    q: f64,
    draws: usize,
    gammas: &[f64],
    p_base: &PredictorParams,
    config: &SweepConfig,
) -> Result<Vec<UniformClassRow>> {
    config.validate()?;
    if draws == 0 {
        return Err(Error::InvalidParameter("need at least one draw".into()));
    }
    let signals = (0..draws as u64)
        .map(|seed| SpectrumSpec::EnergyDecay { c: c0, q, seed, center: None }.generate(config.t0, config.t1()))
        .collect::<Result<Vec<_>>>()?;
    let mut gammas = gammas.to_vec();
    gammas.sort_by(f64::total_cmp);
    gammas
        .iter()
        .map(|&gamma| {
            let p = p_base.with_gamma(gamma)?;
            let k = build_kernel(&p, config.fft_size, config.truncation)?;
            let errors = signals
                .par_iter()
                .map(|x| prediction_error(&predict(x, &k, config.memory_for(&k))?, ErrorNorm::Linf))
                .collect::<Result<Vec<_>>>()?;
            Ok(UniformClassRow {
                gamma,
                alpha: p.alpha(),
                draws,
                max_error_linf: errors.iter().cloned().fold(0.0, f64::max),
                mean_error_linf: errors.iter().sum::<f64>() / draws as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::InvalidParameter(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

/// Tabular view used for CSV emission.
pub trait Report: Serialize {
    fn metadata(&self) -> &Metadata;
    fn metadata_mut(&mut self) -> &mut Metadata;
    fn header(&self) -> Vec<&'static str>;
    fn records(&self) -> Vec<Vec<String>>;

    /// Metadata as a `#` comment line, then a header row and one line per row.
    fn to_csv(&self) -> String {
        let mut out = String::new();
        let meta = serde_json::to_string(self.metadata()).expect("metadata serializes");
        let _ = writeln!(out, "# {meta}");
        let _ = writeln!(out, "{}", self.header().join(","));
        for r in self.records() {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn opt_f(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn opt_u(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_b(x: Option<bool>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn status_name(s: RowStatus) -> String {
    match s {
        RowStatus::Ok => "ok",
        RowStatus::LogDomainOnly => "log_domain_only",
        RowStatus::Invalid => "invalid",
    }
    .to_string()
}

impl Report for SweepReport {
    fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    fn metadata_mut(&mut self) -> &mut Metadata {
        &mut self.metadata
    }

    fn header(&self) -> Vec<&'static str> {
        vec![
            "gamma", "alpha", "status", "log_kappa", "kappa", "psi_rho1", "psi_rho2", "i1_factor", "truncation",
            "memory", "tail_l1", "error_linf", "error_rms", "i1_term", "i2_term", "bound_ok",
        ]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    f(r.gamma),
                    f(r.alpha),
                    status_name(r.status),
                    f(r.log_kappa),
                    f(r.kappa),
                    f(r.psi_rho1),
                    f(r.psi_rho2),
                    f(r.i1_factor),
                    opt_u(r.truncation),
                    opt_u(r.memory),
                    opt_f(r.tail_l1),
                    opt_f(r.error_linf),
                    opt_f(r.error_rms),
                    f(r.i1_term),
                    f(r.i2_term),
                    opt_b(r.bound_ok),
                ]
            })
            .collect()
    }
}

impl Report for RobustnessReport {
    fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    fn metadata_mut(&mut self) -> &mut Metadata {
        &mut self.metadata
    }

    fn header(&self) -> Vec<&'static str> {
        vec![
            "nu", "gamma", "alpha", "status", "kappa", "epsilon_clean", "error_noisy", "added_error", "noise_error",
            "bound", "bound_violated",
        ]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    f(r.nu),
                    f(r.gamma),
                    f(r.alpha),
                    status_name(r.status),
                    f(r.kappa),
                    f(r.epsilon_clean),
                    f(r.error_noisy),
                    f(r.added_error),
                    f(r.noise_error),
                    f(r.bound),
                    r.bound_violated.to_string(),
                ]
            })
            .collect()
    }
}

impl Report for TruncationReport {
    fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    fn metadata_mut(&mut self) -> &mut Metadata {
        &mut self.metadata
    }

    fn header(&self) -> Vec<&'static str> {
        vec![
            "gamma", "truncation", "memory", "error_linf", "error_full", "tail_l1", "excess", "excess_bound",
            "bound_ok",
        ]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    f(self.gamma),
                    self.truncation.to_string(),
                    r.memory.to_string(),
                    f(r.error_linf),
                    f(self.error_full),
                    f(r.tail_l1),
                    f(r.excess),
                    f(r.excess_bound),
                    r.bound_ok.to_string(),
                ]
            })
            .collect()
    }
}

/// Writes `<dir>/<id>.<ext>` for each format. Files are written to a
/// temporary name first and renamed, so a failed run leaves no partial file.
pub fn write_report<R: Report>(report: &R, dir: &Path, id: &str, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    formats
        .iter()
        .map(|fmt| {
            let body = match fmt {
                ReportFormat::Csv => report.to_csv(),
                ReportFormat::Json => report.to_json(),
            };
            let path = dir.join(format!("{id}.{}", fmt.extension()));
            write_atomic(&path, body.as_bytes())?;
            Ok(path)
        })
        .collect()
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Data lines of a CSV report, without the metadata comment.
pub fn csv_numeric_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> PredictorParams {
        PredictorParams::power_law(1.0, 2.0, 1.5).unwrap()
    }

    fn small_config() -> SweepConfig {
        SweepConfig {
            fft_size: 1 << 14,
            window: 4096,
            grid_size: 4096,
            ..SweepConfig::default()
        }
    }

    fn constant() -> SpectrumSpec {
        SpectrumSpec::Sinusoids {
            components: vec![Sinusoid::new(0.0, 1.0, 0.0)],
        }
    }

    #[test]
    fn constant_signal_rows_match_dc_error() {
        let report = gamma_sweep(&constant(), &[2.0, 1.0, 1.5], &base(), &small_config()).unwrap();
        let gammas: Vec<f64> = report.rows.iter().map(|r| r.gamma).collect();
        assert_eq!(gammas, vec![1.0, 1.5, 2.0]);
        for r in &report.rows {
            let expected = (-r.gamma / (1.0 + r.alpha)).exp();
            assert!((r.error_linf.unwrap() - expected).abs() < 1e-8, "{r:?}");
            assert_eq!(r.bound_ok, Some(true));
            // a DC line sits in D₊
            assert_eq!(r.i1_term, 0.0);
            assert!((r.i2_term - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_sweep_has_metadata() {
        let report = gamma_sweep(&constant(), &[], &base(), &small_config()).unwrap();
        assert!(report.rows.is_empty());
        assert_eq!(report.metadata.experiment, "gamma_sweep");
        assert_eq!(csv_numeric_lines(&report.to_csv()).len(), 1);
    }

    #[test]
    fn unbuildable_rows_are_flagged() {
        let config = SweepConfig {
            fft_size: 128,
            window: 512,
            grid_size: 1024,
            ..SweepConfig::default()
        };
        let report = gamma_sweep(&constant(), &[0.5, 1.0, 2.5], &base(), &config).unwrap();
        assert_eq!(report.rows[0].status, RowStatus::Invalid);
        assert_eq!(report.rows[1].status, RowStatus::Ok);
        assert_eq!(report.rows[2].status, RowStatus::LogDomainOnly);
        assert!(report.rows[2].log_kappa.is_finite() && report.rows[2].error_linf.is_none());
        let json = report.to_json();
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(back["rows"][0]["alpha"].is_null());
    }

    #[test]
    fn line_spectrum_below_boundary_has_no_d_minus_term() {
        let p = base().with_gamma(2.0).unwrap();
        let split = region_split(p.alpha()).unwrap();
        assert!(split.omega_boundary > 2.0);
        let comps = crate::signals::bandlimited_components(2.0, 16, 3, 0, 1023).unwrap();
        let grid = FrequencyGrid::new(1024).unwrap();
        let (i1, i2) = error_bound_terms(&SignalSpectrum::Lines(comps), &p, &grid).unwrap();
        assert_eq!(i1, 0.0);
        assert!(i2 > 0.0);
    }

    #[test]
    fn decomposition_respects_bounds() {
        let grid = FrequencyGrid::new(8192).unwrap();
        let w = WeightParams::new(2.0, 2.0).unwrap();
        for seed in 0..3 {
            let sig = EnergyDecaySignal::new(2.0, 2.0, seed, 0).unwrap();
            let mut previous = f64::INFINITY;
            for gamma in [1.0, 1.5, 2.0, 2.5] {
                let p = base().with_gamma(gamma).unwrap();
                for rho in [1, 2] {
                    let d = spectral_error_decomposition(&sig, &p, w, rho, &grid).unwrap();
                    assert!(d.i1 <= d.i1_bound && d.i2 <= d.i2_bound, "{d:?}");
                    if rho == 1 {
                        assert!(d.i1 + d.i2 < previous, "{d:?}");
                        previous = d.i1 + d.i2;
                    }
                }
            }
        }
    }

    #[test]
    fn d_region_reference_values() {
        // mpmath quadrature, c = 2, q = 2
        let grid = FrequencyGrid::new(8192).unwrap();
        let w = WeightParams::new(2.0, 2.0).unwrap();
        let cases = [(0.8, 2.289, 1.491), (1.0, 0.4247, 0.1230)];
        for (gamma, r1, r2) in cases {
            let p = base().with_gamma(gamma).unwrap();
            assert!((d_region_integral(&p, w, 1, &grid) / r1 - 1.0).abs() < 1e-3);
            assert!((d_region_integral(&p, w, 2, &grid) / r2 - 1.0).abs() < 1e-3);
        }
        let p = base().with_gamma(2.0).unwrap();
        assert!((d_region_integral(&p, w, 1, &grid) / 2.08e-5 - 1.0).abs() < 1e-2);
        assert!((d_region_integral(&p, w, 2, &grid) / 3.79e-9 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn gamma0_scan() {
        let grid = FrequencyGrid::new(4096).unwrap();
        let w = WeightParams::new(2.0, 2.0).unwrap();
        let gammas: Vec<f64> = (0..20).map(|i| 0.7 + 0.1 * i as f64).collect();
        let scan = detect_gamma0(&base(), w, &[1, 2], &gammas, &grid);
        // γ = 0.7 has no valid α; every valid γ satisfies the inequality
        assert!((scan.gamma0.unwrap() - 0.8).abs() < 1e-12);
        assert!(scan.rows.iter().all(|r| r.holds));
    }

    #[test]
    fn robustness_rows() {
        let clean = SpectrumSpec::BandLimitedNoise {
            omega1: 2.0,
            components: 8,
            seed: 1,
        };
        let report = robustness_sweep(
            &clean,
            &[0.0, 0.01, 0.02, 0.04],
            &[1.0, 2.0],
            &base(),
            &small_config(),
            &NoiseSettings::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 8);
        for r in &report.rows {
            assert!(!r.bound_violated, "{r:?}");
            if r.nu == 0.0 {
                assert_eq!(r.error_noisy, r.epsilon_clean);
                assert_eq!(r.added_error, 0.0);
            }
        }
        for rows in report.rows.chunks(4) {
            let unit = rows[1].noise_error / 0.01;
            for r in &rows[1..] {
                assert!(r.added_error.abs() <= r.noise_error, "{r:?}");
                assert!((r.noise_error - unit * r.nu).abs() <= 1e-9 * r.noise_error, "{r:?}");
            }
        }
    }

    #[test]
    fn truncation_rows() {
        let signal = SpectrumSpec::BandLimitedNoise {
            omega1: 2.0,
            components: 8,
            seed: 4,
        };
        let report = truncation_study(&signal, 1.0, &[4, 8, 16, 32], &base(), &small_config()).unwrap();
        assert_eq!(report.truncation, 32);
        for r in &report.rows {
            assert!(r.bound_ok, "{r:?}");
        }
        let r15 = truncation_study(&signal, 1.0, &[15], &base(), &small_config()).unwrap();
        assert!(r15.rows[0].tail_l1 < 1e-12);
        let full = gamma_sweep(&signal, &[2.0], &base(), &small_config()).unwrap();
        let t = full.rows[0].truncation.unwrap();
        let study = truncation_study(&signal, 2.0, &[t], &base(), &small_config()).unwrap();
        assert_eq!(study.rows[0].error_linf, full.rows[0].error_linf.unwrap());
    }

    #[test]
    fn reports_are_deterministic() {
        let signal = SpectrumSpec::EnergyDecay {
            c: 2.0,
            q: 2.0,
            seed: 3,
            center: None,
        };
        let a = gamma_sweep(&signal, &[1.0, 2.0], &base(), &small_config()).unwrap();
        let b = gamma_sweep(&signal, &[1.0, 2.0], &base(), &small_config()).unwrap();
        assert_eq!(csv_numeric_lines(&a.to_csv()), csv_numeric_lines(&b.to_csv()));
        assert!(a.rows.iter().all(|r| r.bound_ok == Some(true)));
    }

    #[test]
    fn uniform_class_reports_worst_draw() {
        let config = SweepConfig {
            fft_size: 1 << 12,
            window: 1024,
            grid_size: 1024,
            ..SweepConfig::default()
        };
        let p = PredictorParams::new(1.5, 2.0, 1.0, crate::spectral_core::AlphaRule::Uniform { c0: 2.0 }).unwrap();
        let rows = uniform_class_study(2.0, 2.0, 20, &[1.5, 2.0], &p, &config).unwrap();
        for r in &rows {
            assert_eq!(r.draws, 20);
            assert!(r.max_error_linf >= r.mean_error_linf);
        }
    }

    #[test]
    fn write_report_creates_named_files() {
        let dir = tempfile::tempdir().unwrap();
        let report = gamma_sweep(&constant(), &[1.0], &base(), &small_config()).unwrap();
        let paths = write_report(&report, dir.path(), "dc", &[ReportFormat::Csv, ReportFormat::Json]).unwrap();
        assert!(paths[0].ends_with("dc.csv") && paths[1].ends_with("dc.json"));
        let json: SweepReport = serde_json::from_str(&fs::read_to_string(&paths[1]).unwrap()).unwrap();
        assert_eq!(json.rows[0].error_linf, report.rows[0].error_linf);
    }
}
