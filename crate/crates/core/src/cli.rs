//! Command-line front end: TOML experiment configs, the seven commands, and
//! their exit codes.
//!
//! Precedence: built-in defaults, then the `--config` file, then flags.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (for sweeps: at least one row succeeded) |
//! | 1 | i/o failure |
//! | 2 | invalid configuration or parameters |
//! | 3 | kernel synthesis failed (overflow, causality or route mismatch) |
//! | 4 | sweep produced no successful row |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    gamma_sweep, robustness_sweep, timestamp, truncation_study, version, write_atomic, write_report, NoiseSettings,
    Report, ReportFormat, SweepConfig,
};
use crate::error::{Error, Result};
use crate::kernel::{build_kernel, kappa, psi, PredictorKernel};
use crate::predictor::{predict, prediction_error, ErrorNorm};
use crate::signals::{class_diagnostic, class_diagnostic_spectrum, fmt_f64, Series, Sinusoid, SpectrumSpec};
use crate::spectral_core::{AlphaRule, FrequencyGrid, PredictorParams, WeightParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_KERNEL: i32 = 3;
pub const EXIT_NO_ROWS: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Overflow { .. } | Error::NonCausal { .. } | Error::SynthesisMismatch { .. } => EXIT_KERNEL,
        _ => EXIT_INVALID,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictorSection {
    pub gamma: f64,
    pub gamma_list: Option<Vec<f64>>,
    pub q: f64,
    pub mu: f64,
    /// `power_law`, `log_corrected` or `uniform`.
    pub alpha_rule: String,
    /// Class bound for the `uniform` rule.
    pub c0: Option<f64>,
}

impl Default for PredictorSection {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            gamma_list: None,
            q: 2.0,
            mu: 1.5,
            alpha_rule: "power_law".into(),
            c0: None,
        }
    }
}

impl PredictorSection {
    pub fn rule(&self) -> Result<AlphaRule> {
        match (self.alpha_rule.as_str(), self.c0) {
            ("power_law", None) => Ok(AlphaRule::PowerLaw),
            ("log_corrected", None) => Ok(AlphaRule::LogCorrected),
            ("uniform", Some(c0)) => Ok(AlphaRule::Uniform { c0 }),
            ("uniform", None) => Err(Error::InvalidParameter("alpha_rule = \"uniform\" needs predictor.c0".into())),
            ("power_law" | "log_corrected", Some(_)) => Err(Error::InvalidParameter(
                "predictor.c0 only applies to alpha_rule = \"uniform\"".into(),
            )),
            (other, _) => Err(Error::InvalidParameter(format!(
                "unknown alpha_rule {other:?}; expected power_law, log_corrected or uniform"
            ))),
        }
    }

    pub fn params(&self) -> Result<PredictorParams> {
        PredictorParams::new(self.gamma, self.q, self.mu, self.rule()?)
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.gamma_list.clone().unwrap_or_else(|| vec![self.gamma])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub fft_size: usize,
    pub truncation: Option<usize>,
    /// Load this kernel file instead of synthesizing one (`predict` only).
    pub path: Option<PathBuf>,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            fft_size: SweepConfig::default().fft_size,
            truncation: None,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalSection {
    /// `sinusoids`, `band_limited_noise`, `energy_decay`, `noise_l1` or `file`.
    pub kind: String,
    pub seed: u64,
    pub sinusoids: Option<Vec<Sinusoid>>,
    pub omega1: Option<f64>,
    pub n_components: Option<usize>,
    pub c: Option<f64>,
    pub q: Option<f64>,
    pub center: Option<i64>,
    pub nu: Option<f64>,
    /// Series file for `kind = "file"`.
    pub path: Option<PathBuf>,
}

impl Default for SignalSection {
    fn default() -> Self {
        Self {
            kind: "band_limited_noise".into(),
            seed: 42,
            sinusoids: None,
            omega1: None,
            n_components: None,
            c: None,
            q: None,
            center: None,
            nu: None,
            path: None,
        }
    }
}

impl SignalSection {
    fn reject_extra(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("sinusoids", self.sinusoids.is_some()),
            ("omega1", self.omega1.is_some()),
            ("n_components", self.n_components.is_some()),
            ("c", self.c.is_some()),
            ("q", self.q.is_some()),
            ("center", self.center.is_some()),
            ("nu", self.nu.is_some()),
            ("path", self.path.is_some()),
        ];
        match present.iter().find(|(k, set)| *set && !allowed.contains(k)) {
            Some((k, _)) => Err(Error::InvalidParameter(format!(
                "signal.{k} does not apply to kind = {:?}",
                self.kind
            ))),
            None => Ok(()),
        }
    }

    /// `None` for `kind = "file"`.
    pub fn spec(&self) -> Result<Option<SpectrumSpec>> {
        let spec = match self.kind.as_str() {
            "sinusoids" => {
                self.reject_extra(&["sinusoids"])?;
                SpectrumSpec::Sinusoids {
                    components: self.sinusoids.clone().unwrap_or_default(),
                }
            }
            "band_limited_noise" => {
                self.reject_extra(&["omega1", "n_components"])?;
                SpectrumSpec::BandLimitedNoise {
                    omega1: self.omega1.unwrap_or(2.0),
                    components: self.n_components.unwrap_or(16),
                    seed: self.seed,
                }
            }
            "energy_decay" => {
                self.reject_extra(&["c", "q", "center"])?;
                SpectrumSpec::EnergyDecay {
                    c: self.c.unwrap_or(2.0),
                    q: self.q.unwrap_or(2.0),
                    seed: self.seed,
                    center: self.center,
                }
            }
            "noise_l1" => {
                self.reject_extra(&["nu", "n_components"])?;
                SpectrumSpec::NoiseL1 {
                    nu: self.nu.unwrap_or(0.1),
                    components: self.n_components.unwrap_or(32),
                    seed: self.seed,
                }
            }
            "file" => {
                self.reject_extra(&["path"])?;
                if self.path.is_none() {
                    return Err(Error::InvalidParameter("kind = \"file\" needs signal.path".into()));
                }
                return Ok(None);
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown signal kind {other:?}; expected sinusoids, band_limited_noise, energy_decay, noise_l1 or file"
                )))
            }
        };
        spec.validate()?;
        Ok(Some(spec))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Memory `M`; the kernel length `T` when absent.
    pub memory: Option<usize>,
    pub window: usize,
    pub t0: i64,
    pub grid_size: usize,
    pub norms: Vec<ErrorNorm>,
    /// Noise levels for `robust`.
    pub nus: Vec<f64>,
    pub noise_seed: u64,
    pub noise_components: usize,
    /// Memories for `truncate`.
    pub memories: Vec<usize>,
    /// Weight `h(·, c)` used by `diagnose`; defaults to the signal's own `c, q`, else 2, 2.
    pub diagnose_c: Option<f64>,
    pub diagnose_q: Option<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        let noise = NoiseSettings::default();
        Self {
            memory: None,
            window: sweep.window,
            t0: sweep.t0,
            grid_size: sweep.grid_size,
            norms: vec![ErrorNorm::Linf, ErrorNorm::Rms],
            nus: vec![0.0, 0.01, 0.05, 0.1],
            noise_seed: noise.seed,
            noise_components: noise.components,
            memories: vec![4, 8, 16, 32],
            diagnose_c: None,
            diagnose_q: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub formats: Vec<ReportFormat>,
    /// File stem; defaults to the command name.
    pub id: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: vec![ReportFormat::Csv, ReportFormat::Json],
            id: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub predictor: PredictorSection,
    pub kernel: KernelSection,
    pub signal: SignalSection,
    pub run: RunSection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            fft_size: self.kernel.fft_size,
            truncation: self.kernel.truncation,
            memory: self.run.memory,
            window: self.run.window,
            t0: self.run.t0,
            grid_size: self.run.grid_size,
        }
    }

    pub fn noise(&self) -> NoiseSettings {
        NoiseSettings {
            seed: self.run.noise_seed,
            components: self.run.noise_components,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Checks everything that does not require running the computation.
    pub fn validate(&self) -> Result<()> {
        self.predictor.rule()?;
        if let Some(list) = &self.predictor.gamma_list {
            if list.iter().any(|g| !g.is_finite()) {
                return Err(Error::InvalidParameter("gamma_list entries must be finite".into()));
            }
        }
        self.signal.spec()?;
        self.sweep_config().validate()?;
        if self.output.formats.is_empty() {
            return Err(Error::InvalidParameter("output.formats must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "decay-predict", version = version(), about = "Predictor kernels, test signals and experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Signal seed (overrides signal.seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format (overrides output.formats).
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<ReportFormat>,
    /// Predictor gamma (overrides predictor.gamma).
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Output file stem (overrides output.id).
    #[arg(long, global = true)]
    pub id: Option<String>,
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Synthesize a kernel and print its diagnostics.
    Kernel,
    /// Generate the configured signal.
    Gen,
    /// Predict the configured signal and report its errors.
    Predict,
    /// Error and bound terms across gamma_list.
    Sweep,
    /// Noise robustness across run.nus and gamma_list.
    Robust,
    /// Errors of finite-memory predictors for run.memories.
    Truncate,
    /// Estimate class membership of the configured signal.
    Diagnose,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Gen => "gen",
            Command::Predict => "predict",
            Command::Sweep => "sweep",
            Command::Robust => "robust",
            Command::Truncate => "truncate",
            Command::Diagnose => "diagnose",
        }
    }
}

/// Loads the config file and applies flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(dir) = &cli.out {
        config.output.dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        config.signal.seed = seed;
    }
    if let Some(fmt) = cli.format {
        config.output.formats = vec![fmt];
    }
    if let Some(g) = cli.gamma {
        config.predictor.gamma = g;
    }
    if let Some(id) = &cli.id {
        config.output.id = Some(id.clone());
    }
    if config.output.id.is_none() {
        config.output.id = Some(cli.command.name().to_string());
    }
    Ok(config)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Summaries go to `out`, errors to `err`.
pub fn run_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    run(&cli, out, err)
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = resolve_config(cli).and_then(|config| {
        config.validate()?;
        dispatch(cli.command, &config, out)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, config: &ExperimentConfig, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Kernel => cmd_kernel(config, out),
        Command::Gen => cmd_gen(config, out),
        Command::Predict => cmd_predict(config, out),
        Command::Sweep => cmd_sweep(config, out),
        Command::Robust => cmd_robust(config, out),
        Command::Truncate => cmd_truncate(config, out),
        Command::Diagnose => cmd_diagnose(config, out),
    }
}

/// Provenance for output files. Kernel and signal files leave out the
/// timestamp so that reruns reproduce them byte for byte.
fn metadata(command: &str, config: &ExperimentConfig) -> serde_json::Value {
    let mut meta = serde_json::json!({
        "command": command,
        "version": version(),
        "seeds": [config.signal.seed],
        "config": config.to_json_value(),
    });
    if !matches!(command, "kernel" | "gen") {
        meta["timestamp_unix"] = timestamp().into();
    }
    meta
}

fn stem(config: &ExperimentConfig) -> &str {
    config.output.id.as_deref().unwrap_or("run")
}

fn output_path(config: &ExperimentConfig, suffix: &str) -> Result<PathBuf> {
    fs::create_dir_all(&config.output.dir)?;
    Ok(config.output.dir.join(format!("{}{suffix}", stem(config))))
}

fn io(e: std::io::Error) -> Error {
    Error::from(e)
}

pub fn cmd_kernel(config: &ExperimentConfig, out: &mut dyn Write) -> Result<i32> {
    let p = config.predictor.params()?;
    let kernel = build_kernel(&p, config.kernel.fft_size, config.kernel.truncation)?;
    let grid = FrequencyGrid::new(config.run.grid_size)?;
    let mut record = kernel.to_record();
    record.metadata = Some(metadata("kernel", config));
    let path = output_path(config, ".kernel.json")?;
    write_atomic(&path, (serde_json::to_string_pretty(&record)? + "\n").as_bytes())?;
    writeln!(out, "alpha={}", fmt_f64(p.alpha())).map_err(io)?;
    writeln!(out, "kappa={}", fmt_f64(kappa(&p, &grid))).map_err(io)?;
    writeln!(out, "psi_rho1={}", fmt_f64(psi(&p, 1, &grid))).map_err(io)?;
    writeln!(out, "psi_rho2={}", fmt_f64(psi(&p, 2, &grid))).map_err(io)?;
    writeln!(out, "causality_defect={}", fmt_f64(kernel.causality_defect())).map_err(io)?;
    writeln!(out, "tail_bound={}", fmt_f64(kernel.tail_bound())).map_err(io)?;
    writeln!(out, "T={}", kernel.truncation()).map_err(io)?;
    writeln!(out, "k0={}", fmt_f64(kernel.tap(0).to_f64())).map_err(io)?;
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(EXIT_OK)
}

fn load_signal(config: &ExperimentConfig) -> Result<Series> {
    match config.signal.spec()? {
        Some(spec) => spec.generate(config.run.t0, config.sweep_config().t1()),
        None => Series::read(config.signal.path.as_deref().expect("validated")),
    }
}

pub fn cmd_gen(config: &ExperimentConfig, out: &mut dyn Write) -> Result<i32> {
    if config.signal.kind == "file" {
        return Err(Error::InvalidParameter("gen needs a generated signal kind, not \"file\"".into()));
    }
    let x = load_signal(config)?;
    let meta = metadata("gen", config);
    for fmt in &config.output.formats {
        let (path, body) = match fmt {
            ReportFormat::Csv => (output_path(config, ".series.txt")?, x.to_text(&[meta.to_string()])),
            ReportFormat::Json => (output_path(config, ".series.json")?, x.to_json_with_metadata(&meta) + "\n"),
        };
        write_atomic(&path, body.as_bytes())?;
        writeln!(out, "wrote {}", path.display()).map_err(io)?;
    }
    writeln!(out, "samples={} max_abs={}", x.len(), fmt_f64(x.max_abs())).map_err(io)?;
    Ok(EXIT_OK)
}

fn load_kernel(config: &ExperimentConfig) -> Result<PredictorKernel> {
    match &config.kernel.path {
        Some(path) => PredictorKernel::read_json(path),
        None => build_kernel(&config.predictor.params()?, config.kernel.fft_size, config.kernel.truncation),
    }
}

pub fn cmd_predict(config: &ExperimentConfig, out: &mut dyn Write) -> Result<i32> {
    let x = load_signal(config)?;
    let kernel = load_kernel(config)?;
    let memory = config.run.memory.unwrap_or(kernel.truncation());
    let run = predict(&x, &kernel, memory)?;
    let errors = config
        .run
        .norms
        .iter()
        .map(|n| Ok((n.name(), prediction_error(&run, *n)?)))
        .collect::<Result<Vec<_>>>()?;
    let path = output_path(config, ".prediction.txt")?;
    write_atomic(&path, run.to_text(&[metadata("predict", config).to_string()]).as_bytes())?;
    let summary: Vec<String> = errors.iter().map(|(n, e)| format!("{n}_error={}", fmt_f64(*e))).collect();
    writeln!(out, "{} memory={memory}", summary.join(" ")).map_err(io)?;
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(EXIT_OK)
}

fn generated_spec(config: &ExperimentConfig, command: &str) -> Result<SpectrumSpec> {
    config
        .signal
        .spec()?
        .ok_or_else(|| Error::InvalidParameter(format!("{command} needs a generated signal kind, not \"file\"")))
}

fn emit<R: Report>(mut report: R, config: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    report.metadata_mut().resolved_config = Some(config.to_json_value());
    for path in write_report(&report, &config.output.dir, stem(config), &config.output.formats)? {
        writeln!(out, "wrote {}", path.display()).map_err(io)?;
    }
    Ok(())
}

pub fn cmd_sweep(config: &ExperimentConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = generated_spec(config, "sweep")?;
    let gammas = config.predictor.gammas();
    let report = gamma_sweep(&spec, &gammas, &config.predictor.params_base()?, &config.sweep_config())?;
    let ok = report.rows.iter().filter(|r| r.succeeded()).count();
    for r in &report.rows {
        let err = r.error_linf.map(fmt_f64).unwrap_or_else(|| "-".into());
        writeln!(out, "gamma={} status={:?} linf_error={err}", fmt_f64(r.gamma), r.status).map_err(io)?;
    }
    writeln!(out, "rows={} succeeded={ok}", report.rows.len()).map_err(io)?;
    let empty = report.rows.is_empty();
    emit(report, config, out)?;
    Ok(if ok == 0 && !empty { EXIT_NO_ROWS } else { EXIT_OK })
}

pub fn cmd_robust(config: &ExperimentConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = generated_spec(config, "robust")?;
    let report = robustness_sweep(
        &spec,
        &config.run.nus,
        &config.predictor.gammas(),
        &config.predictor.params_base()?,
        &config.sweep_config(),
        &config.noise(),
    )?;
    let ok = report.rows.iter().filter(|r| r.status == crate::analysis::RowStatus::Ok).count();
    let violated = report.rows.iter().filter(|r| r.bound_violated).count();
    writeln!(out, "rows={} succeeded={ok} bound_violations={violated}", report.rows.len()).map_err(io)?;
    let empty = report.rows.is_empty();
    emit(report, config, out)?;
    Ok(if ok == 0 && !empty { EXIT_NO_ROWS } else { EXIT_OK })
}

pub fn cmd_truncate(config: &ExperimentConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = generated_spec(config, "truncate")?;
    let report = truncation_study(
        &spec,
        config.predictor.gamma,
        &config.run.memories,
        &config.predictor.params_base()?,
        &config.sweep_config(),
    )?;
    writeln!(
        out,
        "T={} error_full={} rows={}",
        report.truncation,
        fmt_f64(report.error_full),
        report.rows.len()
    )
    .map_err(io)?;
    emit(report, config, out)?;
    Ok(EXIT_OK)
}

pub fn cmd_diagnose(config: &ExperimentConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = config.signal.spec()?;
    let (default_c, default_q) = match &spec {
        Some(SpectrumSpec::EnergyDecay { c, q, .. }) => (*c, *q),
        _ => (2.0, 2.0),
    };
    let w = WeightParams::new(
        config.run.diagnose_c.unwrap_or(default_c),
        config.run.diagnose_q.unwrap_or(default_q),
    )?;
    let grid = FrequencyGrid::new(config.run.grid_size)?;
    let x = load_signal(config)?;
    let estimate = class_diagnostic(&x, w, &grid);
    let analytic = match &spec {
        Some(s) => class_diagnostic_spectrum(s, w, &grid)?,
        None => None,
    };
    let result = serde_json::json!({
        "metadata": metadata("diagnose", config),
        "c": w.c(),
        "q": w.q(),
        "membership_estimate": estimate,
        "analytic": analytic,
    });
    let path = output_path(config, ".diagnose.json")?;
    write_atomic(&path, (serde_json::to_string_pretty(&result)? + "\n").as_bytes())?;
    let analytic = analytic.map(|a| format!(" analytic={}", fmt_f64(a))).unwrap_or_default();
    writeln!(out, "membership_estimate={}{analytic}", fmt_f64(estimate)).map_err(io)?;
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(EXIT_OK)
}

impl PredictorSection {
    /// Parameters for sweeps: the rule and shape of `params()` at a `gamma`
    /// that need not itself be valid.
    pub fn params_base(&self) -> Result<PredictorParams> {
        let rule = self.rule()?;
        let probe = self.gammas().into_iter().chain([self.gamma, 1.0, 2.0, 4.0]);
        for g in probe {
            if let Ok(p) = PredictorParams::new(g, self.q, self.mu, rule) {
                return Ok(p);
            }
        }
        PredictorParams::new(self.gamma, self.q, self.mu, rule)
    }
}
