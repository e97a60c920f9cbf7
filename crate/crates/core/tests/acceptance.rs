//! Acceptance checks. Each test prints one PASS/FAIL line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them.

use std::time::{Duration, Instant};

use decay_predict::analysis::{
    csv_numeric_lines, detect_gamma0, gamma_sweep, robustness_sweep, truncation_study, NoiseSettings, SweepConfig,
    D_REGION_SLACK,
};
use decay_predict::cli::run_with_args;
use decay_predict::kernel::{build_kernel, psi, spectral_energy};
use decay_predict::predictor::{predict, prediction_error, ErrorNorm};
use decay_predict::signals::{gen_sinusoids, Sinusoid, SpectrumSpec};
use decay_predict::spectral_core::{
    log_abs_error_gain, region_split, FrequencyGrid, PredictorParams, WeightParams,
};

const SWEEP: [f64; 4] = [1.0, 1.5, 2.0, 2.5];

fn params(gamma: f64) -> PredictorParams {
    PredictorParams::power_law(gamma, 2.0, 1.5).unwrap()
}

fn verdict(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration, limit_s: f64) {
    let secs = elapsed.as_secs_f64();
    let ok = pass && secs < limit_s;
    println!(
        "criterion {id:>2} [{}] {name}: {detail} ({secs:.2}s, limit {limit_s}s)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
    assert!(secs < limit_s, "criterion {id} ({name}) exceeded its runtime limit: {secs:.2}s");
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[test]
fn criterion_01_closed_form_kernel() {
    let start = Instant::now();
    let k = build_kernel(&params(1.0), 1024, None).unwrap();
    let worst = (0..=12u32)
        .map(|t| {
            let oracle = if t % 2 == 0 { 1.0 } else { -1.0 } / factorial(t + 1);
            (k.tap(t as usize).to_f64() - oracle).abs()
        })
        .fold(0.0, f64::max);
    verdict(
        1,
        "closed-form taps (-1)^t/(t+1)!",
        worst <= 1e-10,
        &format!("max deviation {worst:.3e} (tol 1e-10)"),
        start.elapsed(),
        1.0,
    );
}

#[test]
fn criterion_02_causality() {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut pass = true;
    for g in SWEEP {
        let k = build_kernel(&params(g), 1 << 16, None).unwrap();
        let ratio = k.causality_defect() / k.max_abs();
        pass &= ratio <= 1e-9;
        detail.push(format!("gamma {g}: {ratio:.2e}"));
    }
    verdict(
        2,
        "causality defect / max|k| <= 1e-9",
        pass,
        &detail.join(", "),
        start.elapsed(),
        10.0,
    );
}

#[test]
fn criterion_03_dc_oracle() {
    let start = Instant::now();
    let constant = SpectrumSpec::Sinusoids {
        components: vec![Sinusoid::new(0.0, 1.0, 0.0)],
    };
    let report = gamma_sweep(&constant, &SWEEP, &params(1.0), &SweepConfig::default()).unwrap();
    let mut worst = 0.0f64;
    for r in &report.rows {
        let oracle = (-r.gamma / (1.0 + r.alpha)).exp();
        worst = worst.max((r.error_linf.unwrap() - oracle).abs());
    }
    // independent oracle values for the closed form
    let pinned = [0.367_879_441_171_442_3, 0.414_602_610_483_950_9, 0.344_153_786_865_412_4, 0.274_907_029_217_262_5];
    for (r, p) in report.rows.iter().zip(pinned) {
        worst = worst.max((r.error_linf.unwrap() - p).abs());
    }
    verdict(
        3,
        "constant-signal error = exp(-gamma/(1+alpha))",
        worst <= 1e-8,
        &format!("max deviation {worst:.3e} (tol 1e-8)"),
        start.elapsed(),
        5.0,
    );
}

#[test]
fn criterion_04_per_frequency_oracle() {
    let start = Instant::now();
    // exp(-γ(cos ω₀ + α)/|e^{iω₀} + α|²), computed in high precision
    let pinned = [
        (1.0, 0.5, 0.415_786_836_673_858_35),
        (1.0, 1.0, 0.582_572_110_783_308_5),
        (1.0, 2.0, 1.516_108_472_660_201_7),
        (2.0, 0.5, 0.345_859_520_401_168),
        (2.0, 1.0, 0.352_022_937_804_566_6),
        (2.0, 2.0, 0.412_859_168_363_658_3),
    ];
    let mut pass = true;
    let mut worst = 0.0f64;
    for (gamma, omega, oracle) in pinned {
        let p = params(gamma);
        let formula = log_abs_error_gain(omega, gamma, p.alpha()).exp();
        let k = build_kernel(&p, 1 << 16, None).unwrap();
        let x = gen_sinusoids(&[Sinusoid::new(omega, 1.0, 0.0)], 0, 8191).unwrap();
        let run = predict(&x, &k, k.truncation()).unwrap();
        let measured = prediction_error(&run, ErrorNorm::Linf).unwrap();
        let tol = 1e-6 + x.max_abs() * k.tail_bound();
        let dev = (measured - oracle).abs();
        pass &= dev <= tol && (formula - oracle).abs() <= 1e-14;
        worst = worst.max(dev);
    }
    verdict(
        4,
        "sinusoid error = |V(e^{iw0}) - 1|",
        pass,
        &format!("max deviation {worst:.3e} (tol 1e-6 + tail)"),
        start.elapsed(),
        10.0,
    );
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

#[test]
fn criterion_05_convergence_in_gamma() {
    let start = Instant::now();
    let config = SweepConfig::default();
    let bandlimited = SpectrumSpec::BandLimitedNoise {
        omega1: 2.0,
        components: 16,
        seed: 42,
    };
    let energy = SpectrumSpec::EnergyDecay {
        c: 2.0,
        q: 2.0,
        seed: 1,
        center: None,
    };
    let errors = |spec: &SpectrumSpec| -> Vec<f64> {
        gamma_sweep(spec, &SWEEP, &params(1.0), &config)
            .unwrap()
            .rows
            .iter()
            .map(|r| r.error_linf.unwrap())
            .collect()
    };
    let (bl, ed) = (errors(&bandlimited), errors(&energy));
    let fmt = |v: &[f64]| v.iter().map(|e| format!("{e:.4e}")).collect::<Vec<_>>().join(" > ");
    verdict(
        5,
        "linf error strictly decreasing in gamma",
        strictly_decreasing(&bl) && strictly_decreasing(&ed),
        &format!("band-limited {}; energy-decay {}", fmt(&bl), fmt(&ed)),
        start.elapsed(),
        30.0,
    );
}

#[test]
fn criterion_06_error_gain_bounded_on_d_plus() {
    let start = Instant::now();
    let grid = FrequencyGrid::new(4096).unwrap();
    let mut worst = 0.0f64;
    for g in SWEEP {
        let p = params(g);
        let split = region_split(p.alpha()).unwrap();
        for w in grid.nodes().filter(|w| split.in_d_plus(*w)) {
            worst = worst.max(log_abs_error_gain(w, g, p.alpha()).exp());
        }
    }
    verdict(
        6,
        "|V - 1| <= 1 on D+(alpha)",
        worst <= 1.0 + 1e-12,
        &format!("max |V - 1| = {worst:.15}"),
        start.elapsed(),
        1.0,
    );
}

#[test]
fn criterion_07_d_region_integral() {
    let start = Instant::now();
    let grid = FrequencyGrid::new(8192).unwrap();
    let w = WeightParams::new(2.0, 2.0).unwrap();
    // 0.8, 0.85, ..., 4.0; exact at the sweep points
    let scan_gammas: Vec<f64> = (16..=80).map(|i| f64::from(i) / 20.0).collect();
    let scan = detect_gamma0(&params(1.0), w, &[1, 2], &scan_gammas, &grid);
    let gamma0 = scan.gamma0;
    let pass = match gamma0 {
        Some(g0) => scan
            .rows
            .iter()
            .filter(|r| r.gamma >= g0)
            .all(|r| r.integral <= r.bound * (1.0 + D_REGION_SLACK)),
        None => false,
    };
    let at_sweep: Vec<String> = scan
        .rows
        .iter()
        .filter(|r| SWEEP.contains(&r.gamma))
        .map(|r| format!("g{} r{} {:.3e}<={:.4}", r.gamma, r.rho, r.integral, r.bound))
        .collect();
    verdict(
        7,
        "integral over D(alpha) <= 2 arccos(alpha) from gamma0 on",
        pass && gamma0.is_some_and(|g| g <= 1.0),
        &format!("detected gamma0 = {gamma0:?}; {}", at_sweep.join(", ")),
        start.elapsed(),
        5.0,
    );
}

#[test]
fn criterion_08_psi_monotone() {
    let start = Instant::now();
    let grid = FrequencyGrid::new(8192).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for rho in [1, 2] {
        let values: Vec<f64> = SWEEP.iter().map(|&g| psi(&params(g), rho, &grid)).collect();
        pass &= strictly_decreasing(&values);
        detail.push(format!(
            "rho {rho}: {}",
            values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
        ));
    }
    verdict(
        8,
        "psi(gamma) decreasing across the sweep",
        pass,
        &detail.join("; "),
        start.elapsed(),
        5.0,
    );
}

#[test]
fn criterion_09_noise_robustness_bound() {
    let start = Instant::now();
    let clean = SpectrumSpec::BandLimitedNoise {
        omega1: 2.0,
        components: 16,
        seed: 42,
    };
    let report = robustness_sweep(
        &clean,
        &[0.0, 0.01, 0.05, 0.1],
        &[1.0, 2.0],
        &params(1.0),
        &SweepConfig::default(),
        &NoiseSettings::default(),
    )
    .unwrap();
    let violations = report.rows.iter().filter(|r| r.bound_violated).count();
    let dominated = report
        .rows
        .iter()
        .all(|r| r.error_noisy <= r.bound + 1e-6 * r.bound);
    let zero_rows_exact = report
        .rows
        .iter()
        .filter(|r| r.nu == 0.0)
        .all(|r| r.added_error == 0.0 && r.error_noisy == r.epsilon_clean);
    let worst = report
        .rows
        .iter()
        .filter(|r| r.nu > 0.0)
        .map(|r| (r.error_noisy - r.epsilon_clean) / (r.bound - r.epsilon_clean))
        .fold(f64::NEG_INFINITY, f64::max);
    verdict(
        9,
        "noisy error <= eps + nu(kappa+1)",
        violations == 0 && dominated && zero_rows_exact && report.rows.len() == 8,
        &format!("{} rows, {violations} violations, worst added/allowed {worst:.3e}, nu=0 rows exact: {zero_rows_exact}", report.rows.len()),
        start.elapsed(),
        30.0,
    );
}

#[test]
fn criterion_10_truncation() {
    let start = Instant::now();
    let signal = SpectrumSpec::BandLimitedNoise {
        omega1: 2.0,
        components: 16,
        seed: 42,
    };
    let mut pass = true;
    let mut detail = Vec::new();
    for gamma in [1.0, 2.0] {
        let report = truncation_study(&signal, gamma, &[4, 8, 16, 32], &params(1.0), &SweepConfig::default()).unwrap();
        for r in &report.rows {
            pass &= r.excess <= r.excess_bound + 1e-9;
        }
        let slack = report
            .rows
            .iter()
            .map(|r| r.excess_bound + 1e-9 - r.excess)
            .fold(f64::INFINITY, f64::min);
        detail.push(format!("gamma {gamma}: T={} min slack {slack:.3e}", report.truncation));
    }
    verdict(
        10,
        "error(M) - error(T) <= |x|_inf tail_l1(M)",
        pass,
        &detail.join("; "),
        start.elapsed(),
        10.0,
    );
}

#[test]
fn criterion_11_dc_and_energy_identities() {
    let start = Instant::now();
    let grid = FrequencyGrid::new(8192).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for g in SWEEP {
        let p = params(g);
        let k = build_kernel(&p, 1 << 16, None).unwrap();
        let k1 = 1.0 - (-g / (1.0 + p.alpha())).exp();
        let dc = (k.dc_sum().to_f64() - k1).abs();
        let energy = (k.energy() / spectral_energy(&p, &grid) - 1.0).abs();
        pass &= dc <= 1e-10 + k.tail_bound() && energy <= 1e-6;
        detail.push(format!("gamma {g}: dc {dc:.1e} energy {energy:.1e}"));
    }
    verdict(
        11,
        "sum k = K(1), energy match",
        pass,
        &detail.join(", "),
        start.elapsed(),
        5.0,
    );
}

fn run_cli(args: &[&str]) -> i32 {
    let mut full = vec!["decay-predict"];
    full.extend_from_slice(args);
    run_with_args(full, &mut Vec::new(), &mut Vec::new())
}

#[test]
fn criterion_12_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("experiment.toml");
    std::fs::write(
        &config,
        "[predictor]\ngamma = 2.0\ngamma_list = [1.0, 1.5, 2.0, 2.5]\n\n[signal]\nkind = \"band_limited_noise\"\nseed = 42\n\n[run]\nnus = [0.0, 0.05]\nmemories = [4, 8, 16, 32]\n\n[output]\nformats = [\"csv\"]\n",
    )
    .unwrap();
    let mut pass = true;
    let mut compared = 0;
    for command in ["sweep", "robust", "truncate"] {
        let mut outputs = Vec::new();
        for run in ["a", "b"] {
            let out = dir.path().join(run);
            let code = run_cli(&[command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
            pass &= code == 0;
            outputs.push(std::fs::read_to_string(out.join(format!("{command}.csv"))).unwrap_or_default());
        }
        let (a, b) = (csv_numeric_lines(&outputs[0]), csv_numeric_lines(&outputs[1]));
        pass &= !a.is_empty() && a == b;
        compared += a.len();
    }
    verdict(
        12,
        "byte-identical CSV numeric columns on rerun",
        pass,
        &format!("{compared} lines compared across sweep, robust, truncate"),
        start.elapsed(),
        60.0,
    );
}
