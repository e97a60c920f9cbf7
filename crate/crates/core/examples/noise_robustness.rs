//! Adds spectrally L1-bounded noise to a clean signal and checks the growth
//! of the prediction error against eps + nu (kappa + 1).

use decay_predict::analysis::{robustness_sweep, NoiseSettings, SweepConfig};
use decay_predict::signals::SpectrumSpec;
use decay_predict::spectral_core::PredictorParams;

fn main() -> decay_predict::Result<()> {
    let clean = SpectrumSpec::BandLimitedNoise {
        omega1: 1.5,
        components: 16,
        seed: 7,
    };
    let config = SweepConfig {
        window: 4096,
        ..SweepConfig::default()
    };
    let base = PredictorParams::power_law(1.0, 2.0, 1.5)?;
    let report = robustness_sweep(
        &clean,
        &[0.0, 0.01, 0.05, 0.1, 0.5],
        &[1.0, 2.0],
        &base,
        &config,
        &NoiseSettings::default(),
    )?;
    println!("{:>5} {:>5} {:>10} {:>10} {:>10} {:>10}", "gamma", "nu", "eps", "noisy", "bound", "kappa");
    for r in &report.rows {
        println!(
            "{:>5} {:>5} {:>10.4e} {:>10.4e} {:>10.4e} {:>10.4}{}",
            r.gamma,
            r.nu,
            r.epsilon_clean,
            r.error_noisy,
            r.bound,
            r.kappa,
            if r.bound_violated { "  VIOLATED" } else { "" }
        );
    }
    Ok(())
}
