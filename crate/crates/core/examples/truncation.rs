//! Finite-memory predictors: error of the memory-M kernel against the full
//! truncation, with the tail-sum bound on the excess.

use decay_predict::analysis::{truncation_study, SweepConfig};
use decay_predict::signals::SpectrumSpec;
use decay_predict::spectral_core::PredictorParams;

fn main() -> decay_predict::Result<()> {
    let signal = SpectrumSpec::BandLimitedNoise {
        omega1: 2.0,
        components: 16,
        seed: 42,
    };
    let base = PredictorParams::power_law(1.0, 2.0, 1.5)?;
    let report = truncation_study(&signal, 2.0, &[1, 2, 4, 8, 16, 32, 64, 128], &base, &SweepConfig::default())?;
    println!(
        "gamma {} alpha {:.6} T {} error(T) {:.6e} window {:?}",
        report.gamma, report.alpha, report.truncation, report.error_full, report.window
    );
    for r in &report.rows {
        println!(
            "M {:>4}: error {:.6e} excess {:+.3e} <= {:.3e} {}",
            r.memory,
            r.error_linf,
            r.excess,
            r.excess_bound,
            if r.bound_ok { "" } else { "(violated)" }
        );
    }
    Ok(())
}
