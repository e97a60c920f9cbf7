//! Estimates the weighted-decay class of generated signals from samples and
//! compares with the analytic value where one is known.

use decay_predict::signals::{class_diagnostic, class_diagnostic_spectrum, SpectrumSpec};
use decay_predict::spectral_core::{FrequencyGrid, WeightParams};

fn main() -> decay_predict::Result<()> {
    let grid = FrequencyGrid::new(4096)?;
    let w = WeightParams::new(2.0, 2.0)?;
    let signals = [
        ("energy decay c=2", SpectrumSpec::EnergyDecay { c: 2.0, q: 2.0, seed: 3, center: None }),
        ("energy decay c=1", SpectrumSpec::EnergyDecay { c: 1.0, q: 2.0, seed: 3, center: None }),
        ("band-limited 1.0", SpectrumSpec::BandLimitedNoise { omega1: 1.0, components: 8, seed: 5 }),
        ("band-limited 3.0", SpectrumSpec::BandLimitedNoise { omega1: 3.0, components: 8, seed: 5 }),
    ];
    for (name, spec) in &signals {
        let x = spec.generate(0, 4095)?;
        let estimate = class_diagnostic(&x, w, &grid);
        let analytic = class_diagnostic_spectrum(spec, w, &grid)?;
        match analytic {
            Some(a) => println!("{name:<18} estimate {estimate:.4e} analytic {a:.4e}"),
            None => println!("{name:<18} estimate {estimate:.4e}"),
        }
    }
    Ok(())
}
