//! Worst-case error over random members of a uniformly bounded class, with
//! alpha from the power-law rule and from the uniform rule.

use decay_predict::analysis::{uniform_class_study, SweepConfig};
use decay_predict::spectral_core::{AlphaRule, PredictorParams};

fn main() -> decay_predict::Result<()> {
    let config = SweepConfig::default();
    let gammas = [1.0, 1.5, 2.0, 2.5];
    let rules = [
        ("power law", PredictorParams::power_law(2.0, 2.0, 1.5)?),
        ("uniform c0=2", PredictorParams::new(2.0, 2.0, 1.5, AlphaRule::Uniform { c0: 2.0 })?),
    ];
    for (name, base) in &rules {
        println!("{name}:");
        for r in uniform_class_study(2.0, 2.0, 20, &gammas, base, &config)? {
            println!(
                "  gamma {:>3} alpha {:+.6}: max {:.4e} mean {:.4e} over {} draws",
                r.gamma, r.alpha, r.max_error_linf, r.mean_error_linf, r.draws
            );
        }
    }
    Ok(())
}
