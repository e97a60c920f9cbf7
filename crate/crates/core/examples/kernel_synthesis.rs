//! Builds predictor kernels for a few values of gamma and prints their
//! diagnostics, then saves one to JSON and reads it back.

use decay_predict::kernel::{build_kernel, kappa, psi, PredictorKernel};
use decay_predict::spectral_core::{FrequencyGrid, PredictorParams};

fn main() -> decay_predict::Result<()> {
    let grid = FrequencyGrid::new(8192)?;
    println!("{:>5} {:>10} {:>6} {:>10} {:>10} {:>10} {:>10}", "gamma", "alpha", "T", "kappa", "psi(1)", "causal", "tail");
    for gamma in [1.0, 1.5, 2.0, 2.5] {
        let p = PredictorParams::power_law(gamma, 2.0, 1.5)?;
        let k = build_kernel(&p, 1 << 16, None)?;
        println!(
            "{gamma:>5} {:>10.6} {:>6} {:>10.4} {:>10.4} {:>10.2e} {:>10.2e}",
            p.alpha(),
            k.truncation(),
            kappa(&p, &grid),
            psi(&p, 1, &grid),
            k.causality_defect(),
            k.tail_bound()
        );
    }

    // gamma = 1, alpha = 0 has taps (-1)^t / (t+1)!
    let p = PredictorParams::power_law(1.0, 2.0, 1.5)?;
    let k = build_kernel(&p, 1024, None)?;
    println!("\nfirst taps at gamma = 1:");
    for t in 0..6 {
        println!("  k[{t}] = {:+.16e}", k.tap(t).to_f64());
    }

    let path = std::env::temp_dir().join("decay_predict_example.kernel.json");
    k.write_json(&path)?;
    let back = PredictorKernel::read_json(&path)?;
    assert_eq!(back.coeffs(), k.coeffs());
    println!("round-tripped {} taps through {}", back.coeffs().len(), path.display());
    Ok(())
}
