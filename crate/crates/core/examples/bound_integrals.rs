//! Integral inequalities behind the error bound: the D(alpha) integral
//! against 2 arccos(alpha), the gamma threshold past which it holds, and the
//! split of the spectral error of an energy-decay signal.

use decay_predict::analysis::{detect_gamma0, spectral_error_decomposition};
use decay_predict::kernel::psi;
use decay_predict::signals::EnergyDecaySignal;
use decay_predict::spectral_core::{FrequencyGrid, PredictorParams, WeightParams};

fn main() -> decay_predict::Result<()> {
    let grid = FrequencyGrid::new(8192)?;
    let w = WeightParams::new(2.0, 2.0)?;
    let base = PredictorParams::power_law(1.0, 2.0, 1.5)?;

    let gammas: Vec<f64> = (14..=60).map(|i| f64::from(i) / 20.0).collect();
    let scan = detect_gamma0(&base, w, &[1, 2], &gammas, &grid);
    println!("gamma0 = {:?}", scan.gamma0);
    for r in scan.rows.iter().filter(|r| r.gamma.fract() == 0.0 || r.gamma == 0.8) {
        println!(
            "  gamma {:>4} rho {}: {:.4e} <= {:.4} {}",
            r.gamma, r.rho, r.integral, r.bound, r.holds
        );
    }

    let signal = EnergyDecaySignal::new(2.0, 2.0, 11, 0)?;
    println!("\nspectral split for an energy-decay signal:");
    for gamma in [1.0, 1.5, 2.0, 2.5] {
        let p = base.with_gamma(gamma)?;
        let d = spectral_error_decomposition(&signal, &p, w, 2, &grid)?;
        println!(
            "  gamma {gamma}: I1 {:.3e} <= {:.3e}, I2 {:.3e} <= {:.3e}, psi(2) {:.4}",
            d.i1,
            d.i1_bound,
            d.i2,
            d.i2_bound,
            psi(&p, 2, &grid)
        );
    }
    Ok(())
}
