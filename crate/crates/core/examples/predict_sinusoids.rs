//! Predicts a sum of sinusoids one step ahead and compares the measured
//! error with the per-frequency gain of the transfer function.

use decay_predict::kernel::build_kernel;
use decay_predict::predictor::{predict, predict_spectral, prediction_error, ErrorNorm};
use decay_predict::signals::{gen_sinusoids, Sinusoid};
use decay_predict::spectral_core::PredictorParams;

fn main() -> decay_predict::Result<()> {
    let p = PredictorParams::power_law(2.0, 2.0, 1.5)?;
    let k = build_kernel(&p, 1 << 16, None)?;

    for omega in [0.0, 0.25, 0.5, 1.0, 2.0, 3.0] {
        let x = gen_sinusoids(&[Sinusoid::new(omega, 1.0, 0.0)], 0, 8191)?;
        let run = predict(&x, &k, k.truncation())?;
        let measured = prediction_error(&run, ErrorNorm::Linf)?;
        let gain = predict_spectral(&[Sinusoid::new(omega, 1.0, 0.0)], &p)?[0].error_gain.norm();
        println!("omega {omega:4.2}: measured {measured:.6}  |V-1| {gain:.6}");
    }

    let mix = [
        Sinusoid::new(0.1, 0.5, 0.0),
        Sinusoid::new(0.7, 0.3, 1.0),
        Sinusoid::new(1.3, 0.2, 2.0),
    ];
    let x = gen_sinusoids(&mix, 0, 8191)?;
    let run = predict(&x, &k, k.truncation())?;
    println!(
        "mixture: linf {:.6}, rms {:.6}",
        prediction_error(&run, ErrorNorm::Linf)?,
        prediction_error(&run, ErrorNorm::Rms)?
    );
    for (t, target, guess) in run.triples().take(3) {
        println!("  t={t}: x(t+1) = {target:+.6}, predicted {guess:+.6}");
    }
    Ok(())
}
