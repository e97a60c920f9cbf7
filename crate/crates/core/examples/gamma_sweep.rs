//! Error and bound terms across gamma for a band-limited signal, written as
//! CSV and JSON reports.

use decay_predict::analysis::{gamma_sweep, write_report, ReportFormat, SweepConfig};
use decay_predict::signals::SpectrumSpec;
use decay_predict::spectral_core::PredictorParams;

fn main() -> decay_predict::Result<()> {
    let signal = SpectrumSpec::BandLimitedNoise {
        omega1: 2.0,
        components: 16,
        seed: 42,
    };
    let config = SweepConfig::default();
    let base = PredictorParams::power_law(1.0, 2.0, 1.5)?;
    let report = gamma_sweep(&signal, &[1.0, 1.5, 2.0, 2.5, 3.0], &base, &config)?;

    println!("{:>5} {:>6} {:>10} {:>10} {:>10} {:>10}", "gamma", "T", "linf", "I1 term", "I2 term", "bound ok");
    for r in &report.rows {
        println!(
            "{:>5} {:>6} {:>10} {:>10.4e} {:>10.4e} {:>10}",
            r.gamma,
            r.truncation.map(|t| t.to_string()).unwrap_or("-".into()),
            r.error_linf.map(|e| format!("{e:.4e}")).unwrap_or(format!("{:?}", r.status)),
            r.i1_term,
            r.i2_term,
            r.bound_ok.map(|b| b.to_string()).unwrap_or("-".into())
        );
    }

    let dir = std::env::temp_dir().join("decay_predict_sweep");
    for path in write_report(&report, &dir, "sweep", &[ReportFormat::Csv, ReportFormat::Json])? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
