//! Romberg integration: composite trapezoid on dyadic refinement with
//! Richardson extrapolation.

/// Relative stopping tolerance used by the library's integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
const MAX_LEVELS: usize = 22;

pub fn romberg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, initial_panels: usize, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = initial_panels.max(1);
    let mut h = (b - a) / panels as f64;
    let mut trap = 0.5 * (f(a) + f(b));
    for i in 1..panels {
        trap += f(a + i as f64 * h);
    }
    trap *= h;
    if !trap.is_finite() {
        return trap;
    }

    let mut prev_row = vec![trap];
    let mut n = panels;
    for _ in 1..MAX_LEVELS {
        // Add midpoints of the current panels.
        let mut mid = 0.0;
        for i in 0..n {
            mid += f(a + (i as f64 + 0.5) * h);
        }
        let trap_next = 0.5 * prev_row[0] + 0.5 * h * mid;
        h *= 0.5;
        n *= 2;

        let mut row = Vec::with_capacity(prev_row.len() + 1);
        row.push(trap_next);
        let mut factor = 4.0;
        for (j, prev) in prev_row.iter().enumerate() {
            let r = row[j] + (row[j] - prev) / (factor - 1.0);
            row.push(r);
            factor *= 4.0;
        }
        let best = *row.last().unwrap();
        let prev_best = *prev_row.last().unwrap();
        if !best.is_finite() {
            return best;
        }
        let diff = (best - prev_best).abs();
        if diff <= rel_tol * best.abs() || diff < f64::MIN_POSITIVE {
            return best;
        }
        prev_row = row;
    }
    *prev_row.last().unwrap()
}
