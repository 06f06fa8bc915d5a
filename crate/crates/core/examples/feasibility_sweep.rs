//! Feasible θ range for several RF caps, written as CSV to stdout.

use vlcrf::experiments::{default_theta_rf_levels, exp_feasibility_vs_theta};
use vlcrf::Scenario;

fn main() -> vlcrf::Result<()> {
    let scenario = Scenario::paper_default();
    let thetas: Vec<f64> = (0..=30).map(|k| k as f64 * 0.5e-3).collect();
    let result = exp_feasibility_vs_theta(&scenario, &thetas, &default_theta_rf_levels())?;
    print!("{}", result.to_csv());
    for (k, v) in &result.summary {
        eprintln!("{k}: {v:.4e}");
    }
    Ok(())
}
