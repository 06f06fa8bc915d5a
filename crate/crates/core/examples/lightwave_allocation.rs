//! Common bias, swing and RF targets for one threshold pair, solved exactly
//! by bisection and approximately by the Lambert-W closed form.

use vlcrf::lightwave::{solve_op1, BiasMethod, EhThresholds};
use vlcrf::Scenario;

fn main() -> vlcrf::Result<()> {
    let scenario = Scenario::paper_default();
    let matrix = scenario.vlc_matrix()?;
    let thresholds = EhThresholds::new(10e-3, 4e-3)?;
    for method in [BiasMethod::Bisection, BiasMethod::ClosedForm] {
        let sol = solve_op1(&scenario, &matrix, &thresholds, method)?;
        println!("{}:", method.tag());
        println!("  bias {:.9} mA, swing {:.9} mA", sol.bias * 1e3, sol.swing() * 1e3);
        println!("  worst user {}, reference user {}, fallback {}", sol.worst_user, sol.reference_user, sol.fallback_triggered);
        println!("  min SNR {:.6} dB", sol.min_snr_db());
        let targets: Vec<String> = sol.rf_targets.iter().map(|t| format!("{:.4}", t * 1e3)).collect();
        println!("  RF targets (mW): {}", targets.join(", "));
    }
    Ok(())
}
