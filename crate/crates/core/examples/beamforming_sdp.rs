//! Minimum-power energy beamforming: aggregate SDP, beam recovery and an
//! independent feasibility check of the recovered beams.

use vlcrf::beamforming::{build_eh_targets, solve_beamforming, verify_beamforming, BeamformingOptions};
use vlcrf::Scenario;

fn main() -> vlcrf::Result<()> {
    let scenario = Scenario::paper_default();
    let channels = scenario.rf_channels(scenario.seed).g;
    let rf_targets = vec![2e-3, 0.0, 3e-3, 5e-3, 1e-3];
    let targets = build_eh_targets(&rf_targets, &scenario.nonlinear_eh)?;
    let sol = solve_beamforming(&channels, &targets, &BeamformingOptions::default())?;
    println!("total power {:.6e} W ({:.3} dBm)", sol.total_power, sol.total_power_dbm());
    println!("beams {}, lambda2/lambda1 {:.2e}", sol.beams.len(), sol.rank_one_ratio);
    println!("iterations {}, relative gap {:.2e}", sol.iterations, sol.relative_gap);

    let report = verify_beamforming(&sol.beams, &channels, &targets, Some(&sol.duals))?;
    for u in &report.users {
        println!("{u:?}");
    }
    println!("feasible {}, complementary slackness {}", report.feasible, report.slackness_ok);
    Ok(())
}
