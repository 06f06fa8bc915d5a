//! Mean RF transmit power over seeded channel draws for the nonlinear and
//! linear harvesters, under the optimal and EH-max allocations.

use vlcrf::experiments::exp_rf_power;
use vlcrf::Scenario;

fn main() -> vlcrf::Result<()> {
    let scenario = Scenario::paper_default();
    let result = exp_rf_power(&scenario, 9.5e-3, &[2e-3, 4e-3, 6e-3], 50)?;
    print!("{}", result.render(vlcrf::experiments::Format::Csv));
    Ok(())
}
