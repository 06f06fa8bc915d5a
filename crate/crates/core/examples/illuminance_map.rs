//! Illuminance on the receiver plane at an 8.5 mA bias, rendered as a coarse
//! text map.

use vlcrf::experiments::{DEFAULT_EFFICACY, READING_LUX};
use vlcrf::Scenario;

fn main() -> vlcrf::Result<()> {
    let scenario = Scenario::paper_default();
    let map = scenario.illuminance_map(8.5e-3, DEFAULT_EFFICACY, 0.5)?;
    for row in map.lux.iter().rev() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:>5.0}")).collect();
        println!("{}", line.join(" "));
    }
    println!("center {:.1} lx", scenario.illuminance_at(8.5e-3, DEFAULT_EFFICACY, scenario.room.center()));
    println!("max {:.1} lx", map.max());
    println!("fraction above {READING_LUX} lx: {:.3}", map.fraction_above(READING_LUX));
    Ok(())
}
