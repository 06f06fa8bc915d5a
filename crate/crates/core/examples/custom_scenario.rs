//! Loading a scenario from text with unit suffixes, and the notices logged
//! for filled-in defaults.

use vlcrf::scenario::load_scenario_str;

const SMALL_ROOM: &str = r#"
[room]
size = ["4 m", "3 m", "2.8 m"]

[transmitter_defaults]
elements = 5
semiangle = "20 deg"
n_led = 30
v_led = "2.1 V"

[[transmitters]]
position = [2.0, 1.5, 2.8]

[detector]
area = "1 cm2"
responsivity = 0.5
fov = "70 deg"
refractive_index = 1.5

[[devices]]
position = [1.2, 1.0, 0.8]

[[devices]]
transmitter = 0
distance = "2.2 m"

[access_point]
position = [0.5, 0.5, 2.8]
antennas = 4

[bias]
i_low = "1 mA"
i_high = "10 mA"

[vlc_eh]
fill_factor = 0.7
dark_current = "1 nA"

[nonlinear_eh]
max_harvest = "20 mW"
steepness = "0.15 /mW"
turn_on = "10 mW"

[linear_eh]
efficiency = 0.4

[noise]
power = 1e-14

[rf]
rician = "3 dB"
path_loss_exponent = 2.2
"#;

fn main() -> vlcrf::Result<()> {
    let (scenario, notices) = load_scenario_str(SMALL_ROOM)?;
    for n in &notices {
        println!("notice: {n}");
    }
    println!("hash {}", scenario.hash());
    for (j, d) in scenario.devices.iter().enumerate() {
        println!("device {j} at ({:.3}, {:.3}, {:.3})", d.position.x, d.position.y, d.position.z);
    }
    println!("bias range [{}, {}] A", scenario.bias_limits.midpoint(), scenario.bias_limits.i_high);
    Ok(())
}
