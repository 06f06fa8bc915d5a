//! Harvesting models: light harvest against bias, the sigmoid RF harvester
//! with its inverse, and the ideal linear harvester.

use vlcrf::models::{
    linear_eh, nonlinear_eh, nonlinear_eh_inverse, vlc_harvested_power, LinearEhParams, LinkConstants,
    NonlinearEhParams, VlcEhParams,
};

fn main() -> vlcrf::Result<()> {
    let link = LinkConstants { n_led: 40.0, v_led: 2.25, responsivity: 0.4 };
    let vlc = VlcEhParams { fill_factor: 0.75, thermal_voltage: 0.025, dark_current: 1e-9 };
    println!("bias_mA  eh_vlc_mW  (gain sum 0.03)");
    for b in [7.0, 8.0, 9.0, 10.0, 11.0, 12.0] {
        println!("{b:>7.1}  {:.4}", vlc_harvested_power(b * 1e-3, 0.03, &link, &vlc) * 1e3);
    }

    let nl = NonlinearEhParams { max_harvest: 24e-3, steepness: 150.0, turn_on: 14e-3 };
    let lin = LinearEhParams { efficiency: 0.5 };
    println!("\ntarget_mW  input_nonlinear_mW  input_linear_mW  round_trip_err");
    for t in [1.0, 2.0, 4.0, 6.0, 12.0, 20.0] {
        let target = t * 1e-3;
        let input = nonlinear_eh_inverse(target, &nl)?;
        let err = (nonlinear_eh(input, &nl) - target).abs();
        println!("{t:>9.1}  {:>18.4}  {:>15.4}  {err:.1e}", input * 1e3, target / lin.efficiency * 1e3);
    }
    println!("\nlinear harvest of 10 mW input: {:.1} mW", linear_eh(10e-3, &lin) * 1e3);
    Ok(())
}
