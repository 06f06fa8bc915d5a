//! LOS gains of the bundled office scenario: serving element, serving gain
//! and gain sum of every device, plus a single hand-built link.

use vlcrf::channel::{assign_serving_elements, vlc_channel_gain};
use vlcrf::geometry::{Device, OpticalElement, Photodetector, Vec3};
use vlcrf::Scenario;

fn main() -> vlcrf::Result<()> {
    let detector = Photodetector {
        area: 85e-4,
        responsivity: 0.4,
        fov: 60f64.to_radians(),
        refractive_index: 1.5,
        filter_gain: 1.0,
    };
    let element = OpticalElement::new(Vec3::DOWN, 17f64.to_radians())?;
    let device = Device { position: Vec3::new(0.5, 0.0, 1.0), detector };
    println!("lambertian order m = {:.4}", element.lambert_mode);
    println!("single link gain   = {:.6e}", vlc_channel_gain(&element, Vec3::new(0.0, 0.0, 3.0), &device)?);

    let scenario = Scenario::paper_default();
    let matrix = scenario.vlc_matrix()?;
    let serving = assign_serving_elements(&matrix)?;
    println!("\ndevice  tx  elem  serving_gain   gain_sum");
    for (j, pair) in serving.iter().enumerate() {
        println!(
            "{j:>6}  {:>2}  {:>4}  {:.6e}  {:.6e}",
            pair.transmitter,
            pair.element,
            matrix.at(*pair, j),
            matrix.gain_sum(j)
        );
    }
    Ok(())
}
