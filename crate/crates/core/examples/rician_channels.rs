//! Seeded Rician RF channels: the same seed reproduces the draw, and the
//! average channel power follows the path loss.

use vlcrf::Scenario;

fn main() {
    let scenario = Scenario::paper_default();
    let a = scenario.rf_channels(7);
    let b = scenario.rf_channels(7);
    assert_eq!(a, b);
    println!("rician factor (linear) = {:.4}", a.rician_factor);

    let trials = 2000;
    for (j, dev) in scenario.devices.iter().enumerate() {
        let distance = scenario.ap.position.distance(dev.position);
        let expected = scenario.rf.path_loss(distance) * scenario.ap.antennas as f64;
        let mean: f64 = (0..trials)
            .map(|seed| scenario.rf_channels(seed).g[j].iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / trials as f64;
        println!("device {j}: d = {distance:.3} m, E|g|^2 = {mean:.4e} (expected {expected:.4e})");
    }
}
