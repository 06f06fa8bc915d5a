//! Principal-branch Lambert W across many decades.

use vlcrf::lambert::lambert_w0;

fn main() -> vlcrf::Result<()> {
    println!("{:>10}  {:>22}  {:>9}", "x", "W0(x)", "residual");
    for k in -6..=6 {
        let x = 10f64.powi(k);
        let w = lambert_w0(x)?;
        println!("{x:>10.0e}  {w:>22.16}  {:>9.1e}", (w * w.exp() - x).abs());
    }
    println!("W0(e) = {}", lambert_w0(std::f64::consts::E)?);
    println!("W0(-1/e) = {}", lambert_w0(-1.0 / std::f64::consts::E)?);
    Ok(())
}
