//! Principal branch of the Lambert W function on the real line.

use std::f64::consts::E;

use crate::error::{domain, Result};

const BRANCH_POINT: f64 = -1.0 / E;
const MAX_ITER: usize = 64;

/// `W0(x)`: the solution `w >= -1` of `w e^w = x`, for `x >= -1/e`.
///
/// Starts from a branch-point series, a log-based guess or the asymptotic
/// expansion depending on `x`, then polishes with Halley steps.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT {
        return domain(format!("Lambert W0 is undefined below -1/e, got {x}"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series in p = sqrt(2 (e x + 1)) around the branch point.
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Newton on `w e^w - x`, bracketed, used only as a reference.
    fn newton_reference(x: f64) -> f64 {
        let mut w = if x > 1.0 { x.ln() } else { 0.0 };
        for _ in 0..200 {
            let ew = w.exp();
            w -= (w * ew - x) / (ew * (w + 1.0));
        }
        w
    }

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() <= 1e-14);
        assert_eq!(lambert_w0(-1.0 / E).unwrap(), -1.0);
        assert_relative_eq!(lambert_w0(1.0).unwrap(), 0.567_143_290_409_783_8, max_relative = 1e-15);
    }

    #[test]
    fn matches_newton_reference() {
        for &x in &[1e-8, 0.3, 1.0, 2.5, 7.0, 123.0, 1e5, 4e7] {
            assert_relative_eq!(lambert_w0(x).unwrap(), newton_reference(x), max_relative = 1e-13);
        }
    }

    #[test]
    fn residual_log_spaced() {
        for k in 0..=1200 {
            let x = 10f64.powf(-6.0 + 12.0 * k as f64 / 1200.0);
            let w = lambert_w0(x).unwrap();
            assert!((w * w.exp() - x).abs() <= 1e-12 * x.max(1.0), "x={x}");
        }
    }

    #[test]
    fn negative_branch_region() {
        for k in 1..200 {
            let x = -1.0 / E + k as f64 * (1.0 / E) / 200.0;
            let w = lambert_w0(x).unwrap();
            assert!(w >= -1.0);
            assert!((w * w.exp() - x).abs() <= 1e-12, "x={x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w0(-0.5).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }
}
