//! Independent reference formulas and instance generators shared by the
//! integration tests. Nothing here calls into the solvers under test.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vlcrf::geometry::Vec3;
use vlcrf::Scenario;

/// Light harvest `f I_G V0 ln(1 + I_G / I_D)` with `I_G = 3 R N V B Σh`.
pub fn light_harvest(bias: f64, gain_sum: f64, s: &Scenario, device: usize) -> f64 {
    let tx = &s.transmitters[0];
    let r = s.devices[device].detector.responsivity;
    let ig = 3.0 * r * tx.n_led as f64 * tx.v_led * bias * gain_sum;
    s.vlc_eh.fill_factor * ig * s.vlc_eh.thermal_voltage * (1.0 + ig / s.vlc_eh.dark_current).ln()
}

/// `(N V R h A)^2 / σ²`.
pub fn snr(h: f64, swing: f64, s: &Scenario, device: usize) -> f64 {
    let tx = &s.transmitters[0];
    let r = s.devices[device].detector.responsivity;
    (tx.n_led as f64 * tx.v_led * r * h * swing).powi(2) / s.noise.noise_power
}

/// Per-device serving gain (largest single-element gain) and gain sum.
pub fn gains(s: &Scenario) -> Vec<(f64, f64)> {
    let m = s.vlc_matrix().unwrap();
    (0..s.devices.len())
        .map(|j| {
            let mut best = 0.0f64;
            let mut sum = 0.0;
            for (_, _, jj, h) in m.entries() {
                if jj == j {
                    best = best.max(h);
                    sum += h;
                }
            }
            (best, sum)
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The bundled scenario with `count` devices scattered on the receiver plane,
/// each at least 0.3 m from the walls.
pub fn scattered_scenario(seed: u64, count: usize) -> Scenario {
    let mut r = rng(seed);
    let mut s = Scenario::paper_default();
    let template = s.devices[0];
    let h = s.room.receiver_height;
    s.devices = (0..count)
        .map(|_| {
            let mut d = template;
            d.position = Vec3::new(r.random_range(0.3..4.7), r.random_range(0.3..4.7), h);
            d
        })
        .collect();
    s.seed = seed;
    s
}

pub fn complex_vec(r: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// `min p1 + p2` s.t. `a_j1 p1 + a_j2 p2 >= t_j`, `p >= 0`, for two
/// variables, by vertex enumeration. `None` when infeasible.
pub fn lp2(rows: &[[f64; 2]], targets: &[f64]) -> Option<f64> {
    let feasible = |p: [f64; 2]| {
        p[0] >= -1e-15
            && p[1] >= -1e-15
            && rows.iter().zip(targets).all(|(a, t)| a[0] * p[0] + a[1] * p[1] >= t * (1.0 - 1e-12))
    };
    let mut candidates = vec![[0.0, 0.0]];
    for (a, t) in rows.iter().zip(targets) {
        if a[0] > 0.0 {
            candidates.push([t / a[0], 0.0]);
        }
        if a[1] > 0.0 {
            candidates.push([0.0, t / a[1]]);
        }
    }
    for i in 0..rows.len() {
        for k in i + 1..rows.len() {
            let (a, b) = (rows[i], rows[k]);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() > 1e-300 {
                let p0 = (targets[i] * b[1] - a[1] * targets[k]) / det;
                let p1 = (a[0] * targets[k] - targets[i] * b[0]) / det;
                candidates.push([p0, p1]);
            }
        }
    }
    candidates.into_iter().filter(|p| feasible(*p)).map(|p| p[0] + p[1]).reduce(f64::min)
}

/// Brute force over rank-≤2 covariances `p1 u1 u1ᴴ + p2 u2 u2ᴴ` on a
/// 2-antenna array: the orthonormal basis is parameterized by an angle
/// and a phase, the powers by an LP. Grid search followed by local
/// pattern refinement.
pub fn brute_force_two_antenna(channels: &[Vec<Complex64>], targets: &[f64]) -> f64 {
    let cost = |alpha: f64, phi: f64| -> f64 {
        let e = Complex64::from_polar(1.0, phi);
        let u1 = [Complex64::new(alpha.cos(), 0.0), e * alpha.sin()];
        let u2 = [Complex64::new(-alpha.sin(), 0.0), e * alpha.cos()];
        let rows: Vec<[f64; 2]> =
            channels.iter().map(|g| [inner(g, &u1).norm_sqr(), inner(g, &u2).norm_sqr()]).collect();
        lp2(&rows, targets).unwrap_or(f64::INFINITY)
    };
    let (na, np) = (200, 400);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for ia in 0..=na {
        let alpha = std::f64::consts::FRAC_PI_2 * ia as f64 / na as f64;
        for ip in 0..np {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / np as f64;
            let c = cost(alpha, phi);
            if c < best.0 {
                best = (c, alpha, phi);
            }
        }
    }
    // Pattern search over 64 directions; the LP makes the cost kinked, so
    // axis-only moves can stall on a ridge.
    let mut step = std::f64::consts::PI / na as f64;
    while step > 1e-13 {
        let mut improved = false;
        for k in 0..64 {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            let (alpha, phi) = (best.1 + step * a.cos(), best.2 + 2.0 * step * a.sin());
            let c = cost(alpha, phi);
            if c < best.0 {
                best = (c, alpha, phi);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best.0
}
