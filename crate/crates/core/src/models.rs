//! Link and energy models: VLC SNR, solar-cell light harvesting, RF input
//! energy, the sigmoid and linear RF harvesters, and illuminance.
//!
//! Everything is in SI units (A, V, W, m). Harvested "energy" follows the
//! usual convention of energy per unit time, i.e. watts.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Admissible LED drive currents `[I_L, I_H]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasLimits {
    pub i_low: f64,
    pub i_high: f64,
}

impl BiasLimits {
    pub fn new(i_low: f64, i_high: f64) -> Result<Self> {
        let l = Self { i_low, i_high };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.i_low > 0.0 && self.i_low < self.i_high && self.i_high.is_finite()) {
            return Err(Error::Validation(format!(
                "bias limits need 0 < i_low < i_high, got [{}, {}]",
                self.i_low, self.i_high
            )));
        }
        Ok(())
    }

    /// `(I_L + I_H) / 2`, the smallest bias at which the swing can reach its maximum.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.i_low + self.i_high)
    }

    /// `(I_H - I_L) / 2`, the largest clipping-free AC swing.
    pub fn max_swing(&self) -> f64 {
        0.5 * (self.i_high - self.i_low)
    }

    /// Largest swing that keeps `B +- A` inside the limits.
    pub fn swing_for(&self, bias: f64) -> f64 {
        (bias - self.i_low).min(self.i_high - bias).max(0.0)
    }
}

/// Solar-cell parameters of the light harvester.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VlcEhParams {
    pub fill_factor: f64,
    pub thermal_voltage: f64,
    pub dark_current: f64,
}

impl VlcEhParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fill_factor > 0.0 && self.fill_factor <= 1.0) {
            return Err(Error::Validation("fill factor must lie in (0, 1]".into()));
        }
        if !(self.thermal_voltage > 0.0) {
            return Err(Error::Validation("thermal voltage must be positive".into()));
        }
        if !(self.dark_current > 0.0) {
            return Err(Error::Validation("dark current must be positive".into()));
        }
        Ok(())
    }
}

/// Sigmoid RF harvester: saturation level, steepness and turn-on point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearEhParams {
    /// Saturation power `M`, W.
    pub max_harvest: f64,
    /// Steepness `a`, 1/W.
    pub steepness: f64,
    /// Turn-on input `b`, W.
    pub turn_on: f64,
}

impl NonlinearEhParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_harvest > 0.0 && self.steepness > 0.0 && self.turn_on > 0.0) {
            return Err(Error::Validation("nonlinear harvester parameters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearEhParams {
    pub efficiency: f64,
}

impl LinearEhParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::Validation("linear harvester efficiency must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub noise_power: f64,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_power > 0.0) {
            return Err(Error::Validation("noise power must be positive".into()));
        }
        Ok(())
    }
}

/// LED and detector constants of one optical link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConstants {
    pub n_led: f64,
    pub v_led: f64,
    pub responsivity: f64,
}

impl LinkConstants {
    /// `nu * N_LED * V_LED`.
    fn scale(&self) -> f64 {
        self.responsivity * self.n_led * self.v_led
    }
}

/// Electrical SNR of the data-carrying color, `(nu N V h A)^2 / sigma^2`.
pub fn vlc_snr(h: f64, ac_swing: f64, n_led: f64, v_led: f64, responsivity: f64, noise: &NoiseParams) -> f64 {
    let amp = responsivity * n_led * v_led * h * ac_swing;
    amp * amp / noise.noise_power
}

/// Light-generated photocurrent. All three colors carry the same bias.
pub fn generated_current(bias: f64, gain_sum: f64, n_led: f64, v_led: f64, responsivity: f64) -> f64 {
    3.0 * responsivity * n_led * v_led * bias * gain_sum
}

pub fn open_circuit_voltage(i_g: f64, params: &VlcEhParams) -> f64 {
    params.thermal_voltage * (i_g / params.dark_current).ln_1p()
}

/// Power harvested by the solar cell, `f I_G V_oc`.
pub fn vlc_harvested_power(bias: f64, gain_sum: f64, link: &LinkConstants, params: &VlcEhParams) -> f64 {
    let i_g = generated_current(bias, gain_sum, link.n_led, link.v_led, link.responsivity);
    params.fill_factor * i_g * open_circuit_voltage(i_g, params)
}

impl LinkConstants {
    pub fn snr(&self, h: f64, ac_swing: f64, noise: &NoiseParams) -> f64 {
        let amp = self.scale() * h * ac_swing;
        amp * amp / noise.noise_power
    }
}

/// RF input power at a device, `sum_k |g^H w_k|^2`.
pub fn rf_input_energy(beams: &[Vec<Complex64>], g: &[Complex64]) -> Result<f64> {
    beams
        .iter()
        .map(|w| {
            if w.len() != g.len() {
                return Err(Error::DimensionMismatch { expected: g.len(), found: w.len() });
            }
            let inner: Complex64 = g.iter().zip(w).map(|(gi, wi)| gi.conj() * wi).sum();
            Ok(inner.norm_sqr())
        })
        .sum()
}

/// Sigmoid harvester normalized so that zero input harvests zero.
pub fn nonlinear_eh(input: f64, p: &NonlinearEhParams) -> f64 {
    let eab = (p.steepness * p.turn_on).exp();
    let floor = 1.0 / (1.0 + eab);
    let logistic = 1.0 / (1.0 + (-p.steepness * (input - p.turn_on)).exp());
    p.max_harvest * (logistic - floor) / (1.0 - floor)
}

/// Input power that makes the sigmoid harvester deliver `target`.
pub fn nonlinear_eh_inverse(target: f64, p: &NonlinearEhParams) -> Result<f64> {
    if !(target >= 0.0) {
        return Err(Error::Domain(format!("harvest target must be non-negative, got {target}")));
    }
    if target >= p.max_harvest {
        return Err(Error::TargetUnreachable { target, max: p.max_harvest });
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let eab = (p.steepness * p.turn_on).exp();
    let ratio = eab * (p.max_harvest - target) / (eab * target + p.max_harvest);
    Ok((p.turn_on - ratio.ln() / p.steepness).max(0.0))
}

pub fn linear_eh(input: f64, p: &LinearEhParams) -> f64 {
    p.efficiency * input
}

/// Regular grid of illuminance values on a horizontal plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlluminanceMap {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub height: f64,
    /// Row-major, `lux[iy][ix]`.
    pub lux: Vec<Vec<f64>>,
}

impl IlluminanceMap {
    pub fn fraction_above(&self, threshold: f64) -> f64 {
        let total = self.xs.len() * self.ys.len();
        let above = self.lux.iter().flatten().filter(|&&e| e > threshold).count();
        above as f64 / total as f64
    }

    pub fn max(&self) -> f64 {
        self.lux.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,lux\n");
        for (iy, y) in self.ys.iter().enumerate() {
            for (ix, x) in self.xs.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    crate::output::fmt_float(*x),
                    crate::output::fmt_float(*y),
                    crate::output::fmt_float(self.lux[iy][ix])
                ));
            }
        }
        out
    }
}

/// A light source for photometric purposes: one LED element emitting
/// `flux` lumens with a Lambertian pattern of the given order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambertianSource {
    pub position: Vec3,
    pub boresight: Vec3,
    pub lambert_mode: f64,
    pub flux: f64,
}

/// Horizontal illuminance at `point` from a set of Lambertian sources.
pub fn illuminance_at(sources: &[LambertianSource], point: Vec3) -> f64 {
    sources
        .iter()
        .map(|s| {
            let ray = point - s.position;
            let d2 = ray.dot(ray);
            let d = d2.sqrt();
            if d == 0.0 {
                return 0.0;
            }
            let cos_phi = ray.dot(s.boresight) / d;
            let cos_psi = -ray.z / d;
            if cos_phi <= 0.0 || cos_psi <= 0.0 {
                return 0.0;
            }
            s.flux * (s.lambert_mode + 1.0) / (2.0 * PI * d2) * cos_phi.powf(s.lambert_mode) * cos_psi
        })
        .sum()
}

/// Illuminance over `[0, width] x [0, depth]` at `height`, sampled every
/// `resolution` meters (both edges included).
pub fn illuminance_grid(
    sources: &[LambertianSource],
    width: f64,
    depth: f64,
    height: f64,
    resolution: f64,
) -> Result<IlluminanceMap> {
    if !(resolution > 0.0) {
        return Err(Error::Domain("grid resolution must be positive".into()));
    }
    let axis = |len: f64| -> Vec<f64> {
        let n = (len / resolution).round() as usize;
        (0..=n).map(|k| (k as f64 * resolution).min(len)).collect()
    };
    let xs = axis(width);
    let ys = axis(depth);
    let lux = ys
        .iter()
        .map(|&y| xs.iter().map(|&x| illuminance_at(sources, Vec3::new(x, y, height))).collect())
        .collect();
    Ok(IlluminanceMap { xs, ys, height, lux })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LINK: LinkConstants = LinkConstants { n_led: 40.0, v_led: 2.25, responsivity: 0.4 };
    const EH: VlcEhParams = VlcEhParams { fill_factor: 0.75, thermal_voltage: 0.025, dark_current: 1e-9 };
    const NL: NonlinearEhParams = NonlinearEhParams { max_harvest: 0.024, steepness: 150.0, turn_on: 0.014 };

    #[test]
    fn bias_limits() {
        let l = BiasLimits::new(0.002, 0.012).unwrap();
        assert_relative_eq!(l.midpoint(), 0.007);
        assert_relative_eq!(l.max_swing(), 0.005);
        assert_relative_eq!(l.swing_for(l.midpoint()), l.max_swing());
        assert!(BiasLimits::new(0.012, 0.002).is_err());
        assert!(BiasLimits::new(0.0, 0.002).is_err());
    }

    #[test]
    fn snr_examples() {
        let noise = NoiseParams { noise_power: 1e-15 };
        assert_eq!(vlc_snr(0.0167, 0.0, 40.0, 2.25, 0.4, &noise), 0.0);
        let h = 0.016_755_379_816_291_97;
        let snr = vlc_snr(h, 5e-3, 40.0, 2.25, 0.4, &noise);
        // mpmath: 9.09606519033782e9
        assert_relative_eq!(snr, 9.096_065_190_337_82e9, max_relative = 1e-12);
        assert_relative_eq!(vlc_snr(h, 1e-2, 40.0, 2.25, 0.4, &noise), 4.0 * snr, max_relative = 1e-12);
        assert_relative_eq!(LINK.snr(h, 5e-3, &noise), snr, max_relative = 1e-15);
    }

    #[test]
    fn generated_current_examples() {
        assert_eq!(generated_current(0.0, 0.02, 40.0, 2.25, 0.4), 0.0);
        assert_relative_eq!(generated_current(0.012, 0.02, 40.0, 2.25, 0.4), 0.025920, max_relative = 1e-12);
        assert_relative_eq!(
            generated_current(0.012, 0.06, 40.0, 2.25, 0.4),
            3.0 * generated_current(0.012, 0.02, 40.0, 2.25, 0.4),
            max_relative = 1e-12
        );
    }

    #[test]
    fn open_circuit_voltage_examples() {
        assert_eq!(open_circuit_voltage(0.0, &EH), 0.0);
        let e = std::f64::consts::E;
        assert_relative_eq!(open_circuit_voltage(1e-9 * (e - 1.0), &EH), 0.025, max_relative = 1e-14);
        // mpmath: 0.025 ln(1 + 2.59e7) = 0.4267438391319951
        assert_relative_eq!(open_circuit_voltage(2.59e-2, &EH), 0.426_743_839_131_995_1, max_relative = 1e-12);
    }

    #[test]
    fn harvested_power_monotone_with_positive_derivative() {
        assert_eq!(vlc_harvested_power(0.01, 0.0, &LINK, &EH), 0.0);
        let n = 1000;
        let mut prev = 0.0;
        for k in 0..=n {
            let b = 0.002 + 0.010 * k as f64 / n as f64;
            let p = vlc_harvested_power(b, 0.02, &LINK, &EH);
            assert!(p > prev);
            let step = 1e-9;
            let deriv = (vlc_harvested_power(b + step, 0.02, &LINK, &EH)
                - vlc_harvested_power(b - step, 0.02, &LINK, &EH))
                / (2.0 * step);
            assert!(deriv > 0.0);
            prev = p;
        }
    }

    #[test]
    fn rf_input_energy_cases() {
        let g = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let orth = vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)];
        assert!(rf_input_energy(&[orth], &g).unwrap().abs() < 1e-15);
        let norm2: f64 = g.iter().map(|c| c.norm_sqr()).sum();
        let p = 0.3;
        let w: Vec<Complex64> = g.iter().map(|c| c * (p / norm2).sqrt()).collect();
        assert_relative_eq!(rf_input_energy(std::slice::from_ref(&w), &g).unwrap(), p * norm2, max_relative = 1e-14);
        let rotated: Vec<Complex64> = w.iter().map(|c| c * Complex64::from_polar(1.0, 1.1)).collect();
        assert_relative_eq!(
            rf_input_energy(&[rotated], &g).unwrap(),
            rf_input_energy(&[w], &g).unwrap(),
            max_relative = 1e-14
        );
        assert!(matches!(
            rf_input_energy(&[vec![Complex64::new(1.0, 0.0)]], &g),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn nonlinear_eh_examples() {
        assert!(nonlinear_eh(0.0, &NL).abs() < 1e-18);
        assert_relative_eq!(nonlinear_eh(10.0, &NL), 0.024, max_relative = 1e-12);
        // mpmath: 0.0105305228609642
        assert_relative_eq!(nonlinear_eh(0.014, &NL), 0.010_530_522_860_964_2, max_relative = 1e-12);
    }

    #[test]
    fn nonlinear_inverse_examples() {
        assert_eq!(nonlinear_eh_inverse(0.0, &NL).unwrap(), 0.0);
        // mpmath: 0.00933364568876445
        assert_relative_eq!(nonlinear_eh_inverse(0.006, &NL).unwrap(), 0.009_333_645_688_764_45, max_relative = 1e-12);
        assert!(matches!(nonlinear_eh_inverse(0.024, &NL), Err(Error::TargetUnreachable { .. })));
        assert!(nonlinear_eh_inverse(-1e-3, &NL).is_err());
        for k in 1..=100 {
            let e = 0.024 * 0.999 * k as f64 / 100.0;
            let x = nonlinear_eh_inverse(e, &NL).unwrap();
            assert!((nonlinear_eh(x, &NL) - e).abs() <= 1e-12);
        }
    }

    #[test]
    fn linear_examples() {
        assert_relative_eq!(linear_eh(0.012, &LinearEhParams { efficiency: 0.5 }), 0.006);
        assert_eq!(linear_eh(0.0, &LinearEhParams { efficiency: 0.5 }), 0.0);
        assert_eq!(linear_eh(0.3, &LinearEhParams { efficiency: 1.0 }), 0.3);
    }

    #[test]
    fn illuminance_nadir_and_linearity() {
        let src = LambertianSource {
            position: Vec3::new(0.0, 0.0, 2.0),
            boresight: Vec3::DOWN,
            lambert_mode: 1.0,
            flux: 100.0,
        };
        // E = flux (m+1) / (2 pi d^2) = 100 / (pi * 4)
        assert_relative_eq!(illuminance_at(&[src], Vec3::new(0.0, 0.0, 0.0)), 100.0 / (4.0 * PI), max_relative = 1e-14);
        let zero = LambertianSource { flux: 0.0, ..src };
        let map = illuminance_grid(&[zero], 1.0, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(map.max(), 0.0);
        assert_eq!(map.xs, vec![0.0, 0.5, 1.0]);
        let a = illuminance_grid(&[src], 1.0, 1.0, 0.0, 0.25).unwrap();
        let b = illuminance_grid(&[LambertianSource { flux: 300.0, ..src }], 1.0, 1.0, 0.0, 0.25).unwrap();
        for (ra, rb) in a.lux.iter().zip(&b.lux) {
            for (ea, eb) in ra.iter().zip(rb) {
                assert_relative_eq!(3.0 * ea, *eb, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn illuminance_integrates_to_flux() {
        // A downward m = 1 source over a large plane collects almost all its flux.
        let src = LambertianSource {
            position: Vec3::new(0.0, 0.0, 1.0),
            boresight: Vec3::DOWN,
            lambert_mode: 1.0,
            flux: 1.0,
        };
        let (half, step) = (40.0, 0.05);
        let n = (2.0 * half / step) as usize;
        let mut total = 0.0;
        for ix in 0..n {
            for iy in 0..n {
                let x = -half + (ix as f64 + 0.5) * step;
                let y = -half + (iy as f64 + 0.5) * step;
                total += illuminance_at(&[src], Vec3::new(x, y, 0.0)) * step * step;
            }
        }
        assert!((total - 1.0).abs() < 2e-3, "total {total}");
    }
}
