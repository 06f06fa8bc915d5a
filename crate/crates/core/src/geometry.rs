//! Network geometry: positions, angle-diversity transmitters, photodetectors
//! and the RF access point.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A point or direction in room coordinates, meters. `z` points up.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const DOWN: Vec3 = Vec3 { x: 0.0, y: 0.0, z: -1.0 };
    pub const UP: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (other - self).norm()
    }

    /// Unit vector in the same direction, `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Lambertian order `m = -ln 2 / ln cos(semiangle)` of an LED with the given
/// half-power semiangle.
pub fn lambert_mode(semiangle_half_power: f64) -> Result<f64> {
    if !(semiangle_half_power > 0.0 && semiangle_half_power < FRAC_PI_2) {
        return domain(format!(
            "half-power semiangle must lie in (0, pi/2), got {semiangle_half_power}"
        ));
    }
    Ok(-std::f64::consts::LN_2 / semiangle_half_power.cos().ln())
}

/// Gain of an ideal non-imaging concentrator, `n^2 / sin^2(fov)` inside the
/// field of view and zero outside.
pub fn concentrator_gain(incidence: f64, fov: f64, refractive_index: f64) -> Result<f64> {
    if !(fov > 0.0 && fov <= FRAC_PI_2) {
        return domain(format!("field of view must lie in (0, pi/2], got {fov}"));
    }
    if !(incidence >= 0.0) {
        return domain(format!("incidence angle must be non-negative, got {incidence}"));
    }
    if incidence > fov {
        return Ok(0.0);
    }
    let s = fov.sin();
    Ok(refractive_index * refractive_index / (s * s))
}

/// One LED element of an angle-diversity transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalElement {
    pub boresight: Vec3,
    pub semiangle_half_power: f64,
    pub lambert_mode: f64,
}

impl OpticalElement {
    /// The boresight is normalized here; a zero or non-finite direction is rejected.
    pub fn new(boresight: Vec3, semiangle_half_power: f64) -> Result<Self> {
        let boresight = boresight
            .normalized()
            .ok_or_else(|| Error::Domain("element boresight must be a non-zero finite vector".into()))?;
        Ok(Self {
            boresight,
            semiangle_half_power,
            lambert_mode: lambert_mode(semiangle_half_power)?,
        })
    }
}

/// Element layout of an angle-diversity transmitter: one element pointing
/// straight down and `m_elements - 1` elements tilted by `tilt` from nadir at
/// equally spaced azimuths starting at `azimuth_offset`.
pub fn build_angle_diversity_layout(
    m_elements: usize,
    tilt: f64,
    azimuth_offset: f64,
    semiangle_half_power: f64,
) -> Result<Vec<OpticalElement>> {
    if m_elements == 0 {
        return domain("an angle-diversity transmitter needs at least one element");
    }
    let mut elements = Vec::with_capacity(m_elements);
    elements.push(OpticalElement::new(Vec3::DOWN, semiangle_half_power)?);
    let ring = m_elements - 1;
    for k in 0..ring {
        let azimuth = azimuth_offset + 2.0 * PI * k as f64 / ring as f64;
        let dir = Vec3::new(
            tilt.sin() * azimuth.cos(),
            tilt.sin() * azimuth.sin(),
            -tilt.cos(),
        );
        elements.push(OpticalElement::new(dir, semiangle_half_power)?);
    }
    Ok(elements)
}

/// Ceiling-mounted luminaire made of several LED elements. Each element
/// drives `n_led` LEDs per color at `v_led` volts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalTransmitter {
    pub position: Vec3,
    pub elements: Vec<OpticalElement>,
    pub n_led: u32,
    pub v_led: f64,
}

impl OpticalTransmitter {
    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() {
            return Err(Error::Validation("transmitter position must be finite".into()));
        }
        if self.elements.is_empty() {
            return Err(Error::Validation("transmitter needs at least one element".into()));
        }
        if self.n_led == 0 {
            return Err(Error::Validation("n_led must be at least 1".into()));
        }
        if !(self.v_led > 0.0) {
            return Err(Error::Validation(format!("v_led must be positive, got {}", self.v_led)));
        }
        for e in &self.elements {
            if (e.boresight.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Validation("element boresight must be unit-norm".into()));
            }
            let m = lambert_mode(e.semiangle_half_power)
                .map_err(|err| Error::Validation(err.to_string()))?;
            if (m - e.lambert_mode).abs() > 1e-9 * m.max(1.0) {
                return Err(Error::Validation(
                    "element lambert_mode does not match its semiangle".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Photodetector / solar panel of a terminal device. The detector normal
/// points straight up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Photodetector {
    /// Active area, m².
    pub area: f64,
    /// Responsivity, A/W.
    pub responsivity: f64,
    /// Field of view half-angle, radians.
    pub fov: f64,
    pub refractive_index: f64,
    /// Optical band-pass filter gain.
    pub filter_gain: f64,
}

impl Photodetector {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Validation(what.to_string()));
        if !(self.area > 0.0) {
            return bad("detector area must be positive");
        }
        if !(self.responsivity > 0.0) {
            return bad("detector responsivity must be positive");
        }
        if !(self.fov > 0.0 && self.fov <= FRAC_PI_2) {
            return bad("detector fov must lie in (0, pi/2]");
        }
        if !(self.refractive_index >= 1.0) {
            return bad("refractive index must be at least 1");
        }
        if !(self.filter_gain > 0.0 && self.filter_gain <= 1.0) {
            return bad("filter gain must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub position: Vec3,
    pub detector: Photodetector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfAccessPoint {
    pub position: Vec3,
    pub antennas: usize,
}

impl RfAccessPoint {
    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::Validation("access point needs at least one antenna".into()));
        }
        if !self.position.is_finite() {
            return Err(Error::Validation("access point position must be finite".into()));
        }
        Ok(())
    }
}
