//! Scenario description and its human-editable TOML configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{sample_rf_channels, RfChannelSet, RfParams, VlcChannelMatrix};
use crate::error::{Error, Result};
use crate::geometry::{build_angle_diversity_layout, Device, OpticalTransmitter, Photodetector, RfAccessPoint, Vec3};
use crate::models::{
    illuminance_at, illuminance_grid, BiasLimits, IlluminanceMap, LambertianSource, LinearEhParams, LinkConstants,
    NoiseParams, NonlinearEhParams, VlcEhParams,
};

/// Bundled office scenario.
pub const PAPER_SCENARIO_TOML: &str = include_str!("../scenarios/office.toml");

/// Thermal voltage used when a config leaves it out, V.
pub const DEFAULT_THERMAL_VOLTAGE: f64 = 0.025;
/// Ring tilt used when a config leaves it out, degrees.
pub const DEFAULT_TILT_DEG: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    /// Height of the plane the devices sit on, m.
    pub receiver_height: f64,
}

impl Room {
    pub fn center(&self) -> Vec3 {
        Vec3::new(0.5 * self.width, 0.5 * self.depth, self.receiver_height)
    }

    fn contains(&self, p: Vec3) -> bool {
        let eps = 1e-9;
        (-eps..=self.width + eps).contains(&p.x)
            && (-eps..=self.depth + eps).contains(&p.y)
            && (-eps..=self.height + eps).contains(&p.z)
    }
}

/// A complete network: room, luminaires, RF access point, devices and all
/// physical constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub room: Room,
    pub transmitters: Vec<OpticalTransmitter>,
    pub ap: RfAccessPoint,
    pub devices: Vec<Device>,
    pub bias_limits: BiasLimits,
    pub vlc_eh: VlcEhParams,
    pub nonlinear_eh: NonlinearEhParams,
    pub linear_eh: LinearEhParams,
    pub noise: NoiseParams,
    pub rf: RfParams,
    pub seed: u64,
}

impl Scenario {
    /// The bundled office scenario.
    pub fn paper_default() -> Self {
        Self::from_toml_str(PAPER_SCENARIO_TOML).expect("bundled scenario is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        load_scenario_str(text).map(|(s, _)| s)
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.room;
        if !(r.width > 0.0 && r.depth > 0.0 && r.height > 0.0) {
            return Err(Error::Validation("room dimensions must be positive".into()));
        }
        if !(r.receiver_height >= 0.0 && r.receiver_height < r.height) {
            return Err(Error::Validation("receiver plane must lie between floor and ceiling".into()));
        }
        if self.transmitters.is_empty() {
            return Err(Error::Validation("scenario needs at least one transmitter".into()));
        }
        for (o, tx) in self.transmitters.iter().enumerate() {
            tx.validate().map_err(|e| Error::Validation(format!("transmitter {o}: {e}")))?;
            if tx.n_led != self.transmitters[0].n_led || tx.v_led != self.transmitters[0].v_led {
                return Err(Error::Validation("all transmitters must share n_led and v_led".into()));
            }
        }
        if self.devices.is_empty() {
            return Err(Error::Validation("scenario needs at least one device".into()));
        }
        for (j, d) in self.devices.iter().enumerate() {
            d.detector.validate().map_err(|e| Error::Validation(format!("device {j}: {e}")))?;
            if !d.position.is_finite() || !r.contains(d.position) {
                return Err(Error::Validation(format!("device {j} lies outside the room")));
            }
        }
        self.ap.validate()?;
        self.bias_limits.validate()?;
        self.vlc_eh.validate()?;
        self.nonlinear_eh.validate()?;
        self.linear_eh.validate()?;
        self.noise.validate()?;
        self.rf.validate()?;
        Ok(())
    }

    pub fn link_constants(&self, device: usize) -> LinkConstants {
        let tx = &self.transmitters[0];
        LinkConstants {
            n_led: tx.n_led as f64,
            v_led: tx.v_led,
            responsivity: self.devices[device].detector.responsivity,
        }
    }

    /// Short content hash used as provenance in experiment outputs.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }

    pub fn vlc_matrix(&self) -> Result<VlcChannelMatrix> {
        build_vlc_matrix(self)
    }

    pub fn rf_channels(&self, seed: u64) -> RfChannelSet {
        sample_rf_channel(self, seed)
    }

    fn light_sources(&self, bias: f64, efficacy: f64) -> Vec<LambertianSource> {
        self.transmitters
            .iter()
            .flat_map(|tx| {
                let flux = efficacy * 3.0 * tx.n_led as f64 * tx.v_led * bias;
                tx.elements.iter().map(move |e| LambertianSource {
                    position: tx.position,
                    boresight: e.boresight,
                    lambert_mode: e.lambert_mode,
                    flux,
                })
            })
            .collect()
    }

    /// Illuminance on the receiver plane with every LED biased at `bias`.
    pub fn illuminance_map(&self, bias: f64, efficacy: f64, resolution: f64) -> Result<IlluminanceMap> {
        illuminance_map(self, bias, efficacy, resolution)
    }

    pub fn illuminance_at(&self, bias: f64, efficacy: f64, point: Vec3) -> f64 {
        illuminance_at(&self.light_sources(bias, efficacy), point)
    }
}

/// Gains from every element of every transmitter to every device.
pub fn build_vlc_matrix(scenario: &Scenario) -> Result<VlcChannelMatrix> {
    VlcChannelMatrix::build(
        scenario.transmitters.iter().map(|t| (t.position, t.elements.as_slice())),
        &scenario.devices,
    )
}

/// Rician RF channels from the access point to every device.
pub fn sample_rf_channel(scenario: &Scenario, seed: u64) -> RfChannelSet {
    let positions: Vec<Vec3> = scenario.devices.iter().map(|d| d.position).collect();
    sample_rf_channels(&scenario.ap, &positions, &scenario.rf, seed)
}

/// Illuminance per grid point: each element emits
/// `efficacy * 3 * N_LED * V_LED * B` lumens with its Lambertian pattern.
pub fn illuminance_map(scenario: &Scenario, bias: f64, efficacy: f64, resolution: f64) -> Result<IlluminanceMap> {
    let l = &scenario.bias_limits;
    if !(bias >= 0.0 && bias <= l.i_high) {
        return Err(Error::Domain(format!("bias {bias} A is outside [0, {}] A", l.i_high)));
    }
    let r = &scenario.room;
    illuminance_grid(&scenario.light_sources(bias, efficacy), r.width, r.depth, r.receiver_height, resolution)
}

// ---------------------------------------------------------------------------
// Configuration file

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Length,
    Area,
    Current,
    Power,
    InversePower,
    Voltage,
    Angle,
    Decibel,
    Scalar,
}

/// Number, or string `"<value> <unit>"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Qty {
    Num(f64),
    Text(String),
}

fn unit_factor(unit: &str) -> Option<(f64, Dim)> {
    use Dim::*;
    Some(match unit {
        "m" => (1.0, Length),
        "cm" => (1e-2, Length),
        "mm" => (1e-3, Length),
        "m2" => (1.0, Area),
        "cm2" => (1e-4, Area),
        "mm2" => (1e-6, Area),
        "A" => (1.0, Current),
        "mA" => (1e-3, Current),
        "uA" => (1e-6, Current),
        "nA" => (1e-9, Current),
        "W" => (1.0, Power),
        "mW" | "mW/s" => (1e-3, Power),
        "uW" => (1e-6, Power),
        "/W" => (1.0, InversePower),
        "/mW" => (1e3, InversePower),
        "V" => (1.0, Voltage),
        "mV" => (1e-3, Voltage),
        "rad" => (1.0, Angle),
        "deg" => (std::f64::consts::PI / 180.0, Angle),
        "dB" => (1.0, Decibel),
        _ => return None,
    })
}

impl Qty {
    fn si(&self, dim: Dim, field: &str) -> Result<f64> {
        match self {
            Qty::Num(v) => Ok(*v),
            Qty::Text(s) => {
                let s = s.trim();
                let split = s
                    .find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c)))
                    .unwrap_or(s.len());
                let (num, unit) = s.split_at(split);
                let unit = unit.trim();
                let value: f64 = num
                    .trim()
                    .parse()
                    .or_else(|_| s.parse::<f64>())
                    .map_err(|_| Error::Config(format!("{field}: cannot parse quantity '{s}'")))?;
                if unit.is_empty() {
                    return Ok(value);
                }
                let (factor, got) = unit_factor(unit)
                    .ok_or_else(|| Error::Config(format!("{field}: unknown unit '{unit}'")))?;
                if got != dim && dim != Dim::Scalar {
                    return Err(Error::Config(format!("{field}: unit '{unit}' has the wrong dimension")));
                }
                Ok(value * factor)
            }
        }
    }
}

/// Parses a power such as `"4 mW"` or `0.004` into watts.
pub fn parse_power(text: &str) -> Result<f64> {
    Qty::Text(text.to_string()).si(Dim::Power, "power")
}

/// Parses a current such as `"8.5 mA"` into amperes.
pub fn parse_current(text: &str) -> Result<f64> {
    Qty::Text(text.to_string()).si(Dim::Current, "current")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomCfg {
    size: [Qty; 3],
    receiver_height: Option<Qty>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TxDefaultsCfg {
    elements: Option<usize>,
    semiangle: Option<Qty>,
    tilt: Option<Qty>,
    n_led: Option<u32>,
    v_led: Option<Qty>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TxCfg {
    position: [Qty; 3],
    elements: Option<usize>,
    semiangle: Option<Qty>,
    tilt: Option<Qty>,
    azimuth_offset: Option<Qty>,
    #[serde(default)]
    interleaved: bool,
    n_led: Option<u32>,
    v_led: Option<Qty>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorCfg {
    area: Qty,
    responsivity: Qty,
    fov: Qty,
    refractive_index: Qty,
    filter_gain: Option<Qty>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceCfg {
    position: Option<[Qty; 3]>,
    transmitter: Option<usize>,
    distance: Option<Qty>,
    detector: Option<DetectorCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApCfg {
    position: [Qty; 3],
    antennas: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BiasCfg {
    i_low: Qty,
    i_high: Qty,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VlcEhCfg {
    fill_factor: Qty,
    thermal_voltage: Option<Qty>,
    dark_current: Qty,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NonlinearCfg {
    max_harvest: Qty,
    steepness: Qty,
    turn_on: Qty,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearCfg {
    efficiency: Qty,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseCfg {
    power: Qty,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RfCfg {
    rician: Qty,
    path_loss_exponent: Qty,
    reference_distance: Option<Qty>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioCfg {
    seed: Option<u64>,
    room: RoomCfg,
    #[serde(default)]
    transmitter_defaults: TxDefaultsCfg,
    transmitters: Vec<TxCfg>,
    detector: Option<DetectorCfg>,
    devices: Vec<DeviceCfg>,
    access_point: ApCfg,
    bias: BiasCfg,
    vlc_eh: VlcEhCfg,
    nonlinear_eh: NonlinearCfg,
    linear_eh: LinearCfg,
    noise: NoiseCfg,
    rf: RfCfg,
}

fn vec3(q: &[Qty; 3], field: &str) -> Result<Vec3> {
    Ok(Vec3::new(q[0].si(Dim::Length, field)?, q[1].si(Dim::Length, field)?, q[2].si(Dim::Length, field)?))
}

fn detector(cfg: &DetectorCfg) -> Result<Photodetector> {
    Ok(Photodetector {
        area: cfg.area.si(Dim::Area, "detector.area")?,
        responsivity: cfg.responsivity.si(Dim::Scalar, "detector.responsivity")?,
        fov: cfg.fov.si(Dim::Angle, "detector.fov")?,
        refractive_index: cfg.refractive_index.si(Dim::Scalar, "detector.refractive_index")?,
        filter_gain: match &cfg.filter_gain {
            Some(q) => q.si(Dim::Scalar, "detector.filter_gain")?,
            None => 1.0,
        },
    })
}

/// Parses and validates a scenario, returning it together with a notice
/// for every default that was filled in.
pub fn load_scenario_str(text: &str) -> Result<(Scenario, Vec<String>)> {
    let cfg: ScenarioCfg = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut notices = Vec::new();

    let seed = cfg.seed.unwrap_or_else(|| {
        notices.push("seed not set; using 0".to_string());
        0
    });

    let room = Room {
        width: cfg.room.size[0].si(Dim::Length, "room.size")?,
        depth: cfg.room.size[1].si(Dim::Length, "room.size")?,
        height: cfg.room.size[2].si(Dim::Length, "room.size")?,
        receiver_height: match &cfg.room.receiver_height {
            Some(q) => q.si(Dim::Length, "room.receiver_height")?,
            None => {
                notices.push("room.receiver_height not set; using 1 m".to_string());
                1.0
            }
        },
    };

    let defaults = &cfg.transmitter_defaults;
    let mut tilt_notice = false;
    let transmitters = cfg
        .transmitters
        .iter()
        .enumerate()
        .map(|(o, t)| {
            let field = format!("transmitters[{o}]");
            let elements = t.elements.or(defaults.elements).unwrap_or(1);
            let semiangle = t
                .semiangle
                .as_ref()
                .or(defaults.semiangle.as_ref())
                .ok_or_else(|| Error::Config(format!("{field}: semiangle is required")))?
                .si(Dim::Angle, &field)?;
            let tilt = match t.tilt.as_ref().or(defaults.tilt.as_ref()) {
                Some(q) => q.si(Dim::Angle, &field)?,
                None => {
                    tilt_notice = true;
                    DEFAULT_TILT_DEG.to_radians()
                }
            };
            let mut offset = match &t.azimuth_offset {
                Some(q) => q.si(Dim::Angle, &field)?,
                None => 0.0,
            };
            if t.interleaved {
                offset += 2.0 * std::f64::consts::PI / elements as f64;
            }
            let n_led = t
                .n_led
                .or(defaults.n_led)
                .ok_or_else(|| Error::Config(format!("{field}: n_led is required")))?;
            let v_led = t
                .v_led
                .as_ref()
                .or(defaults.v_led.as_ref())
                .ok_or_else(|| Error::Config(format!("{field}: v_led is required")))?
                .si(Dim::Voltage, &field)?;
            let elements = build_angle_diversity_layout(elements, tilt, offset, semiangle)
                .map_err(|e| Error::Validation(format!("{field}: {e}")))?;
            Ok(OpticalTransmitter { position: vec3(&t.position, &field)?, elements, n_led, v_led })
        })
        .collect::<Result<Vec<_>>>()?;
    if tilt_notice {
        notices.push(format!("transmitter tilt not set; using {DEFAULT_TILT_DEG} deg"));
    }

    let shared_detector = cfg.detector.as_ref().map(detector).transpose()?;
    let devices = cfg
        .devices
        .iter()
        .enumerate()
        .map(|(j, d)| {
            let field = format!("devices[{j}]");
            let det = match (&d.detector, shared_detector) {
                (Some(c), _) => detector(c)?,
                (None, Some(s)) => s,
                (None, None) => return Err(Error::Config(format!("{field}: no detector given"))),
            };
            let position = match (&d.position, d.transmitter, &d.distance) {
                (Some(p), None, None) => vec3(p, &field)?,
                (None, Some(o), Some(dist)) => {
                    let tx = transmitters
                        .get(o)
                        .ok_or_else(|| Error::Validation(format!("{field}: no transmitter {o}")))?;
                    let dist = dist.si(Dim::Length, &field)?;
                    let drop = tx.position.z - room.receiver_height;
                    if !(dist >= drop) {
                        return Err(Error::Validation(format!(
                            "{field}: distance {dist} m is shorter than the ceiling-to-plane drop {drop} m"
                        )));
                    }
                    Vec3::new(tx.position.x + (dist * dist - drop * drop).sqrt(), tx.position.y, room.receiver_height)
                }
                _ => {
                    return Err(Error::Config(format!(
                        "{field}: give either position or transmitter + distance"
                    )))
                }
            };
            Ok(Device { position, detector: det })
        })
        .collect::<Result<Vec<_>>>()?;

    let thermal_voltage = match &cfg.vlc_eh.thermal_voltage {
        Some(q) => q.si(Dim::Voltage, "vlc_eh.thermal_voltage")?,
        None => {
            notices.push(format!("vlc_eh.thermal_voltage not set; using {DEFAULT_THERMAL_VOLTAGE} V"));
            DEFAULT_THERMAL_VOLTAGE
        }
    };

    let scenario = Scenario {
        room,
        transmitters,
        ap: RfAccessPoint {
            position: vec3(&cfg.access_point.position, "access_point.position")?,
            antennas: cfg.access_point.antennas,
        },
        devices,
        bias_limits: BiasLimits {
            i_low: cfg.bias.i_low.si(Dim::Current, "bias.i_low")?,
            i_high: cfg.bias.i_high.si(Dim::Current, "bias.i_high")?,
        },
        vlc_eh: VlcEhParams {
            fill_factor: cfg.vlc_eh.fill_factor.si(Dim::Scalar, "vlc_eh.fill_factor")?,
            thermal_voltage,
            dark_current: cfg.vlc_eh.dark_current.si(Dim::Current, "vlc_eh.dark_current")?,
        },
        nonlinear_eh: NonlinearEhParams {
            max_harvest: cfg.nonlinear_eh.max_harvest.si(Dim::Power, "nonlinear_eh.max_harvest")?,
            steepness: cfg.nonlinear_eh.steepness.si(Dim::InversePower, "nonlinear_eh.steepness")?,
            turn_on: cfg.nonlinear_eh.turn_on.si(Dim::Power, "nonlinear_eh.turn_on")?,
        },
        linear_eh: LinearEhParams { efficiency: cfg.linear_eh.efficiency.si(Dim::Scalar, "linear_eh.efficiency")? },
        noise: NoiseParams { noise_power: cfg.noise.power.si(Dim::Scalar, "noise.power")? },
        rf: RfParams {
            rician_factor_db: cfg.rf.rician.si(Dim::Decibel, "rf.rician")?,
            path_loss_exponent: cfg.rf.path_loss_exponent.si(Dim::Scalar, "rf.path_loss_exponent")?,
            reference_distance: match &cfg.rf.reference_distance {
                Some(q) => q.si(Dim::Length, "rf.reference_distance")?,
                None => 1.0,
            },
        },
        seed,
    };
    scenario.validate()?;
    for n in &notices {
        log::info!("{n}");
    }
    Ok((scenario, notices))
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path.as_ref())?;
    load_scenario_str(&text).map(|(s, _)| s)
}
