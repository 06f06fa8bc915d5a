//! Line-of-sight VLC gains and Rician RF channels.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{concentrator_gain, Device, OpticalElement, RfAccessPoint, Vec3};

/// DC gain of the LOS link from one LED element at `element_position` to a
/// device. The detector normal points up; the gain is zero when the light
/// arrives outside the detector FOV or from behind the element.
pub fn vlc_channel_gain(
    element: &OpticalElement,
    element_position: Vec3,
    device: &Device,
) -> Result<f64> {
    let ray = device.position - element_position;
    let d = ray.norm();
    if !(d > 0.0) {
        return Err(Error::Domain("LED element and detector coincide".into()));
    }
    let dir = ray * (1.0 / d);
    let cos_irradiance = dir.dot(element.boresight);
    let cos_incidence = (-dir).dot(Vec3::UP);
    if cos_irradiance < 0.0 || cos_incidence <= 0.0 {
        return Ok(0.0);
    }
    let det = &device.detector;
    let incidence = cos_incidence.min(1.0).acos();
    let g = concentrator_gain(incidence, det.fov, det.refractive_index)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    let m = element.lambert_mode;
    Ok(det.area * (m + 1.0) / (2.0 * PI * d * d)
        * cos_irradiance.powf(m)
        * det.filter_gain
        * g
        * cos_incidence)
}

/// Index of one LED element: transmitter `o`, element `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ServingPair {
    pub transmitter: usize,
    pub element: usize,
}

/// Gains `h[o][i][j]` from every LED element to every device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VlcChannelMatrix {
    gains: Vec<Vec<Vec<f64>>>,
    devices: usize,
}

impl VlcChannelMatrix {
    /// Wraps precomputed gains. Every element row must have one entry per
    /// device and all entries must be finite and non-negative.
    pub fn from_gains(gains: Vec<Vec<Vec<f64>>>, devices: usize) -> Result<Self> {
        for row in gains.iter().flatten() {
            if row.len() != devices {
                return Err(Error::DimensionMismatch { expected: devices, found: row.len() });
            }
            if row.iter().any(|h| !(h.is_finite() && *h >= 0.0)) {
                return Err(Error::Domain("VLC gains must be finite and non-negative".into()));
            }
        }
        Ok(Self { gains, devices })
    }

    /// Computes every gain of a set of transmitters toward a set of devices.
    pub fn build<'a>(
        transmitters: impl IntoIterator<Item = (Vec3, &'a [OpticalElement])>,
        devices: &[Device],
    ) -> Result<Self> {
        let mut gains = Vec::new();
        for (position, elements) in transmitters {
            let mut tx = Vec::with_capacity(elements.len());
            for element in elements {
                let row = devices
                    .iter()
                    .map(|dev| vlc_channel_gain(element, position, dev))
                    .collect::<Result<Vec<_>>>()?;
                tx.push(row);
            }
            gains.push(tx);
        }
        Ok(Self { gains, devices: devices.len() })
    }

    pub fn num_transmitters(&self) -> usize {
        self.gains.len()
    }

    pub fn num_elements(&self, transmitter: usize) -> usize {
        self.gains[transmitter].len()
    }

    pub fn num_devices(&self) -> usize {
        self.devices
    }

    pub fn get(&self, o: usize, i: usize, j: usize) -> f64 {
        self.gains[o][i][j]
    }

    pub fn at(&self, pair: ServingPair, device: usize) -> f64 {
        self.gains[pair.transmitter][pair.element][device]
    }

    /// `sum_o sum_i h[o][i][j]`, the aggregate gain that drives light harvesting.
    pub fn gain_sum(&self, device: usize) -> f64 {
        self.gains.iter().flatten().map(|row| row[device]).sum()
    }

    /// Iterates `(o, i, j, h)` in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.gains.iter().enumerate().flat_map(|(o, tx)| {
            tx.iter()
                .enumerate()
                .flat_map(move |(i, row)| row.iter().enumerate().map(move |(j, &h)| (o, i, j, h)))
        })
    }

    /// Number of `(o, i)` pairs.
    pub fn num_pairs(&self) -> usize {
        self.gains.iter().map(Vec::len).sum()
    }

    /// CSV with header `o,i,j,h`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("o,i,j,h\n");
        for (o, i, j, h) in self.entries() {
            let _ = writeln!(out, "{o},{i},{j},{}", crate::output::fmt_float(h));
        }
        out
    }
}

/// Serves each device from the element with the largest gain toward it.
/// Ties go to the lexicographically smallest `(o, i)`.
pub fn assign_serving_elements(matrix: &VlcChannelMatrix) -> Result<Vec<ServingPair>> {
    (0..matrix.num_devices())
        .map(|j| {
            let mut best: Option<(ServingPair, f64)> = None;
            for (o, tx) in matrix.gains.iter().enumerate() {
                for (i, row) in tx.iter().enumerate() {
                    let h = row[j];
                    if h > 0.0 && best.is_none_or(|(_, b)| h > b) {
                        best = Some((ServingPair { transmitter: o, element: i }, h));
                    }
                }
            }
            best.map(|(p, _)| p).ok_or(Error::UnservableDevice { device: j })
        })
        .collect()
}

/// RF propagation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    /// Rician factor in dB; converted to linear before mixing.
    pub rician_factor_db: f64,
    pub path_loss_exponent: f64,
    /// Reference distance of the power-law path loss, m.
    pub reference_distance: f64,
}

impl RfParams {
    pub fn rician_factor_linear(&self) -> f64 {
        10f64.powf(self.rician_factor_db / 10.0)
    }

    pub fn path_loss(&self, distance: f64) -> f64 {
        (distance / self.reference_distance).powf(-self.path_loss_exponent)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rician_factor_db.is_nan() {
            return Err(Error::Validation("Rician factor must be a number".into()));
        }
        if !(self.path_loss_exponent.is_finite() && self.path_loss_exponent >= 0.0) {
            return Err(Error::Validation("path-loss exponent must be finite and >= 0".into()));
        }
        if !(self.reference_distance > 0.0) {
            return Err(Error::Validation("reference distance must be positive".into()));
        }
        Ok(())
    }
}

/// Per-device RF channel vectors `g_j` from the access point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfChannelSet {
    pub g: Vec<Vec<Complex64>>,
    /// Linear Rician factor.
    pub rician_factor: f64,
    pub path_loss_exponent: f64,
    pub seed: u64,
}

/// Unit-modulus LOS component for device `index` of `count`: a phase ramp
/// with per-antenna step `2 pi index / count`.
pub fn los_component(antennas: usize, index: usize, count: usize) -> Vec<Complex64> {
    let step = 2.0 * PI * index as f64 / count.max(1) as f64;
    (0..antennas).map(|m| Complex64::from_polar(1.0, step * m as f64)).collect()
}

/// Draws `g_j = sqrt(PL_j) (sqrt(R/(1+R)) g_los + sqrt(1/(1+R)) g_nlos)` for
/// every receiver position. The NLOS part has i.i.d. CN(0, 1) entries drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn sample_rf_channels(
    ap: &RfAccessPoint,
    receivers: &[Vec3],
    params: &RfParams,
    seed: u64,
) -> RfChannelSet {
    let r = params.rician_factor_linear();
    let (w_los, w_nlos) = if r.is_infinite() {
        (1.0, 0.0)
    } else {
        ((r / (1.0 + r)).sqrt(), (1.0 / (1.0 + r)).sqrt())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = receivers
        .iter()
        .enumerate()
        .map(|(j, pos)| {
            let pl = params.path_loss(ap.position.distance(*pos)).sqrt();
            los_component(ap.antennas, j, receivers.len())
                .into_iter()
                .map(|los| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    let nlos = Complex64::new(re, im) * scale;
                    (los * w_los + nlos * w_nlos) * pl
                })
                .collect()
        })
        .collect();
    RfChannelSet {
        g,
        rician_factor: r,
        path_loss_exponent: params.path_loss_exponent,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_angle_diversity_layout, Photodetector};
    use approx::assert_relative_eq;

    fn detector() -> Photodetector {
        Photodetector {
            area: 0.0085,
            responsivity: 0.4,
            fov: 60f64.to_radians(),
            refractive_index: 1.5,
            filter_gain: 1.0,
        }
    }

    fn element() -> OpticalElement {
        OpticalElement::new(Vec3::DOWN, 17f64.to_radians()).unwrap()
    }

    #[test]
    fn nadir_gain_matches_direct_product() {
        let dev = Device { position: Vec3::new(0.0, 0.0, 1.0), detector: detector() };
        let h = vlc_channel_gain(&element(), Vec3::new(0.0, 0.0, 3.0), &dev).unwrap();
        // 0.0085 * (m + 1) / (2 pi 4) * 3 with m from mpmath.
        assert_relative_eq!(h, 0.016_755_379_816_291_97, max_relative = 1e-12);
    }

    #[test]
    fn outside_fov_is_dark() {
        // Incidence near 89 degrees.
        let dev = Device { position: Vec3::new(57.0, 0.0, 2.0), detector: detector() };
        let wide = OpticalElement::new(Vec3::new(1.0, 0.0, -0.01), 1.2).unwrap();
        assert_eq!(vlc_channel_gain(&wide, Vec3::new(0.0, 0.0, 3.0), &dev).unwrap(), 0.0);
    }

    #[test]
    fn behind_element_is_dark() {
        let dev = Device { position: Vec3::new(1.0, 0.0, 1.0), detector: detector() };
        let el = OpticalElement::new(Vec3::new(-1.0, 0.0, 0.2), 1.2).unwrap();
        assert_eq!(vlc_channel_gain(&el, Vec3::new(0.0, 0.0, 3.0), &dev).unwrap(), 0.0);
    }

    #[test]
    fn coincident_positions_error() {
        let dev = Device { position: Vec3::new(0.0, 0.0, 3.0), detector: detector() };
        assert!(vlc_channel_gain(&element(), Vec3::new(0.0, 0.0, 3.0), &dev).is_err());
    }

    #[test]
    fn inverse_square_law() {
        let tx = Vec3::new(0.0, 0.0, 3.0);
        let el = OpticalElement::new(Vec3::new(0.3, 0.1, -1.0), 0.5).unwrap();
        let dir = Vec3::new(0.2, -0.1, -1.0).normalized().unwrap();
        let near = Device { position: tx + dir * 1.3, detector: detector() };
        let far = Device { position: tx + dir * 2.6, detector: detector() };
        let h1 = vlc_channel_gain(&el, tx, &near).unwrap();
        let h2 = vlc_channel_gain(&el, tx, &far).unwrap();
        assert!(h1 > 0.0);
        assert_relative_eq!(h1 / h2, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn single_entry_matrix() {
        let el = [element()];
        let devs = [Device { position: Vec3::new(0.0, 0.0, 1.0), detector: detector() }];
        let m = VlcChannelMatrix::build([(Vec3::new(0.0, 0.0, 3.0), &el[..])], &devs).unwrap();
        assert_eq!(m.num_pairs(), 1);
        assert_relative_eq!(m.get(0, 0, 0), 0.016_755_379_816_291_97, max_relative = 1e-12);
        assert_eq!(m.to_csv().lines().count(), 2);
    }

    #[test]
    fn permuting_devices_permutes_columns() {
        let els = build_angle_diversity_layout(7, 0.7, 0.0, 0.3).unwrap();
        let tx = [(Vec3::new(1.0, 1.0, 3.0), &els[..]), (Vec3::new(3.0, 2.0, 3.0), &els[..])];
        let devs: Vec<Device> = [(0.5, 0.7), (2.0, 2.5), (3.1, 1.0)]
            .iter()
            .map(|&(x, y)| Device { position: Vec3::new(x, y, 1.0), detector: detector() })
            .collect();
        let rev: Vec<Device> = devs.iter().rev().copied().collect();
        let a = VlcChannelMatrix::build(tx, &devs).unwrap();
        let b = VlcChannelMatrix::build(tx, &rev).unwrap();
        for (o, i, j, h) in a.entries() {
            assert_eq!(h, b.get(o, i, 2 - j));
        }
        assert_eq!(a, VlcChannelMatrix::build(tx, &devs).unwrap());
    }

    #[test]
    fn assignment_picks_max_and_breaks_ties_low() {
        let m = VlcChannelMatrix::from_gains(vec![vec![vec![0.0], vec![0.5]], vec![vec![0.5]]], 1)
            .unwrap();
        assert_eq!(
            assign_serving_elements(&m).unwrap(),
            vec![ServingPair { transmitter: 0, element: 1 }]
        );
        let m = VlcChannelMatrix::from_gains(vec![vec![vec![0.0, 0.2]]], 2).unwrap();
        assert!(matches!(
            assign_serving_elements(&m),
            Err(Error::UnservableDevice { device: 0 })
        ));
    }

    #[test]
    fn rejects_ragged_gains() {
        assert!(VlcChannelMatrix::from_gains(vec![vec![vec![0.1, 0.2], vec![0.3]]], 2).is_err());
        assert!(VlcChannelMatrix::from_gains(vec![vec![vec![-0.1]]], 1).is_err());
    }

    fn ap() -> RfAccessPoint {
        RfAccessPoint { position: Vec3::new(2.5, 2.5, 3.0), antennas: 6 }
    }

    #[test]
    fn pure_los_limit_has_no_fading() {
        let params = RfParams {
            rician_factor_db: f64::INFINITY,
            path_loss_exponent: 2.6,
            reference_distance: 1.0,
        };
        let rx = [Vec3::new(1.0, 1.0, 1.0), Vec3::new(4.0, 2.0, 1.0)];
        let set = sample_rf_channels(&ap(), &rx, &params, 7);
        for (g, pos) in set.g.iter().zip(rx) {
            let p: f64 = g.iter().map(|c| c.norm_sqr()).sum();
            assert_relative_eq!(p, params.path_loss(ap().position.distance(pos)) * 6.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn rayleigh_second_moment() {
        let params = RfParams {
            rician_factor_db: f64::NEG_INFINITY,
            path_loss_exponent: 2.6,
            reference_distance: 1.0,
        };
        assert_eq!(params.rician_factor_linear(), 0.0);
        let rx = [Vec3::new(1.0, 1.0, 1.0)];
        let pl = params.path_loss(ap().position.distance(rx[0]));
        let draws = 100_000;
        let mean: f64 = (0..draws)
            .map(|s| {
                let set = sample_rf_channels(&ap(), &rx, &params, s);
                set.g[0].iter().map(|c| c.norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            / draws as f64;
        assert!((mean / (pl * 6.0) - 1.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn six_db_factor_is_linear_3_98() {
        let params = RfParams { rician_factor_db: 6.0, path_loss_exponent: 2.6, reference_distance: 1.0 };
        assert_relative_eq!(params.rician_factor_linear(), 3.981_071_705_534_972, max_relative = 1e-12);
    }

    #[test]
    fn same_seed_same_channels() {
        let params = RfParams { rician_factor_db: 6.0, path_loss_exponent: 2.6, reference_distance: 1.0 };
        let rx = [Vec3::new(1.0, 1.0, 1.0), Vec3::new(4.0, 2.0, 1.0)];
        let a = sample_rf_channels(&ap(), &rx, &params, 42);
        let b = sample_rf_channels(&ap(), &rx, &params, 42);
        let c = sample_rf_channels(&ap(), &rx, &params, 43);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
