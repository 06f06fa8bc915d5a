//! Energy beamforming at the RF access point: harvesting targets, the
//! minimum-power beam design and its verification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{nonlinear_eh_inverse, LinearEhParams, NonlinearEhParams};
use crate::output::to_dbm;
use crate::sdp::{solve_aggregate_sdp, PsdMatrix, SdpOptions};

/// Eigenvalues below this fraction of the largest are treated as numerical
/// residue when extracting beams.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

/// Required RF input energy per device, W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhTargets {
    pub input_targets: Vec<f64>,
}

impl EhTargets {
    pub fn new(input_targets: Vec<f64>) -> Result<Self> {
        if let Some(t) = input_targets.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::Domain(format!("input targets must be finite and non-negative, got {t}")));
        }
        Ok(Self { input_targets })
    }

    pub fn len(&self) -> usize {
        self.input_targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input_targets.is_empty()
    }
}

/// Inverts the nonlinear harvester for every harvested-power target.
pub fn build_eh_targets(rf_targets: &[f64], params: &NonlinearEhParams) -> Result<EhTargets> {
    let input = rf_targets
        .iter()
        .map(|&t| nonlinear_eh_inverse(t, params))
        .collect::<Result<Vec<_>>>()?;
    EhTargets::new(input)
}

/// Input targets for an ideal linear harvester, `target / ξ`.
pub fn build_linear_targets(rf_targets: &[f64], params: &LinearEhParams) -> Result<EhTargets> {
    params.validate()?;
    EhTargets::new(rf_targets.iter().map(|t| t / params.efficiency).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamformingOptions {
    pub sdp: SdpOptions,
    pub rank_tol: f64,
}

impl Default for BeamformingOptions {
    fn default() -> Self {
        Self { sdp: SdpOptions::default(), rank_tol: DEFAULT_RANK_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformingSolution {
    pub beams: Vec<Vec<Complex64>>,
    /// `Σ ‖w_k‖²`, W.
    pub total_power: f64,
    /// RF input energy reaching each device, `Σ_k |g_jᴴ w_k|²`.
    pub delivered: Vec<f64>,
    /// `λ₂ / λ₁` of the aggregate covariance.
    pub rank_one_ratio: f64,
    pub iterations: usize,
    pub duals: Vec<f64>,
    pub relative_gap: f64,
}

impl BeamformingSolution {
    pub fn total_power_dbm(&self) -> f64 {
        to_dbm(self.total_power)
    }
}

fn delivered_energy(beams: &[Vec<Complex64>], g: &[Complex64]) -> f64 {
    beams
        .iter()
        .map(|w| w.iter().zip(g).map(|(wi, gi)| gi.conj() * wi).sum::<Complex64>().norm_sqr())
        .sum()
}

/// Splits `W = Σ λ_k u_k u_kᴴ` into beams `√λ_k u_k`, keeping eigenvalues
/// above `rank_tol · λ_max`.
pub fn extract_beams(aggregate: &PsdMatrix, channels: &[Vec<Complex64>], rank_tol: f64) -> BeamformingSolution {
    let eig = aggregate.eigen();
    let lmax = eig.first().map_or(0.0, |e| e.0);
    let beams: Vec<Vec<Complex64>> = if lmax > 0.0 {
        eig.iter()
            .filter(|(l, _)| *l > rank_tol * lmax && *l > 0.0)
            .map(|(l, u)| u.iter().map(|z| z * l.sqrt()).collect())
            .collect()
    } else {
        Vec::new()
    };
    let rank_one_ratio = match eig.get(1) {
        Some((l2, _)) if lmax > 0.0 => (l2 / lmax).max(0.0),
        _ => 0.0,
    };
    let total_power = beams.iter().map(|w| power(w)).sum();
    let delivered = channels.iter().map(|g| delivered_energy(&beams, g)).collect();
    BeamformingSolution {
        beams,
        total_power,
        delivered,
        rank_one_ratio,
        iterations: 0,
        duals: Vec::new(),
        relative_gap: 0.0,
    }
}

fn power(w: &[Complex64]) -> f64 {
    w.iter().map(|z| z.norm_sqr()).sum()
}

/// Minimum-power beams meeting the input targets. Residue eigenvalues are
/// discarded and the remaining beams rescaled to restore every target.
pub fn solve_beamforming(
    channels: &[Vec<Complex64>],
    targets: &EhTargets,
    opts: &BeamformingOptions,
) -> Result<BeamformingSolution> {
    let sdp = solve_aggregate_sdp(channels, &targets.input_targets, &opts.sdp)?;
    let mut sol = extract_beams(&sdp.matrix, channels, opts.rank_tol);
    let shortfall = sol
        .delivered
        .iter()
        .zip(&targets.input_targets)
        .filter(|(_, t)| **t > 0.0)
        .map(|(d, t)| t / d)
        .fold(1.0, f64::max);
    if shortfall > 1.0 {
        let s = shortfall.sqrt();
        for w in &mut sol.beams {
            for z in w.iter_mut() {
                *z *= s;
            }
        }
        sol.total_power = sol.beams.iter().map(|w| power(w)).sum();
        sol.delivered = channels.iter().map(|g| delivered_energy(&sol.beams, g)).collect();
    }
    sol.iterations = sdp.iterations;
    sol.duals = sdp.duals;
    sol.relative_gap = sdp.relative_gap;
    Ok(sol)
}

/// Minimum RF transmit power for harvested-power targets under the
/// nonlinear harvester.
pub fn required_power_nonlinear(
    channels: &[Vec<Complex64>],
    rf_targets: &[f64],
    params: &NonlinearEhParams,
    opts: &BeamformingOptions,
) -> Result<BeamformingSolution> {
    solve_beamforming(channels, &build_eh_targets(rf_targets, params)?, opts)
}

/// Minimum RF transmit power for harvested-power targets under an ideal
/// linear harvester of efficiency `ξ`.
pub fn required_power_linear(
    channels: &[Vec<Complex64>],
    rf_targets: &[f64],
    params: &LinearEhParams,
    opts: &BeamformingOptions,
) -> Result<BeamformingSolution> {
    solve_beamforming(channels, &build_linear_targets(rf_targets, params)?, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserCheck {
    pub target: f64,
    pub delivered: f64,
    /// `delivered - target`; negative means the target is missed.
    pub residual: f64,
    pub tight: bool,
    pub dual: Option<f64>,
    /// Tight, or carrying no dual pressure.
    pub slackness_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub users: Vec<UserCheck>,
    pub total_power: f64,
    pub feasible: bool,
    pub slackness_ok: bool,
}

/// Recomputes delivered energy from the beams and checks every target and,
/// when multipliers are available, complementary slackness.
pub fn verify_beamforming(
    beams: &[Vec<Complex64>],
    channels: &[Vec<Complex64>],
    targets: &EhTargets,
    duals: Option<&[f64]>,
) -> Result<VerificationReport> {
    if channels.len() != targets.len() {
        return Err(Error::DimensionMismatch { expected: channels.len(), found: targets.len() });
    }
    let max_dual = duals.map_or(0.0, |d| d.iter().copied().fold(0.0, f64::max));
    let users: Vec<UserCheck> = channels
        .iter()
        .zip(&targets.input_targets)
        .enumerate()
        .map(|(j, (g, &target))| {
            let delivered = delivered_energy(beams, g);
            let residual = delivered - target;
            let tight = residual.abs() <= 1e-6 * target.max(f64::MIN_POSITIVE);
            let dual = duals.and_then(|d| d.get(j).copied());
            let idle = dual.is_none_or(|d| d <= 1e-6 * max_dual.max(f64::MIN_POSITIVE));
            UserCheck { target, delivered, residual, tight, dual, slackness_ok: tight || idle }
        })
        .collect();
    let feasible = users.iter().all(|u| u.residual >= -1e-9);
    let slackness_ok = users.iter().all(|u| u.slackness_ok);
    Ok(VerificationReport { total_power: beams.iter().map(|w| power(w)).sum(), users, feasible, slackness_ok })
}
