//! Lightwave resource allocation: the common DC bias, the AC swings and the
//! per-user RF harvesting targets that maximize the minimum VLC SNR subject
//! to every user's total (light + RF) harvesting requirement.
//!
//! The problem splits into a worst-user RF sub-problem with a closed-form
//! answer and a bias sub-problem that is solved either exactly by bisection
//! or approximately with a Lambert-W closed form.

use serde::{Deserialize, Serialize};

use crate::channel::{assign_serving_elements, ServingPair, VlcChannelMatrix};
use crate::error::{Error, Result};
use crate::lambert::lambert_w0;
use crate::models::{vlc_harvested_power, BiasLimits, LinkConstants, NoiseParams, VlcEhParams};
use crate::output::to_db;
use crate::scenario::Scenario;

/// Health-safety cap on the RF harvesting level a user may be granted, W.
pub const RF_SAFETY_CAP: f64 = 6e-3;

/// Default bisection tolerance on the bias, A.
pub const DEFAULT_BIAS_TOL: f64 = 1e-12;

const BISECTION_MAX_ITER: usize = 200;

/// Total harvesting requirement `theta` and per-user RF cap `theta_rf`, W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EhThresholds {
    pub theta: f64,
    pub theta_rf: f64,
}

impl EhThresholds {
    pub fn new(theta: f64, theta_rf: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("theta must be finite and >= 0, got {theta}")));
        }
        if !(0.0..=RF_SAFETY_CAP * (1.0 + 1e-12)).contains(&theta_rf) {
            return Err(Error::Domain(format!(
                "theta_rf must lie in [0, {RF_SAFETY_CAP}] W, got {theta_rf}"
            )));
        }
        Ok(Self { theta, theta_rf })
    }
}

/// How the bias sub-problem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasMethod {
    Bisection,
    ClosedForm,
}

impl BiasMethod {
    pub fn tag(self) -> &'static str {
        match self {
            BiasMethod::Bisection => "bisection",
            BiasMethod::ClosedForm => "closed_form",
        }
    }
}

impl std::str::FromStr for BiasMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bisection" => Ok(BiasMethod::Bisection),
            "closed_form" | "closed-form" => Ok(BiasMethod::ClosedForm),
            other => Err(Error::Config(format!("unknown bias method '{other}'"))),
        }
    }
}

/// What one user contributes to the lightwave problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserLink {
    pub serving: ServingPair,
    /// Gain of the serving element.
    pub serving_gain: f64,
    /// Gain summed over every element of every transmitter.
    pub gain_sum: f64,
    pub link: LinkConstants,
}

impl UserLink {
    pub fn harvested(&self, bias: f64, eh: &VlcEhParams) -> f64 {
        vlc_harvested_power(bias, self.gain_sum, &self.link, eh)
    }
}

/// Everything the lightwave optimizer needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightwaveProblem {
    pub users: Vec<UserLink>,
    pub limits: BiasLimits,
    pub vlc_eh: VlcEhParams,
    pub noise: NoiseParams,
}

impl LightwaveProblem {
    pub fn from_scenario(scenario: &Scenario, matrix: &VlcChannelMatrix) -> Result<Self> {
        let links: Vec<LinkConstants> = (0..matrix.num_devices()).map(|j| scenario.link_constants(j)).collect();
        Self::from_matrix(matrix, &links, scenario.bias_limits, scenario.vlc_eh, scenario.noise)
    }

    /// Problem from measured gains and per-device link constants.
    pub fn from_matrix(
        matrix: &VlcChannelMatrix,
        links: &[LinkConstants],
        limits: BiasLimits,
        vlc_eh: VlcEhParams,
        noise: NoiseParams,
    ) -> Result<Self> {
        if links.len() != matrix.num_devices() {
            return Err(Error::DimensionMismatch { expected: matrix.num_devices(), found: links.len() });
        }
        let assignment = assign_serving_elements(matrix)?;
        let users = assignment
            .iter()
            .enumerate()
            .map(|(j, &serving)| UserLink {
                serving,
                serving_gain: matrix.at(serving, j),
                gain_sum: matrix.gain_sum(j),
                link: links[j],
            })
            .collect();
        Ok(Self { users, limits, vlc_eh, noise })
    }

    /// User with the smallest serving gain.
    pub fn worst_user(&self) -> usize {
        worst_by(self.users.iter().map(|u| u.serving_gain))
    }

    pub fn snr(&self, user: usize, bias: f64) -> f64 {
        let u = &self.users[user];
        u.link.snr(u.serving_gain, self.limits.i_high - bias, &self.noise)
    }
}

/// Device with the smallest serving-element gain; since every user gets the
/// same AC swing, it has the worst SNR. Ties go to the lowest index.
pub fn identify_worst_user(matrix: &VlcChannelMatrix, assignment: &[ServingPair]) -> usize {
    worst_by(assignment.iter().enumerate().map(|(j, &p)| matrix.at(p, j)))
}

fn worst_by(gains: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (j, h) in gains.enumerate() {
        if h < best.1 {
            best = (j, h);
        }
    }
    best.0
}

/// Light harvested with the LEDs at full bias and no AC swing.
pub fn max_vlc_eh(gain_sum: f64, limits: &BiasLimits, link: &LinkConstants, eh: &VlcEhParams) -> f64 {
    vlc_harvested_power(limits.i_high, gain_sum, link, eh)
}

/// Light harvested at the smallest admissible bias `(I_L + I_H) / 2`, where
/// the AC swing reaches `(I_H - I_L) / 2`.
pub fn min_vlc_eh(gain_sum: f64, limits: &BiasLimits, link: &LinkConstants, eh: &VlcEhParams) -> f64 {
    vlc_harvested_power(limits.midpoint(), gain_sum, link, eh)
}

/// Outcome of the worst-user RF sub-problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubRfOutcome {
    pub rf_target_worst: f64,
    pub min_vlc_eh: f64,
    pub max_vlc_eh: f64,
    pub feasible: bool,
}

/// RF harvesting granted to the reference user: feasible iff
/// `theta - max EH_vlc <= theta_rf`, and then `min(theta - min EH_vlc, theta_rf)`
/// clamped at zero.
pub fn solve_subrf(
    thresholds: &EhThresholds,
    gain_sum: f64,
    limits: &BiasLimits,
    link: &LinkConstants,
    eh: &VlcEhParams,
) -> SubRfOutcome {
    let min_eh = min_vlc_eh(gain_sum, limits, link, eh);
    let max_eh = max_vlc_eh(gain_sum, limits, link, eh);
    let feasible = thresholds.theta - max_eh <= thresholds.theta_rf;
    let rf = (thresholds.theta - min_eh).min(thresholds.theta_rf).clamp(0.0, thresholds.theta_rf);
    SubRfOutcome {
        rf_target_worst: if feasible { rf } else { thresholds.theta_rf },
        min_vlc_eh: min_eh,
        max_vlc_eh: max_eh,
        feasible,
    }
}

/// Smallest bias in `[(I_L + I_H) / 2, I_H]` whose light harvest reaches
/// `eh_target`, located by bisection to within `tol`. The returned bias always
/// satisfies the target.
pub fn solve_b_bisection(
    eh_target: f64,
    gain_sum: f64,
    limits: &BiasLimits,
    link: &LinkConstants,
    eh: &VlcEhParams,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("bisection tolerance must be positive, got {tol}")));
    }
    let meets = |b: f64| vlc_harvested_power(b, gain_sum, link, eh) >= eh_target;
    let (mut lo, mut hi) = (limits.midpoint(), limits.i_high);
    if meets(lo) {
        return Ok(lo);
    }
    if !meets(hi) {
        return Err(Error::Infeasible(format!(
            "light harvest at full bias {:.6e} W is below the target {eh_target:.6e} W",
            vlc_harvested_power(hi, gain_sum, link, eh)
        )));
    }
    // Invariant: lo misses the target, hi meets it.
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if meets(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Lambert-W approximation of the minimal bias, obtained by replacing
/// `ln(1 + I_G / I_D)` with `ln(I_G / I_D)`, clamped to `[(I_L + I_H) / 2, I_H]`.
/// Since `ln x < ln(1 + x)` the result never undershoots the exact minimum.
pub fn solve_b_closed_form(
    eh_target: f64,
    gain_sum: f64,
    limits: &BiasLimits,
    link: &LinkConstants,
    eh: &VlcEhParams,
) -> f64 {
    let lower = limits.midpoint();
    if !(eh_target > 0.0) {
        return lower;
    }
    if !(gain_sum > 0.0) {
        return limits.i_high;
    }
    let fv0 = eh.fill_factor * eh.thermal_voltage;
    let w = lambert_w0(eh_target / (fv0 * eh.dark_current)).expect("argument is positive");
    let upsilon = eh_target / (3.0 * link.responsivity * link.n_led * link.v_led * fv0 * w * gain_sum);
    upsilon.clamp(lower, limits.i_high)
}

/// AC swing on one served `(o, i, j)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServedSwing {
    pub transmitter: usize,
    pub element: usize,
    pub device: usize,
    pub swing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightwaveSolution {
    pub bias: f64,
    pub ac_swing: Vec<ServedSwing>,
    pub rf_targets: Vec<f64>,
    /// User with the smallest serving gain, i.e. the worst SNR.
    pub worst_user: usize,
    /// User whose harvesting requirement fixed the bias. Differs from
    /// `worst_user` only when the fallback re-selection was triggered.
    pub reference_user: usize,
    pub fallback_triggered: bool,
    pub min_snr: f64,
    pub method: BiasMethod,
}

impl LightwaveSolution {
    pub fn min_snr_db(&self) -> f64 {
        to_db(self.min_snr)
    }

    /// Common AC swing `I_H - B`.
    pub fn swing(&self) -> f64 {
        self.ac_swing.first().map_or(0.0, |s| s.swing)
    }
}

/// Largest shortfall by which a constraint of the solution is violated, W
/// for harvesting and A for currents; `<= 0` means all constraints hold.
pub fn constraint_violation(problem: &LightwaveProblem, thresholds: &EhThresholds, sol: &LightwaveSolution) -> f64 {
    let l = &problem.limits;
    let mut worst = f64::NEG_INFINITY;
    for (j, u) in problem.users.iter().enumerate() {
        let rf = sol.rf_targets[j];
        worst = worst.max(thresholds.theta - (u.harvested(sol.bias, &problem.vlc_eh) + rf));
        worst = worst.max(rf - thresholds.theta_rf);
        worst = worst.max(-rf);
    }
    for s in &sol.ac_swing {
        worst = worst.max(s.swing - (l.i_high - sol.bias));
        worst = worst.max(-s.swing);
    }
    worst = worst.max(l.midpoint() - sol.bias);
    worst.max(sol.bias - l.i_high)
}

/// Bias that the chosen method picks for a user and a light-harvest target.
pub fn bias_for(
    method: BiasMethod,
    eh_target: f64,
    user: &UserLink,
    limits: &BiasLimits,
    eh: &VlcEhParams,
) -> Result<f64> {
    match method {
        BiasMethod::Bisection => solve_b_bisection(eh_target, user.gain_sum, limits, &user.link, eh, DEFAULT_BIAS_TOL),
        BiasMethod::ClosedForm => Ok(solve_b_closed_form(eh_target, user.gain_sum, limits, &user.link, eh)),
    }
}

/// RF targets of every user given the common bias: the reference user keeps
/// its sub-problem value, the others get `theta - EH_vlc(B)` clamped to
/// `[0, theta_rf]`. Also returns the user with the largest unclamped need
/// when it exceeds `theta_rf`.
pub fn rf_targets_for_bias(
    problem: &LightwaveProblem,
    thresholds: &EhThresholds,
    bias: f64,
    reference: usize,
    reference_rf: f64,
) -> (Vec<f64>, Option<usize>) {
    let mut binding: Option<(usize, f64)> = None;
    let targets = problem
        .users
        .iter()
        .enumerate()
        .map(|(j, u)| {
            if j == reference {
                return reference_rf;
            }
            let need = thresholds.theta - u.harvested(bias, &problem.vlc_eh);
            if need > thresholds.theta_rf && binding.is_none_or(|(_, n)| need > n) {
                binding = Some((j, need));
            }
            need.clamp(0.0, thresholds.theta_rf)
        })
        .collect();
    (targets, binding.map(|(j, _)| j))
}

/// Full lightwave allocation for a problem instance.
pub fn solve_lightwave(problem: &LightwaveProblem, thresholds: &EhThresholds, method: BiasMethod) -> Result<LightwaveSolution> {
    if problem.users.is_empty() {
        return Err(Error::Domain("no users to serve".into()));
    }
    let mut reference = problem.worst_user();
    let mut fallback = false;
    // Each re-selection moves to a strictly less-lit user, so this terminates.
    for _ in 0..=problem.users.len() {
        let u = &problem.users[reference];
        let sub = solve_subrf(thresholds, u.gain_sum, &problem.limits, &u.link, &problem.vlc_eh);
        if !sub.feasible {
            return Err(Error::Infeasible(format!(
                "user {reference} harvests at most {:.6e} W from light; theta {:.6e} W exceeds it by more than theta_rf {:.6e} W",
                sub.max_vlc_eh, thresholds.theta, thresholds.theta_rf
            )));
        }
        let target = thresholds.theta - sub.rf_target_worst;
        let bias = bias_for(method, target, u, &problem.limits, &problem.vlc_eh)?;
        let (rf_targets, binding) = rf_targets_for_bias(problem, thresholds, bias, reference, sub.rf_target_worst);
        if let Some(next) = binding {
            reference = next;
            fallback = true;
            continue;
        }
        return Ok(assemble_solution(problem, bias, rf_targets, reference, fallback, method));
    }
    Err(Error::Infeasible("worst-user re-selection did not settle".into()))
}

/// Packs a settled bias and RF allocation into a solution.
pub fn assemble_solution(
    problem: &LightwaveProblem,
    bias: f64,
    rf_targets: Vec<f64>,
    reference_user: usize,
    fallback_triggered: bool,
    method: BiasMethod,
) -> LightwaveSolution {
    let swing = problem.limits.i_high - bias;
    let ac_swing = problem
        .users
        .iter()
        .enumerate()
        .map(|(j, u)| ServedSwing {
            transmitter: u.serving.transmitter,
            element: u.serving.element,
            device: j,
            swing,
        })
        .collect();
    let worst_user = problem.worst_user();
    LightwaveSolution {
        bias,
        ac_swing,
        rf_targets,
        worst_user,
        reference_user,
        fallback_triggered,
        min_snr: problem.snr(worst_user, bias),
        method,
    }
}

/// Builds the problem from a scenario and its channel matrix, then solves it.
pub fn solve_op1(
    scenario: &Scenario,
    matrix: &VlcChannelMatrix,
    thresholds: &EhThresholds,
    method: BiasMethod,
) -> Result<LightwaveSolution> {
    let problem = LightwaveProblem::from_scenario(scenario, matrix)?;
    solve_lightwave(&problem, thresholds, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LINK: LinkConstants = LinkConstants { n_led: 40.0, v_led: 2.25, responsivity: 0.4 };
    const EH: VlcEhParams = VlcEhParams { fill_factor: 0.75, thermal_voltage: 0.025, dark_current: 1e-9 };
    const LIMITS: BiasLimits = BiasLimits { i_low: 0.002, i_high: 0.012 };

    fn user(serving_gain: f64, gain_sum: f64, o: usize) -> UserLink {
        UserLink {
            serving: ServingPair { transmitter: o, element: 0 },
            serving_gain,
            gain_sum,
            link: LINK,
        }
    }

    fn problem(users: Vec<UserLink>) -> LightwaveProblem {
        LightwaveProblem { users, limits: LIMITS, vlc_eh: EH, noise: NoiseParams { noise_power: 1e-15 } }
    }

    #[test]
    fn worst_user_rules() {
        let m = VlcChannelMatrix::from_gains(vec![vec![vec![0.3, 0.1, 0.2]]], 3).unwrap();
        let a = vec![ServingPair { transmitter: 0, element: 0 }; 3];
        assert_eq!(identify_worst_user(&m, &a), 1);
        let m = VlcChannelMatrix::from_gains(vec![vec![vec![0.2, 0.2, 0.2]]], 3).unwrap();
        assert_eq!(identify_worst_user(&m, &a), 0);
    }

    #[test]
    fn min_and_max_vlc_eh() {
        assert_eq!(max_vlc_eh(0.0, &LIMITS, &LINK, &EH), 0.0);
        assert_eq!(min_vlc_eh(0.0, &LIMITS, &LINK, &EH), 0.0);
        assert_relative_eq!(LIMITS.midpoint(), 0.007);
        assert_relative_eq!(LIMITS.max_swing(), 0.005);
        let lo = min_vlc_eh(0.01, &LIMITS, &LINK, &EH);
        let hi = max_vlc_eh(0.01, &LIMITS, &LINK, &EH);
        assert!(lo > 0.0 && hi > lo);
        assert_eq!(lo, vlc_harvested_power(0.007, 0.01, &LINK, &EH));
    }

    fn subrf_with(theta: f64, theta_rf: f64, min_eh: f64, max_eh: f64) -> SubRfOutcome {
        // Same formula as solve_subrf, fed with chosen endpoints.
        let feasible = theta - max_eh <= theta_rf;
        SubRfOutcome {
            rf_target_worst: (theta - min_eh).min(theta_rf).clamp(0.0, theta_rf),
            min_vlc_eh: min_eh,
            max_vlc_eh: max_eh,
            feasible,
        }
    }

    #[test]
    fn subrf_examples() {
        let s = subrf_with(4e-3, 5e-3, 1.2e-3, 3e-3);
        assert!(s.feasible);
        assert_relative_eq!(s.rf_target_worst, 2.8e-3, max_relative = 1e-12);
        // The real routine: theta below min EH gives zero.
        let gs = 0.01;
        let min_eh = min_vlc_eh(gs, &LIMITS, &LINK, &EH);
        let t = EhThresholds::new(0.5 * min_eh, 5e-3).unwrap();
        let s = solve_subrf(&t, gs, &LIMITS, &LINK, &EH);
        assert!(s.feasible);
        assert_eq!(s.rf_target_worst, 0.0);
        let max_eh = max_vlc_eh(gs, &LIMITS, &LINK, &EH);
        let t = EhThresholds::new(max_eh * 1.01, 0.0).unwrap();
        assert!(!solve_subrf(&t, gs, &LIMITS, &LINK, &EH).feasible);
        let t = EhThresholds::new(4e-3, 5e-3).unwrap();
        let s = solve_subrf(&t, gs, &LIMITS, &LINK, &EH);
        assert_relative_eq!(s.rf_target_worst, (4e-3 - min_eh).clamp(0.0, 5e-3));
    }

    #[test]
    fn bisection_endpoints() {
        let gs = 0.01;
        let b = solve_b_bisection(0.0, gs, &LIMITS, &LINK, &EH, 1e-7).unwrap();
        assert_eq!(b, LIMITS.midpoint());
        let top = max_vlc_eh(gs, &LIMITS, &LINK, &EH);
        let b = solve_b_bisection(top, gs, &LIMITS, &LINK, &EH, 1e-7).unwrap();
        assert!((b - LIMITS.i_high).abs() <= 1e-7);
        assert!(matches!(
            solve_b_bisection(top * 1.001, gs, &LIMITS, &LINK, &EH, 1e-7),
            Err(Error::Infeasible(_))
        ));
        assert!(solve_b_bisection(top * 0.5, gs, &LIMITS, &LINK, &EH, 0.0).is_err());
    }

    #[test]
    fn bisection_result_satisfies_target() {
        let gs = 0.02;
        let lo = min_vlc_eh(gs, &LIMITS, &LINK, &EH);
        let hi = max_vlc_eh(gs, &LIMITS, &LINK, &EH);
        for k in 0..=50 {
            let t = lo + (hi - lo) * k as f64 / 50.0;
            let b = solve_b_bisection(t, gs, &LIMITS, &LINK, &EH, 1e-9).unwrap();
            assert!(vlc_harvested_power(b, gs, &LINK, &EH) >= t);
            if b - 1e-9 > LIMITS.midpoint() {
                assert!(vlc_harvested_power(b - 1.01e-9, gs, &LINK, &EH) < t);
            }
        }
    }

    #[test]
    fn closed_form_behaviour() {
        let gs = 0.02;
        assert_eq!(solve_b_closed_form(0.0, gs, &LIMITS, &LINK, &EH), LIMITS.midpoint());
        let lo = min_vlc_eh(gs, &LIMITS, &LINK, &EH);
        let hi = max_vlc_eh(gs, &LIMITS, &LINK, &EH);
        for k in 0..=100 {
            let t = hi * k as f64 / 100.0;
            let bx = solve_b_closed_form(t, gs, &LIMITS, &LINK, &EH);
            assert!(vlc_harvested_power(bx, gs, &LINK, &EH) >= t * (1.0 - 1e-3));
            if t > lo {
                let bs = solve_b_bisection(t, gs, &LIMITS, &LINK, &EH, 1e-9).unwrap();
                assert!(bx >= bs - 1e-4 * (LIMITS.i_high - LIMITS.i_low));
            }
        }
    }

    #[test]
    fn zero_theta_gives_lowest_bias_and_no_rf() {
        let p = problem(vec![user(0.01, 0.02, 0), user(0.006, 0.015, 1)]);
        let t = EhThresholds::new(0.0, 5e-3).unwrap();
        for method in [BiasMethod::Bisection, BiasMethod::ClosedForm] {
            let s = solve_lightwave(&p, &t, method).unwrap();
            assert_eq!(s.bias, LIMITS.midpoint());
            assert!(s.rf_targets.iter().all(|&r| r == 0.0));
            assert_eq!(s.worst_user, 1);
            assert_relative_eq!(s.min_snr, p.snr(1, LIMITS.midpoint()));
        }
    }

    #[test]
    fn pure_vlc_regime() {
        let p = problem(vec![user(0.01, 0.02, 0), user(0.006, 0.015, 1)]);
        let top = max_vlc_eh(0.015, &LIMITS, &LINK, &EH);
        let t = EhThresholds::new(top * 0.999, 0.0).unwrap();
        let s = solve_lightwave(&p, &t, BiasMethod::Bisection).unwrap();
        assert!(s.rf_targets.iter().all(|&r| r == 0.0));
        assert!(constraint_violation(&p, &t, &s) <= 1e-9);
        let t = EhThresholds::new(top * 1.001, 0.0).unwrap();
        assert!(matches!(solve_lightwave(&p, &t, BiasMethod::Bisection), Err(Error::Infeasible(_))));
    }

    #[test]
    fn fallback_when_worst_snr_user_is_not_worst_lit() {
        // User 0 has the weaker serving element but more total light than user 1.
        let p = problem(vec![user(0.004, 0.03, 0), user(0.008, 0.01, 1)]);
        let gs1 = 0.01;
        let t = EhThresholds::new(0.5 * (min_vlc_eh(gs1, &LIMITS, &LINK, &EH) + max_vlc_eh(gs1, &LIMITS, &LINK, &EH)), 0.0)
            .unwrap();
        let s = solve_lightwave(&p, &t, BiasMethod::Bisection).unwrap();
        assert_eq!(s.worst_user, 0);
        assert_eq!(s.reference_user, 1);
        assert!(s.fallback_triggered);
        assert!(constraint_violation(&p, &t, &s) <= 1e-9);
        assert_relative_eq!(s.min_snr, p.snr(0, s.bias));
    }

    #[test]
    fn method_parsing() {
        assert_eq!("bisection".parse::<BiasMethod>().unwrap(), BiasMethod::Bisection);
        assert_eq!("closed-form".parse::<BiasMethod>().unwrap(), BiasMethod::ClosedForm);
        assert!("sca".parse::<BiasMethod>().is_err());
    }

    #[test]
    fn thresholds_validation() {
        assert!(EhThresholds::new(-1.0, 0.0).is_err());
        assert!(EhThresholds::new(1e-3, 7e-3).is_err());
        assert!(EhThresholds::new(1e-3, 6e-3).is_ok());
    }
}
