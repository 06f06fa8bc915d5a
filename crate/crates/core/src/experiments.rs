//! Seeded experiment runners. Each returns an [`ExperimentResult`]: a tidy
//! table with provenance that serializes to CSV or JSON.
//!
//! Column schemas:
//!
//! | experiment | columns |
//! |---|---|
//! | `snr-eh-region` | `user, bias, swing, snr_db, eh_vlc` |
//! | `feasibility` | `theta, theta_rf, feasible, min_snr_db, fallback` |
//! | `eh-allocation` | `user, optimal_rf, eh_max_rf, eh_vlc, saving` |
//! | `rf-power` | `theta_rf, model, allocation, mean_power, mean_power_dbm, trials, failures` |
//! | `subopt-gap` | `theta, feasible, min_snr_optimal_db, min_snr_closed_form_db, gap_db, messages_centralized, messages_semi_decentralized` |
//! | `illuminance` | `x, y, lux` |
//!
//! Every CSV row ends with `scenario_hash, seed`. Powers are in W, currents
//! in A, SNRs in dB; infeasible points carry `nan`.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{json, Map, Value as Json};

use crate::beamforming::{required_power_linear, required_power_nonlinear, BeamformingOptions};
use crate::error::{Error, Result};
use crate::lightwave::{max_vlc_eh, solve_lightwave, BiasMethod, EhThresholds, LightwaveProblem};
use crate::orchestrator::compare_modes;
use crate::output::{fmt_float, to_db, to_dbm};
use crate::scenario::Scenario;

/// Luminous efficacy of the LEDs, lm/W.
pub const DEFAULT_EFFICACY: f64 = 90.0;
/// Bias used for the illuminance map, A.
pub const DEFAULT_ILLUMINATION_BIAS: f64 = 8.5e-3;
/// Illuminance grid spacing, m.
pub const DEFAULT_GRID_RESOLUTION: f64 = 0.1;
/// Office reading threshold, lx.
pub const READING_LUX: f64 = 500.0;
pub const DEFAULT_REGION_POINTS: usize = 201;
pub const DEFAULT_TRIALS: usize = 100;
/// Total harvesting requirement for the allocation and power experiments, W.
pub const DEFAULT_ALLOCATION_THETA: f64 = 4e-3;
/// RF cap for the allocation experiment, W.
pub const DEFAULT_ALLOCATION_THETA_RF: f64 = 5e-3;

/// `0, 0.25, ..., 8` mW.
pub fn default_theta_grid() -> Vec<f64> {
    (0..=32).map(|k| k as f64 * 0.25e-3).collect()
}

/// `{0, 2, 4, 6}` mW.
pub fn default_theta_rf_levels() -> Vec<f64> {
    vec![0.0, 2e-3, 4e-3, 6e-3]
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Flag(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => fmt_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Flag(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Float(v) => json_float(*v),
            Cell::Int(v) => json!(v),
            Cell::Flag(v) => json!(v),
            Cell::Text(v) => json!(v),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Finite values rounded to 12 significant digits; others as strings.
fn json_float(v: f64) -> Json {
    let s = fmt_float(v);
    if v.is_finite() {
        json!(s.parse::<f64>().expect("formatted float parses"))
    } else {
        json!(s)
    }
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A finished experiment table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub name: String,
    /// Parameter grid and fixed settings, already formatted.
    pub parameters: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, f64>,
    pub scenario_hash: String,
    pub seed: u64,
    pub solver_tags: Vec<String>,
}

impl ExperimentResult {
    /// Empty table with provenance taken from `scenario`.
    pub fn new(name: &str, scenario: &Scenario, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            scenario_hash: scenario.hash(),
            seed: scenario.seed,
            solver_tags: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<String>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    /// Appends a row; its length must match the columns.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row length must match the columns");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; non-numeric cells become NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k].as_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = self.columns.iter().map(String::as_str).chain(["scenario_hash", "seed"]);
        w.write_record(header).map_err(csv_err)?;
        let seed = self.seed.to_string();
        for row in &self.rows {
            let cells = row.iter().map(Cell::csv).chain([self.scenario_hash.clone(), seed.clone()]);
            w.write_record(cells).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> Json {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj: Map<String, Json> =
                    self.columns.iter().zip(r).map(|(c, v)| (c.clone(), v.json())).collect();
                obj.insert("scenario_hash".into(), json!(self.scenario_hash));
                obj.insert("seed".into(), json!(self.seed));
                Json::Object(obj)
            })
            .collect();
        let summary: Map<String, Json> = self.summary.iter().map(|(k, v)| (k.clone(), json_float(*v))).collect();
        json!({
            "name": self.name,
            "parameters": self.parameters,
            "provenance": {
                "scenario_hash": self.scenario_hash,
                "seed": self.seed,
                "solver_tags": self.solver_tags,
            },
            "summary": summary,
            "columns": self.columns,
            "rows": rows,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn fmt_grid(values: &[f64]) -> String {
    values.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(" ")
}

fn require_nonempty(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Domain(format!("{what} grid is empty")));
    }
    Ok(())
}

/// Parametric SNR-EH boundary of every user: the bias sweeps
/// `[(I_L + I_H) / 2, I_H]` with swing `I_H - B`.
pub fn exp_snr_eh_region(scenario: &Scenario, points: usize) -> Result<ExperimentResult> {
    if points < 2 {
        return Err(Error::Domain(format!("need at least 2 sweep points, got {points}")));
    }
    let matrix = scenario.vlc_matrix()?;
    let problem = LightwaveProblem::from_scenario(scenario, &matrix)?;
    let l = problem.limits;
    let mut res = ExperimentResult::new("snr-eh-region", scenario, &["user", "bias", "swing", "snr_db", "eh_vlc"]);
    res.param("points", points.to_string());
    for (j, u) in problem.users.iter().enumerate() {
        for k in 0..points {
            let t = k as f64 / (points - 1) as f64;
            let bias = if k + 1 == points { l.i_high } else { l.midpoint() + t * (l.i_high - l.midpoint()) };
            let swing = l.i_high - bias;
            let snr = u.link.snr(u.serving_gain, swing, &problem.noise);
            let eh = u.harvested(bias, &problem.vlc_eh);
            res.push(vec![j.into(), bias.into(), swing.into(), to_db(snr).into(), eh.into()]);
        }
        res.summary
            .insert(format!("max_eh_vlc_user{j}"), max_vlc_eh(u.gain_sum, &l, &u.link, &problem.vlc_eh));
    }
    let w = problem.worst_user();
    let u = &problem.users[w];
    res.summary.insert("worst_user".into(), w as f64);
    res.summary.insert("worst_user_max_eh_vlc".into(), max_vlc_eh(u.gain_sum, &l, &u.link, &problem.vlc_eh));
    Ok(res)
}

/// Feasibility and achieved minimum SNR of the lightwave problem over a
/// `(theta, theta_rf)` grid.
pub fn exp_feasibility_vs_theta(scenario: &Scenario, thetas: &[f64], theta_rfs: &[f64]) -> Result<ExperimentResult> {
    require_nonempty(thetas, "theta")?;
    require_nonempty(theta_rfs, "theta_rf")?;
    let matrix = scenario.vlc_matrix()?;
    let problem = LightwaveProblem::from_scenario(scenario, &matrix)?;
    let mut res = ExperimentResult::new(
        "feasibility",
        scenario,
        &["theta", "theta_rf", "feasible", "min_snr_db", "fallback"],
    );
    res.param("theta", fmt_grid(thetas));
    res.param("theta_rf", fmt_grid(theta_rfs));
    res.solver_tags.push(BiasMethod::Bisection.tag().into());
    for &theta_rf in theta_rfs {
        let mut largest_feasible = f64::NAN;
        for &theta in thetas {
            let t = EhThresholds::new(theta, theta_rf)?;
            match solve_lightwave(&problem, &t, BiasMethod::Bisection) {
                Ok(sol) => {
                    largest_feasible = largest_feasible.max(theta);
                    res.push(vec![
                        theta.into(),
                        theta_rf.into(),
                        true.into(),
                        sol.min_snr_db().into(),
                        sol.fallback_triggered.into(),
                    ]);
                }
                Err(Error::Infeasible(_)) => {
                    res.push(vec![theta.into(), theta_rf.into(), false.into(), f64::NAN.into(), false.into()]);
                }
                Err(e) => return Err(e),
            }
        }
        res.summary.insert(format!("largest_feasible_theta_at_{}", fmt_float(theta_rf)), largest_feasible);
    }
    Ok(res)
}

/// Optimal per-user RF targets against the uniform EH-max allocation.
pub fn exp_eh_allocation(scenario: &Scenario, theta: f64, theta_rf: f64) -> Result<ExperimentResult> {
    let matrix = scenario.vlc_matrix()?;
    let problem = LightwaveProblem::from_scenario(scenario, &matrix)?;
    let t = EhThresholds::new(theta, theta_rf)?;
    let sol = solve_lightwave(&problem, &t, BiasMethod::Bisection)?;
    let mut res = ExperimentResult::new(
        "eh-allocation",
        scenario,
        &["user", "optimal_rf", "eh_max_rf", "eh_vlc", "saving"],
    );
    res.param("theta", fmt_float(theta));
    res.param("theta_rf", fmt_float(theta_rf));
    res.solver_tags.push(BiasMethod::Bisection.tag().into());
    let mut savings = 0.0;
    for (j, u) in problem.users.iter().enumerate() {
        let rf = sol.rf_targets[j];
        savings += theta_rf - rf;
        res.push(vec![
            j.into(),
            rf.into(),
            theta_rf.into(),
            u.harvested(sol.bias, &problem.vlc_eh).into(),
            (theta_rf - rf).into(),
        ]);
    }
    res.summary.insert("savings".into(), savings);
    res.summary.insert("bias".into(), sol.bias);
    res.summary.insert("min_snr_db".into(), sol.min_snr_db());
    res.summary.insert("worst_user".into(), sol.worst_user as f64);
    Ok(res)
}

/// Per-trial totals of one (model, allocation) cell.
#[derive(Debug, Clone, Copy, Default)]
struct PowerTally {
    sum: f64,
    ok: usize,
    failures: usize,
}

impl PowerTally {
    fn record(&mut self, r: Result<f64>) {
        match r {
            Ok(p) => {
                self.sum += p;
                self.ok += 1;
            }
            Err(e) => {
                log::warn!("beamforming failed: {e}");
                self.failures += 1;
            }
        }
    }

    fn mean(&self) -> f64 {
        if self.ok == 0 { f64::NAN } else { self.sum / self.ok as f64 }
    }
}

/// Mean minimum RF transmit power over seeded Rician draws, for the
/// nonlinear and linear harvesters under the optimal and EH-max
/// allocations. Trial `k` uses channel seed `seed ^ k`.
pub fn exp_rf_power(scenario: &Scenario, theta: f64, theta_rfs: &[f64], trials: usize) -> Result<ExperimentResult> {
    require_nonempty(theta_rfs, "theta_rf")?;
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let matrix = scenario.vlc_matrix()?;
    let problem = LightwaveProblem::from_scenario(scenario, &matrix)?;
    let opts = BeamformingOptions::default();
    let channels: Vec<_> = (0..trials).map(|k| scenario.rf_channels(scenario.seed ^ k as u64).g).collect();

    let mut res = ExperimentResult::new(
        "rf-power",
        scenario,
        &["theta_rf", "model", "allocation", "mean_power", "mean_power_dbm", "trials", "failures"],
    );
    res.param("theta", fmt_float(theta));
    res.param("theta_rf", fmt_grid(theta_rfs));
    res.param("trials", trials.to_string());
    res.solver_tags.extend(["bisection".to_string(), "sdp_primal_dual".to_string()]);
    let mut total_failures = 0;
    for &theta_rf in theta_rfs {
        let t = EhThresholds::new(theta, theta_rf)?;
        let optimal = match solve_lightwave(&problem, &t, BiasMethod::Bisection) {
            Ok(sol) => Some(sol.rf_targets),
            Err(Error::Infeasible(msg)) => {
                log::warn!("theta_rf {theta_rf}: lightwave problem infeasible ({msg})");
                None
            }
            Err(e) => return Err(e),
        };
        let eh_max = vec![theta_rf; problem.users.len()];
        for (model, nonlinear) in [("nonlinear", true), ("linear", false)] {
            for (allocation, targets) in [("optimal", optimal.as_ref()), ("eh_max", Some(&eh_max))] {
                let mut tally = PowerTally::default();
                match targets {
                    Some(targets) => {
                        for g in &channels {
                            let r = if nonlinear {
                                required_power_nonlinear(g, targets, &scenario.nonlinear_eh, &opts)
                            } else {
                                required_power_linear(g, targets, &scenario.linear_eh, &opts)
                            };
                            tally.record(r.map(|s| s.total_power));
                        }
                    }
                    None => tally.failures = trials,
                }
                total_failures += tally.failures;
                let mean = tally.mean();
                res.push(vec![
                    theta_rf.into(),
                    model.into(),
                    allocation.into(),
                    mean.into(),
                    to_dbm(mean).into(),
                    trials.into(),
                    tally.failures.into(),
                ]);
            }
        }
    }
    res.summary.insert("failures".into(), total_failures as f64);
    Ok(res)
}

/// Minimum SNR of the optimal (bisection) allocation against the
/// closed-form bias, run through both orchestration modes.
pub fn exp_subopt_gap(scenario: &Scenario, theta_rf: f64, thetas: &[f64]) -> Result<ExperimentResult> {
    let rows = compare_modes(scenario, theta_rf, thetas)?;
    let mut res = ExperimentResult::new(
        "subopt-gap",
        scenario,
        &[
            "theta",
            "feasible",
            "min_snr_optimal_db",
            "min_snr_closed_form_db",
            "gap_db",
            "messages_centralized",
            "messages_semi_decentralized",
        ],
    );
    res.param("theta", fmt_grid(thetas));
    res.param("theta_rf", fmt_float(theta_rf));
    res.solver_tags.extend(["bisection".to_string(), "closed_form".to_string()]);
    let (mut max_gap, mut min_gap) = (f64::NAN, f64::NAN);
    for r in &rows {
        if r.feasible {
            max_gap = max_gap.max(r.gap_db);
            min_gap = min_gap.min(r.gap_db);
        }
        res.push(vec![
            r.theta.into(),
            r.feasible.into(),
            r.min_snr_optimal_db.into(),
            r.min_snr_closed_form_db.into(),
            r.gap_db.into(),
            r.messages_centralized.into(),
            r.messages_semi_decentralized.into(),
        ]);
    }
    res.summary.insert("max_gap_db".into(), max_gap);
    res.summary.insert("min_gap_db".into(), min_gap);
    res.summary.insert("feasible_points".into(), rows.iter().filter(|r| r.feasible).count() as f64);
    Ok(res)
}

/// Illuminance on the receiver plane with every LED at a common bias.
pub fn exp_illuminance(scenario: &Scenario, bias: f64, efficacy: f64, resolution: f64) -> Result<ExperimentResult> {
    let map = scenario.illuminance_map(bias, efficacy, resolution)?;
    let mut res = ExperimentResult::new("illuminance", scenario, &["x", "y", "lux"]);
    res.param("bias", fmt_float(bias));
    res.param("efficacy", fmt_float(efficacy));
    res.param("resolution", fmt_float(resolution));
    for (iy, y) in map.ys.iter().enumerate() {
        for (ix, x) in map.xs.iter().enumerate() {
            res.push(vec![(*x).into(), (*y).into(), map.lux[iy][ix].into()]);
        }
    }
    let center = scenario.illuminance_at(bias, efficacy, scenario.room.center());
    res.summary.insert("center_lux".into(), center);
    res.summary.insert("max_lux".into(), map.max());
    res.summary.insert("fraction_above_500_lux".into(), map.fraction_above(READING_LUX));
    Ok(res)
}
