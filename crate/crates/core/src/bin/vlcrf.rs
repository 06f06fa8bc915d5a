use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vlcrf::experiments::{self, ExperimentResult, Format};
use vlcrf::lightwave::{BiasMethod, EhThresholds, LightwaveProblem};
use vlcrf::orchestrator::{run_centralized, run_semi_decentralized};
use vlcrf::output::{fmt_float, to_db};
use vlcrf::scenario::{load_scenario_str, parse_current, parse_power, PAPER_SCENARIO_TOML};
use vlcrf::{Error, Scenario};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_SOLVER: u8 = 4;

/// Hybrid RF/VLC resource allocation: scenarios, solves and experiments.
#[derive(Parser)]
#[command(name = "vlcrf", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file; the bundled office scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Writes results into this directory instead of stdout.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Scenario file operations.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Channel exports.
    Channels {
        #[command(subcommand)]
        action: ChannelsAction,
    },
    /// Lightwave allocation followed by RF beamforming for one threshold pair.
    Solve {
        /// Total harvesting requirement, e.g. "2 mW".
        #[arg(long)]
        theta: String,
        /// Per-user RF harvesting cap, e.g. "4 mW".
        #[arg(long)]
        theta_rf: String,
        /// bisection, closed_form or semi_decentralized.
        #[arg(long, default_value = "bisection")]
        method: String,
    },
    /// Experiment runners.
    Exp {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    /// Parses and validates the scenario, printing a summary.
    Validate,
}

#[derive(Subcommand)]
enum ChannelsAction {
    /// VLC gains as (o, i, j, h) and RF channels as (j, m, re, im).
    Dump,
}

#[derive(Subcommand)]
enum Experiment {
    /// Per-user SNR against light harvest along the bias sweep.
    SnrEhRegion {
        #[arg(long, default_value_t = experiments::DEFAULT_REGION_POINTS)]
        points: usize,
    },
    /// Feasibility and minimum SNR over theta and theta_rf grids.
    Feasibility {
        /// Comma list or start:step:stop, e.g. "0:0.25mW:8mW".
        #[arg(long)]
        theta_grid: Option<String>,
        #[arg(long)]
        theta_rf_levels: Option<String>,
    },
    /// Optimal RF targets against the EH-max allocation.
    EhAllocation {
        #[arg(long, default_value = "4 mW")]
        theta: String,
        #[arg(long, default_value = "5 mW")]
        theta_rf: String,
    },
    /// Mean RF transmit power per harvester model and allocation.
    RfPower {
        #[arg(long, default_value = "4 mW")]
        theta: String,
        #[arg(long)]
        theta_rf_levels: Option<String>,
        #[arg(long, default_value_t = experiments::DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Closed-form bias against the bisection optimum.
    SuboptGap {
        #[arg(long, default_value = "0")]
        theta_rf: String,
        #[arg(long)]
        theta_grid: Option<String>,
    },
    /// Illuminance map on the receiver plane.
    Illuminance {
        #[arg(long, default_value = "8.5 mA")]
        bias: String,
        /// lm/W.
        #[arg(long, default_value_t = experiments::DEFAULT_EFFICACY)]
        efficacy: f64,
        /// Grid spacing, m.
        #[arg(long, default_value_t = experiments::DEFAULT_GRID_RESOLUTION)]
        resolution: f64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Validation(_) | Error::Domain(_) | Error::DimensionMismatch { .. } => EXIT_CONFIG,
        Error::Infeasible(_) | Error::TargetUnreachable { .. } | Error::UnservableDevice { .. } => EXIT_INFEASIBLE,
        Error::SolverStall { .. } => EXIT_SOLVER,
        Error::Io(_) => EXIT_FAILURE,
    }
}

fn load(common: &Common) -> vlcrf::Result<Scenario> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        None => PAPER_SCENARIO_TOML.to_string(),
    };
    let (mut scenario, _) = load_scenario_str(&text)?;
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

/// Comma-separated powers, or `start:step:stop` inclusive.
fn parse_grid(text: &str) -> vlcrf::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (a, h, b) = (parse_power(start)?, parse_power(step)?, parse_power(stop)?);
            if !(h > 0.0 && b >= a) {
                return Err(Error::Config(format!("bad range '{text}'")));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| a + k as f64 * h).collect())
        }
        [_] => text.split(',').map(|s| parse_power(s.trim())).collect(),
        _ => Err(Error::Config(format!("bad grid '{text}'"))),
    }
}

fn grid_or(text: &Option<String>, default: fn() -> Vec<f64>) -> vlcrf::Result<Vec<f64>> {
    text.as_deref().map_or_else(|| Ok(default()), parse_grid)
}

fn emit(out_dir: Option<&Path>, format: Format, result: &ExperimentResult) -> vlcrf::Result<()> {
    let body = result.render(format);
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.{}", result.name, format.extension()));
            std::fs::write(&path, body)?;
            log::info!("wrote {}", path.display());
        }
        None => print!("{body}"),
    }
    if format == Format::Csv {
        for (k, v) in &result.summary {
            eprintln!("{k} = {}", fmt_float(*v));
        }
    }
    Ok(())
}

fn validate(scenario: &Scenario) -> vlcrf::Result<()> {
    let elements: usize = scenario.transmitters.iter().map(|t| t.elements.len()).sum();
    println!("scenario ok");
    println!("hash: {}", scenario.hash());
    println!("seed: {}", scenario.seed);
    println!("transmitters: {} ({elements} elements)", scenario.transmitters.len());
    println!("devices: {}", scenario.devices.len());
    println!("ap antennas: {}", scenario.ap.antennas);
    Ok(())
}

fn dump_channels(scenario: &Scenario, common: &Common, format: Format) -> vlcrf::Result<()> {
    let matrix = scenario.vlc_matrix()?;
    let mut vlc = ExperimentResult::new("channels_vlc", scenario, &["o", "i", "j", "h"]);
    for (o, i, j, h) in matrix.entries() {
        vlc.push(vec![o.into(), i.into(), j.into(), h.into()]);
    }
    let mut rf = ExperimentResult::new("channels_rf", scenario, &["j", "m", "re", "im"]);
    for (j, g) in scenario.rf_channels(scenario.seed).g.iter().enumerate() {
        for (m, z) in g.iter().enumerate() {
            rf.push(vec![j.into(), m.into(), z.re.into(), z.im.into()]);
        }
    }
    emit(common.out_dir.as_deref(), format, &vlc)?;
    emit(common.out_dir.as_deref(), format, &rf)
}

fn solve(scenario: &Scenario, common: &Common, format: Format, theta: &str, theta_rf: &str, method: &str) -> vlcrf::Result<()> {
    let t = EhThresholds::new(parse_power(theta)?, parse_power(theta_rf)?)?;
    let outcome = match method {
        "semi_decentralized" | "semi-decentralized" => run_semi_decentralized(scenario, &t)?,
        m => run_centralized(scenario, &t, m.parse::<BiasMethod>()?)?,
    };
    let lw = &outcome.lightwave;
    let bf = &outcome.beamforming;
    let matrix = scenario.vlc_matrix()?;
    let mut res = ExperimentResult::new(
        "solve",
        scenario,
        &["user", "transmitter", "element", "swing", "snr_db", "eh_vlc", "rf_target", "rf_input"],
    );
    res.param("theta", fmt_float(t.theta));
    res.param("theta_rf", fmt_float(t.theta_rf));
    res.param("method", method);
    res.solver_tags.extend([lw.method.tag().to_string(), "sdp_primal_dual".to_string()]);
    let problem = LightwaveProblem::from_scenario(scenario, &matrix)?;
    for (j, s) in lw.ac_swing.iter().enumerate() {
        let u = &problem.users[j];
        res.push(vec![
            j.into(),
            s.transmitter.into(),
            s.element.into(),
            s.swing.into(),
            to_db(problem.snr(j, lw.bias)).into(),
            u.harvested(lw.bias, &problem.vlc_eh).into(),
            lw.rf_targets[j].into(),
            bf.delivered.get(j).copied().unwrap_or(0.0).into(),
        ]);
    }
    res.summary.insert("bias".into(), lw.bias);
    res.summary.insert("min_snr_db".into(), lw.min_snr_db());
    res.summary.insert("worst_user".into(), lw.worst_user as f64);
    res.summary.insert("fallback".into(), if lw.fallback_triggered { 1.0 } else { 0.0 });
    res.summary.insert("total_power".into(), bf.total_power);
    res.summary.insert("total_power_dbm".into(), bf.total_power_dbm());
    res.summary.insert("rank_one_ratio".into(), bf.rank_one_ratio);
    res.summary.insert("messages".into(), outcome.trace.messages.len() as f64);
    if let Some(dir) = &common.out_dir {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join("trace.jsonl"))?;
        outcome.trace.write_jsonl(&mut f)?;
    }
    emit(common.out_dir.as_deref(), format, &res)
}

fn run(cli: Cli) -> vlcrf::Result<()> {
    let format: Format = cli.common.format.parse()?;
    let scenario = load(&cli.common)?;
    let out = cli.common.out_dir.as_deref();
    match &cli.command {
        Command::Scenario { action: ScenarioAction::Validate } => validate(&scenario),
        Command::Channels { action: ChannelsAction::Dump } => dump_channels(&scenario, &cli.common, format),
        Command::Solve { theta, theta_rf, method } => solve(&scenario, &cli.common, format, theta, theta_rf, method),
        Command::Exp { experiment } => {
            let result = match experiment {
                Experiment::SnrEhRegion { points } => experiments::exp_snr_eh_region(&scenario, *points)?,
                Experiment::Feasibility { theta_grid, theta_rf_levels } => experiments::exp_feasibility_vs_theta(
                    &scenario,
                    &grid_or(theta_grid, experiments::default_theta_grid)?,
                    &grid_or(theta_rf_levels, experiments::default_theta_rf_levels)?,
                )?,
                Experiment::EhAllocation { theta, theta_rf } => {
                    experiments::exp_eh_allocation(&scenario, parse_power(theta)?, parse_power(theta_rf)?)?
                }
                Experiment::RfPower { theta, theta_rf_levels, trials } => experiments::exp_rf_power(
                    &scenario,
                    parse_power(theta)?,
                    &grid_or(theta_rf_levels, experiments::default_theta_rf_levels)?,
                    *trials,
                )?,
                Experiment::SuboptGap { theta_rf, theta_grid } => experiments::exp_subopt_gap(
                    &scenario,
                    parse_power(theta_rf)?,
                    &grid_or(theta_grid, experiments::default_theta_grid)?,
                )?,
                Experiment::Illuminance { bias, efficacy, resolution } => {
                    experiments::exp_illuminance(&scenario, parse_current(bias)?, *efficacy, *resolution)?
                }
            };
            emit(out, format, &result)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
