//! End-to-end allocation as a message-passing simulation between devices,
//! optical transmitters, the central unit and the RF access point.
//!
//! In the centralized architecture every device uploads its full column of
//! VLC gains and the central unit solves the whole lightwave problem. In the
//! semi-decentralized one devices only report their serving gain and total
//! gain; the central unit settles the worst user's RF share and each
//! transmitter computes the bias itself with the closed form.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::beamforming::{required_power_nonlinear, BeamformingOptions, BeamformingSolution};
use crate::channel::{assign_serving_elements, ServingPair, VlcChannelMatrix};
use crate::error::{Error, Result};
use crate::lightwave::{
    assemble_solution, rf_targets_for_bias, solve_b_closed_form, solve_lightwave, solve_subrf, BiasMethod,
    EhThresholds, LightwaveProblem, LightwaveSolution, UserLink,
};
use crate::models::{BiasLimits, LinkConstants, NoiseParams, NonlinearEhParams, VlcEhParams};
use crate::output::to_db;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Actor {
    CentralUnit,
    AccessPoint,
    Transmitter(usize),
    Device(usize),
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Actor::CentralUnit => write!(f, "central"),
            Actor::AccessPoint => write!(f, "ap"),
            Actor::Transmitter(o) => write!(f, "tx{o}"),
            Actor::Device(j) => write!(f, "dev{j}"),
        }
    }
}

impl FromStr for Actor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let index = |rest: &str| rest.parse::<usize>().map_err(|_| Error::Validation(format!("bad actor '{s}'")));
        match s {
            "central" => Ok(Actor::CentralUnit),
            "ap" => Ok(Actor::AccessPoint),
            _ if s.starts_with("tx") => Ok(Actor::Transmitter(index(&s[2..])?)),
            _ if s.starts_with("dev") => Ok(Actor::Device(index(&s[3..])?)),
            _ => Err(Error::Validation(format!("bad actor '{s}'"))),
        }
    }
}

impl Serialize for Actor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Actor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum MessageKind {
    /// One VLC gain `h_{oi,j}` measured by device `j`.
    ChannelReport { o: usize, i: usize, j: usize, h: f64 },
    /// A device's serving element and gain plus its gain summed over all elements.
    GainSummary { device: usize, transmitter: usize, element: usize, serving_gain: f64, gain_sum: f64 },
    /// The reference user's RF share and total gain.
    WorstUserInfo { device: usize, rf_target: f64, gain_sum: f64 },
    BiasBroadcast { bias: f64, swing: f64 },
    /// Bias computed locally by a transmitter.
    BiasReport { bias: f64 },
    /// Harvested-power targets each device must obtain from RF.
    RfEhTargets { targets: Vec<f64> },
}

impl MessageKind {
    pub fn name(&self) -> &'static str {
        match self {
            MessageKind::ChannelReport { .. } => "ChannelReport",
            MessageKind::GainSummary { .. } => "GainSummary",
            MessageKind::WorstUserInfo { .. } => "WorstUserInfo",
            MessageKind::BiasBroadcast { .. } => "BiasBroadcast",
            MessageKind::BiasReport { .. } => "BiasReport",
            MessageKind::RfEhTargets { .. } => "RfEhTargets",
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            MessageKind::ChannelReport { h, .. } => h.is_finite(),
            MessageKind::GainSummary { serving_gain, gain_sum, .. } => serving_gain.is_finite() && gain_sum.is_finite(),
            MessageKind::WorstUserInfo { rf_target, gain_sum, .. } => rf_target.is_finite() && gain_sum.is_finite(),
            MessageKind::BiasBroadcast { bias, swing } => bias.is_finite() && swing.is_finite(),
            MessageKind::BiasReport { bias } => bias.is_finite(),
            MessageKind::RfEhTargets { targets } => targets.iter().all(|t| t.is_finite()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlMessage {
    pub sequence: u64,
    pub sender: Actor,
    pub receiver: Actor,
    #[serde(flatten)]
    pub kind: MessageKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Centralized,
    SemiDecentralized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLog {
    pub mode: Mode,
    pub messages: Vec<ControlMessage>,
}

impl TraceLog {
    pub fn count(&self, kind: &str) -> usize {
        self.messages.iter().filter(|m| m.kind.name() == kind).count()
    }

    /// One JSON record per line.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for m in &self.messages {
            serde_json::to_writer(&mut out, m).map_err(|e| Error::Io(e.into()))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn read_jsonl(mode: Mode, input: impl BufRead) -> Result<Self> {
        let mut messages = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let m: ControlMessage = serde_json::from_str(&line)
                .map_err(|e| Error::Validation(format!("trace line {}: {e}", n + 1)))?;
            messages.push(m);
        }
        Ok(Self { mode, messages })
    }
}

/// Result of one end-to-end run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub lightwave: LightwaveSolution,
    pub beamforming: BeamformingSolution,
    pub trace: TraceLog,
    /// Bias each transmitter ended up applying.
    pub transmitter_biases: Vec<f64>,
}

/// Static configuration the central unit and transmitters are provisioned with.
#[derive(Debug, Clone)]
struct Provisioning {
    thresholds: EhThresholds,
    limits: BiasLimits,
    vlc_eh: VlcEhParams,
    noise: NoiseParams,
    links: Vec<LinkConstants>,
    /// Element count of every transmitter.
    layout: Vec<usize>,
}

type Outbox = Vec<(Actor, MessageKind)>;

struct DeviceNode {
    index: usize,
    /// Gains `h_{oi}` measured from every element.
    gains: Vec<Vec<f64>>,
}

impl DeviceNode {
    fn initial(&self, mode: Mode) -> Result<Outbox> {
        match mode {
            Mode::Centralized => Ok(self
                .gains
                .iter()
                .enumerate()
                .flat_map(|(o, row)| row.iter().enumerate().map(move |(i, &h)| (o, i, h)))
                .map(|(o, i, h)| (Actor::CentralUnit, MessageKind::ChannelReport { o, i, j: self.index, h }))
                .collect()),
            Mode::SemiDecentralized => {
                let own = VlcChannelMatrix::from_gains(
                    self.gains.iter().map(|row| row.iter().map(|&h| vec![h]).collect()).collect(),
                    1,
                )?;
                let serving = assign_serving_elements(&own).map_err(|_| Error::UnservableDevice { device: self.index })?[0];
                Ok(vec![(
                    Actor::CentralUnit,
                    MessageKind::GainSummary {
                        device: self.index,
                        transmitter: serving.transmitter,
                        element: serving.element,
                        serving_gain: own.at(serving, 0),
                        gain_sum: own.gain_sum(0),
                    },
                )])
            }
        }
    }
}

struct TransmitterNode {
    prov: Provisioning,
    bias: Option<f64>,
}

impl TransmitterNode {
    fn handle(&mut self, index: usize, msg: &MessageKind) -> Result<Outbox> {
        match *msg {
            MessageKind::BiasBroadcast { bias, .. } => {
                self.bias = Some(bias);
                Ok(Vec::new())
            }
            MessageKind::WorstUserInfo { device, rf_target, gain_sum } => {
                let link = self
                    .prov
                    .links
                    .get(device)
                    .ok_or_else(|| Error::Validation(format!("no device {device}")))?;
                let target = self.prov.thresholds.theta - rf_target;
                let bias = solve_b_closed_form(target, gain_sum, &self.prov.limits, link, &self.prov.vlc_eh);
                self.bias = Some(bias);
                Ok(if index == REPORTING_TRANSMITTER {
                    vec![(Actor::CentralUnit, MessageKind::BiasReport { bias })]
                } else {
                    Vec::new()
                })
            }
            ref other => Err(Error::Validation(format!("transmitter cannot handle {}", other.name()))),
        }
    }
}

/// Transmitter that reports its locally computed bias back to the central unit.
pub const REPORTING_TRANSMITTER: usize = 0;

/// Reference-user round of the semi-decentralized scheme.
struct Round {
    reference: usize,
    rf_reference: f64,
    fallback: bool,
    count: usize,
}

struct CentralNode {
    prov: Provisioning,
    method: BiasMethod,
    reports: Vec<Vec<Vec<Option<f64>>>>,
    missing: usize,
    summaries: Vec<Option<UserLink>>,
    problem: Option<LightwaveProblem>,
    round: Option<Round>,
    solution: Option<LightwaveSolution>,
}

impl CentralNode {
    fn new(prov: Provisioning, method: BiasMethod) -> Self {
        let devices = prov.links.len();
        let reports = prov.layout.iter().map(|&m| vec![vec![None; devices]; m]).collect();
        let missing = prov.layout.iter().sum::<usize>() * devices;
        Self { prov, method, reports, missing, summaries: vec![None; devices], problem: None, round: None, solution: None }
    }

    fn handle(&mut self, msg: &MessageKind) -> Result<Outbox> {
        match *msg {
            MessageKind::ChannelReport { o, i, j, h } => {
                let slot = self
                    .reports
                    .get_mut(o)
                    .and_then(|r| r.get_mut(i))
                    .and_then(|r| r.get_mut(j))
                    .ok_or_else(|| Error::Validation(format!("channel report ({o}, {i}, {j}) is out of range")))?;
                if slot.replace(h).is_none() {
                    self.missing -= 1;
                }
                if self.missing == 0 { self.solve_centralized() } else { Ok(Vec::new()) }
            }
            MessageKind::GainSummary { device, transmitter, element, serving_gain, gain_sum } => {
                let link = *self.prov.links.get(device).ok_or_else(|| Error::Validation(format!("no device {device}")))?;
                self.summaries[device] = Some(UserLink {
                    serving: ServingPair { transmitter, element },
                    serving_gain,
                    gain_sum,
                    link,
                });
                if self.summaries.iter().all(Option::is_some) {
                    let problem = LightwaveProblem {
                        users: self.summaries.iter().map(|u| u.expect("all present")).collect(),
                        limits: self.prov.limits,
                        vlc_eh: self.prov.vlc_eh,
                        noise: self.prov.noise,
                    };
                    let worst = problem.worst_user();
                    self.problem = Some(problem);
                    self.start_round(worst, false, 0)
                } else {
                    Ok(Vec::new())
                }
            }
            MessageKind::BiasReport { bias } => self.settle_round(bias),
            ref other => Err(Error::Validation(format!("central unit cannot handle {}", other.name()))),
        }
    }

    fn solve_centralized(&mut self) -> Result<Outbox> {
        let gains = self
            .reports
            .iter()
            .map(|tx| tx.iter().map(|el| el.iter().map(|h| h.expect("all reported")).collect()).collect())
            .collect();
        let matrix = VlcChannelMatrix::from_gains(gains, self.prov.links.len())?;
        let problem =
            LightwaveProblem::from_matrix(&matrix, &self.prov.links, self.prov.limits, self.prov.vlc_eh, self.prov.noise)?;
        let sol = solve_lightwave(&problem, &self.prov.thresholds, self.method)?;
        let mut out: Outbox = (0..self.prov.layout.len())
            .map(|o| (Actor::Transmitter(o), MessageKind::BiasBroadcast { bias: sol.bias, swing: sol.swing() }))
            .collect();
        out.push((Actor::AccessPoint, MessageKind::RfEhTargets { targets: sol.rf_targets.clone() }));
        self.problem = Some(problem);
        self.solution = Some(sol);
        Ok(out)
    }

    fn start_round(&mut self, reference: usize, fallback: bool, count: usize) -> Result<Outbox> {
        let problem = self.problem.as_ref().expect("summaries collected");
        let t = &self.prov.thresholds;
        let u = &problem.users[reference];
        let sub = solve_subrf(t, u.gain_sum, &problem.limits, &u.link, &problem.vlc_eh);
        if !sub.feasible {
            return Err(Error::Infeasible(format!(
                "user {reference} harvests at most {:.6e} W from light; theta {:.6e} W exceeds it by more than theta_rf {:.6e} W",
                sub.max_vlc_eh, t.theta, t.theta_rf
            )));
        }
        let info = MessageKind::WorstUserInfo { device: reference, rf_target: sub.rf_target_worst, gain_sum: u.gain_sum };
        self.round = Some(Round { reference, rf_reference: sub.rf_target_worst, fallback, count });
        Ok((0..self.prov.layout.len()).map(|o| (Actor::Transmitter(o), info.clone())).collect())
    }

    fn settle_round(&mut self, bias: f64) -> Result<Outbox> {
        let problem = self.problem.as_ref().ok_or_else(|| Error::Validation("bias report before gain summaries".into()))?;
        let round = self.round.take().ok_or_else(|| Error::Validation("bias report outside a round".into()))?;
        let (rf_targets, binding) =
            rf_targets_for_bias(problem, &self.prov.thresholds, bias, round.reference, round.rf_reference);
        if let Some(next) = binding {
            if round.count >= problem.users.len() {
                return Err(Error::Infeasible("worst-user re-selection did not settle".into()));
            }
            return self.start_round(next, true, round.count + 1);
        }
        let sol = assemble_solution(problem, bias, rf_targets, round.reference, round.fallback, BiasMethod::ClosedForm);
        let out = vec![(Actor::AccessPoint, MessageKind::RfEhTargets { targets: sol.rf_targets.clone() })];
        self.solution = Some(sol);
        Ok(out)
    }
}

struct AccessPointNode {
    channels: Vec<Vec<Complex64>>,
    eh: NonlinearEhParams,
    opts: BeamformingOptions,
    result: Option<BeamformingSolution>,
}

impl AccessPointNode {
    fn handle(&mut self, msg: &MessageKind) -> Result<Outbox> {
        match msg {
            MessageKind::RfEhTargets { targets } => {
                self.result = Some(required_power_nonlinear(&self.channels, targets, &self.eh, &self.opts)?);
                Ok(Vec::new())
            }
            other => Err(Error::Validation(format!("access point cannot handle {}", other.name()))),
        }
    }
}

/// All actors, each built from only the inputs it is entitled to.
struct Network {
    mode: Mode,
    devices: Vec<DeviceNode>,
    transmitters: Vec<TransmitterNode>,
    central: CentralNode,
    ap: AccessPointNode,
}

impl Network {
    fn new(scenario: &Scenario, thresholds: &EhThresholds, mode: Mode, method: BiasMethod, opts: BeamformingOptions) -> Result<Self> {
        let matrix = scenario.vlc_matrix()?;
        let devices = (0..matrix.num_devices())
            .map(|j| DeviceNode {
                index: j,
                gains: (0..matrix.num_transmitters())
                    .map(|o| (0..matrix.num_elements(o)).map(|i| matrix.get(o, i, j)).collect())
                    .collect(),
            })
            .collect();
        let prov = Provisioning {
            thresholds: *thresholds,
            limits: scenario.bias_limits,
            vlc_eh: scenario.vlc_eh,
            noise: scenario.noise,
            links: (0..scenario.devices.len()).map(|j| scenario.link_constants(j)).collect(),
            layout: scenario.transmitters.iter().map(|t| t.elements.len()).collect(),
        };
        let transmitters = (0..prov.layout.len()).map(|_| TransmitterNode { prov: prov.clone(), bias: None }).collect();
        let method = match mode {
            Mode::Centralized => method,
            Mode::SemiDecentralized => BiasMethod::ClosedForm,
        };
        Ok(Self {
            mode,
            devices,
            transmitters,
            central: CentralNode::new(prov, method),
            ap: AccessPointNode {
                channels: scenario.rf_channels(scenario.seed).g,
                eh: scenario.nonlinear_eh,
                opts,
                result: None,
            },
        })
    }

    fn deliver(&mut self, msg: &ControlMessage) -> Result<Outbox> {
        if !msg.kind.is_finite() {
            return Err(Error::Validation(format!("message {} carries a non-finite payload", msg.sequence)));
        }
        match msg.receiver {
            Actor::CentralUnit => self.central.handle(&msg.kind),
            Actor::AccessPoint => self.ap.handle(&msg.kind),
            Actor::Transmitter(o) => self
                .transmitters
                .get_mut(o)
                .ok_or_else(|| Error::Validation(format!("no transmitter {o}")))?
                .handle(o, &msg.kind),
            Actor::Device(j) => Err(Error::Validation(format!("device {j} receives no control messages"))),
        }
    }

    fn outcome(self, trace: TraceLog) -> Result<RunOutcome> {
        let lightwave = self.central.solution.ok_or_else(|| Error::Validation("run ended without a lightwave decision".into()))?;
        let beamforming = self.ap.result.ok_or_else(|| Error::Validation("run ended without RF targets".into()))?;
        let transmitter_biases = self
            .transmitters
            .iter()
            .enumerate()
            .map(|(o, t)| t.bias.ok_or_else(|| Error::Validation(format!("transmitter {o} never set its bias"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(RunOutcome { lightwave, beamforming, trace, transmitter_biases })
    }
}

/// Runs the deterministic FIFO scheduler from the devices' opening messages.
fn simulate(mut net: Network) -> Result<RunOutcome> {
    let mut queue: VecDeque<ControlMessage> = VecDeque::new();
    let mut sequence = 0u64;
    let mut push = |queue: &mut VecDeque<ControlMessage>, sender: Actor, out: Outbox| {
        for (receiver, kind) in out {
            queue.push_back(ControlMessage { sequence, sender, receiver, kind });
            sequence += 1;
        }
    };
    for d in &net.devices {
        let out = d.initial(net.mode)?;
        push(&mut queue, Actor::Device(d.index), out);
    }
    let mut messages = Vec::new();
    while let Some(msg) = queue.pop_front() {
        let out = net.deliver(&msg)?;
        push(&mut queue, msg.receiver, out);
        messages.push(msg);
    }
    let mode = net.mode;
    net.outcome(TraceLog { mode, messages })
}

/// Centralized architecture: full channel upload, central lightwave solve,
/// bias broadcast and RF targets to the access point.
pub fn run_centralized(scenario: &Scenario, thresholds: &EhThresholds, method: BiasMethod) -> Result<RunOutcome> {
    simulate(Network::new(scenario, thresholds, Mode::Centralized, method, BeamformingOptions::default())?)
}

/// Semi-decentralized architecture: gain summaries up, the worst user's RF
/// share down, the bias computed at each transmitter.
pub fn run_semi_decentralized(scenario: &Scenario, thresholds: &EhThresholds) -> Result<RunOutcome> {
    simulate(Network::new(scenario, thresholds, Mode::SemiDecentralized, BiasMethod::ClosedForm, BeamformingOptions::default())?)
}

/// Feeds a recorded trace to freshly provisioned actors. Device messages are
/// taken from the trace; every other message must match what the actors
/// emit in response. Returns the resulting decisions.
pub fn replay(scenario: &Scenario, thresholds: &EhThresholds, method: BiasMethod, trace: &TraceLog) -> Result<RunOutcome> {
    let mut net = Network::new(scenario, thresholds, trace.mode, method, BeamformingOptions::default())?;
    let mut pending: VecDeque<(Actor, Actor, MessageKind)> = VecDeque::new();
    let mut last: Option<u64> = None;
    for msg in &trace.messages {
        if last.is_some_and(|s| msg.sequence <= s) {
            return Err(Error::Validation(format!("trace sequence is not increasing at {}", msg.sequence)));
        }
        last = Some(msg.sequence);
        if !matches!(msg.sender, Actor::Device(_)) {
            let expected = pending
                .pop_front()
                .ok_or_else(|| Error::Validation(format!("message {} was never emitted", msg.sequence)))?;
            if expected != (msg.sender, msg.receiver, msg.kind.clone()) {
                return Err(Error::Validation(format!("trace diverges at message {}", msg.sequence)));
            }
        }
        let out = net.deliver(msg)?;
        pending.extend(out.into_iter().map(|(r, k)| (msg.receiver, r, k)));
    }
    if let Some((s, r, k)) = pending.front() {
        return Err(Error::Validation(format!("trace is missing {} from {s} to {r}", k.name())));
    }
    net.outcome(trace.clone())
}

/// One θ point of the architecture comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub theta: f64,
    pub feasible: bool,
    pub min_snr_optimal_db: f64,
    pub min_snr_closed_form_db: f64,
    /// Optimal minus closed-form minimum SNR, dB.
    pub gap_db: f64,
    pub messages_centralized: usize,
    pub messages_semi_decentralized: usize,
}

/// Optimal (centralized, bisection) against semi-decentralized (closed form)
/// minimum SNR over a θ grid. Infeasible points are flagged, not errors.
pub fn compare_modes(scenario: &Scenario, theta_rf: f64, thetas: &[f64]) -> Result<Vec<ModeComparison>> {
    if thetas.is_empty() {
        return Err(Error::Domain("theta grid is empty".into()));
    }
    thetas
        .iter()
        .map(|&theta| {
            let t = EhThresholds::new(theta, theta_rf)?;
            let opt = run_centralized(scenario, &t, BiasMethod::Bisection);
            let semi = run_semi_decentralized(scenario, &t);
            match (opt, semi) {
                (Ok(a), Ok(b)) => {
                    let (x, y) = (to_db(a.lightwave.min_snr), to_db(b.lightwave.min_snr));
                    Ok(ModeComparison {
                        theta,
                        feasible: true,
                        min_snr_optimal_db: x,
                        min_snr_closed_form_db: y,
                        gap_db: x - y,
                        messages_centralized: a.trace.messages.len(),
                        messages_semi_decentralized: b.trace.messages.len(),
                    })
                }
                (Err(Error::Infeasible(_)), _) | (_, Err(Error::Infeasible(_))) => Ok(ModeComparison {
                    theta,
                    feasible: false,
                    min_snr_optimal_db: f64::NAN,
                    min_snr_closed_form_db: f64::NAN,
                    gap_db: f64::NAN,
                    messages_centralized: 0,
                    messages_semi_decentralized: 0,
                }),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        })
        .collect()
}
