//! Both control architectures on the same scenario: message counts, the
//! decisions they reach, and a replay of the recorded semi-decentralized trace.

use vlcrf::lightwave::{BiasMethod, EhThresholds};
use vlcrf::orchestrator::{replay, run_centralized, run_semi_decentralized, TraceLog};
use vlcrf::Scenario;

fn main() -> vlcrf::Result<()> {
    let scenario = Scenario::paper_default();
    let thresholds = EhThresholds::new(9.5e-3, 3e-3)?;
    let central = run_centralized(&scenario, &thresholds, BiasMethod::ClosedForm)?;
    let semi = run_semi_decentralized(&scenario, &thresholds)?;

    for (label, run) in [("centralized", &central), ("semi-decentralized", &semi)] {
        println!(
            "{label}: {} messages ({} channel reports), bias {:.9} mA, RF power {:.4e} W",
            run.trace.messages.len(),
            run.trace.count("ChannelReport"),
            run.lightwave.bias * 1e3,
            run.beamforming.total_power
        );
    }
    assert_eq!(central.lightwave.rf_targets, semi.lightwave.rf_targets);

    let jsonl = semi.trace.to_jsonl();
    println!("\nsemi-decentralized trace:\n{jsonl}");
    let restored = TraceLog::read_jsonl(semi.trace.mode, jsonl.as_bytes())?;
    let again = replay(&scenario, &thresholds, BiasMethod::ClosedForm, &restored)?;
    println!("replay reproduces the bias: {}", again.lightwave.bias == semi.lightwave.bias);
    Ok(())
}
