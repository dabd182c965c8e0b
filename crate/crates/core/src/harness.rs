//! Command implementations behind the `qcoin` binary, kept free of I/O so
//! they can be driven directly from tests.

use std::fmt::Write as _;
use std::time::Instant;

use crate::adversary::{
    analytic_pass_probability, estimate_cheat_report_with, AliceStrategy, StrategySpec,
};
use crate::batch::Execution;
use crate::error::{Error, Result};
use crate::protocol::{run_protocol, InvalidReason, ProtocolConfig, Transcript, Verdict};
use crate::report::{SweepPoint, SweepReport, TrialBatchReport};

/// Human-readable summary of a single run.
pub fn render_run_summary(t: &Transcript, alice: &StrategySpec, bob: &StrategySpec) -> String {
    let mut out = String::new();
    writeln!(out, "rounds: {}", t.config.rounds()).unwrap();
    writeln!(out, "seed: {}", t.config.seed()).unwrap();
    writeln!(out, "alice: {alice}").unwrap();
    writeln!(out, "bob: {bob}").unwrap();
    let mismatches = t
        .rounds
        .iter()
        .filter(|r| r.alice_announced != r.bob_outcome)
        .count();
    match (t.verdict, t.invalid_reason) {
        (Verdict::Invalid, Some(InvalidReason::BobAbort)) => {
            writeln!(out, "verdict: invalid (Bob aborted after a passing check)").unwrap();
        }
        (Verdict::Invalid, _) => {
            writeln!(
                out,
                "verdict: invalid ({mismatches} of {} announcements wrong)",
                t.rounds.len()
            )
            .unwrap();
        }
        (v, _) => {
            let bit = t.parity_bit.expect("valid verdict carries parity");
            writeln!(
                out,
                "verdict: {}",
                if v == Verdict::Zero { "zero" } else { "one" }
            )
            .unwrap();
            writeln!(out, "parity: {bit} (known to both parties)").unwrap();
        }
    }
    out
}

pub fn run_single(
    config: &ProtocolConfig,
    alice: &StrategySpec,
    bob: &StrategySpec,
) -> Result<(Transcript, String)> {
    let t = run_protocol(config, alice, bob)?;
    let summary = render_run_summary(&t, alice, bob);
    Ok((t, summary))
}

/// Runs a Monte Carlo batch and packages it as a report.
///
/// The analytic pass probability is included whenever Bob is honest; with a
/// vetoing Bob the invalid rate is no longer a function of Alice's state alone.
pub fn batch_report(
    config: &ProtocolConfig,
    alice: &StrategySpec,
    bob: &StrategySpec,
    trials: u64,
    execution: Execution,
) -> Result<TrialBatchReport> {
    let start = Instant::now();
    let cheat = estimate_cheat_report_with(alice, bob, config, trials, execution)?;
    let analytic = if bob.is_honest() {
        Some(analytic_pass_probability(alice, config.rounds())?)
    } else {
        None
    };
    Ok(TrialBatchReport {
        trials,
        rounds: config.rounds(),
        seed: config.seed(),
        alice_strategy: alice.to_string(),
        bob_strategy: bob.to_string(),
        counts: cheat.counts.into(),
        detection_rate: cheat.empirical_detection_rate,
        parity_bias_given_pass: cheat.empirical_parity_bias_given_pass,
        analytic_pass_probability: analytic,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Grid `from, from + step, ...` strictly below `to`, then `to` itself.
///
/// Points are computed as `from + k * step` rather than accumulated. A grid
/// point within `1e-9 * step` of `to` is merged with it.
pub fn sweep_values(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err(Error::SweepRange("bounds and step must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::SweepRange(format!(
            "step must be positive, got {step}"
        )));
    }
    if from > to {
        return Err(Error::SweepRange(format!(
            "empty range: from {from} > to {to}"
        )));
    }
    let mut values = Vec::new();
    let mut k = 0u64;
    loop {
        let v = from + k as f64 * step;
        if v >= to - 1e-9 * step {
            break;
        }
        values.push(v);
        k += 1;
    }
    values.push(to);
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub rounds: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Batch at every theta of the grid, Alice sending the Schmidt state. Every
/// point reuses the same master seed.
pub fn theta_sweep(
    params: &SweepParams,
    bob: &StrategySpec,
    execution: Execution,
) -> Result<SweepReport> {
    let config = ProtocolConfig::new(params.rounds, params.seed)?;
    let mut points = Vec::new();
    for theta in sweep_values(params.from, params.to, params.step)? {
        let alice = StrategySpec::Alice(AliceStrategy::NonMaximal { theta });
        alice.validate()?;
        let report = batch_report(&config, &alice, bob, params.trials, execution)?;
        points.push(SweepPoint {
            value: theta,
            report,
        });
    }
    Ok(SweepReport {
        parameter: "theta".into(),
        points,
    })
}
