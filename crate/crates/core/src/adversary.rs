//! Honest and cheating behaviours for both parties, with the closed-form
//! detection figures they imply.
//!
//! A cheating Alice replaces the maximally entangled pair with some other
//! pure two-qubit state, sent identically every round, and announces her own
//! measurement outcomes as predictions of Bob's. A cheating Bob cannot touch
//! the quantum states but can refuse an unfavourable coin by declaring the
//! run invalid.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::batch::{run_batch, BatchCounts, Execution};
use crate::error::{Error, Result};
use crate::protocol::ProtocolConfig;
use crate::quantum::{
    bell_phi_plus, prediction_match_probability, schmidt_state, validate, Amp, Basis, Outcome,
    TwoQubitState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn name(self) -> &'static str {
        match self {
            Party::Alice => "Alice",
            Party::Bob => "Bob",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AliceStrategy {
    Honest,
    /// Sends `cos(theta)|00> + sin(theta)|11>` every round.
    NonMaximal {
        theta: f64,
    },
    CustomState(TwoQubitState),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobStrategy {
    Honest,
    /// Declares the run invalid whenever the agreed parity differs from `preferred`.
    AbortWhenLosing {
        preferred: Outcome,
    },
}

/// Behaviour of one party in a protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategySpec {
    Alice(AliceStrategy),
    Bob(BobStrategy),
}

impl StrategySpec {
    pub const HONEST_ALICE: StrategySpec = StrategySpec::Alice(AliceStrategy::Honest);
    pub const HONEST_BOB: StrategySpec = StrategySpec::Bob(BobStrategy::Honest);

    pub fn party(&self) -> Party {
        match self {
            StrategySpec::Alice(_) => Party::Alice,
            StrategySpec::Bob(_) => Party::Bob,
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(
            self,
            StrategySpec::Alice(AliceStrategy::Honest) | StrategySpec::Bob(BobStrategy::Honest)
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StrategySpec::Alice(a) => a.prepared_state().map(|_| ()),
            StrategySpec::Bob(_) => Ok(()),
        }
    }

    /// Returns the Alice strategy, or a party mismatch error.
    pub fn as_alice(&self) -> Result<&AliceStrategy> {
        match self {
            StrategySpec::Alice(a) => Ok(a),
            StrategySpec::Bob(_) => Err(Error::PartyMismatch {
                expected: Party::Alice.name(),
                found: Party::Bob.name(),
            }),
        }
    }

    pub fn as_bob(&self) -> Result<&BobStrategy> {
        match self {
            StrategySpec::Bob(b) => Ok(b),
            StrategySpec::Alice(_) => Err(Error::PartyMismatch {
                expected: Party::Bob.name(),
                found: Party::Alice.name(),
            }),
        }
    }

    /// Parses the command-line form for a given party:
    /// `honest`, `nonmax:<theta>`, `custom:<re00>,<im00>,...,<re11>,<im11>`,
    /// `abort-bias:<0|1>`.
    pub fn parse(party: Party, input: &str) -> Result<StrategySpec> {
        let fail = |reason: String| Error::StrategyParse {
            input: input.to_string(),
            reason,
        };
        let (kind, arg) = match input.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (input, None),
        };
        let spec = match (party, kind, arg) {
            (Party::Alice, "honest", None) => StrategySpec::HONEST_ALICE,
            (Party::Bob, "honest", None) => StrategySpec::HONEST_BOB,
            (Party::Alice, "nonmax", Some(a)) => {
                let theta =
                    f64::from_str(a.trim()).map_err(|e| fail(format!("bad theta `{a}`: {e}")))?;
                StrategySpec::Alice(AliceStrategy::NonMaximal { theta })
            }
            (Party::Alice, "custom", Some(a)) => {
                let reals = a
                    .split(',')
                    .map(|t| {
                        f64::from_str(t.trim()).map_err(|e| fail(format!("bad real `{t}`: {e}")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                if reals.len() != 8 {
                    return Err(fail(format!(
                        "expected 8 comma-separated reals, found {}",
                        reals.len()
                    )));
                }
                let amps = [0, 1, 2, 3].map(|k| Amp::new(reals[2 * k], reals[2 * k + 1]));
                let state = validate(amps).map_err(|e| fail(e.to_string()))?;
                StrategySpec::Alice(AliceStrategy::CustomState(state))
            }
            (Party::Bob, "abort-bias", Some(a)) => {
                let preferred = match a.trim() {
                    "0" => Outcome::Zero,
                    "1" => Outcome::One,
                    other => {
                        return Err(fail(format!("preferred bit must be 0 or 1, got `{other}`")))
                    }
                };
                StrategySpec::Bob(BobStrategy::AbortWhenLosing { preferred })
            }
            (Party::Alice, "abort-bias", _) => {
                return Err(fail("abort-bias is a Bob strategy".into()))
            }
            (Party::Bob, "nonmax" | "custom", _) => {
                return Err(fail(format!("{kind} is an Alice strategy")))
            }
            (_, "honest", Some(_)) => return Err(fail("honest takes no argument".into())),
            (_, "nonmax" | "custom" | "abort-bias", None) => {
                return Err(fail(format!("{kind} requires an argument after `:`")))
            }
            _ => return Err(fail(format!("unknown strategy `{kind}`"))),
        };
        spec.validate().map_err(|e| fail(e.to_string()))?;
        Ok(spec)
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Alice(AliceStrategy::Honest) | StrategySpec::Bob(BobStrategy::Honest) => {
                write!(f, "honest")
            }
            StrategySpec::Alice(AliceStrategy::NonMaximal { theta }) => write!(f, "nonmax:{theta}"),
            StrategySpec::Alice(AliceStrategy::CustomState(s)) => {
                let parts: Vec<String> = s
                    .amps()
                    .iter()
                    .flat_map(|a| [a.re.to_string(), a.im.to_string()])
                    .collect();
                write!(f, "custom:{}", parts.join(","))
            }
            StrategySpec::Bob(BobStrategy::AbortWhenLosing { preferred }) => {
                write!(f, "abort-bias:{}", preferred.bit())
            }
        }
    }
}

impl AliceStrategy {
    /// The pair state Alice sends every round.
    pub fn prepared_state(&self) -> Result<TwoQubitState> {
        match *self {
            AliceStrategy::Honest => Ok(bell_phi_plus()),
            AliceStrategy::NonMaximal { theta } => {
                if !(0.0..=FRAC_PI_2).contains(&theta) {
                    return Err(Error::ThetaOutOfRange(theta));
                }
                schmidt_state(theta)
            }
            AliceStrategy::CustomState(s) => validate(*s.amps()),
        }
    }
}

/// Alice's announced predictions of Bob's outcomes.
///
/// Every modelled Alice strategy announces her own outcomes round by round.
/// For the Bell pair this reproduces Bob's outcomes exactly.
pub fn alice_prediction_rule(
    strategy: &StrategySpec,
    alice_outcomes: &[Outcome],
) -> Result<Vec<Outcome>> {
    match strategy.as_alice()? {
        AliceStrategy::Honest
        | AliceStrategy::NonMaximal { .. }
        | AliceStrategy::CustomState(_) => Ok(alice_outcomes.to_vec()),
    }
}

/// Per-round probabilities `(match_z, match_x)` that Alice's announcement
/// equals Bob's outcome, taken from the exact joint distribution.
pub fn per_round_match(strategy: &StrategySpec) -> Result<(f64, f64)> {
    let state = strategy.as_alice()?.prepared_state()?;
    Ok((
        prediction_match_probability(&state, Basis::Z),
        prediction_match_probability(&state, Basis::X),
    ))
}

/// Probability that Alice passes Bob's check on all `rounds` rounds when Bob
/// picks each basis uniformly: `((m_Z + m_X) / 2)^N`.
pub fn analytic_pass_probability(strategy: &StrategySpec, rounds: usize) -> Result<f64> {
    if rounds == 0 {
        return Err(Error::ZeroRounds);
    }
    let alice = strategy.as_alice()?;
    if let AliceStrategy::Honest = alice {
        return Ok(1.0);
    }
    let (mz, mx) = per_round_match(strategy)?;
    Ok(((mz + mx) / 2.0).powi(rounds as i32))
}

/// Monte Carlo measurement of a strategy pair, with the analytic figures
/// alongside where they apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheatReport {
    pub per_round_match_z: f64,
    pub per_round_match_x: f64,
    /// Probability of passing the step-4 comparison over `config.rounds` rounds.
    pub pass_probability: f64,
    pub counts: BatchCounts,
    pub empirical_detection_rate: f64,
    /// `P(parity = 0 | verdict valid) - 1/2`; `None` when no trial was valid.
    pub empirical_parity_bias_given_pass: Option<f64>,
}

pub fn estimate_cheat_report(
    alice: &StrategySpec,
    bob: &StrategySpec,
    config: &ProtocolConfig,
    trials: u64,
) -> Result<CheatReport> {
    estimate_cheat_report_with(alice, bob, config, trials, Execution::Parallel)
}

pub fn estimate_cheat_report_with(
    alice: &StrategySpec,
    bob: &StrategySpec,
    config: &ProtocolConfig,
    trials: u64,
    execution: Execution,
) -> Result<CheatReport> {
    let (per_round_match_z, per_round_match_x) = per_round_match(alice)?;
    let pass_probability = analytic_pass_probability(alice, config.rounds())?;
    let counts = run_batch(config, alice, bob, trials, execution)?;
    Ok(CheatReport {
        per_round_match_z,
        per_round_match_x,
        pass_probability,
        empirical_detection_rate: counts.detection_rate(),
        empirical_parity_bias_given_pass: counts.parity_bias_given_pass(),
        counts,
    })
}
