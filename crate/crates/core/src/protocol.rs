//! The five-step coin toss, run as two party state machines exchanging
//! messages over an in-process channel.
//!
//! 1. Alice prepares `N` pairs and hands Bob's halves over.
//! 2. Bob measures every half in a random basis, then announces all bases.
//! 3. Alice measures her halves in the announced bases.
//! 4. Alice announces her predictions; Bob compares them with his outcomes.
//! 5. If every prediction matched, the coin is the parity of Bob's outcomes.
//!
//! The channel is noiseless and authentic. All randomness is derived from
//! [`ProtocolConfig::seed`] through [`crate::rng`].
//!
//! # Transcript format
//!
//! ```text
//! qcoin-transcript v1
//! rounds <N>
//! seed <u64>
//! <index> <Z|X> <bob outcome> <alice announcement>     (N lines)
//! verdict <zero|one|invalid mismatch|invalid bob-abort>
//! ```
//!
//! Lines end with `\n`; there is no trailing whitespace.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use rand::RngCore;
use serde::Serialize;

use crate::adversary::{alice_prediction_rule, AliceStrategy, BobStrategy, StrategySpec};
use crate::error::{Error, Result};
use crate::quantum::{measure_alice, measure_bob, Basis, Outcome, TwoQubitState};
use crate::rng::{tag, CounterRng};

pub const TRANSCRIPT_HEADER: &str = "qcoin-transcript v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProtocolConfig {
    rounds: usize,
    seed: u64,
}

impl ProtocolConfig {
    pub fn new(rounds: usize, seed: u64) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::ZeroRounds);
        }
        Ok(ProtocolConfig { rounds, seed })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ProtocolConfig { seed, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Round {
    pub index: usize,
    pub basis: Basis,
    pub bob_outcome: Outcome,
    pub alice_announced: Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Zero,
    One,
    Invalid,
}

/// Why a run ended `Invalid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InvalidReason {
    /// Some announcement differed from Bob's outcome.
    Mismatch,
    /// The check passed but Bob refused the resulting bit.
    BobAbort,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub config: ProtocolConfig,
    pub rounds: Vec<Round>,
    pub verdict: Verdict,
    /// XOR of Bob's outcomes; present iff the verdict is not `Invalid`.
    pub parity_bit: Option<u8>,
    pub invalid_reason: Option<InvalidReason>,
}

/// Each basis independently Z or X with probability 1/2, one `u64` per
/// round (top bit clear means Z).
pub fn choose_bases<R: RngCore + ?Sized>(rounds: usize, rng: &mut R) -> Result<Vec<Basis>> {
    if rounds == 0 {
        return Err(Error::ZeroRounds);
    }
    Ok((0..rounds)
        .map(|_| {
            if rng.next_u64() >> 63 == 0 {
                Basis::Z
            } else {
                Basis::X
            }
        })
        .collect())
}

pub fn compute_parity(outcomes: &[Outcome]) -> Result<u8> {
    if outcomes.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    Ok(outcomes.iter().fold(0, |acc, o| acc ^ o.bit()))
}

/// True iff every announcement equals Bob's outcome.
pub fn verify_announcements(rounds: &[Round]) -> Result<bool> {
    if rounds.is_empty() {
        return Err(Error::ZeroRounds);
    }
    Ok(rounds.iter().all(|r| r.alice_announced == r.bob_outcome))
}

/// Messages on the channel. Particles travel as the joint pair states since
/// the engine, not the parties, owns the quantum system.
#[derive(Debug)]
enum Message {
    Particles(Vec<TwoQubitState>),
    /// Bob's bases, sent after he has measured everything. The collapsed
    /// pairs ride along so Alice can measure her halves.
    Bases {
        bases: Vec<Basis>,
        pairs: Vec<TwoQubitState>,
    },
    Predictions(Vec<Outcome>),
    Verdict(Verdict, Option<InvalidReason>),
}

struct AliceMachine<'a> {
    strategy: &'a StrategySpec,
    draws: CounterRng,
}

impl AliceMachine<'_> {
    fn prepare(&self, rounds: usize) -> Result<Message> {
        let state = self.strategy.as_alice()?.prepared_state()?;
        Ok(Message::Particles(vec![state; rounds]))
    }

    fn on_bases(&mut self, bases: &[Basis], pairs: &[TwoQubitState]) -> Result<Message> {
        let mut own = Vec::with_capacity(bases.len());
        for (pair, &basis) in pairs.iter().zip(bases) {
            let (outcome, _) = measure_alice(pair, basis, self.draws.next_draw())?;
            own.push(outcome);
        }
        Ok(Message::Predictions(alice_prediction_rule(
            self.strategy,
            &own,
        )?))
    }
}

struct BobMachine<'a> {
    strategy: &'a StrategySpec,
    basis_rng: CounterRng,
    draws: CounterRng,
    bases: Vec<Basis>,
    outcomes: Vec<Outcome>,
}

impl BobMachine<'_> {
    fn on_particles(&mut self, pairs: Vec<TwoQubitState>) -> Result<Message> {
        self.bases = choose_bases(pairs.len(), &mut self.basis_rng)?;
        let mut collapsed = Vec::with_capacity(pairs.len());
        for (pair, &basis) in pairs.iter().zip(&self.bases) {
            let (outcome, post) = measure_bob(pair, basis, self.draws.next_draw())?;
            self.outcomes.push(outcome);
            collapsed.push(post);
        }
        Ok(Message::Bases {
            bases: self.bases.clone(),
            pairs: collapsed,
        })
    }

    fn on_predictions(&self, predictions: &[Outcome]) -> Result<(Vec<Round>, Message)> {
        let rounds: Vec<Round> = (0..self.outcomes.len())
            .map(|index| Round {
                index,
                basis: self.bases[index],
                bob_outcome: self.outcomes[index],
                alice_announced: predictions[index],
            })
            .collect();
        let message = if !verify_announcements(&rounds)? {
            Message::Verdict(Verdict::Invalid, Some(InvalidReason::Mismatch))
        } else {
            let parity = compute_parity(&self.outcomes)?;
            match self.strategy.as_bob()? {
                BobStrategy::AbortWhenLosing { preferred } if preferred.bit() != parity => {
                    Message::Verdict(Verdict::Invalid, Some(InvalidReason::BobAbort))
                }
                _ if parity == 0 => Message::Verdict(Verdict::Zero, None),
                _ => Message::Verdict(Verdict::One, None),
            }
        };
        Ok((rounds, message))
    }
}

/// Runs one execution. Strategies are checked before any round runs.
pub fn run_protocol(
    config: &ProtocolConfig,
    alice: &StrategySpec,
    bob: &StrategySpec,
) -> Result<Transcript> {
    let _: &AliceStrategy = alice.as_alice()?;
    bob.as_bob()?;
    alice.validate()?;
    bob.validate()?;

    let seed = config.seed();
    let mut alice_m = AliceMachine {
        strategy: alice,
        draws: CounterRng::new(seed, tag::ALICE_MEASURE),
    };
    let mut bob_m = BobMachine {
        strategy: bob,
        basis_rng: CounterRng::new(seed, tag::BOB_BASIS),
        draws: CounterRng::new(seed, tag::BOB_MEASURE),
        bases: Vec::new(),
        outcomes: Vec::with_capacity(config.rounds()),
    };

    let mut channel = VecDeque::new();
    channel.push_back(alice_m.prepare(config.rounds())?);
    let mut rounds = Vec::new();
    while let Some(msg) = channel.pop_front() {
        match msg {
            Message::Particles(pairs) => channel.push_back(bob_m.on_particles(pairs)?),
            Message::Bases { bases, pairs } => channel.push_back(alice_m.on_bases(&bases, &pairs)?),
            Message::Predictions(pred) => {
                let (r, verdict) = bob_m.on_predictions(&pred)?;
                rounds = r;
                channel.push_back(verdict);
            }
            Message::Verdict(verdict, invalid_reason) => {
                let parity_bit = match verdict {
                    Verdict::Invalid => None,
                    Verdict::Zero => Some(0),
                    Verdict::One => Some(1),
                };
                return Ok(Transcript {
                    config: *config,
                    rounds,
                    verdict,
                    parity_bit,
                    invalid_reason,
                });
            }
        }
    }
    unreachable!("protocol channel drained without a verdict")
}

impl Transcript {
    pub fn bob_outcomes(&self) -> Vec<Outcome> {
        self.rounds.iter().map(|r| r.bob_outcome).collect()
    }

    pub fn alice_announcements(&self) -> Vec<Outcome> {
        self.rounds.iter().map(|r| r.alice_announced).collect()
    }

    /// Checks the structural invariants a transcript must satisfy.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.rounds.len() != self.config.rounds() {
            return Err(format!(
                "{} rounds recorded, config says {}",
                self.rounds.len(),
                self.config.rounds()
            ));
        }
        if let Some(r) = self.rounds.iter().enumerate().find(|(i, r)| r.index != *i) {
            return Err(format!("round index {} out of sequence", r.1.index));
        }
        let mismatch = !verify_announcements(&self.rounds).map_err(|e| e.to_string())?;
        let parity = compute_parity(&self.bob_outcomes()).map_err(|e| e.to_string())?;
        match (self.verdict, self.invalid_reason, self.parity_bit) {
            (Verdict::Invalid, Some(InvalidReason::Mismatch), None) if mismatch => Ok(()),
            (Verdict::Invalid, Some(InvalidReason::BobAbort), None) if !mismatch => Ok(()),
            (Verdict::Zero, None, Some(0)) | (Verdict::One, None, Some(1))
                if !mismatch && parity == self.parity_bit.unwrap() =>
            {
                Ok(())
            }
            (v, reason, p) => Err(format!(
                "inconsistent verdict {v:?} (reason {reason:?}, parity {p:?}, mismatch {mismatch}, bob parity {parity})"
            )),
        }
    }

    /// Plain-text record; see the module docs for the format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{TRANSCRIPT_HEADER}").unwrap();
        writeln!(out, "rounds {}", self.config.rounds()).unwrap();
        writeln!(out, "seed {}", self.config.seed()).unwrap();
        for r in &self.rounds {
            writeln!(
                out,
                "{} {} {} {}",
                r.index, r.basis, r.bob_outcome, r.alice_announced
            )
            .unwrap();
        }
        let verdict = match (self.verdict, self.invalid_reason) {
            (Verdict::Zero, _) => "zero",
            (Verdict::One, _) => "one",
            (Verdict::Invalid, Some(InvalidReason::BobAbort)) => "invalid bob-abort",
            (Verdict::Invalid, _) => "invalid mismatch",
        };
        writeln!(out, "verdict {verdict}").unwrap();
        out
    }

    /// Inverse of [`Transcript::render`].
    pub fn parse(text: &str) -> Result<Transcript> {
        let err = |line: usize, reason: &str| Error::TranscriptParse {
            line,
            reason: reason.to_string(),
        };
        let lines: Vec<&str> = text.lines().collect();
        if lines.first() != Some(&TRANSCRIPT_HEADER) {
            return Err(err(1, "missing header"));
        }
        let field = |idx: usize, key: &str| -> Result<u64> {
            lines
                .get(idx)
                .and_then(|l| l.strip_prefix(key))
                .and_then(|v| v.strip_prefix(' '))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err(idx + 1, &format!("expected `{key} <int>`")))
        };
        let n = field(1, "rounds")? as usize;
        let config =
            ProtocolConfig::new(n, field(2, "seed")?).map_err(|e| err(2, &e.to_string()))?;
        if lines.len() != n + 4 {
            return Err(err(lines.len(), "wrong number of lines"));
        }
        let mut rounds = Vec::with_capacity(n);
        for (i, line) in lines[3..3 + n].iter().enumerate() {
            let lineno = i + 4;
            let parts: Vec<&str> = line.split(' ').collect();
            let bit = |s: &str| {
                s.parse::<u8>()
                    .ok()
                    .and_then(Outcome::from_bit)
                    .ok_or_else(|| err(lineno, "outcome must be 0 or 1"))
            };
            let [idx, basis, bob, alice] = parts[..] else {
                return Err(err(lineno, "expected 4 fields"));
            };
            if idx.parse::<usize>().ok() != Some(i) {
                return Err(err(lineno, "round index out of sequence"));
            }
            let mut chars = basis.chars();
            let basis = match (chars.next().and_then(Basis::from_letter), chars.next()) {
                (Some(b), None) => b,
                _ => return Err(err(lineno, "basis must be Z or X")),
            };
            rounds.push(Round {
                index: i,
                basis,
                bob_outcome: bit(bob)?,
                alice_announced: bit(alice)?,
            });
        }
        let last = n + 4;
        let (verdict, invalid_reason) = match lines[n + 3] {
            "verdict zero" => (Verdict::Zero, None),
            "verdict one" => (Verdict::One, None),
            "verdict invalid mismatch" => (Verdict::Invalid, Some(InvalidReason::Mismatch)),
            "verdict invalid bob-abort" => (Verdict::Invalid, Some(InvalidReason::BobAbort)),
            _ => return Err(err(last, "unrecognised verdict line")),
        };
        let parity_bit = match verdict {
            Verdict::Zero => Some(0),
            Verdict::One => Some(1),
            Verdict::Invalid => None,
        };
        let t = Transcript {
            config,
            rounds,
            verdict,
            parity_bit,
            invalid_reason,
        };
        t.check_invariants().map_err(|e| err(last, &e))?;
        Ok(t)
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
