//! Monte Carlo batches of independent protocol runs.
//!
//! Trial `t` runs with seed [`trial_seed`]`(master, t)`, so the counts depend
//! only on the master seed and trial count, never on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::StrategySpec;
use crate::error::{Error, Result};
use crate::protocol::{run_protocol, InvalidReason, ProtocolConfig, Verdict};
use crate::rng::trial_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BatchCounts {
    pub zero: u64,
    pub one: u64,
    pub invalid: u64,
    /// Invalid runs caused by Bob refusing the bit (subset of `invalid`).
    #[serde(skip)]
    pub bob_aborts: u64,
}

impl BatchCounts {
    pub fn trials(&self) -> u64 {
        self.zero + self.one + self.invalid
    }

    pub fn passed(&self) -> u64 {
        self.zero + self.one
    }

    pub fn detection_rate(&self) -> f64 {
        self.invalid as f64 / self.trials() as f64
    }

    /// `P(parity = 0 | valid) - 1/2`, or `None` with no valid runs.
    pub fn parity_bias_given_pass(&self) -> Option<f64> {
        match self.passed() {
            0 => None,
            p => Some(self.zero as f64 / p as f64 - 0.5),
        }
    }

    fn record(mut self, verdict: Verdict, reason: Option<InvalidReason>) -> Self {
        match verdict {
            Verdict::Zero => self.zero += 1,
            Verdict::One => self.one += 1,
            Verdict::Invalid => {
                self.invalid += 1;
                if reason == Some(InvalidReason::BobAbort) {
                    self.bob_aborts += 1;
                }
            }
        }
        self
    }

    fn merge(self, other: Self) -> Self {
        BatchCounts {
            zero: self.zero + other.zero,
            one: self.one + other.one,
            invalid: self.invalid + other.invalid,
            bob_aborts: self.bob_aborts + other.bob_aborts,
        }
    }
}

pub fn run_batch(
    config: &ProtocolConfig,
    alice: &StrategySpec,
    bob: &StrategySpec,
    trials: u64,
    execution: Execution,
) -> Result<BatchCounts> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    // surface strategy errors once, up front
    run_protocol(config, alice, bob)?;

    let trial = |t: u64| -> Result<(Verdict, Option<InvalidReason>)> {
        let cfg = config.with_seed(trial_seed(config.seed(), t));
        let tr = run_protocol(&cfg, alice, bob)?;
        Ok((tr.verdict, tr.invalid_reason))
    };
    match execution {
        Execution::Sequential => (0..trials).try_fold(BatchCounts::default(), |acc, t| {
            let (v, r) = trial(t)?;
            Ok(acc.record(v, r))
        }),
        Execution::Parallel => (0..trials)
            .into_par_iter()
            .try_fold(BatchCounts::default, |acc, t| {
                let (v, r) = trial(t)?;
                Ok(acc.record(v, r))
            })
            .try_reduce(BatchCounts::default, |a, b| Ok(a.merge(b))),
    }
}
