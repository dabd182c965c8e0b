//! Simulator for an entanglement-based two-party coin toss.
//!
//! Alice sends Bob halves of Bell pairs, Bob measures each in a random Z or X
//! basis and reveals only the bases, Alice measures her halves in the same
//! bases and announces Bob's outcomes, and the coin is the parity of Bob's
//! outcomes. A wrong announcement makes the run invalid.
//!
//! Modules, bottom up:
//! - [`quantum`]: exact two-qubit states, Born-rule measurement, collapse.
//! - [`rng`]: seed derivation; every draw is a function of the seed.
//! - [`protocol`]: Alice/Bob state machines, transcripts, verdicts.
//! - [`adversary`]: cheating strategies and their closed-form pass rates.
//! - [`batch`]: Monte Carlo batches, sequential or parallel.
//! - [`oracle`]: exhaustive exact self-checks.
//! - [`report`], [`harness`]: reports and command logic for the CLI.

pub mod adversary;
pub mod batch;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod protocol;
pub mod quantum;
pub mod report;
pub mod rng;

pub use adversary::{AliceStrategy, BobStrategy, Party, StrategySpec};
pub use error::{Error, Result};
pub use protocol::{ProtocolConfig, Transcript, Verdict};
pub use quantum::{Basis, Outcome, TwoQubitState};
