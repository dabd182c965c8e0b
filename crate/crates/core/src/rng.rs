//! Seed derivation and counter-based random streams.
//!
//! Every random quantity in a protocol run is a pure function of
//! `(seed, tag, index)`:
//!
//! ```text
//! mix(z)                 = splitmix64 finalizer of z + 0x9E3779B97F4A7C15
//! derive(seed, tag, i)   = mix(mix(mix(seed) ^ tag) ^ i)
//! ```
//!
//! A [`CounterRng`] keyed by `(seed, tag)` returns `derive(seed, tag, i)` as
//! its `i`-th output, so round `i` of a run always sees the same draws no
//! matter how many rounds follow it, and trial `t` of a batch sees the same
//! seed whichever thread runs it.

use rand::rand_core::impls;
use rand::RngCore;

/// Stream tags. Distinct constants keep the streams of different purposes
/// disjoint under the same master seed.
pub mod tag {
    pub const TRIAL: u64 = 0x7472_6961_6c00_0001;
    pub const BOB_BASIS: u64 = 0x626f_6262_6173_0002;
    pub const BOB_MEASURE: u64 = 0x626f_626d_6561_0003;
    pub const ALICE_MEASURE: u64 = 0x616c_696d_6561_0004;
}

pub fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, tag: u64, index: u64) -> u64 {
    mix(mix(mix(seed) ^ tag) ^ index)
}

/// Seed for trial `index` of a batch run under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    derive(master, tag::TRIAL, index)
}

/// Top 53 bits as a uniform double in `[0, 1)`.
pub fn unit_draw(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counter-mode generator: the `i`-th `next_u64` is `derive(seed, tag, i)`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    tag: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, tag: u64) -> Self {
        CounterRng {
            seed,
            tag,
            counter: 0,
        }
    }

    /// Next output mapped to `[0, 1)`.
    pub fn next_draw(&mut self) -> f64 {
        unit_draw(self.next_u64())
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let out = derive(self.seed, self.tag, self.counter);
        self.counter += 1;
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        impls::fill_bytes_via_next(self, dst)
    }
}
