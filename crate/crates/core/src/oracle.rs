//! Exact self-checks by exhaustive branch enumeration.
//!
//! Nothing here samples. Distributions are rebuilt from the collapse
//! branches of sequential measurements and compared against the direct
//! product-projector distribution; pass probabilities are rebuilt by walking
//! every basis string and every outcome branch and compared against the
//! closed form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;

use crate::adversary::{
    alice_prediction_rule, analytic_pass_probability, AliceStrategy, StrategySpec,
};
use crate::error::{Error, Result};
use crate::protocol::{run_protocol, ProtocolConfig};
use crate::quantum::{
    bell_phi_plus, joint_distribution, measurement_branches, prediction_match_probability,
    schmidt_state, validate, Amp, Basis, Outcome, Qubit, TwoQubitState, NORM_TOLERANCE,
};
use crate::rng::CounterRng;

pub const EXACT_TOLERANCE: f64 = 1e-12;

/// Largest round count the exhaustive walk accepts (`8^N` leaves per strategy).
pub const MAX_ENUMERATED_ROUNDS: usize = 6;

/// Distribution `p(a, b)` obtained by measuring `first` then the other qubit,
/// summing branch probabilities exactly.
pub fn sequential_distribution(
    state: &TwoQubitState,
    basis_alice: Basis,
    basis_bob: Basis,
    first: Qubit,
) -> [f64; 4] {
    let (first_basis, second, second_basis) = match first {
        Qubit::Alice => (basis_alice, Qubit::Bob, basis_bob),
        Qubit::Bob => (basis_bob, Qubit::Alice, basis_alice),
    };
    let mut out = [0.0; 4];
    for outer in measurement_branches(state, first, first_basis) {
        let Some(post) = outer.state else { continue };
        for inner in measurement_branches(&post, second, second_basis) {
            let (a, b) = match first {
                Qubit::Alice => (outer.outcome, inner.outcome),
                Qubit::Bob => (inner.outcome, outer.outcome),
            };
            out[2 * a.bit() as usize + b.bit() as usize] += outer.probability * inner.probability;
        }
    }
    out
}

/// Probability that Alice passes Bob's comparison, by walking all `2^N`
/// basis strings and all Bob/Alice outcome branches of every round.
pub fn exhaustive_pass_probability(strategy: &StrategySpec, rounds: usize) -> Result<f64> {
    if rounds == 0 {
        return Err(Error::ZeroRounds);
    }
    let state = strategy.as_alice()?.prepared_state()?;
    let weight = 0.5f64.powi(rounds as i32);
    let mut total = 0.0;
    for mask in 0u64..(1 << rounds) {
        let bases: Vec<Basis> = (0..rounds)
            .map(|i| {
                if mask >> i & 1 == 0 {
                    Basis::Z
                } else {
                    Basis::X
                }
            })
            .collect();
        let mut bob = Vec::with_capacity(rounds);
        let mut alice = Vec::with_capacity(rounds);
        total += weight * walk(strategy, &state, &bases, &mut bob, &mut alice)?;
    }
    Ok(total)
}

fn walk(
    strategy: &StrategySpec,
    state: &TwoQubitState,
    bases: &[Basis],
    bob: &mut Vec<Outcome>,
    alice: &mut Vec<Outcome>,
) -> Result<f64> {
    let depth = bob.len();
    if depth == bases.len() {
        let predictions = alice_prediction_rule(strategy, alice)?;
        return Ok(if predictions == *bob { 1.0 } else { 0.0 });
    }
    let basis = bases[depth];
    let mut acc = 0.0;
    for bb in measurement_branches(state, Qubit::Bob, basis) {
        let Some(post) = bb.state else { continue };
        for ab in measurement_branches(&post, Qubit::Alice, basis) {
            if ab.probability == 0.0 {
                continue;
            }
            bob.push(bb.outcome);
            alice.push(ab.outcome);
            acc += bb.probability * ab.probability * walk(strategy, state, bases, bob, alice)?;
            bob.pop();
            alice.pop();
        }
    }
    Ok(acc)
}

/// Result of one self-check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, max_deviation: f64, tolerance: f64, detail: String) -> Self {
        Check {
            name,
            max_deviation,
            tolerance,
            passed: max_deviation < tolerance,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = format!(
            "{} {:<30} max_deviation={:.3e} tolerance={:.0e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance,
            self.detail
        );
        f.write_str(line.trim_end())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub max_rounds: usize,
    /// Added to the real part of the first Bell amplitude before validation;
    /// a negative control for the normalization check.
    pub perturbation: Option<f64>,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_rounds: 4,
            perturbation: None,
            seed: 0,
        }
    }
}

/// Φ⁺, the Schmidt family at multiples of π/8, and seeded random states.
pub fn state_grid(seed: u64, random: usize) -> Vec<(String, TwoQubitState)> {
    let mut grid = vec![("bell".to_string(), bell_phi_plus())];
    for k in 0..=4 {
        let theta = k as f64 * FRAC_PI_8;
        grid.push((
            format!("schmidt({k}pi/8)"),
            schmidt_state(theta.min(FRAC_PI_2)).expect("grid theta in range"),
        ));
    }
    let mut rng = CounterRng::new(seed, 0x6f72_6163_6c65);
    for i in 0..random {
        let raw: [Amp; 4] =
            [(); 4].map(|_| Amp::new(2.0 * rng.next_draw() - 1.0, 2.0 * rng.next_draw() - 1.0));
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state = validate(raw.map(|a| a / norm)).expect("normalized random state");
        grid.push((format!("random#{i}"), state));
    }
    grid
}

fn alice_strategies() -> Vec<StrategySpec> {
    let mut out: Vec<StrategySpec> = [0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2]
        .into_iter()
        .map(|theta| StrategySpec::Alice(AliceStrategy::NonMaximal { theta }))
        .collect();
    out.push(StrategySpec::HONEST_ALICE);
    for (_, s) in state_grid(0x5eed, 2).into_iter().skip(6) {
        out.push(StrategySpec::Alice(AliceStrategy::CustomState(s)));
    }
    out
}

/// Runs every exact check. A check fails when its deviation reaches the tolerance.
pub fn run_suite(opts: &OracleOptions) -> Result<Vec<Check>> {
    if opts.max_rounds == 0 || opts.max_rounds > MAX_ENUMERATED_ROUNDS {
        return Err(Error::InvalidArgument(format!(
            "max rounds must be in 1..={MAX_ENUMERATED_ROUNDS}, got {}",
            opts.max_rounds
        )));
    }
    let grid = state_grid(opts.seed, 8);
    let pairs = [
        (Basis::Z, Basis::Z),
        (Basis::Z, Basis::X),
        (Basis::X, Basis::Z),
        (Basis::X, Basis::X),
    ];
    let mut checks = Vec::new();

    // normalization of inputs
    let mut bell = *bell_phi_plus().amps();
    if let Some(eps) = opts.perturbation {
        bell[0].re += eps;
    }
    let mut dev: f64 = 0.0;
    let mut detail = format!("{} states", grid.len() + 1);
    match validate(bell) {
        Ok(s) => dev = dev.max((s.norm_sqr() - 1.0).abs()),
        Err(e) => {
            let norm: f64 = bell.iter().map(|a| a.norm_sqr()).sum();
            dev = if norm.is_finite() {
                (norm - 1.0).abs()
            } else {
                f64::INFINITY
            };
            detail = format!("bell rejected: {e}");
        }
    }
    for (_, s) in &grid {
        dev = dev.max((s.norm_sqr() - 1.0).abs());
    }
    checks.push(Check::new("normalization", dev, NORM_TOLERANCE, detail));

    // collapsed states stay normalized
    let mut dev: f64 = 0.0;
    for (_, s) in &grid {
        for q in [Qubit::Alice, Qubit::Bob] {
            for b in Basis::ALL {
                for br in measurement_branches(s, q, b) {
                    if let Some(post) = br.state {
                        dev = dev.max((post.norm_sqr() - 1.0).abs());
                    }
                }
            }
        }
    }
    checks.push(Check::new(
        "collapse-normalization",
        dev,
        EXACT_TOLERANCE,
        String::new(),
    ));

    let mut dev: f64 = 0.0;
    for ba in Basis::ALL {
        for bb in Basis::ALL {
            let d = joint_distribution(&bell_phi_plus(), ba, bb);
            for m in [d.marginal_alice(), d.marginal_bob()] {
                dev = dev.max((m[0] - 0.5).abs()).max((m[1] - 0.5).abs());
            }
        }
    }
    checks.push(Check::new(
        "marginal-uniformity",
        dev,
        EXACT_TOLERANCE,
        String::new(),
    ));

    let dev = Basis::ALL
        .iter()
        .map(|&b| joint_distribution(&bell_phi_plus(), b, b).differ())
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "perfect-correlation",
        dev,
        EXACT_TOLERANCE,
        "bell, Z/Z and X/X".into(),
    ));

    let mut seq_dev: f64 = 0.0;
    let mut order_dev: f64 = 0.0;
    for (_, s) in &grid {
        for &(ba, bb) in &pairs {
            let joint = joint_distribution(s, ba, bb);
            let bob_first = sequential_distribution(s, ba, bb, Qubit::Bob);
            let alice_first = sequential_distribution(s, ba, bb, Qubit::Alice);
            seq_dev = seq_dev.max(joint.max_deviation(&bob_first));
            order_dev = order_dev.max(
                bob_first
                    .iter()
                    .zip(alice_first.iter())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max),
            );
        }
    }
    let grid_detail = format!("{} states x 4 basis pairs", grid.len());
    checks.push(Check::new(
        "sequential-equals-joint",
        seq_dev,
        EXACT_TOLERANCE,
        grid_detail.clone(),
    ));
    checks.push(Check::new(
        "order-irrelevance",
        order_dev,
        EXACT_TOLERANCE,
        grid_detail,
    ));

    let mut dev: f64 = 0.0;
    for k in 0..=32 {
        let s = schmidt_state(FRAC_PI_2 * k as f64 / 32.0)?;
        dev = dev.max((prediction_match_probability(&s, Basis::Z) - 1.0).abs());
    }
    checks.push(Check::new(
        "z-basis-blindness",
        dev,
        EXACT_TOLERANCE,
        "33 thetas".into(),
    ));

    let dev = Basis::ALL
        .iter()
        .map(|&b| (prediction_match_probability(&bell_phi_plus(), b) - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "honest-match-certainty",
        dev,
        EXACT_TOLERANCE,
        String::new(),
    ));

    let strategies = alice_strategies();
    let mut dev: f64 = 0.0;
    for s in &strategies {
        for n in 1..=opts.max_rounds {
            let exact = exhaustive_pass_probability(s, n)?;
            dev = dev.max((exact - analytic_pass_probability(s, n)?).abs());
        }
    }
    checks.push(Check::new(
        "exhaustive-pass-probability",
        dev,
        EXACT_TOLERANCE,
        format!(
            "{} strategies, N=1..={}, {} basis strings at N={}",
            strategies.len(),
            opts.max_rounds,
            1u64 << opts.max_rounds,
            opts.max_rounds
        ),
    ));

    let step = PI / 64.0;
    let mut violation: f64 = 0.0;
    for n in (1..=opts.max_rounds).chain([16, 64]) {
        let curve = (0..=32)
            .map(|k| {
                analytic_pass_probability(
                    &StrategySpec::Alice(AliceStrategy::NonMaximal {
                        theta: k as f64 * step,
                    }),
                    n,
                )
            })
            .collect::<Result<Vec<f64>>>()?;
        for k in 0..32 {
            let rise = curve[k + 1] - curve[k];
            violation = violation.max(if k < 16 { -rise } else { rise });
        }
    }
    checks.push(Check::new(
        "detection-monotonicity",
        violation.max(0.0),
        EXACT_TOLERANCE,
        "theta step pi/64".into(),
    ));

    let quarter = StrategySpec::Alice(AliceStrategy::NonMaximal { theta: FRAC_PI_4 });
    let mut differing = 0usize;
    for seed in 0..64 {
        let cfg = ProtocolConfig::new(16, opts.seed.wrapping_add(seed))?;
        let a = run_protocol(&cfg, &StrategySpec::HONEST_ALICE, &StrategySpec::HONEST_BOB)?;
        let b = run_protocol(&cfg, &quarter, &StrategySpec::HONEST_BOB)?;
        differing += (a != b) as usize;
    }
    checks.push(Check::new(
        "quarter-pi-indistinguishable",
        differing as f64,
        0.5,
        "64 seeds, N=16".into(),
    ));

    Ok(checks)
}
