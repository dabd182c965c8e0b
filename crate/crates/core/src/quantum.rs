//! Exact two-qubit pure states with projective Z/X measurements.
//!
//! Amplitudes are indexed `|ab>` with `a` the qubit Alice keeps and `b` the
//! qubit sent to Bob, so the flat index is `2 * a + b`. Outcome `0` is the
//! +1 eigenvalue of the measured axis and outcome `1` the -1 eigenvalue.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|sum |amp|^2 - 1|` for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Negative probabilities down to this value are rounding noise and get clamped to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-15;

pub type Amp = Complex64;

/// Measurement axis. Only Z and X exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Z, Basis::X];

    pub fn letter(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
        }
    }

    pub fn from_letter(c: char) -> Option<Basis> {
        match c {
            'Z' => Some(Basis::Z),
            'X' => Some(Basis::X),
            _ => None,
        }
    }

    /// Real eigenvector for `outcome` in the computational basis.
    fn eigenvector(self, outcome: Outcome) -> [f64; 2] {
        match (self, outcome) {
            (Basis::Z, Outcome::Zero) => [1.0, 0.0],
            (Basis::Z, Outcome::One) => [0.0, 1.0],
            (Basis::X, Outcome::Zero) => [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            (Basis::X, Outcome::One) => [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A single measurement result. `Zero` is spin +1, `One` is spin -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Zero, Outcome::One];

    pub fn bit(self) -> u8 {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Option<Outcome> {
        match bit {
            0 => Some(Outcome::Zero),
            1 => Some(Outcome::One),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// Which half of the pair a measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    Alice,
    Bob,
}

/// A validated, normalized two-qubit pure state.
///
/// The only way to obtain one is through [`validate`] or the named
/// constructors, so every value in circulation satisfies the normalization
/// invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [Amp; 4],
}

/// Checks finiteness and normalization, returning the state on success.
pub fn validate(amps: [Amp; 4]) -> Result<TwoQubitState> {
    for (index, a) in amps.iter().enumerate() {
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::NonFiniteAmplitude {
                index,
                re: a.re,
                im: a.im,
            });
        }
    }
    let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(TwoQubitState { amps })
}

/// `(|00> + |11>) / sqrt 2`, equal outcomes in both Z and X.
pub fn bell_phi_plus() -> TwoQubitState {
    let h = Amp::new(FRAC_1_SQRT_2, 0.0);
    let z = Amp::new(0.0, 0.0);
    TwoQubitState { amps: [h, z, z, h] }
}

/// `cos(theta)|00> + sin(theta)|11>` for `theta` in `[0, pi/2]`.
pub fn schmidt_state(theta: f64) -> Result<TwoQubitState> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let z = Amp::new(0.0, 0.0);
    validate([Amp::new(theta.cos(), 0.0), z, z, Amp::new(theta.sin(), 0.0)])
}

impl TwoQubitState {
    pub fn amps(&self) -> &[Amp; 4] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest componentwise amplitude difference, for exact comparisons.
    pub fn max_deviation(&self, other: &TwoQubitState) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Unnormalized projection of one qubit onto the eigenvector of `outcome`.
    fn project(&self, qubit: Qubit, basis: Basis, outcome: Outcome) -> [Amp; 4] {
        let v = basis.eigenvector(outcome);
        let mut out = [Amp::new(0.0, 0.0); 4];
        match qubit {
            Qubit::Bob => {
                for a in 0..2 {
                    let overlap = self.amps[2 * a] * v[0] + self.amps[2 * a + 1] * v[1];
                    out[2 * a] = overlap * v[0];
                    out[2 * a + 1] = overlap * v[1];
                }
            }
            Qubit::Alice => {
                for b in 0..2 {
                    let overlap = self.amps[b] * v[0] + self.amps[2 + b] * v[1];
                    out[b] = overlap * v[0];
                    out[2 + b] = overlap * v[1];
                }
            }
        }
        out
    }
}

impl fmt::Display for TwoQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .amps
            .iter()
            .map(|a| format!("{}{:+}i", a.re, a.im))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// One outcome of a projective measurement together with its exact
/// probability and the collapsed state (absent when the probability is zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub outcome: Outcome,
    pub probability: f64,
    pub state: Option<TwoQubitState>,
}

/// Both branches of measuring `qubit` in `basis`, computed exactly.
pub fn measurement_branches(state: &TwoQubitState, qubit: Qubit, basis: Basis) -> [Branch; 2] {
    Outcome::ALL.map(|outcome| {
        let projected = state.project(qubit, basis, outcome);
        let probability: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
        let state = if probability > 0.0 {
            let scale = probability.sqrt().recip();
            Some(TwoQubitState {
                amps: projected.map(|a| a * scale),
            })
        } else {
            None
        };
        Branch {
            outcome,
            probability,
            state,
        }
    })
}

fn sample(
    state: &TwoQubitState,
    qubit: Qubit,
    basis: Basis,
    draw: f64,
) -> Result<(Outcome, TwoQubitState)> {
    if !(0.0..1.0).contains(&draw) {
        return Err(Error::DrawOutOfRange(draw));
    }
    let [zero, one] = measurement_branches(state, qubit, basis);
    let (chosen, other) = if draw < zero.probability {
        (zero, one)
    } else {
        (one, zero)
    };
    // rounding can leave P(0) a hair below 1 with P(1) exactly 0; a draw in
    // that gap lands on an empty branch and takes the other one
    let (outcome, collapsed) = match chosen.state {
        Some(s) => (chosen.outcome, s),
        None => (
            other.outcome,
            other
                .state
                .expect("a normalized state has a non-empty branch"),
        ),
    };
    Ok((outcome, collapsed))
}

/// Samples Bob's outcome by the Born rule: outcome 0 iff `draw < P(0)`.
pub fn measure_bob(
    state: &TwoQubitState,
    basis: Basis,
    draw: f64,
) -> Result<(Outcome, TwoQubitState)> {
    sample(state, Qubit::Bob, basis, draw)
}

/// Same contract as [`measure_bob`] on Alice's qubit.
pub fn measure_alice(
    state: &TwoQubitState,
    basis: Basis,
    draw: f64,
) -> Result<(Outcome, TwoQubitState)> {
    sample(state, Qubit::Alice, basis, draw)
}

/// Exact outcome distribution `p(a, b)` for a pair of measurement bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDistribution {
    probs: [f64; 4],
    pub basis_alice: Basis,
    pub basis_bob: Basis,
}

impl JointDistribution {
    /// Builds a distribution from raw entries indexed `2 * a + b`,
    /// clamping rounding noise and rejecting anything else.
    pub fn from_probs(raw: [f64; 4], basis_alice: Basis, basis_bob: Basis) -> Result<Self> {
        let mut probs = [0.0; 4];
        for (dst, &p) in probs.iter_mut().zip(raw.iter()) {
            if !p.is_finite() {
                return Err(Error::NegativeProbability { value: p });
            }
            if p < -CLAMP_TOLERANCE {
                return Err(Error::NegativeProbability { value: p });
            }
            *dst = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq: total });
        }
        Ok(JointDistribution {
            probs,
            basis_alice,
            basis_bob,
        })
    }

    pub fn p(&self, alice: Outcome, bob: Outcome) -> f64 {
        self.probs[2 * alice.bit() as usize + bob.bit() as usize]
    }

    /// Entries in `00, 01, 10, 11` order.
    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    pub fn same(&self) -> f64 {
        self.probs[0] + self.probs[3]
    }

    pub fn differ(&self) -> f64 {
        self.probs[1] + self.probs[2]
    }

    pub fn marginal_alice(&self) -> [f64; 2] {
        [self.probs[0] + self.probs[1], self.probs[2] + self.probs[3]]
    }

    pub fn marginal_bob(&self) -> [f64; 2] {
        [self.probs[0] + self.probs[2], self.probs[1] + self.probs[3]]
    }

    pub fn max_deviation(&self, other: &[f64; 4]) -> f64 {
        self.probs
            .iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Born-rule distribution obtained by projecting onto all four product
/// eigenstates. Uses no randomness and no collapse.
pub fn joint_distribution(
    state: &TwoQubitState,
    basis_alice: Basis,
    basis_bob: Basis,
) -> JointDistribution {
    let mut raw = [0.0; 4];
    for a in Outcome::ALL {
        let va = basis_alice.eigenvector(a);
        for b in Outcome::ALL {
            let vb = basis_bob.eigenvector(b);
            let mut overlap = Amp::new(0.0, 0.0);
            for (i, ca) in va.iter().enumerate() {
                for (j, cb) in vb.iter().enumerate() {
                    overlap += state.amps[2 * i + j] * (ca * cb);
                }
            }
            raw[2 * a.bit() as usize + b.bit() as usize] = overlap.norm_sqr();
        }
    }
    JointDistribution::from_probs(raw, basis_alice, basis_bob)
        .expect("Born probabilities of a validated state form a distribution")
}

/// Probability that Alice's outcome equals Bob's when both measure in `basis`.
pub fn prediction_match_probability(state: &TwoQubitState, basis: Basis) -> f64 {
    joint_distribution(state, basis, basis).same().min(1.0)
}

#[cfg(test)]
// literal decimals here are user-facing inputs, not stand-ins for the constants
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    const TOL: f64 = 1e-12;

    fn c(re: f64) -> Amp {
        Amp::new(re, 0.0)
    }

    /// Independent Born-rule oracle: builds the 4x4 product projector
    /// `P = |va><va| (x) |vb><vb|` explicitly and evaluates `<psi|P|psi>`.
    fn projector_oracle(state: &TwoQubitState, ba: Basis, bb: Basis) -> [f64; 4] {
        let vec = |basis: Basis, o: usize| -> [f64; 2] {
            let s = FRAC_1_SQRT_2;
            match (basis, o) {
                (Basis::Z, 0) => [1.0, 0.0],
                (Basis::Z, _) => [0.0, 1.0],
                (Basis::X, 0) => [s, s],
                (Basis::X, _) => [s, -s],
            }
        };
        let psi = state.amps();
        let mut out = [0.0; 4];
        for a in 0..2 {
            for b in 0..2 {
                let (va, vb) = (vec(ba, a), vec(bb, b));
                let mut kron = [0.0; 4];
                for i in 0..2 {
                    for j in 0..2 {
                        kron[2 * i + j] = va[i] * vb[j];
                    }
                }
                let mut expectation = Amp::new(0.0, 0.0);
                for r in 0..4 {
                    for s in 0..4 {
                        expectation += psi[r].conj() * (kron[r] * kron[s]) * psi[s];
                    }
                }
                out[2 * a + b] = expectation.re;
            }
        }
        out
    }

    #[test]
    fn bell_amplitudes() {
        let s = bell_phi_plus();
        let a = s.amps();
        assert!((a[0].re - 0.7071067811865476).abs() < TOL);
        assert!((a[3].re - 0.7071067811865476).abs() < TOL);
        assert_eq!(a[1], c(0.0));
        assert_eq!(a[2], c(0.0));
        assert!((s.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn bell_equal_basis_distributions() {
        for b in Basis::ALL {
            let oracle = projector_oracle(&bell_phi_plus(), b, b);
            assert!((oracle[0] - 0.5).abs() < TOL && (oracle[3] - 0.5).abs() < TOL);
            assert!(oracle[1].abs() < TOL && oracle[2].abs() < TOL);
            let d = joint_distribution(&bell_phi_plus(), b, b);
            assert!(d.max_deviation(&oracle) < TOL);
        }
    }

    #[test]
    fn schmidt_values() {
        let s = schmidt_state(FRAC_PI_4).unwrap();
        assert!(s.max_deviation(&bell_phi_plus()) < TOL);
        let s = schmidt_state(0.0).unwrap();
        assert_eq!(s.amps(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let s = schmidt_state(FRAC_PI_8).unwrap();
        assert!((s.amps()[0].re - 0.9238795325112867).abs() < TOL);
        assert!((s.amps()[3].re - 0.3826834323650898).abs() < TOL);
    }

    #[test]
    fn schmidt_rejects_out_of_range() {
        assert_eq!(schmidt_state(-0.1), Err(Error::ThetaOutOfRange(-0.1)));
        assert!(schmidt_state(FRAC_PI_2 + 1e-9).is_err());
        assert!(schmidt_state(f64::NAN).is_err());
        assert!(schmidt_state(FRAC_PI_2).is_ok());
    }

    #[test]
    fn validate_cases() {
        assert!(validate([c(1.0), c(0.0), c(0.0), c(0.0)]).is_ok());
        match validate([c(1.0), c(0.0), c(0.0), c(1.0)]) {
            Err(Error::NotNormalized { norm_sq }) => assert!((norm_sq - 2.0).abs() < TOL),
            other => panic!("expected normalization failure, got {other:?}"),
        }
        assert!(matches!(
            validate([c(f64::NAN), c(0.0), c(0.0), c(0.0)]),
            Err(Error::NonFiniteAmplitude { index: 0, .. })
        ));
        assert!(matches!(
            validate([c(0.0), Amp::new(0.0, f64::INFINITY), c(0.0), c(0.0)]),
            Err(Error::NonFiniteAmplitude { index: 1, .. })
        ));
    }

    #[test]
    fn measure_bob_on_bell_z() {
        let (o, post) = measure_bob(&bell_phi_plus(), Basis::Z, 0.3).unwrap();
        assert_eq!(o, Outcome::Zero);
        assert!(post.max_deviation(&validate([c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap()) < TOL);
    }

    #[test]
    fn measure_bob_product_state_in_x() {
        let (o, post) = measure_bob(&schmidt_state(0.0).unwrap(), Basis::X, 0.49).unwrap();
        assert_eq!(o, Outcome::Zero);
        let expected = validate([c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(0.0), c(0.0)]).unwrap();
        assert!(post.max_deviation(&expected) < TOL);
    }

    #[test]
    fn measure_eigenstate_is_identity() {
        let s = schmidt_state(0.0).unwrap();
        let (o, post) = measure_bob(&s, Basis::Z, 0.999).unwrap();
        assert_eq!(o, Outcome::Zero);
        assert!(post.max_deviation(&s) < TOL);
        let (o, _) = measure_alice(&s, Basis::Z, 0.5).unwrap();
        assert_eq!(o, Outcome::Zero);
    }

    #[test]
    fn alice_follows_bob_after_z_collapse() {
        for draw in [0.1, 0.6, 0.99] {
            let (b, post) = measure_bob(&bell_phi_plus(), Basis::Z, draw).unwrap();
            for d2 in [0.0, 0.5, 0.999] {
                let (a, _) = measure_alice(&post, Basis::Z, d2).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn measure_alice_bell_x_collapses_to_minus_minus() {
        let (o, post) = measure_alice(&bell_phi_plus(), Basis::X, 0.7).unwrap();
        assert_eq!(o, Outcome::One);
        let minus_minus = validate([c(0.5), c(-0.5), c(-0.5), c(0.5)]).unwrap();
        assert!(post.max_deviation(&minus_minus) < TOL);
        for draw in [0.0, 0.5, 0.999] {
            let (b, _) = measure_bob(&post, Basis::X, draw).unwrap();
            assert_eq!(b, Outcome::One);
        }
    }

    #[test]
    fn empty_branch_is_never_returned() {
        // P(0) rounds to just below 1 while P(1) is exactly 0
        let s = validate([c(1.0 - 4e-16), c(0.0), c(0.0), c(0.0)]).unwrap();
        let [zero, one] = measurement_branches(&s, Qubit::Bob, Basis::Z);
        assert!(zero.probability < 1.0 && one.probability == 0.0);
        let (o, post) = measure_bob(&s, Basis::Z, 1.0 - f64::EPSILON / 2.0).unwrap();
        assert_eq!(o, Outcome::Zero);
        assert!((post.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn draw_out_of_range_rejected() {
        let s = bell_phi_plus();
        assert_eq!(
            measure_bob(&s, Basis::Z, 1.0),
            Err(Error::DrawOutOfRange(1.0))
        );
        assert!(measure_alice(&s, Basis::Z, -0.01).is_err());
        assert!(measure_alice(&s, Basis::Z, f64::NAN).is_err());
    }

    #[test]
    fn joint_distribution_examples() {
        let d = joint_distribution(&bell_phi_plus(), Basis::Z, Basis::Z);
        assert!(d.max_deviation(&[0.5, 0.0, 0.0, 0.5]) < TOL);

        let s = schmidt_state(FRAC_PI_8).unwrap();
        let oracle = projector_oracle(&s, Basis::X, Basis::X);
        let d = joint_distribution(&s, Basis::X, Basis::X);
        assert!(d.max_deviation(&oracle) < TOL);
        let same = (1.0 + FRAC_PI_4.sin()) / 2.0;
        assert!((d.same() - same).abs() < TOL);
        assert!((d.same() - 0.8535533905932737).abs() < TOL);
        assert!((d.p(Outcome::Zero, Outcome::Zero) - same / 2.0).abs() < TOL);
        assert!((d.p(Outcome::One, Outcome::One) - same / 2.0).abs() < TOL);
        assert!((d.p(Outcome::Zero, Outcome::One) - (1.0 - same) / 2.0).abs() < TOL);
        assert!((d.differ() - 0.14644660940672624).abs() < TOL);

        let d = joint_distribution(&schmidt_state(0.0).unwrap(), Basis::Z, Basis::Z);
        assert!(d.max_deviation(&[1.0, 0.0, 0.0, 0.0]) < TOL);
    }

    #[test]
    fn joint_distribution_matches_projector_oracle_on_mixed_bases() {
        let raw = [
            Amp::new(0.5, 0.1),
            Amp::new(-0.3, 0.2),
            Amp::new(0.1, -0.4),
            Amp::new(0.2, 0.3),
        ];
        let n: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let s = validate(raw.map(|a| a / n)).unwrap();
        for ba in Basis::ALL {
            for bb in Basis::ALL {
                let d = joint_distribution(&s, ba, bb);
                assert!(d.max_deviation(&projector_oracle(&s, ba, bb)) < TOL);
            }
        }
    }

    #[test]
    fn prediction_match_examples() {
        assert!((prediction_match_probability(&bell_phi_plus(), Basis::X) - 1.0).abs() < TOL);
        assert!((prediction_match_probability(&bell_phi_plus(), Basis::Z) - 1.0).abs() < TOL);
        let prod = schmidt_state(0.0).unwrap();
        assert!((prediction_match_probability(&prod, Basis::X) - 0.5).abs() < TOL);
        for k in 0..=32 {
            let theta = FRAC_PI_2 * k as f64 / 32.0;
            let s = schmidt_state(theta).unwrap();
            let oracle = projector_oracle(&s, Basis::Z, Basis::Z);
            assert!((oracle[0] + oracle[3] - 1.0).abs() < TOL);
            assert!((prediction_match_probability(&s, Basis::Z) - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn clamping_rules() {
        let d = JointDistribution::from_probs([0.5, -1e-16, 0.0, 0.5], Basis::Z, Basis::Z).unwrap();
        assert_eq!(d.probs()[1], 0.0);
        assert!(matches!(
            JointDistribution::from_probs([0.5, -1e-9, 0.0, 0.5], Basis::Z, Basis::Z),
            Err(Error::NegativeProbability { .. })
        ));
        assert!(JointDistribution::from_probs([0.5, 0.0, 0.0, 0.4], Basis::Z, Basis::Z).is_err());
    }

    #[test]
    fn bell_marginals_uniform() {
        for ba in Basis::ALL {
            for bb in Basis::ALL {
                let d = joint_distribution(&bell_phi_plus(), ba, bb);
                for m in [d.marginal_bob(), d.marginal_alice()] {
                    assert!((m[0] - 0.5).abs() < TOL && (m[1] - 0.5).abs() < TOL);
                }
            }
        }
    }
}
