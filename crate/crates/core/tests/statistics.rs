//! Sampling checks against exact distributions, all at 5 sigma.

use std::f64::consts::FRAC_PI_8;

use qcoin::adversary::{estimate_cheat_report, per_round_match};
use qcoin::oracle::state_grid;
use qcoin::quantum::{joint_distribution, measure_alice, measure_bob};
use qcoin::rng::CounterRng;
use qcoin::{AliceStrategy, Basis, BobStrategy, Outcome, ProtocolConfig, StrategySpec};

fn sigma5(p: f64, t: f64) -> f64 {
    5.0 * (p * (1.0 - p) / t).sqrt()
}

#[test]
fn sampled_frequencies_match_joint_distribution() {
    let t = 100_000u32;
    let grid = state_grid(11, 3);
    let mut rng = CounterRng::new(99, 1);
    for (name, s) in &grid {
        for ba in Basis::ALL {
            for bb in Basis::ALL {
                let mut counts = [0u32; 4];
                for _ in 0..t {
                    let (b, post) = measure_bob(s, bb, rng.next_draw()).unwrap();
                    let (a, _) = measure_alice(&post, ba, rng.next_draw()).unwrap();
                    counts[2 * a.bit() as usize + b.bit() as usize] += 1;
                }
                let exact = joint_distribution(s, ba, bb).probs();
                for k in 0..4 {
                    let f = counts[k] as f64 / t as f64;
                    let tol = sigma5(exact[k], t as f64);
                    assert!(
                        (f - exact[k]).abs() <= tol,
                        "{name} {ba}{bb} cell {k}: {f} vs {}",
                        exact[k]
                    );
                }
            }
        }
    }
}

#[test]
fn honest_report_has_no_detections() {
    let cfg = ProtocolConfig::new(12, 8).unwrap();
    let r = estimate_cheat_report(
        &StrategySpec::HONEST_ALICE,
        &StrategySpec::HONEST_BOB,
        &cfg,
        10_000,
    )
    .unwrap();
    assert_eq!(r.empirical_detection_rate, 0.0);
    assert_eq!(r.counts.invalid, 0);
    assert_eq!(r.pass_probability, 1.0);
    assert_eq!((r.per_round_match_z, r.per_round_match_x), (1.0, 1.0));
}

#[test]
fn nonmax_pi_over_8_report() {
    let alice = StrategySpec::Alice(AliceStrategy::NonMaximal { theta: FRAC_PI_8 });
    let cfg = ProtocolConfig::new(16, 21).unwrap();
    let t = 100_000;
    let r = estimate_cheat_report(&alice, &StrategySpec::HONEST_BOB, &cfg, t).unwrap();
    let (mz, mx) = per_round_match(&alice).unwrap();
    let fail = 1.0 - ((mz + mx) / 2.0).powi(16);
    assert!((fail - 0.7037886660371503).abs() < 1e-12);
    assert!((r.empirical_detection_rate - fail).abs() <= sigma5(fail, t as f64));
    // cheating with a Schmidt state does not bias the surviving coin
    let passed = r.counts.zero + r.counts.one;
    let bias = r.empirical_parity_bias_given_pass.unwrap();
    assert!(bias.abs() <= sigma5(0.5, passed as f64));
}

#[test]
fn aborting_bob_forces_his_bit() {
    let bob = StrategySpec::Bob(BobStrategy::AbortWhenLosing {
        preferred: Outcome::Zero,
    });
    let cfg = ProtocolConfig::new(8, 5).unwrap();
    let t = 100_000;
    let r = estimate_cheat_report(&StrategySpec::HONEST_ALICE, &bob, &cfg, t).unwrap();
    assert_eq!(r.counts.one, 0);
    assert_eq!(r.counts.bob_aborts, r.counts.invalid);
    assert_eq!(r.empirical_parity_bias_given_pass, Some(0.5));
    // he vetoes about half the runs
    assert!((r.empirical_detection_rate - 0.5).abs() <= sigma5(0.5, t as f64));
}
