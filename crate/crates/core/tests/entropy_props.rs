mod common;

use common::h;
use proptest::prelude::*;
use qregion_core::entropy::{cond_mutual_info, mutual_info, von_neumann};
use qregion_core::qstate::{fidelity, random_mixed, stream_rng, trace_distance, QuantumState};
use rand::Rng;

const SLACK: f64 = 1e-9;

#[test]
fn strong_subadditivity_on_random_states() {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..1_000u64 {
        let mut rng = stream_rng(31, i);
        let dims = [rng.random_range(2..=3), rng.random_range(2..=3), 2];
        let env = rng.random_range(1..=6);
        let s = random_mixed(&dims, &["A", "B", "C"], env, &mut rng).unwrap();
        // H(AC) + H(BC) ≥ H(C) + H(ABC)
        let gap = h(&s, &["C"]) + h(&s, &["A", "B", "C"]) - h(&s, &["A", "C"]) - h(&s, &["B", "C"]);
        worst = worst.max(gap);
        let cmi = cond_mutual_info(&s, &["A"], &["B"], &["C"]).unwrap();
        assert!(cmi >= -SLACK, "I(A;B|C) = {cmi}");
        assert!((cmi + gap).abs() < 1e-9, "library and oracle disagree: {cmi} vs {}", -gap);
    }
    assert!(worst <= SLACK, "SSA violated by {worst}");
}

#[test]
fn fuchs_van_de_graaf_on_random_pairs() {
    for i in 0..500u64 {
        let mut rng = stream_rng(32, i);
        let d = rng.random_range(2..=4);
        let rho = random_mixed(&[d], &["A"], rng.random_range(1..=d), &mut rng).unwrap();
        let sigma = random_mixed(&[d], &["A"], rng.random_range(1..=d), &mut rng).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        let td = trace_distance(&rho, &sigma).unwrap();
        assert!((0.0..=1.0 + SLACK).contains(&f), "F = {f}");
        assert!((0.0..=2.0 + SLACK).contains(&td), "TD = {td}");
        assert!(1.0 - f.sqrt() <= 0.5 * td + SLACK, "pair {i}: F={f} TD={td}");
        assert!(0.5 * td <= (1.0 - f).max(0.0).sqrt() + SLACK, "pair {i}: F={f} TD={td}");
        assert!(1.0 - td <= f + SLACK, "pair {i}: F={f} TD={td}");
        assert!(f <= 1.0 - td * td / 4.0 + SLACK, "pair {i}: F={f} TD={td}");
    }
}

#[test]
fn fidelity_and_distance_of_identical_states() {
    let mut rng = stream_rng(33, 0);
    let rho = random_mixed(&[3], &["A"], 2, &mut rng).unwrap();
    assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
    assert!(trace_distance(&rho, &rho).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_within_dimension_bounds(seed in any::<u64>(), d in 2usize..6, env in 1usize..6) {
        let mut rng = stream_rng(seed, 0);
        let s = random_mixed(&[d], &["A"], env, &mut rng).unwrap();
        let v = von_neumann(&s, &["A"]).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v <= (d as f64).log2() + SLACK);
        prop_assert!(v <= (env as f64).log2() + SLACK);
        prop_assert!((v - h(&s, &["A"])).abs() < 1e-9);
    }

    #[test]
    fn mutual_information_symmetric_and_bounded(seed in any::<u64>(), env in 1usize..8) {
        let mut rng = stream_rng(seed, 1);
        let s = random_mixed(&[2, 3], &["A", "B"], env, &mut rng).unwrap();
        let ab = mutual_info(&s, &["A"], &["B"]).unwrap();
        let ba = mutual_info(&s, &["B"], &["A"]).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab >= -SLACK);
        prop_assert!(ab <= 2.0 * 1.0 + SLACK);
    }

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 2);
        let states: Vec<_> = (0..3)
            .map(|_| random_mixed(&[3], &["A"], 3, &mut rng).unwrap())
            .collect();
        let d = |i: usize, j: usize| trace_distance(&states[i], &states[j]).unwrap();
        prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-12);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + SLACK);
        prop_assert_eq!(states[0].dims(), &[3usize][..]);
    }
}
