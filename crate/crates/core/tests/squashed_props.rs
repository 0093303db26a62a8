use qregion_core::entropy::{cond_multiparty_info, mutual_info, parts};
use qregion_core::linalg::max_abs_entry;
use qregion_core::qstate::{isotropic, random_mixed, stream_rng, QuantumState};
use qregion_core::squashed::{esq_optimize, extended_state, EsqOptions};

fn ab() -> Vec<Vec<String>> {
    parts(&[&["A"], &["B"]])
}

#[test]
fn isotropic_regression_value() {
    let s = isotropic(0.5).unwrap();
    let opts = EsqOptions {
        d_e: Some(4),
        restarts: 4,
        max_evals: 4_000,
        seed: 1,
        ..Default::default()
    };
    let r = esq_optimize(&s, &ab(), &opts).unwrap();
    let half_mi = 0.5 * mutual_info(&s, &["A"], &["B"]).unwrap();
    assert!(r.upper_bound >= 0.0 && r.upper_bound <= half_mi);
    // pinned output of this exact configuration
    assert!((r.upper_bound - 0.129_636_556_628).abs() < 1e-6, "{}", r.upper_bound);
    let ext = extended_state(&s, &r.extension).unwrap();
    let back = ext.partial_trace(&["A", "B"]).unwrap();
    assert!(max_abs_entry(&(back.matrix() - s.matrix())) < 1e-8);
}

#[test]
fn larger_extension_never_worse_when_seeded() {
    for k in 0..3 {
        let mut rng = stream_rng(100, k);
        let s = random_mixed(&[2, 2], &["A", "B"], 2, &mut rng).unwrap();
        let small = EsqOptions {
            d_e: Some(2),
            restarts: 2,
            max_evals: 600,
            seed: k,
            ..Default::default()
        };
        let r2 = esq_optimize(&s, &ab(), &small).unwrap();
        let ch = &r2.extension;
        let large = EsqOptions {
            d_e: Some(4),
            d_f: Some(ch.d_f),
            restarts: 1,
            max_evals: 600,
            seed: k,
            warm_start: Some(ch.embed(4, ch.d_f).unwrap()),
            ..Default::default()
        };
        let r4 = esq_optimize(&s, &ab(), &large).unwrap();
        assert!(r4.upper_bound <= r2.upper_bound + 1e-6, "{} > {}", r4.upper_bound, r2.upper_bound);
    }
}

#[test]
fn subadditive_on_products_of_found_extensions() {
    let mut rng = stream_rng(200, 0);
    let rho = random_mixed(&[2, 2], &["A", "B"], 2, &mut rng).unwrap();
    let sigma = random_mixed(&[2, 2], &["C", "D"], 2, &mut rng).unwrap();
    let opts = EsqOptions {
        d_e: Some(2),
        restarts: 2,
        max_evals: 600,
        seed: 5,
        ..Default::default()
    };
    let r1 = esq_optimize(&rho, &ab(), &opts).unwrap();
    let r2 = esq_optimize(&sigma, &parts(&[&["C"], &["D"]]), &opts).unwrap();
    let e1 = extended_state(&rho, &r1.extension).unwrap();
    let e2 = extended_state(&sigma, &r2.extension)
        .unwrap()
        .relabel(&["C", "D", "E2"])
        .unwrap();
    let joint = e1.tensor(&e2).unwrap();
    let value = 0.5
        * cond_multiparty_info(&joint, &parts(&[&["A", "C"], &["B", "D"]]), &["E", "E2"]).unwrap();
    assert!(value <= r1.upper_bound + r2.upper_bound + 1e-6);
    assert!(value >= -1e-9);
}

#[test]
fn reported_values_are_nonnegative() {
    for k in 0..4 {
        let mut rng = stream_rng(300, k);
        let s = random_mixed(&[2, 3], &["A", "B"], 3, &mut rng).unwrap();
        let opts = EsqOptions {
            d_e: Some(2),
            restarts: 1,
            max_evals: 400,
            seed: k,
            ..Default::default()
        };
        let r = esq_optimize(&s, &ab(), &opts).unwrap();
        assert!(r.upper_bound >= -1e-9);
        assert_eq!(extended_state(&s, &r.extension).unwrap().dims(), &[2, 3, 2]);
    }
}
