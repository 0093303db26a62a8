mod common;

use common::h_pure;
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use qregion_core::decouple::{
    decoupling_mc, decoupling_trial, fqsw_chain_sim, fqsw_min_rate, DecouplingTrialConfig,
};
use qregion_core::linalg::kron;
use qregion_core::qstate::{ghz, haar_unitary, random_pure, stream_rng, PureState, UnitaryMatrix};
use rand::Rng;

fn ghz_qudits(d: usize, labels: &[&str]) -> PureState {
    let n = labels.len();
    let total = d.pow(n as u32);
    let step: usize = (0..n).map(|k| d.pow(k as u32)).sum();
    let amp = 1.0 / (d as f64).sqrt();
    let v = DVector::from_fn(total, |i, _| {
        Complex64::new(if i % step == 0 { amp } else { 0.0 }, 0.0)
    });
    PureState::new(vec![d; n], labels, v).unwrap()
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[test]
fn decoupling_bound_across_dimension_grid() {
    let mut states = 0;
    for d_a in [4usize, 8, 16] {
        for d_r in [2usize, 4] {
            for rep in 0..9u64 {
                let mut rng = stream_rng(51, states);
                let d_b = rng.random_range(1..=3);
                let psi = random_pure(&[d_a, d_b, d_r], &["A", "B", "R"], &mut rng).unwrap();
                for d_a1 in (1..=d_a).filter(|d| d_a % d == 0) {
                    let cfg = DecouplingTrialConfig::new(&psi, &["A"], &["R"], d_a1, 60, 1_000 + rep).unwrap();
                    let rep = decoupling_mc(&cfg).unwrap();
                    assert!(
                        rep.mean_sq_td <= rep.rhs_bound + 3.0 * rep.stderr,
                        "d_A={d_a} d_R={d_r} d_A1={d_a1}: {} > {}",
                        rep.mean_sq_td,
                        rep.rhs_bound
                    );
                }
                states += 1;
            }
        }
    }
    assert!(states >= 50);
}

#[test]
fn rhs_bound_matches_purity_oracle() {
    let mut rng = stream_rng(52, 0);
    let psi = random_pure(&[4, 3, 2], &["A", "B", "R"], &mut rng).unwrap();
    let cfg = DecouplingTrialConfig::new(&psi, &["A"], &["R"], 2, 30, 0).unwrap();
    // Tr[ψ_{AR}²] = Tr[ψ_B²] for a pure global state
    let amps = psi.amplitudes();
    let mut rho_b = nalgebra::DMatrix::<Complex64>::zeros(3, 3);
    for a in 0..4 {
        for r in 0..2 {
            for i in 0..3 {
                for j in 0..3 {
                    rho_b[(i, j)] += amps[a * 6 + i * 2 + r] * amps[a * 6 + j * 2 + r].conj();
                }
            }
        }
    }
    let purity: f64 = rho_b.iter().map(|z| z.norm_sqr()).sum();
    assert!((cfg.rhs_bound() - 4.0 * 2.0 / 4.0 * purity).abs() < 1e-12);
}

#[test]
fn residual_invariant_under_a2_basis_change() {
    for i in 0..20u64 {
        let mut rng = stream_rng(53, i);
        let psi = random_pure(&[8, 2, 2], &["A", "B", "R"], &mut rng).unwrap();
        let cfg = DecouplingTrialConfig::new(&psi, &["A"], &["R"], 2, 30, 0).unwrap();
        let u = haar_unitary(8, &mut rng).unwrap();
        let v = haar_unitary(4, &mut rng).unwrap();
        let on_a2 = UnitaryMatrix::new(kron(&nalgebra::DMatrix::identity(2, 2), v.matrix())).unwrap();
        let a = decoupling_trial(&cfg, &u).unwrap();
        let b = decoupling_trial(&cfg, &on_a2.compose(&u).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn full_sender_rate_is_reference_entropy() {
    for i in 0..20u64 {
        let mut rng = stream_rng(54, i);
        let psi = random_pure(&[6, 3], &["A", "R"], &mut rng).unwrap();
        let none: [&str; 0] = [];
        let rate = fqsw_min_rate(&psi, "A", &none, "R").unwrap();
        assert!((rate - h_pure(&psi, &["R"])).abs() < 1e-9);
    }
}

#[test]
fn qubit_ghz_chain_separates_exactly() {
    let s = ghz(4).unwrap();
    let senders = names(&["X1", "X2", "X3"]);
    let r = fqsw_chain_sim(&s, &senders, "X4", &[0, 1, 2], &[0, 1, 1], 40, 5).unwrap();
    // whole-qubit splits are deterministic: all or nothing
    assert!((r.separation_margin.unwrap() - 2.25).abs() < 1e-9);
    assert!(r.steps[1].mean_sq_td < 1e-20 && r.steps[2].mean_sq_td < 1e-20);
}

#[test]
fn ququart_ghz_chain_sweep_margin() {
    const PINNED_MIN_MARGIN: f64 = 1.683_271_775_712_513_7;
    let s = ghz_qudits(4, &["A1", "A2", "A3", "R"]);
    let senders = names(&["A1", "A2", "A3"]);
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let patterns = [[1, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2], [0, 1, 2], [2, 2, 0]];
    let mut min_margin = f64::INFINITY;
    for pi in perms {
        for q in patterns {
            let r = fqsw_chain_sim(&s, &senders, "R", &pi, &q, 200, 5).unwrap();
            for st in &r.steps {
                assert!(st.mean_sq_td.is_finite());
                if st.above_threshold {
                    assert!(st.mean_sq_td <= st.rhs_bound + 3.0 * st.stderr);
                }
            }
            if let Some(m) = r.separation_margin {
                assert!(m > 0.0, "{pi:?} {q:?}: margin {m}");
                min_margin = min_margin.min(m);
            }
        }
    }
    assert!((min_margin - PINNED_MIN_MARGIN).abs() < 1e-9, "min margin {min_margin}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residual_bounded_and_zero_when_everything_is_sent(seed in any::<u64>(), d_r in 1usize..4) {
        let mut rng = stream_rng(seed, 0);
        let psi = random_pure(&[4, 2, d_r], &["A", "B", "R"], &mut rng).unwrap();
        let u = haar_unitary(4, &mut rng).unwrap();
        let all = DecouplingTrialConfig::new(&psi, &["A"], &["R"], 4, 30, 0).unwrap();
        prop_assert!(decoupling_trial(&all, &u).unwrap() < 1e-20);
        let half = DecouplingTrialConfig::new(&psi, &["A"], &["R"], 2, 30, 0).unwrap();
        let v = decoupling_trial(&half, &u).unwrap();
        prop_assert!((0.0..=4.0 + 1e-9).contains(&v));
    }
}
