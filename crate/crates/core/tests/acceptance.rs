//! End-to-end acceptance checks. Every criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

mod common;

use common::{brute_typical, h, h_pure, shannon_bits};
use qregion_core::classical::typical_stats;
use qregion_core::decouple::{
    blackhole_threshold, decoupling_mc, BlackHoleMode, DecouplingTrialConfig,
};
use qregion_core::entropy::{cond_entropy, cond_multiparty_info, mutual_info, parts, shannon, von_neumann, Distribution};
use qregion_core::qstate::{
    bell, ghz, product_pure, random_mixed, random_pure, separable, stream_rng, w_state, PureState,
};
use qregion_core::rateregion::{
    corner_points_all, inner_constants, outer_constants, parties_of, subset_of, superadditivity_check,
    vertices_bruteforce,
};
use qregion_core::rescalc::{builtin, compose, scale, Builtin, Token};
use qregion_core::squashed::{esq_flag_upper, esq_optimize, esq_pure, EsqOptions};
use qregion_core::qstate::QuantumState;
use qregion_core::Result;
use rand::Rng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        detail: detail.into(),
    })
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn bell_ledger() -> Result<Outcome> {
    const TOL: f64 = 1e-9;
    let s = bell();
    let got = [
        von_neumann(&s, &["A"])?,
        von_neumann(&s, &["B"])?,
        von_neumann(&s, &["A", "B"])?,
        cond_entropy(&s, &["A"], &["B"])?,
        mutual_info(&s, &["A"], &["B"])?,
    ];
    let want = [1.0, 1.0, 0.0, -1.0, 2.0];
    let worst = got.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    outcome(worst <= TOL, format!("max deviation {worst:.2e}"))
}

fn shannon_examples() -> Result<Outcome> {
    const TOL: f64 = 1e-5;
    let coin = shannon(&Distribution::new(vec![0.5, 0.5])?);
    let outpost = shannon(&Distribution::new(vec![0.997, 0.002, 0.001])?);
    outcome(
        coin == 1.0 && (outpost - 0.03222).abs() <= TOL,
        format!("coin {coin}, outpost {outpost:.6}"),
    )
}

fn ghz_squashed() -> Result<Outcome> {
    const TOL_CLOSED: f64 = 1e-9;
    const TOL_SEARCH: f64 = 1e-6;
    let mut worst: f64 = 0.0;
    for m in 2..=6 {
        let s = ghz(m)?;
        let groups: Vec<Vec<String>> = s.labels().iter().map(|l| vec![l.clone()]).collect();
        worst = worst.max((esq_pure(&s, &groups)? - m as f64 / 2.0).abs());
    }
    let s = ghz(3)?;
    let groups: Vec<Vec<String>> = s.labels().iter().map(|l| vec![l.clone()]).collect();
    let opts = EsqOptions {
        d_e: Some(2),
        restarts: 4,
        max_evals: 1_000,
        seed: 3,
        ..Default::default()
    };
    let found = esq_optimize(&s.to_density(), &groups, &opts)?.upper_bound;
    outcome(
        worst <= TOL_CLOSED && (found - 1.5).abs() <= TOL_SEARCH,
        format!("closed form max deviation {worst:.2e}, search {found:.9}"),
    )
}

fn w_value() -> Result<Outcome> {
    const TOL: f64 = 1e-5;
    let m = 3.0f64;
    let target = 0.5 * (m.powf(m) / (m - 1.0).powf(m - 1.0)).log2();
    let s = w_state(3)?;
    let groups: Vec<Vec<String>> = s.labels().iter().map(|l| vec![l.clone()]).collect();
    let got = esq_pure(&s, &groups)?;
    outcome(
        (got - target).abs() <= TOL && (target - 1.377443).abs() <= TOL,
        format!("E_sq(W3) {got:.9}, closed form {target:.9}"),
    )
}

/// A product ensemble as per-party kets, so restrictions to any subset of
/// parties are themselves product ensembles.
fn product_ensemble(rng: &mut impl Rng, m: usize, size: usize) -> Result<Vec<(f64, Vec<PureState>)>> {
    let names = labels("P", m);
    let mut weights: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    weights
        .into_iter()
        .map(|w| {
            let kets = names
                .iter()
                .map(|n| random_pure(&[2], &[n.as_str()], rng))
                .collect::<Result<Vec<_>>>()?;
            Ok((w, kets))
        })
        .collect()
}

fn restrict(ens: &[(f64, Vec<PureState>)], members: &[usize]) -> Result<Vec<(f64, PureState)>> {
    ens.iter()
        .map(|(w, kets)| {
            let picked: Vec<PureState> = members.iter().map(|&i| kets[i].clone()).collect();
            Ok((*w, product_pure(&picked)?))
        })
        .collect()
}

fn separable_optimality() -> Result<Outcome> {
    const TOL: f64 = 1e-9;
    let mut worst_flag: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for trial in 0..20u64 {
        let mut rng = stream_rng(505, trial);
        let m = 2 + (trial % 2) as usize;
        let size = rng.random_range(2..=3);
        let ens = product_ensemble(&mut rng, m, size)?;
        let names = labels("P", m);
        let groups: Vec<Vec<String>> = names.iter().map(|l| vec![l.clone()]).collect();
        let all: Vec<usize> = (0..m).collect();
        worst_flag = worst_flag.max(esq_flag_upper(&restrict(&ens, &all)?, &groups)?.abs());

        let psi = separable(&restrict(&ens, &all)?)?.purify("R")?;
        let inner = inner_constants(&psi, &groups, &["R"])?;
        let mut esq = BTreeMap::new();
        for k in inner.subsets().filter(|k| k.count_ones() >= 2) {
            let members = parties_of(k);
            let sub_groups: Vec<Vec<String>> = members.iter().map(|&i| groups[i].clone()).collect();
            esq.insert(k, esq_flag_upper(&restrict(&ens, &members)?, &sub_groups)?);
        }
        let outer = outer_constants(&inner, &esq)?;
        for k in inner.subsets() {
            worst_gap = worst_gap.max((inner.get(k) - outer.get(k)).abs());
        }
    }
    outcome(
        worst_flag < TOL && worst_gap < TOL,
        format!("max |flag bound| {worst_flag:.2e}, max inner/outer gap {worst_gap:.2e}"),
    )
}

fn vertex_equivalence() -> Result<Outcome> {
    const TOL: f64 = 1e-8;
    const STATES: u64 = 200;
    let names = ["A1", "A2", "A3", "R"];
    let groups = parts(&[&["A1"], &["A2"], &["A3"]]);
    let mut failures = 0;
    for i in 0..STATES {
        let mut rng = stream_rng(606, i);
        let psi = random_pure(&[2, 2, 2, 2], &names, &mut rng)?;
        let f = inner_constants(&psi, &groups, &["R"])?;
        let corners = corner_points_all(&f)?;
        let brute = vertices_bruteforce(&f)?;
        let same = corners.len() == brute.len() && corners.iter().zip(&brute).all(|(a, b)| a.approx_eq(b, TOL));
        if !same || !superadditivity_check(&f).holds {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{STATES} states, {failures} mismatches"))
}

fn two_party_reduction() -> Result<Outcome> {
    const TOL: f64 = 1e-9;
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = stream_rng(707, i);
        let d_r = rng.random_range(2..=4);
        let psi = random_pure(&[2, 3, d_r], &["A1", "A2", "R"], &mut rng)?;
        let f = inner_constants(&psi, &parts(&[&["A1"], &["A2"]]), &["R"])?;
        let (h1, h2, h12) = (h_pure(&psi, &["A1"]), h_pure(&psi, &["A2"]), h_pure(&psi, &["A1", "A2"]));
        let hr = h_pure(&psi, &["R"]);
        let c1 = 0.5 * (h1 + hr - h_pure(&psi, &["A1", "R"]));
        let c2 = 0.5 * (h2 + hr - h_pure(&psi, &["A2", "R"]));
        let c12 = 0.5 * (h1 + h2 + h12);
        for (k, want) in [(0b01, c1), (0b10, c2), (0b11, c12)] {
            worst = worst.max((f.get(k) - want).abs());
        }
    }
    outcome(worst <= TOL, format!("100 states, max deviation {worst:.2e}"))
}

fn decoupling_grid() -> Result<Outcome> {
    const SAMPLES: usize = 200;
    const SIGMAS: f64 = 3.0;
    let mut configs = 0;
    let mut violations = Vec::new();
    for (ai, d_a) in [4usize, 8, 16].into_iter().enumerate() {
        for (ri, d_r) in [2usize, 4].into_iter().enumerate() {
            let mut rng = stream_rng(808, (ai * 2 + ri) as u64);
            let psi = random_pure(&[d_a, 2, d_r], &["A", "B", "R"], &mut rng)?;
            for d_a1 in (1..=d_a).filter(|d| d_a % d == 0) {
                let cfg = DecouplingTrialConfig::new(&psi, &["A"], &["R"], d_a1, SAMPLES, 9_000 + configs)?;
                let rep = decoupling_mc(&cfg)?;
                let bound = cfg.d_a as f64 * cfg.d_r as f64 / (d_a1 * d_a1) as f64 * cfg.purity();
                if rep.mean_sq_td > bound + SIGMAS * rep.stderr {
                    violations.push(format!("d_A={d_a} d_R={d_r} d_A1={d_a1}"));
                }
                configs += 1;
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!("{configs} configurations, violations: {violations:?}"),
    )
}

fn typical_bounds() -> Result<Outcome> {
    const TOL: f64 = 1e-9;
    let probs = [0.9, 0.1];
    let eps = 0.1;
    let p = Distribution::new(probs.to_vec())?;
    let reports = [10, 20, 30, 40, 50, 60]
        .into_iter()
        .map(|n| typical_stats(&p, n, eps))
        .collect::<Result<Vec<_>>>()?;
    let masses: Vec<f64> = reports.iter().map(|r| r.mass).collect();
    let monotone = masses.windows(2).all(|w| w[1] >= w[0] - TOL);
    let bounded = reports.iter().all(|r| r.log_count <= r.bound_log_count + TOL);
    let mut oracle_ok = true;
    for r in reports.iter().filter(|r| r.n <= 20) {
        let (mass, count) = brute_typical(&probs, r.n, eps);
        let log_count = if count == 0 { f64::NEG_INFINITY } else { (count as f64).log2() };
        oracle_ok &= (r.mass - mass).abs() <= TOL && (r.log_count == log_count || (r.log_count - log_count).abs() <= TOL);
    }
    let shown: Vec<String> = masses.iter().map(|m| format!("{m:.3}")).collect();
    outcome(
        monotone && bounded && oracle_ok,
        format!(
            "mass {} (nondecreasing: {monotone}), size bound: {bounded}, enumeration agrees: {oracle_ok}",
            shown.join(" ")
        ),
    )
}

fn resource_derivations() -> Result<Outcome> {
    const TOL: f64 = 1e-9;
    let tp = builtin(Builtin::Teleportation, None)?;
    let mut worst_hash: f64 = 0.0;
    let mut worst_merge: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = stream_rng(1010, i);
        let env = rng.random_range(1..=4);
        let s = random_mixed(&[2, 2], &["A", "B"], env, &mut rng)?;
        let (ha, hb, hab) = (h(&s, &["A"]), h(&s, &["B"]), h(&s, &["A", "B"]));
        // I(A;R) = H(A) + H(R) − H(AR) with H(R) = H(AB), H(AR) = H(B)
        let half_i_ar = (0.5 * (ha + hab - hb)).max(0.0);
        let hashing = compose(&builtin(Builtin::Mother, Some(&s))?, &scale(&tp, half_i_ar)?);
        worst_hash = worst_hash.max((hashing.yield_of(&Token::Ebit) - (hb - hab)).abs());
        let merging = compose(&builtin(Builtin::Fqsw, Some(&s))?, &scale(&tp, half_i_ar)?);
        worst_merge = worst_merge.max((merging.cost(&Token::Ebit) - (hab - hb)).abs());
    }
    outcome(
        worst_hash <= TOL && worst_merge <= TOL,
        format!("hashing max deviation {worst_hash:.2e}, merging max deviation {worst_merge:.2e}"),
    )
}

fn information_inequalities() -> Result<Outcome> {
    const SLACK: f64 = 1e-9;
    const STATES: u64 = 1_000;
    let mut worst: f64 = 0.0;
    for i in 0..STATES {
        let mut rng = stream_rng(1111, i);
        let n = rng.random_range(3..=5usize);
        let names = labels("Q", n);
        let env = rng.random_range(1..=4);
        let s = random_mixed(&vec![2; n], &names, env, &mut rng)?;
        let a = vec![names[0].clone()];
        let b = vec![names[1].clone()];
        let ab = vec![names[0].clone(), names[1].clone()];
        let (xs, e): (Vec<Vec<String>>, Vec<String>) = if n == 5 || (n == 4 && i % 2 == 0) {
            let k = n - 1;
            (names[2..k].iter().map(|l| vec![l.clone()]).collect(), vec![names[k].clone()])
        } else {
            (names[2..].iter().map(|l| vec![l.clone()]).collect(), Vec::new())
        };
        let none: Vec<String> = Vec::new();

        // merging: I(A;B;X…) − I(A;B) = I(AB;X…)
        let mut split = vec![a.clone(), b.clone()];
        split.extend(xs.iter().cloned());
        let mut joined = vec![ab.clone()];
        joined.extend(xs.iter().cloned());
        let lhs = cond_multiparty_info(&s, &split, &none)? - mutual_info(&s, &a, &b)?;
        let rhs = cond_multiparty_info(&s, &joined, &none)?;
        worst = worst.max((lhs - rhs).abs());

        // monotonicity: I(AB;X…|E) ≥ I(A;X…|E)
        let mut with_a = vec![a.clone()];
        with_a.extend(xs.iter().cloned());
        let big = cond_multiparty_info(&s, &joined, &e)?;
        let small = cond_multiparty_info(&s, &with_a, &e)?;
        worst = worst.max(small - big);

        // chain-type rule: I(AA';X…|E) ≥ I(A;X…|A'E)
        let mut b_e = b.clone();
        b_e.extend(e.iter().cloned());
        let conditioned = cond_multiparty_info(&s, &with_a, &b_e)?;
        worst = worst.max(conditioned - big);
    }
    outcome(worst <= SLACK, format!("{STATES} states, worst violation {worst:.2e}"))
}

fn blackhole_thresholds() -> Result<Outcome> {
    const TOL: f64 = 1e-9;
    let dropped = bell().relabel(&["A", "H"])?;
    let simple = blackhole_threshold(&dropped, &["A"], &BlackHoleMode::Simple)?;
    let mut worst_lost: f64 = 0.0;
    for i in 0..20u64 {
        let mut rng = stream_rng(1212, i);
        let psi = random_pure(&[2, 2, 2, 2], &["A", "H", "B2", "L"], &mut rng)?;
        let mode = BlackHoleMode::Lost {
            b2: vec!["B2".into()],
            l: vec!["L".into()],
        };
        let got = blackhole_threshold(&psi, &["A"], &mode)?;
        let i_bl = h_pure(&psi, &["B2"]) + h_pure(&psi, &["L"]) - h_pure(&psi, &["B2", "L"]);
        worst_lost = worst_lost.max((got - (h_pure(&psi, &["A"]) + 0.5 * i_bl)).abs());
    }
    outcome(
        (simple - 1.0).abs() <= TOL && worst_lost <= TOL,
        format!("simple {simple:.9}, lost-mode max deviation {worst_lost:.2e}"),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<Outcome>);

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        (1, "Bell-state entropy ledger", secs(1), bell_ledger),
        (2, "Shannon entropy examples", secs(1), shannon_examples),
        (3, "GHZ squashed entanglement", secs(30), ghz_squashed),
        (4, "W-state squashed entanglement", secs(1), w_value),
        (5, "separable-state optimality", secs(10), separable_optimality),
        (6, "rate-region vertex equivalence", secs(300), vertex_equivalence),
        (7, "two-party region reduction", secs(30), two_party_reduction),
        (8, "one-shot decoupling bound", secs(300), decoupling_grid),
        (9, "typical-set bounds", secs(30), typical_bounds),
        (10, "resource-inequality derivations", secs(30), resource_derivations),
        (11, "multiparty-information inequalities", secs(120), information_inequalities),
        (12, "black-hole thresholds", secs(1), blackhole_thresholds),
    ];
    let mut failed = Vec::new();
    let mut lines = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let line = format!(
            "{} criterion {id:>2} {name}: {detail} [{:.2}s / {}s]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        println!("{line}");
        lines.push(line);
        if !passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}\n{}", lines.join("\n"));
}

#[test]
fn oracle_self_check() {
    assert!((shannon_bits(&[0.25; 4]) - 2.0).abs() < 1e-15);
    let (mass, count) = brute_typical(&[0.5, 0.5], 6, 0.1);
    assert_eq!(count, 64);
    assert!((mass - 1.0).abs() < 1e-12);
    let _ = subset_of(&[0]);
}
