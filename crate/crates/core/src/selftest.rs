//! Built-in sanity checks: the elementary worked examples of each module,
//! runnable from the command line.

use crate::classical::typical_stats;
use crate::decouple::{blackhole_threshold, decoupling_trial, BlackHoleMode, DecouplingTrialConfig};
use crate::entropy::{binary_entropy, mutual_info, parts, shannon, von_neumann, Distribution};
use crate::error::Result;
use crate::qstate::{
    basis_ket, bell, build_named_state, product_pure, MultipartiteState, NamedState, QuantumState,
    UnitaryMatrix,
};
use crate::rateregion::{corner_point, inner_constants, membership, RateTuple};
use crate::rescalc::{builtin, compose, scale, Builtin, Token};
use crate::squashed::{esq_flag_upper, esq_pure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Module {
    Qstate,
    Entropy,
    Classical,
    Squashed,
    Rateregion,
    Decouple,
    Rescalc,
}

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Case = (&'static str, fn() -> Result<bool>);

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

fn cases(module: Module) -> Vec<Case> {
    match module {
        Module::Qstate => vec![
            ("bell marginal is maximally mixed", || {
                let m = bell().partial_trace(&["A"])?;
                let half = MultipartiteState::maximally_mixed(vec![2], &["A"])?;
                Ok(crate::linalg::max_abs_entry(&(m.matrix() - half.matrix())) < 1e-12)
            }),
            ("pure product purifies with trivial reference", || {
                let k = basis_ket(&[2, 2], &["A", "B"], &[0, 1])?.to_density();
                Ok(k.purify("R")?.dims() == [2, 2, 1])
            }),
        ],
        Module::Entropy => vec![
            ("fair coin has one bit", || Ok(shannon(&Distribution::new(vec![0.5, 0.5])?) == 1.0)),
            ("h(0) = h(1) = 0", || Ok(binary_entropy(0.0) == 0.0 && binary_entropy(1.0) == 0.0)),
            ("product pure state has zero mutual information", || {
                let s = basis_ket(&[2, 3], &["A", "B"], &[1, 2])?;
                Ok(mutual_info(&s, &["A"], &["B"])?.abs() < 1e-12)
            }),
        ],
        Module::Classical => vec![
            ("deterministic source is always typical", || {
                let r = typical_stats(&Distribution::new(vec![1.0, 0.0])?, 12, 0.1)?;
                Ok(r.mass == 1.0 && r.log_count == 0.0)
            }),
            ("uniform source: every sequence typical", || {
                let r = typical_stats(&Distribution::uniform(2)?, 10, 0.1)?;
                Ok(close(r.mass, 1.0) && close(r.log_count, 10.0))
            }),
        ],
        Module::Squashed => vec![
            ("product pure state has zero", || {
                let s = product_pure(&[basis_ket(&[2], &["A"], &[0])?, basis_ket(&[2], &["B"], &[1])?])?;
                Ok(esq_pure(&s, &parts(&[&["A"], &["B"]]))?.abs() < 1e-12)
            }),
            ("single-element product ensemble has zero", || {
                let k = basis_ket(&[2, 2], &["A", "B"], &[0, 1])?;
                Ok(esq_flag_upper(&[(1.0, k)], &parts(&[&["A"], &["B"]]))?.abs() < 1e-9)
            }),
        ],
        Module::Rateregion => vec![
            ("bell-plus-idle constants and corner", || {
                let s = build_named_state(&NamedState::BellPlusIdle)?;
                let f = inner_constants(&s, &parts(&[&["A1"], &["A2"]]), &["R"])?;
                let q = corner_point(&f, &[0, 1])?;
                Ok(close(f.get(0b01), 1.0)
                    && close(f.get(0b10), 0.0)
                    && close(f.get(0b11), 1.0)
                    && q.approx_eq(&RateTuple(vec![1.0, 0.0]), 1e-9))
            }),
            ("origin is outside a nonzero region", || {
                let s = build_named_state(&NamedState::BellPlusIdle)?;
                let f = inner_constants(&s, &parts(&[&["A1"], &["A2"]]), &["R"])?;
                Ok(!membership(&f, &RateTuple(vec![0.0, 0.0]))?.member)
            }),
        ],
        Module::Decouple => vec![
            ("trivial A2 gives zero residual", || {
                let s = bell().relabel(&["A", "R"])?;
                let cfg = DecouplingTrialConfig::new(&s, &["A"], &["R"], 2, 30, 0)?;
                Ok(decoupling_trial(&cfg, &UnitaryMatrix::identity(2))? < 1e-20)
            }),
            ("uncorrelated pure A has zero threshold", || {
                let s = product_pure(&[basis_ket(&[2], &["A"], &[0])?, basis_ket(&[2], &["B"], &[0])?])?;
                Ok(blackhole_threshold(&s, &["A"], &BlackHoleMode::Simple)?.abs() < 1e-12)
            }),
        ],
        Module::Rescalc => vec![
            ("teleportation catalog entry", || {
                let t = builtin(Builtin::Teleportation, None)?;
                Ok(t.to_string() == "1.000 [qq] + 2.000 [c→c] ≥ 1.000 [q→q]")
            }),
            ("scale by two", || {
                let t = scale(&builtin(Builtin::Teleportation, None)?, 2.0)?;
                Ok(t.lhs.weight(&Token::Ebit) == 2.0 && t.rhs.weight(&Token::QuantumChannel) == 2.0)
            }),
            ("composition with zero-scaled inequality", || {
                let m = builtin(Builtin::Mother, Some(&bell().to_density()))?;
                let z = scale(&builtin(Builtin::Teleportation, None)?, 0.0)?;
                let c = compose(&m, &z);
                Ok(c.lhs == m.lhs && c.rhs == m.rhs)
            }),
            ("bell entropy of a marginal", || {
                Ok(close(von_neumann(&bell(), &["A"])?, 1.0))
            }),
        ],
    }
}

/// Runs the checks for `module`; errors count as failures.
pub fn run(module: Module) -> Vec<CaseResult> {
    cases(module)
        .into_iter()
        .map(|(name, case)| match case() {
            Ok(passed) => CaseResult {
                name,
                passed,
                detail: String::new(),
            },
            Err(e) => CaseResult {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}
