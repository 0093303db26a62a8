//! Typical-set statistics computed exactly over type classes, and the
//! classical distributed source-coding constraints.
//!
//! A length-`n` sequence is entropy typical when
//! `2^{−n(H+ε)} ≤ p(xⁿ) ≤ 2^{−n(H−ε)}`. Because `p(xⁿ)` depends only on the
//! sequence's type (its symbol counts), mass and cardinality of the typical
//! set are sums over type classes weighted by multinomial coefficients. All
//! sums run in log space.

use crate::entropy::{shannon, Distribution};
use crate::error::{Error, Result};
use crate::rateregion::SetFunction;
use serde::Serialize;

/// Slack on the typicality test, relative to `n`, absorbing rounding in `log₂ p`.
const TYPICALITY_SLACK: f64 = 1e-12;
const MAX_TYPE_CLASSES: f64 = 2e6;

#[derive(Clone, Debug, Serialize)]
pub struct TypicalReport {
    pub n: usize,
    pub epsilon: f64,
    /// `H(X)` in bits.
    pub entropy: f64,
    /// Probability of the typical set.
    pub mass: f64,
    /// `log₂ |T|`; `-inf` when the typical set is empty.
    pub log_count: f64,
    /// `n (H + ε)`.
    pub bound_log_count: f64,
}

impl TypicalReport {
    /// Typical-set size per symbol, `log₂|T| / n`.
    pub fn rate(&self) -> f64 {
        if self.log_count.is_finite() {
            self.log_count / self.n as f64
        } else {
            0.0
        }
    }
}

fn log2_sum_exp2(acc: f64, x: f64) -> f64 {
    if acc == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if acc > x { (acc, x) } else { (x, acc) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

fn check_capacity(support: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    let ok = match support {
        0 | 1 => true,
        2 => n <= 60,
        3 => n <= 30,
        a => {
            // number of types C(n + a − 1, a − 1)
            let classes = (1..a).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64);
            n <= 30 && classes <= MAX_TYPE_CLASSES
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Capacity(format!(
            "type-class enumeration for alphabet {support} at n = {n} is beyond the supported size"
        )))
    }
}

/// Visit every composition of `n` into `parts` nonnegative counts.
fn for_each_type(n: usize, parts: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(left: usize, slot: usize, counts: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if slot + 1 == counts.len() {
            counts[slot] = left;
            visit(counts);
            return;
        }
        for k in 0..=left {
            counts[slot] = k;
            rec(left - k, slot + 1, counts, visit);
        }
    }
    let mut counts = vec![0; parts];
    rec(n, 0, &mut counts, visit);
}

struct TypeSums {
    log_typical_mass: f64,
    log_atypical_mass: f64,
    log_count: f64,
}

fn type_sums(p: &Distribution, n: usize, epsilon: f64) -> Result<(f64, TypeSums)> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::Domain(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let h = shannon(p);
    // zero-probability symbols never occur in a typical sequence
    let support: Vec<f64> = p.probs().iter().copied().filter(|&q| q > 0.0).collect();
    check_capacity(support.len(), n)?;
    let log_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).log2();
            Some(*acc)
        }))
        .collect();
    let log_p: Vec<f64> = support.iter().map(|q| q.log2()).collect();
    let lower = n as f64 * (h - epsilon) - TYPICALITY_SLACK * n as f64;
    let upper = n as f64 * (h + epsilon) + TYPICALITY_SLACK * n as f64;
    let mut sums = TypeSums {
        log_typical_mass: f64::NEG_INFINITY,
        log_atypical_mass: f64::NEG_INFINITY,
        log_count: f64::NEG_INFINITY,
    };
    for_each_type(n, support.len(), &mut |counts| {
        let log_multinomial = log_fact[n] - counts.iter().map(|&k| log_fact[k]).sum::<f64>();
        let log_seq: f64 = counts
            .iter()
            .zip(&log_p)
            .filter(|(&k, _)| k > 0)
            .map(|(&k, lp)| k as f64 * lp)
            .sum();
        let class_mass = log_multinomial + log_seq;
        if (lower..=upper).contains(&-log_seq) {
            sums.log_typical_mass = log2_sum_exp2(sums.log_typical_mass, class_mass);
            sums.log_count = log2_sum_exp2(sums.log_count, log_multinomial);
        } else {
            sums.log_atypical_mass = log2_sum_exp2(sums.log_atypical_mass, class_mass);
        }
    });
    Ok((h, sums))
}

/// Exact mass and cardinality of the ε-typical set of `p` at block length `n`.
pub fn typical_stats(p: &Distribution, n: usize, epsilon: f64) -> Result<TypicalReport> {
    let (entropy, sums) = type_sums(p, n, epsilon)?;
    Ok(TypicalReport {
        n,
        epsilon,
        entropy,
        mass: sums.log_typical_mass.exp2().clamp(0.0, 1.0),
        log_count: sums.log_count,
        bound_log_count: n as f64 * (entropy + epsilon),
    })
}

/// Probability that a length-`n` sequence is not ε-typical.
pub fn aep_tail(p: &Distribution, n: usize, epsilon: f64) -> Result<f64> {
    let (_, sums) = type_sums(p, n, epsilon)?;
    Ok(sums.log_atypical_mass.exp2().clamp(0.0, 1.0))
}

/// Typical-projector statistics for a density matrix with spectrum `eigvals`:
/// `Tr Π` is the typical-set size of the spectrum and `Tr[ρ^{⊗n} Π]` its mass.
pub fn schumacher_rate_demo(eigvals: &Distribution, n: usize, epsilon: f64) -> Result<TypicalReport> {
    typical_stats(eigvals, n, epsilon)
}

/// Constraints `Σ_{k∈K} R_k ≥ H(X_K | X_{K̄})` for a joint over `m ≤ 6` variables.
pub fn classical_sw_setfunction(joint: &Distribution) -> Result<SetFunction> {
    let m = joint.num_vars();
    if !(1..=6).contains(&m) {
        return Err(Error::Capacity(format!("{m} variables; at most 6 supported")));
    }
    let h_all = shannon(joint);
    let f = SetFunction::from_fn(m, |k| {
        let complement: Vec<bool> = (0..m).map(|i| k & (1 << i) == 0).collect();
        let h_rest = if complement.iter().any(|&b| b) {
            shannon(&joint.marginal(&complement))
        } else {
            0.0
        };
        h_all - h_rest
    })?;
    let check = crate::rateregion::superadditivity_check(&f);
    if !check.holds {
        return Err(Error::Invariant(format!(
            "classical constraints not supermodular (margin {:e})",
            check.worst_margin
        )));
    }
    Ok(f)
}
