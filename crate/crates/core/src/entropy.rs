//! Entropy functionals in bits: Shannon and von Neumann entropy, conditional
//! and mutual information, and the (conditional) multiparty information
//! `Σ H(X_i) − H(X_1 … X_m)`.

use crate::error::{Error, Result};
use crate::linalg::ZERO_EIGENVALUE;
use crate::qstate::{clipped_spectrum, trace_distance, MultipartiteState, QuantumState};
use serde::Serialize;

/// Tolerance on the normalization of probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A probability vector, optionally shaped as a joint over several variables
/// (row-major, first variable most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
    shape: Option<Vec<usize>>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probs(&probs)?;
        Ok(Self { probs, shape: None })
    }

    pub fn joint(shape: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = shape.iter().product();
        if shape.is_empty() || shape.contains(&0) || size != probs.len() {
            return Err(Error::InvalidInput(format!(
                "joint shape {shape:?} does not match {} probabilities",
                probs.len()
            )));
        }
        validate_probs(&probs)?;
        Ok(Self {
            probs,
            shape: Some(shape),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("empty distribution".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Variable alphabet sizes; a plain distribution is one variable.
    pub fn shape(&self) -> Vec<usize> {
        self.shape.clone().unwrap_or_else(|| vec![self.probs.len()])
    }

    pub fn num_vars(&self) -> usize {
        self.shape().len()
    }

    /// Marginal on the variables flagged in `keep`, in their original order.
    pub fn marginal(&self, keep: &[bool]) -> Distribution {
        let shape = self.shape();
        let out_shape: Vec<usize> = shape.iter().zip(keep).filter(|(_, &k)| k).map(|(&d, _)| d).collect();
        let size: usize = out_shape.iter().product();
        let mut out = vec![0.0; size.max(1)];
        let mut digits = vec![0usize; shape.len()];
        for &p in &self.probs {
            let mut idx = 0;
            for (pos, &d) in shape.iter().enumerate() {
                if keep[pos] {
                    idx = idx * d + digits[pos];
                }
            }
            out[idx] += p;
            for pos in (0..shape.len()).rev() {
                digits[pos] += 1;
                if digits[pos] < shape[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
        Distribution {
            probs: out,
            shape: if out_shape.is_empty() { None } else { Some(out_shape) },
        }
    }
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidInput("empty distribution".into()));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidInput(format!("invalid probability {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidInput(format!("probabilities sum to {total}, expected 1")));
    }
    Ok(())
}

/// `−Σ p log₂ p` over entries above the zero threshold.
pub fn entropy_bits(values: &[f64]) -> f64 {
    let h: f64 = values
        .iter()
        .filter(|&&p| p > ZERO_EIGENVALUE)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

pub fn shannon(p: &Distribution) -> f64 {
    entropy_bits(p.probs())
}

/// Binary entropy `h(x)`.
pub fn binary_entropy(x: f64) -> f64 {
    entropy_bits(&[x, 1.0 - x])
}

fn mask_entropy<S: QuantumState + ?Sized>(s: &S, mask: &[bool]) -> Result<f64> {
    if !mask.iter().any(|&k| k) {
        return Ok(0.0);
    }
    Ok(entropy_bits(&clipped_spectrum(&s.reduced_by_mask(mask))?))
}

fn union_mask(masks: &[&[bool]]) -> Vec<bool> {
    let n = masks[0].len();
    (0..n).map(|i| masks.iter().any(|m| m[i])).collect()
}

fn ensure_disjoint(masks: &[(&str, &[bool])]) -> Result<()> {
    for (i, (na, a)) in masks.iter().enumerate() {
        for (nb, b) in &masks[i + 1..] {
            if a.iter().zip(b.iter()).any(|(&x, &y)| x && y) {
                return Err(Error::Overlap(format!("{na} and {nb} share a subsystem")));
            }
        }
    }
    Ok(())
}

/// Entropy of the marginal on `subset`; an empty subset is an error.
pub fn von_neumann<Q: QuantumState + ?Sized, S: AsRef<str>>(s: &Q, subset: &[S]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::Label("entropy of an empty subsystem set".into()));
    }
    mask_entropy(s, &s.mask(subset)?)
}

/// Like [`von_neumann`] but an empty set has entropy 0.
pub fn entropy_or_zero<Q: QuantumState + ?Sized, S: AsRef<str>>(s: &Q, subset: &[S]) -> Result<f64> {
    mask_entropy(s, &s.mask(subset)?)
}

/// `H(A|B) = H(AB) − H(B)`.
pub fn cond_entropy<Q: QuantumState + ?Sized, S: AsRef<str>>(s: &Q, a: &[S], b: &[S]) -> Result<f64> {
    let ma = s.mask(a)?;
    let mb = s.mask(b)?;
    ensure_disjoint(&[("A", &ma), ("B", &mb)])?;
    Ok(mask_entropy(s, &union_mask(&[&ma, &mb]))? - mask_entropy(s, &mb)?)
}

/// `I(A;B) = H(A) + H(B) − H(AB)`.
pub fn mutual_info<Q: QuantumState + ?Sized, S: AsRef<str>>(s: &Q, a: &[S], b: &[S]) -> Result<f64> {
    let ma = s.mask(a)?;
    let mb = s.mask(b)?;
    ensure_disjoint(&[("A", &ma), ("B", &mb)])?;
    Ok(mask_entropy(s, &ma)? + mask_entropy(s, &mb)? - mask_entropy(s, &union_mask(&[&ma, &mb]))?)
}

/// `I(A;B|C) = H(AC) + H(BC) − H(ABC) − H(C)`.
pub fn cond_mutual_info<Q: QuantumState + ?Sized, S: AsRef<str>>(
    s: &Q,
    a: &[S],
    b: &[S],
    c: &[S],
) -> Result<f64> {
    let ma = s.mask(a)?;
    let mb = s.mask(b)?;
    let mc = s.mask(c)?;
    ensure_disjoint(&[("A", &ma), ("B", &mb), ("C", &mc)])?;
    Ok(mask_entropy(s, &union_mask(&[&ma, &mc]))? + mask_entropy(s, &union_mask(&[&mb, &mc]))?
        - mask_entropy(s, &union_mask(&[&ma, &mb, &mc]))?
        - mask_entropy(s, &mc)?)
}

/// Ordered disjoint parties `X_1 … X_m` plus a conditioning set `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartyPartition {
    parts: Vec<Vec<String>>,
    conditioning: Vec<String>,
}

impl PartyPartition {
    pub fn new(parts: Vec<Vec<String>>, conditioning: Vec<String>) -> Result<Self> {
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidInput("every party needs at least one subsystem".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in parts.iter().flatten().chain(&conditioning) {
            if !seen.insert(l.as_str()) {
                return Err(Error::Overlap(format!("subsystem `{l}` appears twice")));
            }
        }
        Ok(Self { parts, conditioning })
    }

    /// One party per label.
    pub fn singletons<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::new(labels.iter().map(|l| vec![l.as_ref().to_string()]).collect(), Vec::new())
    }

    pub fn with_conditioning<S: AsRef<str>>(mut self, e: &[S]) -> Result<Self> {
        self.conditioning = e.iter().map(|l| l.as_ref().to_string()).collect();
        Self::new(self.parts, self.conditioning)
    }

    pub fn parts(&self) -> &[Vec<String>] {
        &self.parts
    }

    pub fn conditioning(&self) -> &[String] {
        &self.conditioning
    }

    pub fn all_labels(&self) -> Vec<String> {
        self.parts.iter().flatten().cloned().collect()
    }

    /// `I(X_1;…;X_m|E)` on `s`.
    pub fn evaluate<Q: QuantumState + ?Sized>(&self, s: &Q) -> Result<f64> {
        cond_multiparty_info(s, &self.parts, &self.conditioning)
    }
}

/// Convenience constructor for party lists in tests and examples.
pub fn parts(groups: &[&[&str]]) -> Vec<Vec<String>> {
    groups
        .iter()
        .map(|g| g.iter().map(|s| s.to_string()).collect())
        .collect()
}

/// `Σ H(X_i) − H(X_1 … X_m)`.
pub fn multiparty_info<Q: QuantumState + ?Sized>(s: &Q, parts: &[Vec<String>]) -> Result<f64> {
    cond_multiparty_info(s, parts, &[] as &[String])
}

/// `Σ H(X_i E) − H(X_1 … X_m E) − (m − 1) H(E)`.
pub fn cond_multiparty_info<Q: QuantumState + ?Sized, S: AsRef<str>>(
    s: &Q,
    parts: &[Vec<String>],
    e: &[S],
) -> Result<f64> {
    if parts.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "multiparty information needs at least 2 parties, got {}",
            parts.len()
        )));
    }
    let me = s.mask(e)?;
    let masks = parts.iter().map(|p| s.mask(p)).collect::<Result<Vec<_>>>()?;
    let mut named: Vec<(String, &[bool])> = masks
        .iter()
        .enumerate()
        .map(|(i, m)| (format!("X{}", i + 1), m.as_slice()))
        .collect();
    named.push(("E".to_string(), &me));
    let refs: Vec<(&str, &[bool])> = named.iter().map(|(n, m)| (n.as_str(), *m)).collect();
    ensure_disjoint(&refs)?;
    let mut total = 0.0;
    for m in &masks {
        total += mask_entropy(s, &union_mask(&[m, &me]))?;
    }
    let mut all: Vec<&[bool]> = masks.iter().map(|m| m.as_slice()).collect();
    all.push(&me);
    total -= mask_entropy(s, &union_mask(&all))?;
    total -= (parts.len() as f64 - 1.0) * mask_entropy(s, &me)?;
    Ok(total)
}

/// Outcome of the conditional-entropy continuity check.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    /// `|H(A|B)_ρ − H(A|B)_σ|`
    pub lhs: f64,
    /// `4ε log₂ d_A + 2h(ε)`
    pub bound: f64,
    /// `½ Tr|ρ − σ|`
    pub epsilon: f64,
    pub holds: bool,
}

/// Continuity of conditional entropy with `ε = ½ Tr|ρ − σ|`.
pub fn af_conditional_continuity_check<S: AsRef<str>>(
    rho: &MultipartiteState,
    sigma: &MultipartiteState,
    a: &[S],
    b: &[S],
) -> Result<ContinuityReport> {
    if rho.dims() != sigma.dims() || rho.labels() != sigma.labels() {
        return Err(Error::Dimension("states have different layouts".into()));
    }
    // the bound uses the normalized distance; qstate's is Tr|ρ − σ|
    let epsilon = (0.5 * trace_distance(rho, sigma)?).min(1.0);
    let lhs = (cond_entropy(rho, a, b)? - cond_entropy(sigma, a, b)?).abs();
    let d_a = rho.dim_of(a)? as f64;
    let bound = 4.0 * epsilon * d_a.log2() + 2.0 * binary_entropy(epsilon);
    Ok(ContinuityReport {
        lhs,
        bound,
        epsilon,
        holds: lhs <= bound + 1e-9,
    })
}
