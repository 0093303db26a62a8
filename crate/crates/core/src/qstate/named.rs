use super::{MultipartiteState, PureState, QState};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};

/// Catalog of the standard states used throughout the examples and tests.
#[derive(Clone, Debug)]
pub enum NamedState {
    /// `(|00⟩ + |11⟩)/√2` on `A`, `B`.
    Bell,
    /// `(|0…0⟩ + |1…1⟩)/√2` on `X1…Xm`.
    Ghz(usize),
    /// Uniform superposition of weight-one strings on `X1…Xm`.
    W(usize),
    /// Mixture of the given kets; all members share one layout.
    Separable(Vec<(f64, PureState)>),
    /// `k` Bell pairs on `A1 B1 A2 B2 …`.
    ProductBellPairs(usize),
    /// `|Φ⟩^{A1 R} ⊗ |0⟩^{A2}`: one sender holds half an ebit with the reference.
    BellPlusIdle,
}

pub fn build_named_state(kind: &NamedState) -> Result<QState> {
    Ok(match kind {
        NamedState::Bell => bell().into(),
        NamedState::Ghz(m) => ghz(*m)?.into(),
        NamedState::W(m) => w_state(*m)?.into(),
        NamedState::Separable(ensemble) => separable(ensemble)?.into(),
        NamedState::ProductBellPairs(k) => product_bell_pairs(*k)?.into(),
        NamedState::BellPlusIdle => {
            let pair = bell().relabel(&["A1", "R"])?;
            pair.tensor(&basis_ket(&[2], &["A2"], &[0])?)?.into()
        }
    })
}

fn qubit_labels(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("X{i}")).collect()
}

/// Computational-basis ket with the given digits.
pub fn basis_ket<S: AsRef<str>>(dims: &[usize], labels: &[S], digits: &[usize]) -> Result<PureState> {
    if digits.len() != dims.len() {
        return Err(Error::Dimension("one digit per subsystem required".into()));
    }
    let mut index = 0;
    for (&digit, &d) in digits.iter().zip(dims) {
        if digit >= d {
            return Err(Error::Domain(format!("digit {digit} out of range for dimension {d}")));
        }
        index = index * d + digit;
    }
    let total: usize = dims.iter().product();
    let mut amps = CVector::zeros(total);
    amps[index] = c(1.0, 0.0);
    PureState::new(dims.to_vec(), labels, amps)
}

pub fn bell() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = CVector::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
    PureState::from_raw(vec![2, 2], vec!["A".into(), "B".into()], amps)
}

pub fn ghz(m: usize) -> Result<PureState> {
    if m < 2 {
        return Err(Error::Domain(format!("GHZ needs at least 2 parties, got {m}")));
    }
    let d = 1usize << m;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = CVector::zeros(d);
    amps[0] = c(h, 0.0);
    amps[d - 1] = c(h, 0.0);
    PureState::new(vec![2; m], &qubit_labels(m), amps)
}

pub fn w_state(m: usize) -> Result<PureState> {
    if m < 2 {
        return Err(Error::Domain(format!("W needs at least 2 parties, got {m}")));
    }
    let d = 1usize << m;
    let a = 1.0 / (m as f64).sqrt();
    let mut amps = CVector::zeros(d);
    for i in 0..m {
        amps[1 << i] = c(a, 0.0);
    }
    PureState::new(vec![2; m], &qubit_labels(m), amps)
}

pub fn product_bell_pairs(k: usize) -> Result<PureState> {
    if k == 0 {
        return Err(Error::Domain("need at least one Bell pair".into()));
    }
    let mut state = bell().relabel(&["A1", "B1"])?;
    for i in 2..=k {
        state = state.tensor(&bell().relabel(&[format!("A{i}"), format!("B{i}")])?)?;
    }
    Ok(state)
}

/// Tensor product of single-party kets.
pub fn product_pure(factors: &[PureState]) -> Result<PureState> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidInput("empty product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.tensor(f))
}

/// `Σ p_j |ψ_j⟩⟨ψ_j|`; probabilities must be nonnegative and sum to 1 within 1e-10.
pub fn separable(ensemble: &[(f64, PureState)]) -> Result<MultipartiteState> {
    let (_, first) = ensemble
        .first()
        .ok_or_else(|| Error::InvalidInput("empty ensemble".into()))?;
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| *p < 0.0 || !p.is_finite()) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "ensemble probabilities must be nonnegative and sum to 1 (sum {total})"
        )));
    }
    let d = first.amplitudes().len();
    let mut m = CMatrix::zeros(d, d);
    for (p, psi) in ensemble {
        if psi.dims != first.dims || psi.labels != first.labels {
            return Err(Error::InvalidInput("ensemble members have different layouts".into()));
        }
        m += psi.amplitudes() * psi.amplitudes().adjoint() * c(*p, 0.0);
    }
    MultipartiteState::new(first.dims.clone(), &first.labels, m)
}

/// Two-qubit isotropic state `v |Φ⟩⟨Φ| + (1 − v) 𝟙/4` on `A`, `B`.
pub fn isotropic(visibility: f64) -> Result<MultipartiteState> {
    let noise = MultipartiteState::maximally_mixed(vec![2, 2], &["A", "B"])?;
    bell().to_density().mix(&noise, visibility)
}
