//! Dense multipartite quantum states.
//!
//! Every state carries an ordered list of subsystem dimensions and a matching
//! list of distinct labels. The first subsystem is the most significant digit
//! of the computational-basis index. Subsets of subsystems are always named by
//! label; results of a partial trace keep the subsystems in the state's own
//! order regardless of the order in which the labels were requested.
//!
//! Trace distance follows the unnormalized convention `TD(ρ, σ) = Tr|ρ − σ|`,
//! so it ranges over `[0, 2]`. Some texts carry an extra factor ½; callers
//! that need the normalized distance must halve it explicitly.

mod json;
mod named;
mod random;

pub use json::{state_from_json, state_from_value, state_to_json, state_to_value};
pub use named::{
    basis_ket, bell, build_named_state, ghz, isotropic, product_bell_pairs, product_pure, separable,
    w_state, NamedState,
};
pub use random::{random_mixed, random_pure, stream_rng};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, POSITIVITY_TOL, ZERO_EIGENVALUE};
use rand::Rng;
use std::collections::HashSet;

/// Largest total Hilbert-space dimension accepted anywhere in the crate.
pub const MAX_TOTAL_DIM: usize = 1 << 12;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-9;

/// Shared read access to anything that has labeled subsystems and marginals.
pub trait QuantumState {
    fn dims(&self) -> &[usize];
    fn labels(&self) -> &[String];

    /// Reduced density matrix on the subsystems flagged in `keep`.
    /// An all-false mask yields the 1×1 matrix `[1]`.
    fn reduced_by_mask(&self, keep: &[bool]) -> CMatrix;

    fn total_dim(&self) -> usize {
        self.dims().iter().product()
    }

    fn label_position(&self, label: &str) -> Result<usize> {
        self.labels()
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Label(format!("unknown label `{label}`")))
    }

    /// Boolean mask for a label set. Unknown or repeated labels are errors.
    fn mask<S: AsRef<str>>(&self, subset: &[S]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.dims().len()];
        for s in subset {
            let pos = self.label_position(s.as_ref())?;
            if mask[pos] {
                return Err(Error::Label(format!("label `{}` repeated", s.as_ref())));
            }
            mask[pos] = true;
        }
        Ok(mask)
    }

    fn reduced_matrix<S: AsRef<str>>(&self, subset: &[S]) -> Result<CMatrix> {
        let mask = self.mask(subset)?;
        Ok(self.reduced_by_mask(&mask))
    }

    fn dim_of<S: AsRef<str>>(&self, subset: &[S]) -> Result<usize> {
        let mask = self.mask(subset)?;
        Ok(self
            .dims()
            .iter()
            .zip(&mask)
            .filter(|(_, &k)| k)
            .map(|(d, _)| d)
            .product())
    }
}

/// Index bookkeeping for splitting a composite index into kept and traced parts.
pub(crate) struct IndexSplit {
    pub keep_dim: usize,
    pub trace_dim: usize,
    pub keep_index: Vec<usize>,
    pub trace_index: Vec<usize>,
}

pub(crate) fn split_indices(dims: &[usize], keep: &[bool]) -> IndexSplit {
    let total: usize = dims.iter().product();
    let keep_dim: usize = dims.iter().zip(keep).filter(|(_, &k)| k).map(|(d, _)| d).product();
    let trace_dim = total / keep_dim;
    let mut keep_index = vec![0; total];
    let mut trace_index = vec![0; total];
    let mut digits = vec![0usize; dims.len()];
    for i in 0..total {
        let (mut ki, mut ti) = (0, 0);
        for (pos, &d) in dims.iter().enumerate() {
            if keep[pos] {
                ki = ki * d + digits[pos];
            } else {
                ti = ti * d + digits[pos];
            }
        }
        keep_index[i] = ki;
        trace_index[i] = ti;
        // increment mixed-radix counter, last subsystem fastest
        for pos in (0..dims.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < dims[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    IndexSplit {
        keep_dim,
        trace_dim,
        keep_index,
        trace_index,
    }
}

pub(crate) fn partial_trace_matrix(matrix: &CMatrix, dims: &[usize], keep: &[bool]) -> CMatrix {
    if keep.iter().all(|&k| k) {
        return matrix.clone();
    }
    let split = split_indices(dims, keep);
    // group full indices by their traced coordinate
    let mut groups = vec![vec![0usize; split.keep_dim]; split.trace_dim];
    for (i, (&ki, &ti)) in split.keep_index.iter().zip(&split.trace_index).enumerate() {
        groups[ti][ki] = i;
    }
    let mut out = CMatrix::zeros(split.keep_dim, split.keep_dim);
    for group in &groups {
        for (a, &i) in group.iter().enumerate() {
            for (b, &j) in group.iter().enumerate() {
                out[(a, b)] += matrix[(i, j)];
            }
        }
    }
    out
}

pub(crate) fn validate_layout(dims: &[usize], labels: &[String]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::InvalidInput("state needs at least one subsystem".into()));
    }
    if dims.len() != labels.len() {
        return Err(Error::Label(format!(
            "{} dims but {} labels",
            dims.len(),
            labels.len()
        )));
    }
    if let Some(pos) = dims.iter().position(|&d| d == 0) {
        return Err(Error::Domain(format!("subsystem `{}` has dimension 0", labels[pos])));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::Label(format!("duplicate label `{l}`")));
        }
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if total > MAX_TOTAL_DIM {
        return Err(Error::Capacity(format!(
            "total dimension {total} exceeds {MAX_TOTAL_DIM}"
        )));
    }
    Ok(())
}

fn owned_labels<S: AsRef<str>>(labels: &[S]) -> Vec<String> {
    labels.iter().map(|s| s.as_ref().to_string()).collect()
}

fn concat_layout(
    a: (&[usize], &[String]),
    b: (&[usize], &[String]),
) -> Result<(Vec<usize>, Vec<String>)> {
    if let Some(dup) = a.1.iter().find(|l| b.1.contains(l)) {
        return Err(Error::Label(format!("label `{dup}` present on both factors")));
    }
    let dims: Vec<usize> = a.0.iter().chain(b.0).copied().collect();
    let labels: Vec<String> = a.1.iter().chain(b.1).cloned().collect();
    validate_layout(&dims, &labels)?;
    Ok((dims, labels))
}

/// Eigenvalues with positivity drift clipped; errors when drift exceeds the tolerance.
pub fn clipped_spectrum(matrix: &CMatrix) -> Result<Vec<f64>> {
    linalg::eigvalsh(matrix)
        .into_iter()
        .map(|v| {
            if v >= 0.0 {
                Ok(v)
            } else if v >= -POSITIVITY_TOL {
                Ok(0.0)
            } else {
                Err(Error::Invariant(format!("negative eigenvalue {v:e}")))
            }
        })
        .collect()
}

/// A density operator on labeled subsystems.
#[derive(Clone, Debug)]
pub struct MultipartiteState {
    dims: Vec<usize>,
    labels: Vec<String>,
    matrix: CMatrix,
}

impl MultipartiteState {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new<S: AsRef<str>>(dims: Vec<usize>, labels: &[S], matrix: CMatrix) -> Result<Self> {
        let labels = owned_labels(labels);
        validate_layout(&dims, &labels)?;
        let side: usize = dims.iter().product();
        if matrix.shape() != (side, side) {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, dims require {side}x{side}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = linalg::max_abs_entry(&(&matrix - matrix.adjoint()));
        if asym > HERMITIAN_TOL {
            return Err(Error::Invariant(format!("not Hermitian (max |ρ−ρ†| = {asym:e})")));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Invariant(format!("trace is {tr}, expected 1")));
        }
        clipped_spectrum(&matrix)?;
        Ok(Self {
            dims,
            labels,
            matrix,
        })
    }

    pub(crate) fn from_raw(dims: Vec<usize>, labels: Vec<String>, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.iter().product::<usize>());
        Self {
            dims,
            labels,
            matrix,
        }
    }

    pub fn maximally_mixed<S: AsRef<str>>(dims: Vec<usize>, labels: &[S]) -> Result<Self> {
        let labels = owned_labels(labels);
        validate_layout(&dims, &labels)?;
        let d: usize = dims.iter().product();
        let matrix = CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0);
        Ok(Self::from_raw(dims, labels, matrix))
    }

    /// Diagonal state from a classical joint distribution laid out row-major
    /// over `dims`.
    pub fn diagonal<S: AsRef<str>>(dims: Vec<usize>, labels: &[S], probs: &[f64]) -> Result<Self> {
        let labels = owned_labels(labels);
        validate_layout(&dims, &labels)?;
        let d: usize = dims.iter().product();
        if probs.len() != d {
            return Err(Error::Dimension(format!("{} probabilities for dimension {d}", probs.len())));
        }
        let diag = CVector::from_iterator(d, probs.iter().map(|&p| c(p, 0.0)));
        Self::new(dims, &labels, CMatrix::from_diagonal(&diag))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Spectrum in ascending order, positivity drift clipped.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        clipped_spectrum(&self.matrix)
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - 1e-9
    }

    pub fn tensor(&self, other: &MultipartiteState) -> Result<MultipartiteState> {
        let (dims, labels) = concat_layout(
            (&self.dims, &self.labels),
            (&other.dims, &other.labels),
        )?;
        Ok(Self::from_raw(dims, labels, linalg::kron(&self.matrix, &other.matrix)))
    }

    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<MultipartiteState> {
        if keep.is_empty() {
            return Err(Error::Label("partial trace needs a nonempty keep set".into()));
        }
        let mask = self.mask(keep)?;
        Ok(self.restrict(&mask))
    }

    pub(crate) fn restrict(&self, mask: &[bool]) -> MultipartiteState {
        let matrix = partial_trace_matrix(&self.matrix, &self.dims, mask);
        let (dims, labels) = kept_layout(&self.dims, &self.labels, mask);
        Self::from_raw(dims, labels, matrix)
    }

    /// Purification with the reference system appended last under `ref_label`.
    ///
    /// The reference has the full dimension of the input, except for rank-one
    /// inputs (second eigenvalue below 1e-12) where it is one-dimensional.
    pub fn purify(&self, ref_label: &str) -> Result<PureState> {
        if self.labels.iter().any(|l| l == ref_label) {
            return Err(Error::Label(format!("reference label `{ref_label}` already in use")));
        }
        let d = self.total_dim();
        let (values, vectors) = linalg::eigh(&self.matrix);
        let second = if d > 1 { values[d - 2] } else { 0.0 };
        let mut dims = self.dims.clone();
        let mut labels = self.labels.clone();
        labels.push(ref_label.to_string());
        if second.abs() < ZERO_EIGENVALUE {
            dims.push(1);
            validate_layout(&dims, &labels)?;
            let top = vectors.column(d - 1).into_owned();
            return Ok(PureState::from_raw(dims, labels, normalized(top)));
        }
        dims.push(d);
        validate_layout(&dims, &labels)?;
        let mut amps = CVector::zeros(d * d);
        for (i, &lam) in values.iter().enumerate() {
            let w = lam.max(0.0).sqrt();
            if w == 0.0 {
                continue;
            }
            for s in 0..d {
                amps[s * d + i] = vectors[(s, i)] * w;
            }
        }
        Ok(PureState::from_raw(dims, labels, normalized(amps)))
    }

    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<MultipartiteState> {
        let labels = owned_labels(labels);
        validate_layout(&self.dims, &labels)?;
        Ok(Self::from_raw(self.dims.clone(), labels, self.matrix.clone()))
    }

    /// Convex combination `p·self + (1−p)·other`.
    pub fn mix(&self, other: &MultipartiteState, p: f64) -> Result<MultipartiteState> {
        if self.dims != other.dims {
            return Err(Error::Dimension("mixing states of different shapes".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("mixing weight {p} outside [0,1]")));
        }
        let matrix = &self.matrix * c(p, 0.0) + &other.matrix * c(1.0 - p, 0.0);
        Ok(Self::from_raw(self.dims.clone(), self.labels.clone(), matrix))
    }

    /// Apply `u` to the subsystems in `target` (which must be contiguous and in order).
    pub fn apply_unitary<S: AsRef<str>>(&self, target: &[S], u: &UnitaryMatrix) -> Result<MultipartiteState> {
        let op = embed_operator(&self.dims, &self.labels, target, u.matrix())?;
        let matrix = &op * &self.matrix * op.adjoint();
        Ok(Self::from_raw(self.dims.clone(), self.labels.clone(), matrix))
    }
}

impl QuantumState for MultipartiteState {
    fn dims(&self) -> &[usize] {
        &self.dims
    }
    fn labels(&self) -> &[String] {
        &self.labels
    }
    fn reduced_by_mask(&self, keep: &[bool]) -> CMatrix {
        partial_trace_matrix(&self.matrix, &self.dims, keep)
    }
}

fn kept_layout(dims: &[usize], labels: &[String], mask: &[bool]) -> (Vec<usize>, Vec<String>) {
    dims.iter()
        .zip(labels)
        .zip(mask)
        .filter(|(_, &k)| k)
        .map(|((&d, l), _)| (d, l.clone()))
        .unzip()
}

/// `base`, or `base` with a numeric suffix, whichever is not already taken.
pub fn unused_label(labels: &[String], base: &str) -> String {
    if !labels.iter().any(|l| l == base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|cand| !labels.contains(cand))
        .unwrap()
}

fn normalized(v: CVector) -> CVector {
    let n = v.norm();
    v / c(n, 0.0)
}

/// Full-space operator acting as `op` on a contiguous run of subsystems.
pub(crate) fn embed_operator<S: AsRef<str>>(
    dims: &[usize],
    labels: &[String],
    target: &[S],
    op: &CMatrix,
) -> Result<CMatrix> {
    let positions = target
        .iter()
        .map(|t| {
            labels
                .iter()
                .position(|l| l == t.as_ref())
                .ok_or_else(|| Error::Label(format!("unknown label `{}`", t.as_ref())))
        })
        .collect::<Result<Vec<_>>>()?;
    if positions.is_empty() || positions.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::Label("operator target must be a contiguous ordered run".into()));
    }
    let first = positions[0];
    let last = *positions.last().unwrap();
    let before: usize = dims[..first].iter().product();
    let inside: usize = dims[first..=last].iter().product();
    let after: usize = dims[last + 1..].iter().product();
    if op.shape() != (inside, inside) {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, target dimension {inside}",
            op.nrows(),
            op.ncols()
        )));
    }
    let left = CMatrix::identity(before, before);
    let right = CMatrix::identity(after, after);
    Ok(left.kronecker(op).kronecker(&right))
}

/// A unit-norm ket on labeled subsystems.
#[derive(Clone, Debug)]
pub struct PureState {
    dims: Vec<usize>,
    labels: Vec<String>,
    amplitudes: CVector,
}

impl PureState {
    pub fn new<S: AsRef<str>>(dims: Vec<usize>, labels: &[S], amplitudes: CVector) -> Result<Self> {
        let labels = owned_labels(labels);
        validate_layout(&dims, &labels)?;
        let d: usize = dims.iter().product();
        if amplitudes.len() != d {
            return Err(Error::Dimension(format!(
                "{} amplitudes for dimension {d}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant(format!("ket norm is {norm}, expected 1")));
        }
        Ok(Self {
            dims,
            labels,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn from_unnormalized<S: AsRef<str>>(
        dims: Vec<usize>,
        labels: &[S],
        amplitudes: CVector,
    ) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Self::new(dims, labels, amplitudes / c(norm, 0.0))
    }

    pub(crate) fn from_raw(dims: Vec<usize>, labels: Vec<String>, amplitudes: CVector) -> Self {
        Self {
            dims,
            labels,
            amplitudes,
        }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn to_density(&self) -> MultipartiteState {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        MultipartiteState::from_raw(self.dims.clone(), self.labels.clone(), m)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let (dims, labels) = concat_layout(
            (&self.dims, &self.labels),
            (&other.dims, &other.labels),
        )?;
        Ok(Self::from_raw(dims, labels, self.amplitudes.kronecker(&other.amplitudes)))
    }

    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<MultipartiteState> {
        if keep.is_empty() {
            return Err(Error::Label("partial trace needs a nonempty keep set".into()));
        }
        let mask = self.mask(keep)?;
        let (dims, labels) = kept_layout(&self.dims, &self.labels, &mask);
        Ok(MultipartiteState::from_raw(dims, labels, self.reduced_by_mask(&mask)))
    }

    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<PureState> {
        let labels = owned_labels(labels);
        validate_layout(&self.dims, &labels)?;
        Ok(Self::from_raw(self.dims.clone(), labels, self.amplitudes.clone()))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<num_complex::Complex64> {
        if self.dims != other.dims {
            return Err(Error::Dimension("inner product of differently shaped kets".into()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn apply_unitary<S: AsRef<str>>(&self, target: &[S], u: &UnitaryMatrix) -> Result<PureState> {
        let op = embed_operator(&self.dims, &self.labels, target, u.matrix())?;
        Ok(Self::from_raw(self.dims.clone(), self.labels.clone(), op * &self.amplitudes))
    }
}

impl QuantumState for PureState {
    fn dims(&self) -> &[usize] {
        &self.dims
    }
    fn labels(&self) -> &[String] {
        &self.labels
    }
    fn reduced_by_mask(&self, keep: &[bool]) -> CMatrix {
        let split = split_indices(&self.dims, keep);
        // reshape |ψ⟩ into a keep × trace matrix M; the marginal is M M†
        let mut m = CMatrix::zeros(split.keep_dim, split.trace_dim);
        for (i, amp) in self.amplitudes.iter().enumerate() {
            m[(split.keep_index[i], split.trace_index[i])] = *amp;
        }
        &m * m.adjoint()
    }
}

/// Either representation, as produced by the JSON loader and the named-state builder.
#[derive(Clone, Debug)]
pub enum QState {
    Pure(PureState),
    Mixed(MultipartiteState),
}

impl QState {
    pub fn to_density(&self) -> MultipartiteState {
        match self {
            QState::Pure(p) => p.to_density(),
            QState::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            QState::Pure(p) => Some(p),
            QState::Mixed(_) => None,
        }
    }
}

impl QuantumState for QState {
    fn dims(&self) -> &[usize] {
        match self {
            QState::Pure(p) => p.dims(),
            QState::Mixed(m) => m.dims(),
        }
    }
    fn labels(&self) -> &[String] {
        match self {
            QState::Pure(p) => p.labels(),
            QState::Mixed(m) => m.labels(),
        }
    }
    fn reduced_by_mask(&self, keep: &[bool]) -> CMatrix {
        match self {
            QState::Pure(p) => p.reduced_by_mask(keep),
            QState::Mixed(m) => m.reduced_by_mask(keep),
        }
    }
}

impl From<PureState> for QState {
    fn from(p: PureState) -> Self {
        QState::Pure(p)
    }
}

impl From<MultipartiteState> for QState {
    fn from(m: MultipartiteState) -> Self {
        QState::Mixed(m)
    }
}

/// A square matrix with `U†U = 𝟙` within 1e-9.
#[derive(Clone, Debug)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Dimension("unitary must be a nonempty square matrix".into()));
        }
        let d = matrix.nrows();
        let dev = linalg::max_abs_entry(&(matrix.adjoint() * &matrix - CMatrix::identity(d, d)));
        if dev > UNITARY_TOL {
            return Err(Error::Invariant(format!("U†U deviates from identity by {dev:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn tensor(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn compose(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension("composing unitaries of different size".into()));
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if d == 0 {
        return Err(Error::Domain("unitary dimension must be at least 1".into()));
    }
    let qr = linalg::ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for col in 0..d {
        let z = r[(col, col)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) };
        for row in 0..d {
            q[(row, col)] *= phase;
        }
    }
    Ok(UnitaryMatrix { matrix: q })
}

fn check_same_shape(rho: &MultipartiteState, sigma: &MultipartiteState) -> Result<()> {
    if rho.dims != sigma.dims {
        return Err(Error::Dimension(format!(
            "dims {:?} vs {:?}",
            rho.dims, sigma.dims
        )));
    }
    Ok(())
}

/// `F(ρ, σ) = (Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
///
/// Evaluated as `‖√ρ √σ‖₁²`, which has the same value and avoids taking
/// square roots of rounding noise in the spectrum of `√ρ σ √ρ`.
pub fn fidelity(rho: &MultipartiteState, sigma: &MultipartiteState) -> Result<f64> {
    check_same_shape(rho, sigma)?;
    let product = linalg::psd_sqrt(&rho.matrix) * linalg::psd_sqrt(&sigma.matrix);
    let s = linalg::nuclear_norm(&product);
    Ok((s * s).clamp(0.0, 1.0))
}

/// `TD(ρ, σ) = Tr|ρ − σ|`, without the ½ normalization.
pub fn trace_distance(rho: &MultipartiteState, sigma: &MultipartiteState) -> Result<f64> {
    check_same_shape(rho, sigma)?;
    Ok(linalg::trace_norm(&(&rho.matrix - &sigma.matrix)))
}
