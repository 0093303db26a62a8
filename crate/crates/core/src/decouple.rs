//! Monte Carlo checks of one-shot decoupling and step-by-step simulation of
//! the multiparty fully quantum Slepian–Wolf chain.
//!
//! A sender holding `A = A₁ ⊗ A₂` applies a Haar-random unitary and sends
//! `A₁`. The quantity of interest is the decoupling residual
//! `‖σ^{A₂R}(U) − 𝟙/d_{A₂} ⊗ σ^R‖₁²`, averaged over `U`.

use crate::entropy::{mutual_info, von_neumann};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::qstate::{haar_unitary, split_indices, stream_rng, PureState, QuantumState, UnitaryMatrix};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;

pub const MIN_SAMPLES: usize = 30;
/// Largest total dimension accepted by the chain simulator.
pub const CHAIN_MAX_DIM: usize = 1 << 10;

/// A pure state split into a sender system `A^S`, a reference `R`, and
/// everything else (traced out), with `A^S = A₁ ⊗ A₂`.
#[derive(Clone, Debug)]
pub struct DecouplingTrialConfig {
    /// Rows indexed by `(a, r)` with `a` most significant, columns by the traced rest.
    amplitudes: CMatrix,
    /// Orthonormal basis of the support of `ψ^R`, one column per eigenvector.
    ref_support: CMatrix,
    ref_spectrum: Vec<f64>,
    pub d_a: usize,
    pub d_r: usize,
    pub d_a1: usize,
    pub d_a2: usize,
    pub samples: usize,
    pub seed: u64,
}

fn joint_index(split_mask: &[bool], dims: &[usize]) -> Vec<usize> {
    split_indices(dims, split_mask).keep_index
}

impl DecouplingTrialConfig {
    /// `a` names the sender's subsystems, `r` the reference; both are taken in
    /// the state's own subsystem order.
    pub fn new<S: AsRef<str>>(
        state: &PureState,
        a: &[S],
        r: &[S],
        d_a1: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Label("sender system must be nonempty".into()));
        }
        let ma = state.mask(a)?;
        let mr = state.mask(r)?;
        if ma.iter().zip(&mr).any(|(x, y)| *x && *y) {
            return Err(Error::Overlap("sender and reference share a subsystem".into()));
        }
        let mb: Vec<bool> = ma.iter().zip(&mr).map(|(x, y)| !x && !y).collect();
        let dims = state.dims();
        let d_a = state.dim_of(a)?;
        let d_r = state.dim_of(r)?;
        if d_a1 == 0 || d_a % d_a1 != 0 {
            return Err(Error::Dimension(format!("d_A1 = {d_a1} does not divide d_A = {d_a}")));
        }
        let d_b = state.total_dim() / (d_a * d_r);
        let (ia, ir, ib) = (
            joint_index(&ma, dims),
            joint_index(&mr, dims),
            joint_index(&mb, dims),
        );
        let mut amplitudes = CMatrix::zeros(d_a * d_r, d_b);
        for (i, amp) in state.amplitudes().iter().enumerate() {
            amplitudes[(ia[i] * d_r + ir[i], ib[i])] = *amp;
        }
        let mut cfg = Self {
            amplitudes,
            ref_support: CMatrix::zeros(d_r, 0),
            ref_spectrum: Vec::new(),
            d_a,
            d_r,
            d_a1,
            d_a2: d_a / d_a1,
            samples,
            seed,
        };
        let (values, vectors) = linalg::eigh(&cfg.reference_marginal());
        let support: Vec<usize> = (0..values.len()).filter(|&i| values[i] > linalg::ZERO_EIGENVALUE).collect();
        cfg.ref_support = CMatrix::from_fn(d_r, support.len(), |r, j| vectors[(r, support[j])]);
        cfg.ref_spectrum = support.iter().map(|&i| values[i]).collect();
        Ok(cfg)
    }

    /// `ψ^{A^S R}` as a `d_A d_R` square matrix.
    pub fn reduced_state(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// `Tr[(ψ^{A^S R})²]`.
    pub fn purity(&self) -> f64 {
        self.reduced_state().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `(d_{A^S} d_R / d_{A₁}²) · Tr[ψ²]`.
    pub fn rhs_bound(&self) -> f64 {
        let (da, dr, d1) = (self.d_a as f64, self.d_r as f64, self.d_a1 as f64);
        da * dr / (d1 * d1) * self.purity()
    }

    fn reference_marginal(&self) -> CMatrix {
        let (d_a, d_r, d_b) = (self.d_a, self.d_r, self.amplitudes.ncols());
        // rows (r), columns (a, b)
        let y = CMatrix::from_fn(d_r, d_a * d_b, |r, col| {
            self.amplitudes[((col / d_b) * d_r + r, col % d_b)]
        });
        &y * y.adjoint()
    }
}

/// `‖σ^{A₂R}(U) − 𝟙/d_{A₂} ⊗ σ^R‖₁²` for one encoding unitary.
pub fn decoupling_trial(cfg: &DecouplingTrialConfig, u: &UnitaryMatrix) -> Result<f64> {
    if u.dim() != cfg.d_a {
        return Err(Error::Dimension(format!(
            "unitary has dimension {}, sender system has {}",
            u.dim(),
            cfg.d_a
        )));
    }
    let (d1, d2, d_r) = (cfg.d_a1, cfg.d_a2, cfg.d_r);
    let d_b = cfg.amplitudes.ncols();
    let k = cfg.ref_spectrum.len();
    let eye_r = CMatrix::identity(d_r, d_r);
    let rotated = linalg::kron(u.matrix(), &eye_r) * &cfg.amplitudes;
    // Both σ^{A₂R} and 𝟙/d_{A₂} ⊗ σ^R live on C^{d_{A₂}} ⊗ supp σ^R, so the
    // trace norm is evaluated there. Rows (a₂, κ), columns (a₁, b).
    let q_adj = cfg.ref_support.adjoint();
    let mut y = CMatrix::zeros(d2 * k, d1 * d_b);
    for a2 in 0..d2 {
        for a1 in 0..d1 {
            let block = rotated.view(((a1 * d2 + a2) * d_r, 0), (d_r, d_b));
            y.view_mut((a2 * k, a1 * d_b), (k, d_b)).copy_from(&(&q_adj * block));
        }
    }
    let mut diff = &y * y.adjoint();
    for a2 in 0..d2 {
        for (j, &lambda) in cfg.ref_spectrum.iter().enumerate() {
            diff[(a2 * k + j, a2 * k + j)] -= c(lambda / d2 as f64, 0.0);
        }
    }
    let norm = linalg::trace_norm(&diff);
    Ok(norm * norm)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecouplingReport {
    pub d_a1: usize,
    pub mean_sq_td: f64,
    pub max_sq_td: f64,
    pub stderr: f64,
    pub rhs_bound: f64,
    pub holds: bool,
}

/// Haar average of the residual estimated from `cfg.samples` trials, one RNG
/// stream per trial.
pub fn decoupling_mc(cfg: &DecouplingTrialConfig) -> Result<DecouplingReport> {
    if cfg.samples < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            cfg.samples
        )));
    }
    let values = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, i as u64);
            let u = haar_unitary(cfg.d_a, &mut rng)?;
            decoupling_trial(cfg, &u)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, stderr) = mean_and_stderr(&values);
    let rhs_bound = cfg.rhs_bound();
    Ok(DecouplingReport {
        d_a1: cfg.d_a1,
        mean_sq_td: mean,
        max_sq_td: values.iter().copied().fold(0.0, f64::max),
        stderr,
        rhs_bound,
        holds: mean <= rhs_bound + 3.0 * stderr,
    })
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Residual statistics for each `d_A1` in `splits`, same seed for every row.
pub fn decoupling_sweep<S: AsRef<str>>(
    state: &PureState,
    a: &[S],
    r: &[S],
    splits: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<DecouplingReport>> {
    splits
        .iter()
        .map(|&d1| decoupling_mc(&DecouplingTrialConfig::new(state, a, r, d1, samples, seed)?))
        .collect()
}

/// `½·I(sender; peers_after ∪ {reference})`.
pub fn fqsw_min_rate<Q: QuantumState + ?Sized, S: AsRef<str>>(
    s: &Q,
    sender: &str,
    peers_after: &[S],
    reference: &str,
) -> Result<f64> {
    let mut others: Vec<&str> = peers_after.iter().map(|p| p.as_ref()).collect();
    others.push(reference);
    Ok(0.5 * mutual_info(s, &[sender], &others)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    pub sender: String,
    pub qubits_sent: u32,
    /// `½·I(A_i; A_{later} R)` in qubits.
    pub threshold: f64,
    pub above_threshold: bool,
    pub mean_sq_td: f64,
    pub stderr: f64,
    pub rhs_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub steps: Vec<ChainStep>,
    /// `Σ_i √rhs_i`, a bound on the accumulated trace-norm error.
    pub chained_bound: f64,
    /// Smallest residual among steps below threshold minus the largest among
    /// steps at or above it; `None` when either group is empty.
    pub separation_margin: Option<f64>,
}

/// Runs the senders in the order `pi` (`pi[0]` sends first). At step `i` the
/// sender's reference is the later senders together with `reference`;
/// earlier senders and any receiver-held subsystems are traced out.
/// `qubits_sent[k]` refers to `senders[k]`.
pub fn fqsw_chain_sim(
    s: &PureState,
    senders: &[String],
    reference: &str,
    pi: &[usize],
    qubits_sent: &[u32],
    samples: usize,
    seed: u64,
) -> Result<ChainReport> {
    if s.total_dim() > CHAIN_MAX_DIM {
        return Err(Error::Capacity(format!(
            "chain simulation supports total dimension ≤ {CHAIN_MAX_DIM}, got {}",
            s.total_dim()
        )));
    }
    let m = senders.len();
    if qubits_sent.len() != m {
        return Err(Error::InvalidInput(format!(
            "{} qubit counts for {m} senders",
            qubits_sent.len()
        )));
    }
    let mut sorted = pi.to_vec();
    sorted.sort_unstable();
    if sorted != (0..m).collect::<Vec<_>>() {
        return Err(Error::InvalidInput(format!("{pi:?} is not a permutation of 0..{m}")));
    }
    let distinct: HashSet<&str> = senders.iter().map(String::as_str).collect();
    if distinct.len() != m || distinct.contains(reference) {
        return Err(Error::Overlap("senders and reference must be distinct".into()));
    }
    let mut steps = Vec::with_capacity(m);
    for (i, &k) in pi.iter().enumerate() {
        let sender = &senders[k];
        let later: Vec<&str> = pi[i + 1..].iter().map(|&j| senders[j].as_str()).collect();
        let threshold = fqsw_min_rate(s, sender, &later, reference)?;
        let q = qubits_sent[k];
        let d_a1 = 1usize
            .checked_shl(q)
            .ok_or_else(|| Error::Domain(format!("{q} qubits is too many")))?;
        let mut refs = later.clone();
        refs.push(reference);
        // keep the state's order for the reference subsystems
        let refs: Vec<&str> = s
            .labels()
            .iter()
            .map(String::as_str)
            .filter(|l| refs.contains(l))
            .collect();
        let cfg = DecouplingTrialConfig::new(s, &[sender.as_str()], &refs, d_a1, samples, seed.wrapping_add(i as u64))
            .map_err(|e| match e {
                Error::Dimension(msg) => Error::Domain(format!("sender `{sender}`: {msg}")),
                other => other,
            })?;
        let report = decoupling_mc(&cfg)?;
        steps.push(ChainStep {
            sender: sender.clone(),
            qubits_sent: q,
            threshold,
            above_threshold: q as f64 >= (threshold - 1e-9).ceil(),
            mean_sq_td: report.mean_sq_td,
            stderr: report.stderr,
            rhs_bound: report.rhs_bound,
        });
    }
    let chained_bound = steps.iter().map(|st| st.rhs_bound.sqrt()).sum();
    let below = steps
        .iter()
        .filter(|st| !st.above_threshold)
        .map(|st| st.mean_sq_td)
        .reduce(f64::min);
    let above = steps
        .iter()
        .filter(|st| st.above_threshold)
        .map(|st| st.mean_sq_td)
        .reduce(f64::max);
    Ok(ChainReport {
        steps,
        chained_bound,
        separation_margin: below.zip(above).map(|(b, a)| b - a),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum BlackHoleMode {
    /// `½·I(A; rest)`, which equals `H(A)` when the rest purifies `A`.
    Simple,
    /// `max{H(A), H(A) + ½·I(B₂; L)}`.
    Lost { b2: Vec<String>, l: Vec<String> },
}

/// Number of radiated qubits needed before the purification of `A` emerges.
pub fn blackhole_threshold<Q: QuantumState + ?Sized, S: AsRef<str>>(
    s: &Q,
    a: &[S],
    mode: &BlackHoleMode,
) -> Result<f64> {
    let mask = s.mask(a)?;
    if a.is_empty() {
        return Err(Error::Label("A must be nonempty".into()));
    }
    match mode {
        BlackHoleMode::Simple => {
            let rest: Vec<&str> = s
                .labels()
                .iter()
                .zip(&mask)
                .filter(|(_, &k)| !k)
                .map(|(l, _)| l.as_str())
                .collect();
            if rest.is_empty() {
                return Err(Error::Label("A covers the whole state".into()));
            }
            Ok(0.5 * mutual_info(s, &a.iter().map(|x| x.as_ref()).collect::<Vec<_>>(), &rest)?)
        }
        BlackHoleMode::Lost { b2, l } => {
            let h_a = von_neumann(s, a)?;
            let extra = 0.5 * mutual_info(s, b2, l)?;
            Ok(h_a.max(h_a + extra))
        }
    }
}
