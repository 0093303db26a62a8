//! Multiparty squashed entanglement: closed forms for pure and separable
//! inputs, and a numerical upper bound over extensions of bounded dimension.
//!
//! Every extension of a state arises from a channel applied to its
//! purifying system. A channel `R → E` is represented here by a Stinespring
//! isometry `V: R → E ⊗ F` followed by discarding `F`; the search runs over
//! a smooth chart of such isometries.

use crate::entropy::{cond_multiparty_info, multiparty_info};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::qstate::{
    haar_unitary, stream_rng, unused_label, validate_layout, MultipartiteState, PureState,
    QuantumState,
};
use rayon::prelude::*;
use std::collections::HashSet;

/// Purity below `1 − PURITY_TOL` counts as mixed.
pub const PURITY_TOL: f64 = 1e-9;
pub const ISOMETRY_TOL: f64 = 1e-9;

fn check_parts_cover<Q: QuantumState + ?Sized>(s: &Q, parts: &[Vec<String>]) -> Result<()> {
    let mut seen = HashSet::new();
    for label in parts.iter().flatten() {
        s.label_position(label)?;
        if !seen.insert(label.as_str()) {
            return Err(Error::Overlap(format!("label `{label}` in more than one part")));
        }
    }
    if let Some(missing) = s.labels().iter().find(|l| !seen.contains(l.as_str())) {
        return Err(Error::Label(format!(
            "subsystem `{missing}` is not assigned to any part"
        )));
    }
    Ok(())
}

fn purity_of(m: &CMatrix) -> f64 {
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `½·I(X₁;…;X_m)` for a pure state whose subsystems are exactly the parts.
pub fn esq_pure<Q: QuantumState + ?Sized>(s: &Q, parts: &[Vec<String>]) -> Result<f64> {
    check_parts_cover(s, parts)?;
    let full = s.reduced_by_mask(&vec![true; s.dims().len()]);
    let purity = purity_of(&full);
    if purity < 1.0 - PURITY_TOL {
        return Err(Error::Invariant(format!("state is not pure (purity {purity})")));
    }
    Ok(0.5 * multiparty_info(s, parts)?)
}

/// Checks that every ensemble member is a tensor product across `parts`.
fn check_product_ensemble(ensemble: &[(f64, PureState)], parts: &[Vec<String>]) -> Result<()> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InvalidInput("empty ensemble".into()))?;
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| p.is_nan() || *p < 0.0) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::Domain("ensemble weights must be nonnegative and sum to 1".into()));
    }
    for (j, (_, v)) in ensemble.iter().enumerate() {
        if v.dims() != first.1.dims() || v.labels() != first.1.labels() {
            return Err(Error::Dimension(format!("ensemble member {j} has a different layout")));
        }
        check_parts_cover(v, parts)?;
        for part in parts {
            let purity = purity_of(&v.reduced_matrix(part)?);
            if purity < 1.0 - PURITY_TOL {
                return Err(Error::InvalidInput(format!(
                    "ensemble member {j} is entangled across part {part:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Conditional multiparty information of the classical-flag extension
/// `Σ_j p_j |v_j⟩⟨v_j| ⊗ |j⟩⟨j|_E`, halved. Zero for product ensembles.
pub fn esq_flag_upper(ensemble: &[(f64, PureState)], parts: &[Vec<String>]) -> Result<f64> {
    check_product_ensemble(ensemble, parts)?;
    let extended = flagged_state(ensemble)?;
    let e = extended.labels().last().unwrap().clone();
    Ok(0.5 * cond_multiparty_info(&extended, parts, &[e])?)
}

fn flagged_state(ensemble: &[(f64, PureState)]) -> Result<MultipartiteState> {
    let base = &ensemble[0].1;
    let n = ensemble.len();
    let e = unused_label(base.labels(), "E");
    let mut dims = base.dims().to_vec();
    dims.push(n);
    let mut labels = base.labels().to_vec();
    labels.push(e);
    let d = base.total_dim() * n;
    let mut matrix = CMatrix::zeros(d, d);
    for (j, (p, v)) in ensemble.iter().enumerate() {
        let mut flag = CMatrix::zeros(n, n);
        flag[(j, j)] = c(*p, 0.0);
        let proj = v.amplitudes() * v.amplitudes().adjoint();
        matrix += linalg::kron(&proj, &flag);
    }
    MultipartiteState::new(dims, &labels, matrix)
}

/// A channel on the purifying system, given as an isometry `R → E ⊗ F`.
///
/// The isometry is the first `d_r` columns of `base · exp(G(params))`, where
/// `G = [[A, −B†], [B, 0]]` with `A` anti-Hermitian `d_r × d_r` and `B` an
/// arbitrary complex `(D − d_r) × d_r` block, `D = d_e · d_f`.
#[derive(Clone, Debug)]
pub struct ExtensionChannel {
    pub d_r: usize,
    pub d_e: usize,
    pub d_f: usize,
    pub base: CMatrix,
    pub params: Vec<f64>,
}

impl ExtensionChannel {
    pub fn param_count(d_r: usize, d_e: usize, d_f: usize) -> usize {
        let d = d_e * d_f;
        d_r * d_r + 2 * (d - d_r) * d_r
    }

    fn check_dims(d_r: usize, d_e: usize, d_f: usize) -> Result<()> {
        if d_r == 0 || d_e == 0 || d_f == 0 {
            return Err(Error::Domain("extension dimensions must be positive".into()));
        }
        if d_e * d_f < d_r {
            return Err(Error::Dimension(format!(
                "d_E·d_F = {} cannot host an isometry from dimension {d_r}",
                d_e * d_f
            )));
        }
        Ok(())
    }

    /// Channel whose isometry is `v` (a `d_e·d_f × d_r` matrix with orthonormal columns).
    pub fn from_isometry(v: &CMatrix, d_e: usize, d_f: usize) -> Result<Self> {
        let d_r = v.ncols();
        Self::check_dims(d_r, d_e, d_f)?;
        if v.nrows() != d_e * d_f {
            return Err(Error::Dimension(format!(
                "isometry has {} rows, expected {}",
                v.nrows(),
                d_e * d_f
            )));
        }
        let gram = v.adjoint() * v - CMatrix::identity(d_r, d_r);
        if linalg::max_abs_entry(&gram) > ISOMETRY_TOL {
            return Err(Error::Invariant("columns are not orthonormal".into()));
        }
        Ok(Self {
            d_r,
            d_e,
            d_f,
            base: linalg::complete_unitary(v),
            params: vec![0.0; Self::param_count(d_r, d_e, d_f)],
        })
    }

    /// `|r⟩ ↦ |0⟩_E ⊗ |r⟩_F`; requires `d_f ≥ d_r`.
    pub fn trivial(d_r: usize, d_e: usize, d_f: usize) -> Result<Self> {
        Self::check_dims(d_r, d_e, d_f)?;
        if d_f < d_r {
            return Err(Error::Dimension("trivial extension needs d_F ≥ d_R".into()));
        }
        let v = CMatrix::from_fn(d_e * d_f, d_r, |row, col| {
            if row == col {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        Self::from_isometry(&v, d_e, d_f)
    }

    /// Haar-random base with zero chart parameters.
    pub fn random<R: rand::Rng + ?Sized>(d_r: usize, d_e: usize, d_f: usize, rng: &mut R) -> Result<Self> {
        Self::check_dims(d_r, d_e, d_f)?;
        let base = haar_unitary(d_e * d_f, rng)?.matrix().clone();
        Ok(Self {
            d_r,
            d_e,
            d_f,
            base,
            params: vec![0.0; Self::param_count(d_r, d_e, d_f)],
        })
    }

    fn generator(&self, params: &[f64]) -> CMatrix {
        let (r, d) = (self.d_r, self.d_e * self.d_f);
        let mut g = CMatrix::zeros(d, d);
        let mut it = params.iter().copied();
        let mut next = || it.next().unwrap_or(0.0);
        for k in 0..r {
            g[(k, k)] = c(0.0, next());
            for l in k + 1..r {
                let z = c(next(), next());
                g[(k, l)] = z;
                g[(l, k)] = -z.conj();
            }
        }
        for row in r..d {
            for col in 0..r {
                let z = c(next(), next());
                g[(row, col)] = z;
                g[(col, row)] = -z.conj();
            }
        }
        g
    }

    fn unitary_at(&self, params: &[f64]) -> CMatrix {
        &self.base * linalg::expm_antihermitian(&self.generator(params))
    }

    fn isometry_at(&self, params: &[f64]) -> CMatrix {
        self.unitary_at(params).columns(0, self.d_r).into_owned()
    }

    /// The realized isometry `V: R → E ⊗ F`, rows indexed by `e·d_f + f`.
    pub fn isometry(&self) -> CMatrix {
        self.isometry_at(&self.params)
    }

    /// Folds the current parameters into the base so the chart is centred here.
    pub fn recentred(&self) -> Self {
        Self {
            base: self.unitary_at(&self.params),
            params: vec![0.0; self.params.len()],
            ..self.clone()
        }
    }

    /// The same channel with `E` and `F` zero-padded to larger dimensions.
    pub fn embed(&self, d_e: usize, d_f: usize) -> Result<Self> {
        if d_e < self.d_e || d_f < self.d_f {
            return Err(Error::Dimension("embedding must not shrink E or F".into()));
        }
        let v = self.isometry();
        let mut padded = CMatrix::zeros(d_e * d_f, self.d_r);
        for e in 0..self.d_e {
            for f in 0..self.d_f {
                for r in 0..self.d_r {
                    padded[(e * d_f + f, r)] = v[(e * self.d_f + f, r)];
                }
            }
        }
        Self::from_isometry(&padded, d_e, d_f)
    }
}

/// Purified input reshaped as a `d_X × d_R` matrix, with the layout of the
/// extended system `X ⊗ E ⊗ F`.
struct Extender {
    psi: CMatrix,
    dims: Vec<usize>,
    labels: Vec<String>,
    e_label: String,
    d_e: usize,
    d_f: usize,
}

impl Extender {
    fn new(s: &MultipartiteState, d_e: usize, d_f: usize) -> Result<Self> {
        let r_label = unused_label(s.labels(), "R");
        let pure = s.purify(&r_label)?;
        let d_r = *pure.dims().last().unwrap();
        let d_x = s.total_dim();
        let psi = CMatrix::from_fn(d_x, d_r, |x, r| pure.amplitudes()[x * d_r + r]);
        let e_label = unused_label(s.labels(), "E");
        let mut taken = s.labels().to_vec();
        taken.push(e_label.clone());
        let f_label = unused_label(&taken, "F");
        let mut dims = s.dims().to_vec();
        dims.extend([d_e, d_f]);
        let mut labels = taken;
        labels.push(f_label);
        validate_layout(&dims, &labels)?;
        Ok(Self {
            psi,
            dims,
            labels,
            e_label,
            d_e,
            d_f,
        })
    }

    fn d_r(&self) -> usize {
        self.psi.ncols()
    }

    /// `(𝟙 ⊗ V)|ψ⟩` on `X ⊗ E ⊗ F`.
    fn apply(&self, v: &CMatrix) -> PureState {
        let out = &self.psi * v.transpose();
        let d = out.ncols();
        let amps = CVector::from_fn(out.nrows() * d, |i, _| out[(i / d, i % d)]);
        PureState::from_raw(self.dims.clone(), self.labels.clone(), amps)
    }

    fn objective(&self, v: &CMatrix, parts: &[Vec<String>]) -> Result<f64> {
        let state = self.apply(v);
        Ok(0.5 * cond_multiparty_info(&state, parts, &[&self.e_label])?)
    }

    fn check_channel(&self, ch: &ExtensionChannel) -> Result<()> {
        if ch.d_r != self.d_r() || ch.d_e != self.d_e || ch.d_f != self.d_f {
            return Err(Error::Dimension(format!(
                "channel ({}→{}⊗{}) does not match purification ({}→{}⊗{})",
                ch.d_r,
                ch.d_e,
                ch.d_f,
                self.d_r(),
                self.d_e,
                self.d_f
            )));
        }
        Ok(())
    }
}

/// Dimension of the purifying system used for `s` by [`extended_state`].
pub fn purifying_dim(s: &MultipartiteState) -> Result<usize> {
    let pure = s.purify(&unused_label(s.labels(), "R"))?;
    Ok(*pure.dims().last().unwrap())
}

/// The extension `Tr_F[(𝟙 ⊗ V) ψ (𝟙 ⊗ V)†]` on the subsystems of `s` plus `E`
/// (labeled `E`, or the first free variant of it).
pub fn extended_state(s: &MultipartiteState, channel: &ExtensionChannel) -> Result<MultipartiteState> {
    let ext = Extender::new(s, channel.d_e, channel.d_f)?;
    ext.check_channel(channel)?;
    let pure = ext.apply(&channel.isometry());
    let keep = &ext.labels[..ext.labels.len() - 1];
    pure.partial_trace(keep)
}

/// Classical-flag extension channel for a state given as an ensemble of
/// pure states, so that the extension is `Σ_j p_j |v_j⟩⟨v_j| ⊗ |j⟩⟨j|_E`.
/// Uses `d_E = len(ensemble)` and `d_F = max(len, d_R)`.
pub fn flag_extension(s: &MultipartiteState, ensemble: &[(f64, PureState)]) -> Result<ExtensionChannel> {
    let n = ensemble.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty ensemble".into()));
    }
    let mixed = crate::qstate::separable(ensemble)?;
    if mixed.dims() != s.dims()
        || linalg::max_abs_entry(&(mixed.matrix() - s.matrix())) > 1e-9
    {
        return Err(Error::InvalidInput("ensemble does not average to the given state".into()));
    }
    let d_r = purifying_dim(s)?;
    let (d_e, d_f) = (n, n.max(d_r));
    let ext = Extender::new(s, d_e, d_f)?;
    let d_x = s.total_dim();
    // target purification Σ_j √p_j |v_j⟩|j⟩_E|j⟩_F as a d_X × D matrix
    let mut phi = CMatrix::zeros(d_x, d_e * d_f);
    for (j, (p, v)) in ensemble.iter().enumerate() {
        for x in 0..d_x {
            phi[(x, j * d_f + j)] = v.amplitudes()[x] * p.sqrt();
        }
    }
    let pinv = ext
        .psi
        .clone()
        .pseudo_inverse(1e-7)
        .map_err(|e| Error::Invariant(e.to_string()))?;
    let w = (pinv * phi).transpose();
    // polar factor: equals w on the support of ρ_R and completes it elsewhere
    let svd = w.svd(true, true);
    let v = svd.u.unwrap() * svd.v_t.unwrap();
    ExtensionChannel::from_isometry(&v, d_e, d_f)
}

#[derive(Clone, Debug)]
pub struct EsqOptions {
    /// Extension dimension; `None` means the total dimension of the input.
    pub d_e: Option<usize>,
    /// Discarded-environment dimension; `None` means the purifying dimension.
    pub d_f: Option<usize>,
    pub restarts: usize,
    pub tol: f64,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    pub seed: u64,
    /// Starting point for restart 0.
    pub warm_start: Option<ExtensionChannel>,
}

impl Default for EsqOptions {
    fn default() -> Self {
        Self {
            d_e: None,
            d_f: None,
            restarts: 16,
            tol: 1e-7,
            max_evals: 5_000,
            seed: 0,
            warm_start: None,
        }
    }
}

/// Upper bound on squashed entanglement over extensions of dimension `d_E`.
#[derive(Clone, Debug)]
pub struct EsqResult {
    pub upper_bound: f64,
    pub extension: ExtensionChannel,
    pub restarts_used: usize,
    pub converged: bool,
}

struct SearchOutcome {
    value: f64,
    channel: ExtensionChannel,
    converged: bool,
}

fn search_from(
    ext: &Extender,
    parts: &[Vec<String>],
    start: ExtensionChannel,
    opts: &EsqOptions,
) -> Result<SearchOutcome> {
    let mut channel = start.recentred();
    let mut value = ext.objective(&channel.isometry(), parts)?;
    let mut budget = opts.max_evals;
    let mut converged = false;
    let mut failure = None;
    // a few recentring rounds keep the exponential chart well conditioned
    for _ in 0..4 {
        if budget == 0 || channel.params.is_empty() {
            converged = channel.params.is_empty() || converged;
            break;
        }
        let objective = |x: &[f64]| match ext.objective(&channel.isometry_at(x), parts) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        };
        let run = nelder_mead(objective, &channel.params, 0.25, opts.tol, budget);
        budget -= run.evals.min(budget);
        let improved = value - run.value;
        if run.value < value {
            channel.params = run.x;
            channel = channel.recentred();
            value = run.value;
        }
        converged = run.converged;
        if improved <= opts.tol {
            break;
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(SearchOutcome {
        value,
        channel,
        converged,
    })
}

/// Minimizes `½·I(X₁;…;X_m|E)` over extensions produced by channels on the
/// purifying system with output dimension `d_E`, with random restarts.
pub fn esq_optimize(s: &MultipartiteState, parts: &[Vec<String>], opts: &EsqOptions) -> Result<EsqResult> {
    check_parts_cover(s, parts)?;
    if parts.len() < 2 {
        return Err(Error::InvalidInput("squashed entanglement needs at least 2 parties".into()));
    }
    let d_e = opts.d_e.unwrap_or_else(|| s.total_dim());
    if d_e == 0 {
        return Err(Error::Domain("d_E must be at least 1".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let d_r = purifying_dim(s)?;
    let d_f = opts.d_f.unwrap_or(d_r);
    ExtensionChannel::check_dims(d_r, d_e, d_f)?;
    let ext = Extender::new(s, d_e, d_f)?;
    if let Some(w) = &opts.warm_start {
        ext.check_channel(w)?;
    }
    let restarts = opts.restarts.max(1);
    let outcomes: Vec<Result<SearchOutcome>> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let start = match (&opts.warm_start, k) {
                (Some(w), 0) => w.clone(),
                _ => {
                    let mut rng = stream_rng(opts.seed, k as u64);
                    ExtensionChannel::random(d_r, d_e, d_f, &mut rng)?
                }
            };
            search_from(&ext, parts, start, opts)
        })
        .collect();
    let mut best: Option<SearchOutcome> = None;
    for outcome in outcomes {
        let outcome = outcome?;
        if best.as_ref().is_none_or(|b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    let mut best = best.unwrap();
    if d_f >= d_r {
        let trivial = ExtensionChannel::trivial(d_r, d_e, d_f)?;
        let value = ext.objective(&trivial.isometry(), parts)?;
        if value < best.value {
            best = SearchOutcome {
                value,
                channel: trivial,
                converged: true,
            };
        }
    }
    Ok(EsqResult {
        upper_bound: best.value,
        extension: best.channel,
        restarts_used: restarts,
        converged: best.converged,
    })
}

pub(crate) struct NelderMead {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Derivative-free simplex minimization. Stops once every vertex lies within
/// `tol` of the best one (max-norm) or the evaluation budget is spent.
pub(crate) fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> NelderMead {
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut converged = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (xi, bi) in vertex.0.iter_mut().zip(&best) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            vertex.1 = eval(&vertex.0, &mut evals);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMead {
        x,
        value,
        evals,
        converged,
    }
}
