//! Supermodular rate regions `{Q ∈ ℝ^m : Σ_{k∈K} Q_k ≥ C_K for all K}`.
//!
//! Subsets of the `m` parties are bitmasks: bit `k` set means party `k`
//! (zero-based) belongs to the subset. The empty subset has constant 0.
//!
//! For a superadditive set function the vertices of the region are exactly
//! the permutation corner points `Q_{π(i)} = C_{π[i..m]} − C_{π[i+1..m]}`;
//! [`vertices_bruteforce`] recovers them independently by solving every
//! linearly independent system of `m` tight constraints.

use crate::entropy::{cond_entropy, entropy_or_zero, multiparty_info};
use crate::error::{Error, Result};
use crate::qstate::QuantumState;
use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub type Subset = u32;

pub const MAX_PARTIES: usize = 16;
/// Constraint slack accepted by membership tests.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;
/// Rate tuples closer than this in every coordinate are the same point.
pub const DEDUP_TOL: f64 = 1e-8;
/// A constraint is tight when its slack is at most this.
pub const TIGHT_TOL: f64 = 1e-8;
/// Hyperplane systems with smaller determinant are treated as dependent.
pub const RANK_TOL: f64 = 1e-10;

pub fn subset_of(parties: &[usize]) -> Subset {
    parties.iter().fold(0, |acc, &k| acc | (1 << k))
}

pub fn parties_of(k: Subset) -> Vec<usize> {
    (0..32).filter(|i| k & (1 << i) != 0).collect()
}

/// Constants `C_K` for every nonempty `K ⊆ {1..m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction {
    m: usize,
    values: Vec<f64>,
}

impl SetFunction {
    /// `values[k - 1]` is the constant of subset mask `k`, for `k = 1 .. 2^m − 1`.
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 || m > MAX_PARTIES {
            return Err(Error::Capacity(format!("{m} parties; supported range is 1..={MAX_PARTIES}")));
        }
        if values.len() != (1 << m) - 1 {
            return Err(Error::InvalidInput(format!(
                "{} constants for {m} parties, expected {}",
                values.len(),
                (1 << m) - 1
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite constant {v}")));
        }
        let mut all = Vec::with_capacity(1 << m);
        all.push(0.0);
        all.extend(values);
        Ok(Self { m, values: all })
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(Subset) -> f64) -> Result<Self> {
        if m == 0 || m > MAX_PARTIES {
            return Err(Error::Capacity(format!("{m} parties; supported range is 1..={MAX_PARTIES}")));
        }
        Self::new(m, (1..(1u32 << m)).map(&mut f).collect())
    }

    pub fn try_from_fn(m: usize, mut f: impl FnMut(Subset) -> Result<f64>) -> Result<Self> {
        if m == 0 || m > MAX_PARTIES {
            return Err(Error::Capacity(format!("{m} parties; supported range is 1..={MAX_PARTIES}")));
        }
        let values = (1..(1u32 << m)).map(&mut f).collect::<Result<Vec<_>>>()?;
        Self::new(m, values)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, k: Subset) -> f64 {
        self.values[k as usize]
    }

    pub fn full(&self) -> Subset {
        ((1u64 << self.m) - 1) as Subset
    }

    /// All nonempty subsets in increasing mask order.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        1..=self.full()
    }
}

/// A point in rate space, one entry per party.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RateTuple(pub Vec<f64>);

impl RateTuple {
    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    pub fn sum_over(&self, k: Subset) -> f64 {
        parties_of(k).iter().map(|&i| self.0[i]).sum()
    }

    pub fn approx_eq(&self, other: &RateTuple, tol: f64) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| (a - b).abs() <= tol)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuperadditivityReport {
    pub holds: bool,
    /// Minimum of `C_{K∪L} + C_{K∩L} − C_K − C_L` over all pairs.
    pub worst_margin: f64,
    pub worst_pair: Option<(Subset, Subset)>,
}

/// Exhaustive check of `C_{K∪L} + C_{K∩L} ≥ C_K + C_L − 1e-9`.
pub fn superadditivity_check(f: &SetFunction) -> SuperadditivityReport {
    let mut worst = f64::INFINITY;
    let mut pair = None;
    for k in f.subsets() {
        for l in k..=f.full() {
            let margin = f.get(k | l) + f.get(k & l) - f.get(k) - f.get(l);
            if margin < worst {
                worst = margin;
                pair = Some((k, l));
            }
        }
    }
    SuperadditivityReport {
        holds: worst >= -MEMBERSHIP_SLACK,
        worst_margin: worst,
        worst_pair: pair,
    }
}

fn require_superadditive(f: &SetFunction) -> Result<()> {
    let check = superadditivity_check(f);
    if check.holds {
        Ok(())
    } else {
        let (k, l) = check.worst_pair.unwrap_or_default();
        Err(Error::InvalidInput(format!(
            "set function is not superadditive: subsets {:?} and {:?} violate by {:e}",
            parties_of(k),
            parties_of(l),
            -check.worst_margin
        )))
    }
}

fn global_purity<Q: QuantumState + ?Sized>(s: &Q) -> f64 {
    let all = vec![true; s.dims().len()];
    s.reduced_by_mask(&all).iter().map(|z| z.norm_sqr()).sum()
}

/// Inner-bound constants `C_K = ½[Σ_{k∈K} H(A_k) + H(R) − H(R A_K)]` for a
/// pure state on the senders and the reference `R`.
pub fn inner_constants<Q: QuantumState + ?Sized, S: AsRef<str>>(
    s: &Q,
    parts: &[Vec<String>],
    reference: &[S],
) -> Result<SetFunction> {
    let reference: Vec<String> = reference.iter().map(|r| r.as_ref().to_string()).collect();
    let mut covered: Vec<&String> = parts.iter().flatten().chain(&reference).collect();
    covered.sort();
    let mut labels: Vec<&String> = s.labels().iter().collect();
    labels.sort();
    if covered != labels {
        return Err(Error::Label(
            "senders and reference must cover exactly the state's subsystems, once each".into(),
        ));
    }
    if reference.is_empty() || parts.is_empty() {
        return Err(Error::InvalidInput("need at least one sender and a reference".into()));
    }
    let purity = global_purity(s);
    if purity < 1.0 - 1e-9 {
        return Err(Error::InvalidInput(format!(
            "global state on senders and reference must be pure (purity {purity})"
        )));
    }
    let m = parts.len();
    let singles = parts.iter().map(|p| entropy_or_zero(s, p)).collect::<Result<Vec<_>>>()?;
    let h_r = entropy_or_zero(s, &reference)?;
    SetFunction::try_from_fn(m, |k| {
        let members = parties_of(k);
        let mut joint: Vec<String> = reference.clone();
        for &i in &members {
            joint.extend(parts[i].iter().cloned());
        }
        let entropic = 0.5 * (members.iter().map(|&i| singles[i]).sum::<f64>() + h_r - entropy_or_zero(s, &joint)?);
        // same constant as ½ I(A_{k1}; …; A_{k|K|}; R)
        let mut groups: Vec<Vec<String>> = members.iter().map(|&i| parts[i].clone()).collect();
        groups.push(reference.clone());
        let via_multiparty = 0.5 * multiparty_info(s, &groups)?;
        if (entropic - via_multiparty).abs() > 1e-9 {
            return Err(Error::Invariant(format!(
                "inner constant forms disagree for {members:?}: {entropic} vs {via_multiparty}"
            )));
        }
        Ok(entropic)
    })
}

/// Outer-bound constants `C′_K = C_K − E_sq(A_{k1};…;A_{k|K|})`. Singletons
/// always subtract 0; every subset of size ≥ 2 needs a value in `esq`.
pub fn outer_constants(inner: &SetFunction, esq: &BTreeMap<Subset, f64>) -> Result<SetFunction> {
    SetFunction::try_from_fn(inner.m(), |k| {
        if k.count_ones() < 2 {
            return Ok(inner.get(k));
        }
        esq.get(&k)
            .map(|e| inner.get(k) - e)
            .ok_or_else(|| Error::InvalidInput(format!("missing E_sq value for subset {:?}", parties_of(k))))
    })
}

fn corner_unchecked(f: &SetFunction, pi: &[usize]) -> RateTuple {
    let m = f.m();
    let mut rates = vec![0.0; m];
    // suffix[i] = mask of π(i), …, π(m−1)
    let mut suffix = vec![0 as Subset; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] | (1 << pi[i]);
    }
    for i in 0..m {
        rates[pi[i]] = f.get(suffix[i]) - f.get(suffix[i + 1]);
    }
    RateTuple(rates)
}

fn check_permutation(pi: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if pi.len() != m || pi.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidInput(format!("{pi:?} is not a permutation of 0..{m}")));
    }
    Ok(())
}

/// Corner point for the sending order `pi` (zero-based; `pi[0]` sends first
/// and pays the most).
pub fn corner_point(f: &SetFunction, pi: &[usize]) -> Result<RateTuple> {
    check_permutation(pi, f.m())?;
    require_superadditive(f)?;
    Ok(corner_unchecked(f, pi))
}

fn dedup(points: Vec<RateTuple>) -> Vec<RateTuple> {
    let mut out: Vec<RateTuple> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.approx_eq(&p, DEDUP_TOL)) {
            out.push(p);
        }
    }
    out.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .find(|(x, y)| (*x - *y).abs() > DEDUP_TOL)
            .map(|(x, y)| x.total_cmp(y))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Distinct corner points over all `m!` orders, sorted lexicographically.
pub fn corner_points_all(f: &SetFunction) -> Result<Vec<RateTuple>> {
    let m = f.m();
    if m > 7 {
        return Err(Error::Capacity(format!("{m} parties; corner enumeration supports m ≤ 7")));
    }
    require_superadditive(f)?;
    let points = (0..m).permutations(m).map(|pi| corner_unchecked(f, &pi)).collect();
    Ok(dedup(points))
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    /// `(subset, Σ_{k∈K} Q_k − C_K)` for every violated constraint.
    pub violated: Vec<(Subset, f64)>,
    pub tight: Vec<Subset>,
    pub min_slack: f64,
}

pub fn membership(f: &SetFunction, q: &RateTuple) -> Result<MembershipReport> {
    if q.0.len() != f.m() {
        return Err(Error::Dimension(format!("{} rates for {} parties", q.0.len(), f.m())));
    }
    if q.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("rates must be finite".into()));
    }
    let mut violated = Vec::new();
    let mut tight = Vec::new();
    let mut min_slack = f64::INFINITY;
    for k in f.subsets() {
        let slack = q.sum_over(k) - f.get(k);
        min_slack = min_slack.min(slack);
        if slack < -MEMBERSHIP_SLACK {
            violated.push((k, slack));
        }
        if slack.abs() <= TIGHT_TOL {
            tight.push(k);
        }
    }
    Ok(MembershipReport {
        member: violated.is_empty(),
        violated,
        tight,
        min_slack,
    })
}

/// Vertex enumeration by brute force: every linearly independent choice of
/// `m` constraint hyperplanes is solved and kept when feasible.
pub fn vertices_bruteforce(f: &SetFunction) -> Result<Vec<RateTuple>> {
    let m = f.m();
    if m > 5 {
        return Err(Error::Capacity(format!("{m} parties; brute-force enumeration supports m ≤ 5")));
    }
    let subsets: Vec<Subset> = f.subsets().collect();
    let mut found = Vec::new();
    for chosen in subsets.iter().copied().combinations(m) {
        let a: DMatrix<f64> = DMatrix::from_fn(m, m, |r, col| if chosen[r] & (1 << col) != 0 { 1.0 } else { 0.0 });
        let lu = a.clone().lu();
        if lu.determinant().abs() <= RANK_TOL {
            continue;
        }
        let b = DVector::from_iterator(m, chosen.iter().map(|&k| f.get(k)));
        let Some(x) = lu.solve(&b) else { continue };
        let point = RateTuple(x.iter().copied().collect());
        let feasible = f.subsets().all(|k| point.sum_over(k) - f.get(k) >= -MEMBERSHIP_SLACK);
        if feasible {
            found.push(point);
        }
    }
    Ok(dedup(found))
}

/// `f(K) = H(A_K | A_{K̄})` over the given parties; may be negative.
pub fn merging_region<Q: QuantumState + ?Sized>(s: &Q, parts: &[Vec<String>]) -> Result<SetFunction> {
    if parts.len() < 2 {
        return Err(Error::InvalidInput("merging region needs at least 2 parties".into()));
    }
    let gather = |k: Subset, inside: bool| -> Vec<String> {
        parts
            .iter()
            .enumerate()
            .filter(|(i, _)| (k & (1 << i) != 0) == inside)
            .flat_map(|(_, p)| p.iter().cloned())
            .collect()
    };
    SetFunction::try_from_fn(parts.len(), |k| cond_entropy(s, &gather(k, true), &gather(k, false)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Halfspace {
    pub subset: Subset,
    pub c: f64,
    /// False when the constant rests on an upper bound rather than an exact value.
    pub exact: bool,
}

/// H- and V-descriptions of a supermodular region.
#[derive(Clone, Debug, Serialize)]
pub struct RegionDescription {
    pub m: usize,
    pub h_rep: Vec<Halfspace>,
    pub vertices: Vec<RateTuple>,
    /// Recession directions; the region is `conv(vertices) + cone(e_1, …, e_m)`.
    pub cone: Vec<Vec<f64>>,
}

pub fn export_region(f: &SetFunction) -> Result<RegionDescription> {
    let vertices = corner_points_all(f)?;
    let m = f.m();
    for v in &vertices {
        for k in f.subsets() {
            if v.sum_over(k) - f.get(k) < -DEDUP_TOL {
                return Err(Error::Invariant(format!(
                    "vertex {:?} violates constraint {:?}",
                    v.0,
                    parties_of(k)
                )));
            }
        }
    }
    Ok(RegionDescription {
        m,
        h_rep: f
            .subsets()
            .map(|k| Halfspace {
                subset: k,
                c: f.get(k),
                exact: true,
            })
            .collect(),
        vertices,
        cone: (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
    })
}

impl RegionDescription {
    /// Mark the constants of `bounded` subsets as resting on upper bounds.
    pub fn with_bounded(mut self, bounded: &[Subset]) -> Self {
        for h in &mut self.h_rep {
            if bounded.contains(&h.subset) {
                h.exact = false;
            }
        }
        self
    }

    /// JSON export; subsets are listed with one-based party indices.
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "h_rep": self.h_rep.iter().map(|h| json!({
                "subset": parties_of(h.subset).iter().map(|i| i + 1).collect::<Vec<_>>(),
                "c": h.c,
                "exact": h.exact,
            })).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
            "cone": self.cone,
        })
    }
}
