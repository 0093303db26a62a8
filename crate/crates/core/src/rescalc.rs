//! Resource inequalities as formal weighted sums of resources, with the
//! standard protocol inequalities evaluated on concrete states.
//!
//! Coefficients are per copy, with every `δ` slack term taken to zero.

use crate::entropy::{cond_entropy, mutual_info, von_neumann};
use crate::error::{Error, Result};
use crate::qstate::{MultipartiteState, QuantumState};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Weights at or below this magnitude are dropped.
pub const WEIGHT_EPS: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-9;

const DELTA_NOTE: &str = "holds for any δ > 0; coefficients shown at δ = 0";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Token {
    /// Opaque state or channel resource; equal only when the names are identical.
    Named(String),
    /// `[qq]`
    Ebit,
    /// `[q→q]`
    QuantumChannel,
    /// `[c→c]`
    ClassicalChannel,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Named(name) => write!(f, "⟨{name}⟩"),
            Token::Ebit => write!(f, "[qq]"),
            Token::QuantumChannel => write!(f, "[q→q]"),
            Token::ClassicalChannel => write!(f, "[c→c]"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ResourceExpr(pub BTreeMap<Token, f64>);

impl ResourceExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, token: Token, weight: f64) -> Self {
        self.add(token, weight);
        self
    }

    pub fn add(&mut self, token: Token, weight: f64) {
        *self.0.entry(token).or_insert(0.0) += weight;
    }

    pub fn weight(&self, token: &Token) -> f64 {
        self.0.get(token).copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn prune(&mut self) {
        self.0.retain(|_, w| w.abs() > WEIGHT_EPS);
    }

    /// Same tokens with weights within `tol`.
    pub fn approx_eq(&self, other: &ResourceExpr, tol: f64) -> bool {
        self.0.keys().chain(other.0.keys()).all(|t| (self.weight(t) - other.weight(t)).abs() <= tol)
    }
}

impl fmt::Display for ResourceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (token, w)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{w:.3} {token}")?;
        }
        Ok(())
    }
}

/// `lhs ≥ rhs`: the left-hand resources can simulate the right-hand ones.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceInequality {
    pub name: String,
    pub lhs: ResourceExpr,
    pub rhs: ResourceExpr,
    pub note: Option<String>,
}

impl ResourceInequality {
    pub fn new(name: impl Into<String>, lhs: ResourceExpr, rhs: ResourceExpr) -> Result<Self> {
        if lhs.0.values().chain(rhs.0.values()).any(|w| !w.is_finite()) {
            return Err(Error::Domain("resource weights must be finite".into()));
        }
        let mut out = Self {
            name: name.into(),
            lhs,
            rhs,
            note: None,
        };
        out.cancel();
        Ok(out)
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    /// Puts each token's net weight on one side only.
    fn cancel(&mut self) {
        let tokens: Vec<Token> = self.lhs.0.keys().chain(self.rhs.0.keys()).cloned().collect();
        for t in tokens {
            let net = self.lhs.weight(&t) - self.rhs.weight(&t);
            self.lhs.0.remove(&t);
            self.rhs.0.remove(&t);
            if net > 0.0 {
                self.lhs.0.insert(t, net);
            } else if net < 0.0 {
                self.rhs.0.insert(t, -net);
            }
        }
        self.lhs.prune();
        self.rhs.prune();
    }

    /// Net consumption of `token`: left weight minus right weight.
    pub fn cost(&self, token: &Token) -> f64 {
        self.lhs.weight(token) - self.rhs.weight(token)
    }

    /// Net production of `token`: right weight minus left weight.
    pub fn yield_of(&self, token: &Token) -> f64 {
        -self.cost(token)
    }
}

impl fmt::Display for ResourceInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≥ {}", self.lhs, self.rhs)
    }
}

/// Sum of both inequalities with common resources cancelled.
pub fn compose(a: &ResourceInequality, b: &ResourceInequality) -> ResourceInequality {
    let mut lhs = a.lhs.clone();
    let mut rhs = a.rhs.clone();
    for (t, w) in &b.lhs.0 {
        lhs.add(t.clone(), *w);
    }
    for (t, w) in &b.rhs.0 {
        rhs.add(t.clone(), *w);
    }
    let mut out = ResourceInequality {
        name: format!("{} + {}", a.name, b.name),
        lhs,
        rhs,
        note: a.note.clone().or_else(|| b.note.clone()),
    };
    out.cancel();
    out
}

pub fn scale(a: &ResourceInequality, factor: f64) -> Result<ResourceInequality> {
    if !factor.is_finite() || factor < 0.0 {
        return Err(Error::Domain(format!("scale factor {factor} must be a nonnegative real")));
    }
    let mul = |e: &ResourceExpr| {
        let mut out = ResourceExpr(e.0.iter().map(|(t, w)| (t.clone(), w * factor)).collect());
        out.prune();
        out
    };
    Ok(ResourceInequality {
        name: format!("{factor}·({})", a.name),
        lhs: mul(&a.lhs),
        rhs: mul(&a.rhs),
        note: a.note.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Teleportation,
    SuperdenseCoding,
    Mother,
    Father,
    Fqsw,
    Schumacher,
    Merging,
}

impl Builtin {
    pub const ALL: [Builtin; 7] = [
        Builtin::Teleportation,
        Builtin::SuperdenseCoding,
        Builtin::Mother,
        Builtin::Father,
        Builtin::Fqsw,
        Builtin::Schumacher,
        Builtin::Merging,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Teleportation => "tp",
            Builtin::SuperdenseCoding => "sc",
            Builtin::Mother => "mother",
            Builtin::Father => "father",
            Builtin::Fqsw => "fqsw",
            Builtin::Schumacher => "schumacher",
            Builtin::Merging => "merging",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown builtin `{name}`")))
    }

    pub fn needs_state(self) -> bool {
        !matches!(self, Builtin::Teleportation | Builtin::SuperdenseCoding)
    }
}

fn named(s: &str) -> Token {
    Token::Named(s.to_string())
}

/// The state on `labels` plus `extra`, purifying into `extra` when it is absent.
fn with_purifier(s: &MultipartiteState, labels: &[&str], extra: &str) -> Result<MultipartiteState> {
    for l in labels {
        s.label_position(l)?;
    }
    let present = s.labels().iter().any(|l| l == extra);
    let mut keep: Vec<&str> = labels.to_vec();
    if present {
        keep.push(extra);
    }
    let reduced = if s.labels().len() == keep.len() {
        s.clone()
    } else {
        s.partial_trace(&keep)?
    };
    if present {
        Ok(reduced)
    } else {
        Ok(reduced.purify(extra)?.to_density())
    }
}

/// Catalog inequality, with entropic coefficients evaluated on `s` where needed.
///
/// Role labels: mother, FQSW and merging use `A`, `B` and reference `R`;
/// father uses `R`, `B` and environment `E`; Schumacher compresses the whole
/// of `s`. A missing `R` (or `E`) is supplied by purification.
pub fn builtin(kind: Builtin, s: Option<&MultipartiteState>) -> Result<ResourceInequality> {
    let state = || {
        s.ok_or_else(|| Error::InvalidInput(format!("builtin `{}` needs a state", kind.name())))
    };
    let ineq = match kind {
        Builtin::Teleportation => ResourceInequality::new(
            "TP",
            ResourceExpr::new().with(Token::Ebit, 1.0).with(Token::ClassicalChannel, 2.0),
            ResourceExpr::new().with(Token::QuantumChannel, 1.0),
        )?,
        Builtin::SuperdenseCoding => ResourceInequality::new(
            "SC",
            ResourceExpr::new().with(Token::Ebit, 1.0).with(Token::QuantumChannel, 1.0),
            ResourceExpr::new().with(Token::ClassicalChannel, 2.0),
        )?,
        Builtin::Mother => {
            let psi = with_purifier(state()?, &["A", "B"], "R")?;
            let i_ar = mutual_info(&psi, &["A"], &["R"])?.max(0.0);
            let i_ab = mutual_info(&psi, &["A"], &["B"])?;
            ResourceInequality::new(
                "mother",
                ResourceExpr::new()
                    .with(named("ρ^AB"), 1.0)
                    .with(Token::QuantumChannel, 0.5 * i_ar),
                ResourceExpr::new().with(Token::Ebit, 0.5 * i_ab),
            )?
            .with_note(DELTA_NOTE)
        }
        Builtin::Father => {
            let psi = with_purifier(state()?, &["R", "B"], "E")?;
            let i_re = mutual_info(&psi, &["R"], &["E"])?;
            let i_rb = mutual_info(&psi, &["R"], &["B"])?;
            ResourceInequality::new(
                "father",
                ResourceExpr::new()
                    .with(named("N"), 1.0)
                    .with(Token::Ebit, 0.5 * i_re),
                ResourceExpr::new().with(Token::QuantumChannel, 0.5 * i_rb),
            )?
            .with_note(DELTA_NOTE)
        }
        Builtin::Fqsw => {
            let psi = with_purifier(state()?, &["A", "B"], "R")?;
            let i_ar = mutual_info(&psi, &["A"], &["R"])?.max(0.0);
            let i_ab = mutual_info(&psi, &["A"], &["B"])?;
            ResourceInequality::new(
                "FQSW",
                ResourceExpr::new()
                    .with(named("U^{S→AB}:φ^S"), 1.0)
                    .with(Token::QuantumChannel, 0.5 * i_ar),
                ResourceExpr::new()
                    .with(Token::Ebit, 0.5 * i_ab)
                    .with(named("id^{S→B̂}:φ^S"), 1.0),
            )?
            .with_note(DELTA_NOTE)
        }
        Builtin::Schumacher => {
            let s = state()?;
            let h = von_neumann(s, s.labels())?;
            ResourceInequality::new(
                "Schumacher",
                ResourceExpr::new().with(Token::QuantumChannel, h),
                ResourceExpr::new().with(named("id^{A→B}:ρ^A"), 1.0),
            )?
            .with_note(DELTA_NOTE)
        }
        Builtin::Merging => {
            let psi = with_purifier(state()?, &["A", "B"], "R")?;
            let h_a_b = cond_entropy(&psi, &["A"], &["B"])?;
            let i_ar = mutual_info(&psi, &["A"], &["R"])?.max(0.0);
            // negative conditional entropy means ebits are produced
            let (lhs_e, rhs_e) = if h_a_b >= 0.0 { (h_a_b, 0.0) } else { (0.0, -h_a_b) };
            ResourceInequality::new(
                "merging",
                ResourceExpr::new()
                    .with(named("U^{S→AB}:φ^S"), 1.0)
                    .with(Token::Ebit, lhs_e)
                    .with(Token::ClassicalChannel, i_ar),
                ResourceExpr::new()
                    .with(named("id^{S→B̂}:φ^S"), 1.0)
                    .with(Token::Ebit, rhs_e),
            )?
            .with_note(DELTA_NOTE)
        }
    };
    Ok(ineq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    /// `½I(A;B) − ½I(A;R) = H(B) − H(AB)`, with the left side read off as the
    /// ebit yield of mother composed with teleportation.
    HashingCoeff,
    /// The ebit cost of FQSW composed with teleportation equals `H(A|B)`.
    MergingCoeff,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub derived: f64,
    pub expected: f64,
    pub difference: f64,
    pub holds: bool,
}

/// `mother + ½I(A;R)·TP`.
pub fn hashing_derivation(s: &MultipartiteState) -> Result<ResourceInequality> {
    let psi = with_purifier(s, &["A", "B"], "R")?;
    let i_ar = mutual_info(&psi, &["A"], &["R"])?.max(0.0);
    let tp = scale(&builtin(Builtin::Teleportation, None)?, 0.5 * i_ar)?;
    Ok(compose(&builtin(Builtin::Mother, Some(s))?, &tp))
}

/// `FQSW + ½I(A;R)·TP`.
pub fn merging_derivation(s: &MultipartiteState) -> Result<ResourceInequality> {
    let psi = with_purifier(s, &["A", "B"], "R")?;
    let i_ar = mutual_info(&psi, &["A"], &["R"])?.max(0.0);
    let tp = scale(&builtin(Builtin::Teleportation, None)?, 0.5 * i_ar)?;
    Ok(compose(&builtin(Builtin::Fqsw, Some(s))?, &tp))
}

pub fn verify_identity(s: &MultipartiteState, identity: Identity) -> Result<IdentityReport> {
    let (derived, expected) = match identity {
        Identity::HashingCoeff => {
            let derived = hashing_derivation(s)?.yield_of(&Token::Ebit);
            let ab = s.partial_trace(&["A", "B"])?;
            let expected = von_neumann(&ab, &["B"])? - von_neumann(&ab, &["A", "B"])?;
            (derived, expected)
        }
        Identity::MergingCoeff => {
            let derived = merging_derivation(s)?.cost(&Token::Ebit);
            let ab = s.partial_trace(&["A", "B"])?;
            (derived, cond_entropy(&ab, &["A"], &["B"])?)
        }
    };
    let difference = derived - expected;
    Ok(IdentityReport {
        derived,
        expected,
        difference,
        holds: difference.abs() <= IDENTITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{basis_ket, bell, product_pure, random_mixed, stream_rng};

    fn tp() -> ResourceInequality {
        builtin(Builtin::Teleportation, None).unwrap()
    }

    #[test]
    fn teleportation_and_superdense_coding() {
        let t = tp();
        assert_eq!(t.lhs.weight(&Token::Ebit), 1.0);
        assert_eq!(t.lhs.weight(&Token::ClassicalChannel), 2.0);
        assert_eq!(t.rhs.weight(&Token::QuantumChannel), 1.0);
        assert_eq!(t.to_string(), "1.000 [qq] + 2.000 [c→c] ≥ 1.000 [q→q]");
        let sc = builtin(Builtin::SuperdenseCoding, None).unwrap();
        assert_eq!(sc.to_string(), "1.000 [qq] + 1.000 [q→q] ≥ 2.000 [c→c]");
    }

    #[test]
    fn mother_on_bell() {
        let m = builtin(Builtin::Mother, Some(&bell().to_density())).unwrap();
        assert!(m.lhs.weight(&Token::QuantumChannel).abs() < 1e-12);
        assert!((m.rhs.weight(&Token::Ebit) - 1.0).abs() < 1e-9);
        assert!(m.note.is_some());
    }

    #[test]
    fn fqsw_on_sender_reference_pair() {
        let s = product_pure(&[
            bell().relabel(&["A", "R"]).unwrap(),
            basis_ket(&[2], &["B"], &[0]).unwrap(),
        ])
        .unwrap()
        .to_density();
        let f = builtin(Builtin::Fqsw, Some(&s)).unwrap();
        assert!((f.lhs.weight(&Token::QuantumChannel) - 1.0).abs() < 1e-9);
        assert!(f.rhs.weight(&Token::Ebit).abs() < 1e-12);
    }

    #[test]
    fn entropic_builtins_need_a_state() {
        for b in Builtin::ALL {
            assert_eq!(builtin(b, None).is_err(), b.needs_state());
        }
    }

    #[test]
    fn scaling() {
        let t2 = scale(&tp(), 2.0).unwrap();
        assert_eq!(t2.lhs.weight(&Token::Ebit), 2.0);
        assert_eq!(t2.lhs.weight(&Token::ClassicalChannel), 4.0);
        assert_eq!(t2.rhs.weight(&Token::QuantumChannel), 2.0);
        let zero = scale(&tp(), 0.0).unwrap();
        assert!(zero.lhs.is_empty() && zero.rhs.is_empty());
        assert!(matches!(scale(&tp(), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_scaled_composition_is_identity() {
        let m = builtin(Builtin::Mother, Some(&bell().to_density())).unwrap();
        let c = compose(&m, &scale(&tp(), 0.0).unwrap());
        assert_eq!(c.lhs, m.lhs);
        assert_eq!(c.rhs, m.rhs);
    }

    #[test]
    fn recycling_in_fqsw() {
        // ½I(A;R)·TP, with the [q→q] it yields fed back: ½I[qq] + I[c→c] ≥ ½I[q→q]
        let half_i = 0.8;
        let t = scale(&tp(), half_i).unwrap();
        assert!((t.lhs.weight(&Token::Ebit) - half_i).abs() < 1e-15);
        assert!((t.lhs.weight(&Token::ClassicalChannel) - 2.0 * half_i).abs() < 1e-15);
        assert!((t.rhs.weight(&Token::QuantumChannel) - half_i).abs() < 1e-15);
    }

    #[test]
    fn hashing_and_merging_on_examples() {
        let b = bell().to_density();
        let r = verify_identity(&b, Identity::HashingCoeff).unwrap();
        assert!(r.holds && (r.derived - 1.0).abs() < 1e-9);
        let mixed = MultipartiteState::maximally_mixed(vec![2, 2], &["A", "B"]).unwrap();
        let r = verify_identity(&mixed, Identity::HashingCoeff).unwrap();
        assert!(r.holds && (r.derived + 1.0).abs() < 1e-9);
        let r = verify_identity(&b, Identity::MergingCoeff).unwrap();
        assert!(r.holds && (r.derived + 1.0).abs() < 1e-9);
        // negative H(A|B): ebits come out
        let d = merging_derivation(&b).unwrap();
        assert!(d.rhs.weight(&Token::Ebit) > 0.0 && d.lhs.weight(&Token::Ebit) == 0.0);
    }

    #[test]
    fn merging_builtin_matches_derivation() {
        let mut rng = stream_rng(17, 0);
        let s = random_mixed(&[2, 2], &["A", "B"], 3, &mut rng).unwrap();
        let built = builtin(Builtin::Merging, Some(&s)).unwrap();
        let derived = merging_derivation(&s).unwrap();
        assert!(built.lhs.approx_eq(&derived.lhs, 1e-9), "{built} vs {derived}");
        assert!(built.rhs.approx_eq(&derived.rhs, 1e-9));
    }

    #[test]
    fn opaque_tokens_cancel_only_by_name() {
        let a = ResourceInequality::new(
            "a",
            ResourceExpr::new().with(named("x"), 1.0),
            ResourceExpr::new().with(named("y"), 1.0),
        )
        .unwrap();
        let b = ResourceInequality::new(
            "b",
            ResourceExpr::new().with(named("y'"), 1.0),
            ResourceExpr::new().with(named("x"), 1.0),
        )
        .unwrap();
        let c = compose(&a, &b);
        assert_eq!(c.lhs.weight(&named("x")), 0.0);
        assert_eq!(c.lhs.weight(&named("y'")), 1.0);
        assert_eq!(c.rhs.weight(&named("y")), 1.0);
    }

    #[test]
    fn composition_commutes_and_associates() {
        let mut rng = stream_rng(23, 0);
        let s = random_mixed(&[2, 2], &["A", "B"], 2, &mut rng).unwrap();
        let a = builtin(Builtin::Mother, Some(&s)).unwrap();
        let b = scale(&tp(), 0.37).unwrap();
        let c = builtin(Builtin::SuperdenseCoding, None).unwrap();
        let ab = compose(&a, &b);
        let ba = compose(&b, &a);
        assert!(ab.lhs.approx_eq(&ba.lhs, 1e-12) && ab.rhs.approx_eq(&ba.rhs, 1e-12));
        let left = compose(&ab, &c);
        let right = compose(&a, &compose(&b, &c));
        assert!(left.lhs.approx_eq(&right.lhs, 1e-12) && left.rhs.approx_eq(&right.rhs, 1e-12));
    }

    #[test]
    fn father_and_schumacher() {
        let s = bell().relabel(&["R", "B"]).unwrap().to_density();
        let f = builtin(Builtin::Father, Some(&s)).unwrap();
        assert!((f.rhs.weight(&Token::QuantumChannel) - 1.0).abs() < 1e-9);
        assert!(f.lhs.weight(&Token::Ebit).abs() < 1e-12);
        let rho = MultipartiteState::diagonal(vec![2], &["A"], &[0.5, 0.5]).unwrap();
        let sch = builtin(Builtin::Schumacher, Some(&rho)).unwrap();
        assert!((sch.lhs.weight(&Token::QuantumChannel) - 1.0).abs() < 1e-12);
        assert!(sch.to_string().contains("⟨id^{A→B}:ρ^A⟩"));
    }

    #[test]
    fn builtin_names_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(Builtin::from_name(b.name()).unwrap(), b);
        }
        assert!(Builtin::from_name("nope").is_err());
    }
}
