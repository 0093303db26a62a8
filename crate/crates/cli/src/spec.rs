//! Parsing of state specifications and subsystem selections.

use qregion_core::qstate::{
    basis_ket, build_named_state, isotropic, state_from_json, NamedState, QState, QuantumState,
};
use qregion_core::{Error, Result};

fn count(arg: Option<&str>, what: &str, default: Option<usize>) -> Result<usize> {
    match (arg, default) {
        (Some(a), _) => a
            .parse()
            .map_err(|_| Error::InvalidInput(format!("`{a}` is not a valid {what}"))),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::InvalidInput(format!("state spec needs a {what}, e.g. ghz:3"))),
    }
}

/// `bell`, `ghz:m`, `w:m`, `product[:k]`, `bell-pairs:k`, `bell-plus-idle`,
/// `isotropic:v`, or `file:path` (state JSON).
pub fn load_state(spec: &str) -> Result<QState> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match kind {
        "bell" => build_named_state(&NamedState::Bell),
        "ghz" => build_named_state(&NamedState::Ghz(count(arg, "party count", None)?)),
        "w" => build_named_state(&NamedState::W(count(arg, "party count", None)?)),
        "bell-pairs" => build_named_state(&NamedState::ProductBellPairs(count(arg, "pair count", None)?)),
        "bell-plus-idle" => build_named_state(&NamedState::BellPlusIdle),
        "product" => {
            let k = count(arg, "qubit count", Some(2))?;
            let labels: Vec<String> = (1..=k).map(|i| format!("X{i}")).collect();
            Ok(basis_ket(&vec![2; k], &labels, &vec![0; k])?.into())
        }
        "isotropic" => {
            let a = arg.ok_or_else(|| Error::InvalidInput("isotropic needs a visibility".into()))?;
            let v: f64 = a
                .parse()
                .map_err(|_| Error::InvalidInput(format!("`{a}` is not a valid visibility")))?;
            Ok(isotropic(v)?.into())
        }
        "file" => {
            let path = arg.unwrap_or_default();
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read `{path}`: {e}")))?;
            state_from_json(&text)
        }
        _ => Err(Error::InvalidInput(format!("unknown state spec `{spec}`"))),
    }
}

/// Comma-separated labels or zero-based subsystem indices. Exact label
/// matches take precedence over indices.
pub fn parse_labels<Q: QuantumState + ?Sized>(s: &Q, spec: &str) -> Result<Vec<String>> {
    let labels = s.labels();
    spec.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|token| {
            if labels.iter().any(|l| l == token) {
                return Ok(token.to_string());
            }
            match token.parse::<usize>() {
                Ok(i) if i < labels.len() => Ok(labels[i].clone()),
                Ok(i) => Err(Error::Label(format!(
                    "subsystem index {i} out of range ({} subsystems)",
                    labels.len()
                ))),
                Err(_) => Err(Error::Label(format!("unknown label `{token}`"))),
            }
        })
        .collect()
}

/// One part per `--part` occurrence; defaults to every subsystem not in
/// `exclude`, one part each.
pub fn parse_parts<Q: QuantumState + ?Sized>(
    s: &Q,
    specs: &[String],
    exclude: &[String],
) -> Result<Vec<Vec<String>>> {
    if specs.is_empty() {
        return Ok(s
            .labels()
            .iter()
            .filter(|l| !exclude.contains(l))
            .map(|l| vec![l.clone()])
            .collect());
    }
    specs.iter().map(|p| parse_labels(s, p)).collect()
}

pub fn parse_numbers<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>> {
    spec.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::InvalidInput(format!("`{t}` is not a valid {what}")))
        })
        .collect()
}
