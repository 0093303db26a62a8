//! JSON state files:
//! `{"dims":[..], "labels":[..], "kind":"ket"|"density", "data": ..}` where
//! `data` is a list of `[re, im]` pairs for kets and a list of rows of pairs
//! for density matrices.

use super::{MultipartiteState, PureState, QState, QuantumState};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, C64};
use serde_json::{json, Value};

fn format_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn complex_value(z: &C64) -> Value {
    json!([z.re, z.im])
}

pub fn state_to_value(state: &QState) -> Value {
    let (kind, data) = match state {
        QState::Pure(p) => ("ket", Value::Array(p.amplitudes().iter().map(complex_value).collect())),
        QState::Mixed(m) => {
            let mat = m.matrix();
            let rows = (0..mat.nrows())
                .map(|r| Value::Array((0..mat.ncols()).map(|col| complex_value(&mat[(r, col)])).collect()))
                .collect();
            ("density", Value::Array(rows))
        }
    };
    json!({
        "dims": state.dims(),
        "labels": state.labels(),
        "kind": kind,
        "data": data,
    })
}

pub fn state_to_json(state: &QState) -> String {
    serde_json::to_string_pretty(&state_to_value(state)).expect("state serializes")
}

pub fn state_from_json(text: &str) -> Result<QState> {
    let value: Value = serde_json::from_str(text).map_err(|e| format_err("$", e.to_string()))?;
    state_from_value(&value)
}

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| format_err(&format!("$.{name}"), "missing field"))
}

fn parse_complex(v: &Value, path: &str) -> Result<C64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| format_err(path, "expected [re, im]"))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| format_err(&format!("{path}[0]"), "expected a number"))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| format_err(&format!("{path}[1]"), "expected a number"))?;
    Ok(c(re, im))
}

pub fn state_from_value(value: &Value) -> Result<QState> {
    if !value.is_object() {
        return Err(format_err("$", "expected an object"));
    }
    let dims = field(value, "dims")?
        .as_array()
        .ok_or_else(|| format_err("$.dims", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, d)| {
            d.as_u64()
                .filter(|&d| d > 0)
                .map(|d| d as usize)
                .ok_or_else(|| format_err(&format!("$.dims[{i}]"), "expected a positive integer"))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = field(value, "labels")?
        .as_array()
        .ok_or_else(|| format_err("$.labels", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.as_str()
                .map(str::to_string)
                .ok_or_else(|| format_err(&format!("$.labels[{i}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>>>()?;
    if labels.len() != dims.len() {
        return Err(format_err("$.labels", format!("{} labels for {} dims", labels.len(), dims.len())));
    }
    super::validate_layout(&dims, &labels).map_err(|e| format_err("$.dims", e.to_string()))?;
    let total: usize = dims.iter().product();
    let kind = field(value, "kind")?
        .as_str()
        .ok_or_else(|| format_err("$.kind", "expected a string"))?;
    let data = field(value, "data")?
        .as_array()
        .ok_or_else(|| format_err("$.data", "expected an array"))?;
    if data.len() != total {
        return Err(format_err("$.data", format!("expected {total} entries, got {}", data.len())));
    }
    match kind {
        "ket" => {
            let amps = data
                .iter()
                .enumerate()
                .map(|(i, v)| parse_complex(v, &format!("$.data[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let p = PureState::new(dims, &labels, CVector::from_vec(amps))
                .map_err(|e| format_err("$.data", e.to_string()))?;
            Ok(QState::Pure(p))
        }
        "density" => {
            let mut m = CMatrix::zeros(total, total);
            for (r, row) in data.iter().enumerate() {
                let row = row
                    .as_array()
                    .filter(|a| a.len() == total)
                    .ok_or_else(|| format_err(&format!("$.data[{r}]"), format!("expected a row of {total} entries")))?;
                for (col, v) in row.iter().enumerate() {
                    m[(r, col)] = parse_complex(v, &format!("$.data[{r}][{col}]"))?;
                }
            }
            let s = MultipartiteState::new(dims, &labels, m)
                .map_err(|e| format_err("$.data", e.to_string()))?;
            Ok(QState::Mixed(s))
        }
        other => Err(format_err("$.kind", format!("expected \"ket\" or \"density\", got {other:?}"))),
    }
}
