use crate::report::{fmt9, num, Cell, Report, Table};
use crate::spec::{load_state, parse_labels, parse_numbers, parse_parts};
use crate::Command;
use clap::{Args, ValueEnum};
use qregion_core::classical::{classical_sw_setfunction, schumacher_rate_demo, typical_stats, TypicalReport};
use qregion_core::decouple::{blackhole_threshold, decoupling_sweep, fqsw_chain_sim, fqsw_min_rate, BlackHoleMode};
use qregion_core::entropy::{cond_entropy, cond_multiparty_info, von_neumann, Distribution};
use qregion_core::qstate::{PureState, QState, QuantumState};
use qregion_core::rateregion::{
    corner_points_all, export_region, inner_constants, merging_region, outer_constants, parties_of,
    vertices_bruteforce, Halfspace, RateTuple, RegionDescription, SetFunction, Subset,
};
use qregion_core::rescalc::{
    builtin, hashing_derivation, merging_derivation, scale, verify_identity, Builtin, Identity,
    ResourceExpr, ResourceInequality,
};
use qregion_core::squashed::{esq_optimize, esq_pure, EsqOptions, EsqResult};
use qregion_core::{Error, Result};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

#[derive(Args, Debug)]
pub struct StateArg {
    /// State: bell, ghz:m, w:m, product[:k], bell-pairs:k, bell-plus-idle,
    /// isotropic:v, or file:path.
    #[arg(long)]
    pub state: Option<String>,
}

impl StateArg {
    fn load(&self) -> Result<QState> {
        let spec = self
            .state
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("--state is required".into()))?;
        load_state(spec)
    }
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub input: StateArg,
    /// Subsystems (labels or zero-based indices, comma-separated).
    #[arg(long)]
    pub subset: Option<String>,
    /// Conditioning subsystems.
    #[arg(long)]
    pub given: Option<String>,
}

#[derive(Args, Debug)]
pub struct MpinfoArgs {
    #[command(flatten)]
    pub input: StateArg,
    /// One party per occurrence; defaults to every subsystem on its own.
    #[arg(long = "part")]
    pub parts: Vec<String>,
    /// Conditioning subsystems.
    #[arg(long)]
    pub given: Option<String>,
}

#[derive(Args, Debug)]
pub struct EsqArgs {
    #[command(flatten)]
    pub input: StateArg,
    #[arg(long = "part")]
    pub parts: Vec<String>,
    /// Use the closed form for pure states.
    #[arg(long)]
    pub pure: bool,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Extension dimension (default: total dimension of the state).
    #[arg(long = "d-e")]
    pub d_e: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Objective evaluations per restart.
    #[arg(long = "max-evals", default_value_t = 5_000)]
    pub max_evals: usize,
}

impl SearchArgs {
    fn options(&self, seed: u64) -> EsqOptions {
        EsqOptions {
            d_e: self.d_e,
            restarts: self.restarts,
            tol: self.tol,
            max_evals: self.max_evals,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[command(flatten)]
    pub input: StateArg,
    /// One sender per occurrence; defaults to every non-reference subsystem.
    #[arg(long = "sender")]
    pub senders: Vec<String>,
    /// Reference subsystems (default `R`).
    #[arg(long, default_value = "R")]
    pub reference: String,
    /// Subtract squashed-entanglement bounds to obtain the outer region
    /// (runs an extension search per mixed group; see --restarts, --max-evals).
    #[arg(long)]
    pub outer: bool,
    /// What to emit: h (halfspaces), v (vertices), or both.
    #[arg(long, default_value = "h,v")]
    pub emit: String,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug)]
pub struct MergeArgs {
    #[command(flatten)]
    pub input: StateArg,
    #[arg(long = "part")]
    pub parts: Vec<String>,
    #[arg(long, default_value = "h,v")]
    pub emit: String,
}

#[derive(Args, Debug)]
pub struct SwArgs {
    /// Joint probabilities in row-major order, comma-separated.
    #[arg(long)]
    pub probs: String,
    /// Alphabet sizes, comma-separated.
    #[arg(long)]
    pub shape: String,
    #[arg(long, default_value = "h,v")]
    pub emit: String,
}

#[derive(Args, Debug)]
pub struct TypicalArgs {
    /// Source distribution; alternatively use --state for its spectrum.
    #[arg(long, conflicts_with = "state")]
    pub probs: Option<String>,
    #[command(flatten)]
    pub input: StateArg,
    /// Block lengths, comma-separated.
    #[arg(long, default_value = "10,20,30,40,50,60")]
    pub n: String,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

#[derive(Args, Debug)]
pub struct DecoupleArgs {
    #[command(flatten)]
    pub input: StateArg,
    /// Sender subsystems A^S.
    #[arg(long)]
    pub sender: String,
    /// Reference subsystems.
    #[arg(long, default_value = "R")]
    pub reference: String,
    /// Sent-system dimensions d_A1 (default: every divisor of d_A).
    #[arg(long = "d-a1")]
    pub d_a1: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct FqswArgs {
    #[command(flatten)]
    pub input: StateArg,
    /// Sender subsystems, comma-separated.
    #[arg(long)]
    pub senders: Option<String>,
    #[arg(long, default_value = "R")]
    pub reference: String,
    /// Sending order as zero-based sender positions (default: as listed).
    #[arg(long)]
    pub order: Option<String>,
    /// Qubits sent by each sender; enables the chain simulation.
    #[arg(long)]
    pub qubits: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Derivation {
    Hashing,
    Merging,
}

#[derive(Args, Debug)]
pub struct RescalcArgs {
    #[command(flatten)]
    pub input: StateArg,
    /// Catalog entry: tp, sc, mother, father, fqsw, schumacher, merging.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Nonnegative factor applied to the builtin.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Derive a protocol by composition and check its coefficient.
    #[arg(long, value_enum, conflicts_with = "builtin")]
    pub derive: Option<Derivation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HoleMode {
    Simple,
    Lost,
}

#[derive(Args, Debug)]
pub struct BlackholeArgs {
    #[command(flatten)]
    pub input: StateArg,
    /// The system A whose purification must come out.
    #[arg(long)]
    pub subset: String,
    #[arg(long, value_enum, default_value = "simple")]
    pub mode: HoleMode,
    /// B₂ subsystems (lost mode).
    #[arg(long)]
    pub b2: Option<String>,
    /// Lost subsystems L (lost mode).
    #[arg(long)]
    pub lost: Option<String>,
}

pub fn run(command: &Command, seed: u64) -> Result<Report> {
    match command {
        Command::Entropy(a) => entropy(a),
        Command::Mpinfo(a) => mpinfo(a),
        Command::Esq(a) => esq(a, seed),
        Command::Region(a) => region(a, seed),
        Command::Vertices(a) => vertices(a),
        Command::MergeRegion(a) => merge_region(a),
        Command::SwRegion(a) => sw_region(a),
        Command::Typical(a) => typical(a),
        Command::Decouple(a) => decouple(a, seed),
        Command::FqswRates(a) => fqsw_rates(a, seed),
        Command::Rescalc(a) => rescalc(a),
        Command::Blackhole(a) => blackhole(a),
    }
}

fn scalar(name: &str, value: f64, extra: Value) -> Report {
    let mut obj = Map::new();
    obj.insert("quantity".into(), Value::String(name.into()));
    obj.insert("value".into(), num(value));
    if let Value::Object(more) = extra {
        obj.extend(more);
    }
    let mut table = Table::new(&["quantity", "value"]);
    table.push(vec![name.into(), value.into()]);
    Report {
        text: fmt9(value),
        json: Value::Object(obj),
        table,
    }
}

fn entropy(a: &EntropyArgs) -> Result<Report> {
    let s = a.input.load()?;
    let subset = parse_labels(&s, a.subset.as_deref().unwrap_or(""))?;
    if subset.is_empty() {
        return Err(Error::InvalidInput("--subset must name at least one subsystem".into()));
    }
    match &a.given {
        Some(g) => {
            let given = parse_labels(&s, g)?;
            let v = cond_entropy(&s, &subset, &given)?;
            let name = format!("H({}|{})", subset.join(","), given.join(","));
            Ok(scalar(&name, v, json!({"subset": subset, "given": given})))
        }
        None => {
            let v = von_neumann(&s, &subset)?;
            let name = format!("H({})", subset.join(","));
            Ok(scalar(&name, v, json!({"subset": subset})))
        }
    }
}

fn mpinfo(a: &MpinfoArgs) -> Result<Report> {
    let s = a.input.load()?;
    let given = match &a.given {
        Some(g) => parse_labels(&s, g)?,
        None => Vec::new(),
    };
    let parts = parse_parts(&s, &a.parts, &given)?;
    let v = cond_multiparty_info(&s, &parts, &given)?;
    let joined: Vec<String> = parts.iter().map(|p| p.join(",")).collect();
    let name = if given.is_empty() {
        format!("I({})", joined.join(";"))
    } else {
        format!("I({}|{})", joined.join(";"), given.join(","))
    };
    Ok(scalar(&name, v, json!({"parts": parts, "given": given})))
}

fn esq_search(s: &QState, parts: &[Vec<String>], search: &SearchArgs, seed: u64) -> Result<EsqResult> {
    esq_optimize(&s.to_density(), parts, &search.options(seed))
}

fn esq(a: &EsqArgs, seed: u64) -> Result<Report> {
    let s = a.input.load()?;
    let parts = parse_parts(&s, &a.parts, &[])?;
    if a.pure {
        let v = esq_pure(&s, &parts)?;
        return Ok(scalar("E_sq", v, json!({"parts": parts, "method": "pure"})));
    }
    let r = esq_search(&s, &parts, &a.search, seed)?;
    let d_e = r.extension.d_e;
    let name = format!("upper bound at extension dimension {d_e}");
    let mut report = scalar(
        &name,
        r.upper_bound,
        json!({
            "parts": parts,
            "method": "extension search",
            "d_E": d_e,
            "d_F": r.extension.d_f,
            "restarts": r.restarts_used,
            "converged": r.converged,
            "seed": seed,
        }),
    );
    report.text = format!("{} (upper bound, d_E = {d_e})", fmt9(r.upper_bound));
    Ok(report)
}

struct Emit {
    h: bool,
    v: bool,
}

fn parse_emit(spec: &str) -> Result<Emit> {
    let mut emit = Emit { h: false, v: false };
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token {
            "h" => emit.h = true,
            "v" => emit.v = true,
            other => return Err(Error::InvalidInput(format!("unknown --emit item `{other}`"))),
        }
    }
    if !emit.h && !emit.v {
        return Err(Error::InvalidInput("--emit needs h, v, or both".into()));
    }
    Ok(emit)
}

fn subset_text(k: Subset) -> String {
    parties_of(k)
        .iter()
        .map(|i| format!("Q{}", i + 1))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn tuple_text(v: &RateTuple) -> String {
    format!("({})", v.0.iter().map(|x| fmt9(*x)).collect::<Vec<_>>().join(", "))
}

fn region_report(desc: &RegionDescription, emit: &Emit, extra: Value) -> Report {
    let mut text = String::new();
    let mut json = match desc.to_json() {
        Value::Object(o) => o,
        _ => Map::new(),
    };
    if !emit.h {
        json.remove("h_rep");
    }
    if !emit.v {
        json.remove("vertices");
        json.remove("cone");
    }
    if let Value::Object(more) = extra {
        json.extend(more);
    }
    let m = desc.m;
    let mut header: Vec<String> = vec!["kind".into(), "subset".into(), "c".into(), "exact".into()];
    header.extend((1..=m).map(|i| format!("q{i}")));
    let mut table = Table::new(&header);
    if emit.h {
        text.push_str(&format!("halfspaces {}\n", desc.h_rep.len()));
        for Halfspace { subset, c, exact } in &desc.h_rep {
            let mark = if *exact { "" } else { "  (bound)" };
            text.push_str(&format!("  {} >= {}{mark}\n", subset_text(*subset), fmt9(*c)));
            let members: Vec<String> = parties_of(*subset).iter().map(|i| (i + 1).to_string()).collect();
            let mut row: Vec<Cell> = vec![
                "h".into(),
                members.join(" ").into(),
                (*c).into(),
                exact.to_string().into(),
            ];
            row.extend((0..m).map(|_| Cell::Text(String::new())));
            table.push(row);
        }
    }
    if emit.v {
        text.push_str(&format!("vertices {}\n", desc.vertices.len()));
        for v in &desc.vertices {
            text.push_str(&format!("  {}\n", tuple_text(v)));
            let mut row: Vec<Cell> = vec!["v".into(), "".into(), "".into(), "".into()];
            row.extend(v.0.iter().map(|&x| Cell::Num(x)));
            table.push(row);
        }
    }
    Report {
        text,
        json: Value::Object(json),
        table,
    }
}

/// Falls back to brute-force vertices when the constants are not supermodular.
fn describe(f: &SetFunction) -> Result<RegionDescription> {
    match export_region(f) {
        Ok(d) => Ok(d),
        Err(Error::InvalidInput(_)) | Err(Error::Invariant(_)) => {
            let m = f.m();
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
                vertices: vertices_bruteforce(f)?,
                cone: (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
            })
        }
        Err(e) => Err(e),
    }
}

fn senders_and_reference(s: &QState, a: &RegionArgs) -> Result<(Vec<Vec<String>>, Vec<String>)> {
    let reference = parse_labels(s, &a.reference)?;
    let parts = parse_parts(s, &a.senders, &reference)?;
    Ok((parts, reference))
}

fn region(a: &RegionArgs, seed: u64) -> Result<Report> {
    let emit = parse_emit(&a.emit)?;
    let s = a.input.load()?;
    let (parts, reference) = senders_and_reference(&s, a)?;
    let inner = inner_constants(&s, &parts, &reference)?;
    if !a.outer {
        let desc = describe(&inner)?;
        return Ok(region_report(&desc, &emit, json!({"bound": "inner"})));
    }
    let mut esq = BTreeMap::new();
    let mut bounded = Vec::new();
    for k in inner.subsets().filter(|k| k.count_ones() >= 2) {
        let members = parties_of(k);
        let group: Vec<Vec<String>> = members.iter().map(|&i| parts[i].clone()).collect();
        let labels: Vec<String> = group.iter().flatten().cloned().collect();
        let reduced = s.to_density().partial_trace(&labels)?;
        let value = match esq_pure(&reduced, &group) {
            Ok(v) => v,
            Err(Error::Invariant(_)) => {
                bounded.push(k);
                esq_optimize(&reduced, &group, &a.search.options(seed))?.upper_bound
            }
            Err(e) => return Err(e),
        };
        esq.insert(k, value);
    }
    let outer = outer_constants(&inner, &esq)?;
    let desc = describe(&outer)?.with_bounded(&bounded);
    Ok(region_report(&desc, &emit, json!({"bound": "outer", "seed": seed})))
}

fn vertices(a: &RegionArgs) -> Result<Report> {
    let s = a.input.load()?;
    let (parts, reference) = senders_and_reference(&s, a)?;
    let f = inner_constants(&s, &parts, &reference)?;
    let corners = corner_points_all(&f)?;
    let brute = vertices_bruteforce(&f)?;
    let agree = corners.len() == brute.len()
        && corners.iter().zip(&brute).all(|(x, y)| x.approx_eq(y, 1e-8));
    let m = f.m();
    let mut header: Vec<String> = vec!["method".into()];
    header.extend((1..=m).map(|i| format!("q{i}")));
    let mut table = Table::new(&header);
    let mut text = String::new();
    for (method, list) in [("corner", &corners), ("bruteforce", &brute)] {
        text.push_str(&format!("{method} {}\n", list.len()));
        for v in list {
            text.push_str(&format!("  {}\n", tuple_text(v)));
            let mut row: Vec<Cell> = vec![method.into()];
            row.extend(v.0.iter().map(|&x| Cell::Num(x)));
            table.push(row);
        }
    }
    text.push_str(&format!("agree {agree}\n"));
    let as_json = |l: &[RateTuple]| l.iter().map(|v| v.0.iter().map(|&x| num(x)).collect()).collect::<Vec<Vec<Value>>>();
    Ok(Report {
        text,
        json: json!({"m": m, "corner": as_json(&corners), "bruteforce": as_json(&brute), "agree": agree}),
        table,
    })
}

fn merge_region(a: &MergeArgs) -> Result<Report> {
    let emit = parse_emit(&a.emit)?;
    let s = a.input.load()?;
    let parts = parse_parts(&s, &a.parts, &[])?;
    let f = merging_region(&s, &parts)?;
    Ok(region_report(&describe(&f)?, &emit, json!({"bound": "merging"})))
}

fn sw_region(a: &SwArgs) -> Result<Report> {
    let emit = parse_emit(&a.emit)?;
    let probs: Vec<f64> = parse_numbers(&a.probs, "probability")?;
    let shape: Vec<usize> = parse_numbers(&a.shape, "alphabet size")?;
    let joint = Distribution::joint(shape, probs)?;
    let f = classical_sw_setfunction(&joint)?;
    Ok(region_report(&describe(&f)?, &emit, json!({"bound": "slepian-wolf"})))
}

fn typical(a: &TypicalArgs) -> Result<Report> {
    let ns: Vec<usize> = parse_numbers(&a.n, "block length")?;
    let (dist, quantum) = match (&a.probs, &a.input.state) {
        (Some(p), _) => (Distribution::new(parse_numbers(p, "probability")?)?, false),
        (None, Some(_)) => {
            let s = a.input.load()?.to_density();
            (Distribution::new(s.eigenvalues()?)?, true)
        }
        (None, None) => return Err(Error::InvalidInput("give --probs or --state".into())),
    };
    let reports = ns
        .iter()
        .map(|&n| {
            if quantum {
                schumacher_rate_demo(&dist, n, a.epsilon)
            } else {
                typical_stats(&dist, n, a.epsilon)
            }
        })
        .collect::<Result<Vec<TypicalReport>>>()?;
    let mut table = Table::new(&["n", "mass", "log_count", "bound_log_count", "rate"]);
    let mut text = String::from("n mass log_count bound_log_count rate\n");
    let mut rows = Vec::new();
    for r in &reports {
        table.push(vec![r.n.into(), r.mass.into(), r.log_count.into(), r.bound_log_count.into(), r.rate().into()]);
        text.push_str(&format!(
            "{} {} {} {} {}\n",
            r.n,
            fmt9(r.mass),
            fmt9(r.log_count),
            fmt9(r.bound_log_count),
            fmt9(r.rate())
        ));
        rows.push(json!({
            "n": r.n,
            "mass": num(r.mass),
            "log_count": num(r.log_count),
            "bound_log_count": num(r.bound_log_count),
            "rate": num(r.rate()),
        }));
    }
    let entropy = reports.first().map(|r| r.entropy).unwrap_or(0.0);
    Ok(Report {
        text,
        json: json!({"epsilon": num(a.epsilon), "entropy": num(entropy), "rows": rows}),
        table,
    })
}

fn require_pure(s: QState) -> Result<PureState> {
    match s {
        QState::Pure(p) => Ok(p),
        QState::Mixed(m) if m.is_pure() => {
            let (_, vectors) = qregion_core::linalg::eigh(m.matrix());
            let top = vectors.column(vectors.ncols() - 1).into_owned();
            PureState::from_unnormalized(m.dims().to_vec(), m.labels(), top)
        }
        QState::Mixed(_) => Err(Error::InvalidInput("this command needs a pure state".into())),
    }
}

fn decouple(a: &DecoupleArgs, seed: u64) -> Result<Report> {
    let s = require_pure(a.input.load()?)?;
    let sender = parse_labels(&s, &a.sender)?;
    let reference = parse_labels(&s, &a.reference)?;
    let d_a = s.dim_of(&sender)?;
    let splits: Vec<usize> = match &a.d_a1 {
        Some(spec) => parse_numbers(spec, "dimension")?,
        None => (1..=d_a).filter(|d| d_a % d == 0).collect(),
    };
    let rows = decoupling_sweep(&s, &sender, &reference, &splits, a.samples, seed)?;
    let mut table = Table::new(&["d_A1", "mean_sq_td", "rhs_bound", "stderr"]);
    let mut text = String::from("d_A1 mean_sq_td rhs_bound stderr holds\n");
    let mut json_rows = Vec::new();
    for r in &rows {
        table.push(vec![r.d_a1.into(), r.mean_sq_td.into(), r.rhs_bound.into(), r.stderr.into()]);
        text.push_str(&format!(
            "{} {} {} {} {}\n",
            r.d_a1,
            fmt9(r.mean_sq_td),
            fmt9(r.rhs_bound),
            fmt9(r.stderr),
            r.holds
        ));
        json_rows.push(json!({
            "d_A1": r.d_a1,
            "mean_sq_td": num(r.mean_sq_td),
            "max_sq_td": num(r.max_sq_td),
            "rhs_bound": num(r.rhs_bound),
            "stderr": num(r.stderr),
            "holds": r.holds,
        }));
    }
    Ok(Report {
        text,
        json: json!({"samples": a.samples, "seed": seed, "rows": json_rows}),
        table,
    })
}

fn fqsw_rates(a: &FqswArgs, seed: u64) -> Result<Report> {
    let state = a.input.load()?;
    let reference = parse_labels(&state, &a.reference)?;
    let [reference] = reference.as_slice() else {
        return Err(Error::InvalidInput("--reference must name exactly one subsystem".into()));
    };
    let senders = match &a.senders {
        Some(spec) => parse_labels(&state, spec)?,
        None => state.labels().iter().filter(|l| *l != reference).cloned().collect(),
    };
    let order: Vec<usize> = match &a.order {
        Some(spec) => parse_numbers(spec, "position")?,
        None => (0..senders.len()).collect(),
    };
    let mut sorted = order.clone();
    sorted.sort_unstable();
    if sorted != (0..senders.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidInput(format!("--order {order:?} is not a permutation")));
    }
    if let Some(spec) = &a.qubits {
        let qubits: Vec<u32> = parse_numbers(spec, "qubit count")?;
        let pure = require_pure(state)?;
        let chain = fqsw_chain_sim(&pure, &senders, reference, &order, &qubits, a.samples, seed)?;
        let mut table = Table::new(&["step", "sender", "threshold", "qubits_sent", "above_threshold", "mean_sq_td", "stderr", "rhs_bound"]);
        let mut text = String::from("step sender threshold qubits above mean_sq_td stderr rhs_bound\n");
        for (i, st) in chain.steps.iter().enumerate() {
            table.push(vec![
                i.into(),
                st.sender.clone().into(),
                st.threshold.into(),
                (st.qubits_sent as usize).into(),
                st.above_threshold.to_string().into(),
                st.mean_sq_td.into(),
                st.stderr.into(),
                st.rhs_bound.into(),
            ]);
            text.push_str(&format!(
                "{i} {} {} {} {} {} {} {}\n",
                st.sender,
                fmt9(st.threshold),
                st.qubits_sent,
                st.above_threshold,
                fmt9(st.mean_sq_td),
                fmt9(st.stderr),
                fmt9(st.rhs_bound)
            ));
        }
        let margin = chain.separation_margin.map(num).unwrap_or(Value::Null);
        text.push_str(&format!("chained_bound {}\n", fmt9(chain.chained_bound)));
        if let Some(m) = chain.separation_margin {
            text.push_str(&format!("separation_margin {}\n", fmt9(m)));
        }
        let steps: Vec<Value> = chain
            .steps
            .iter()
            .map(|st| {
                json!({
                    "sender": st.sender,
                    "threshold": num(st.threshold),
                    "qubits_sent": st.qubits_sent,
                    "above_threshold": st.above_threshold,
                    "mean_sq_td": num(st.mean_sq_td),
                    "stderr": num(st.stderr),
                    "rhs_bound": num(st.rhs_bound),
                })
            })
            .collect();
        return Ok(Report {
            text,
            json: json!({"steps": steps, "chained_bound": num(chain.chained_bound), "separation_margin": margin, "seed": seed}),
            table,
        });
    }
    let mut table = Table::new(&["step", "sender", "min_rate"]);
    let mut text = String::from("step sender min_rate\n");
    let mut steps = Vec::new();
    for (i, &k) in order.iter().enumerate() {
        let later: Vec<&str> = order[i + 1..].iter().map(|&j| senders[j].as_str()).collect();
        let rate = fqsw_min_rate(&state, &senders[k], &later, reference)?;
        table.push(vec![i.into(), senders[k].clone().into(), rate.into()]);
        text.push_str(&format!("{i} {} {}\n", senders[k], fmt9(rate)));
        steps.push(json!({"sender": senders[k], "min_rate": num(rate)}));
    }
    Ok(Report {
        text,
        json: json!({"steps": steps}),
        table,
    })
}

fn expr_json(e: &ResourceExpr) -> Value {
    Value::Object(e.0.iter().map(|(t, w)| (t.to_string(), num(*w))).collect())
}

fn inequality_report(ineq: &ResourceInequality, extra: Value) -> Report {
    let mut table = Table::new(&["side", "token", "weight"]);
    for (side, e) in [("lhs", &ineq.lhs), ("rhs", &ineq.rhs)] {
        for (t, w) in &e.0 {
            table.push(vec![side.into(), t.to_string().into(), (*w).into()]);
        }
    }
    let mut obj = Map::new();
    obj.insert("name".into(), Value::String(ineq.name.clone()));
    obj.insert("lhs".into(), expr_json(&ineq.lhs));
    obj.insert("rhs".into(), expr_json(&ineq.rhs));
    obj.insert("note".into(), ineq.note.clone().map(Value::String).unwrap_or(Value::Null));
    obj.insert("text".into(), Value::String(ineq.to_string()));
    if let Value::Object(more) = extra {
        obj.extend(more);
    }
    Report {
        text: format!("{ineq}\n"),
        json: Value::Object(obj),
        table,
    }
}

fn rescalc(a: &RescalcArgs) -> Result<Report> {
    let state = match &a.input.state {
        Some(_) => Some(a.input.load()?.to_density()),
        None => None,
    };
    if let Some(d) = a.derive {
        let s = state.ok_or_else(|| Error::InvalidInput("--derive needs --state".into()))?;
        let (ineq, identity) = match d {
            Derivation::Hashing => (hashing_derivation(&s)?, Identity::HashingCoeff),
            Derivation::Merging => (merging_derivation(&s)?, Identity::MergingCoeff),
        };
        let check = verify_identity(&s, identity)?;
        let mut report = inequality_report(
            &ineq,
            json!({"identity": {
                "derived": num(check.derived),
                "expected": num(check.expected),
                "difference": num(check.difference),
                "holds": check.holds,
            }}),
        );
        report.text.push_str(&format!(
            "coefficient {} expected {} holds {}\n",
            fmt9(check.derived),
            fmt9(check.expected),
            check.holds
        ));
        return Ok(report);
    }
    let name = a
        .builtin
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("give --builtin or --derive".into()))?;
    let mut ineq = builtin(Builtin::from_name(name)?, state.as_ref())?;
    if let Some(c) = a.scale {
        ineq = scale(&ineq, c)?;
    }
    Ok(inequality_report(&ineq, Value::Null))
}

fn blackhole(a: &BlackholeArgs) -> Result<Report> {
    let s = a.input.load()?;
    let subset = parse_labels(&s, &a.subset)?;
    let mode = match a.mode {
        HoleMode::Simple => BlackHoleMode::Simple,
        HoleMode::Lost => {
            let need = |o: &Option<String>, flag: &str| {
                o.as_deref()
                    .ok_or_else(|| Error::InvalidInput(format!("lost mode needs --{flag}")))
                    .and_then(|spec| parse_labels(&s, spec))
            };
            BlackHoleMode::Lost {
                b2: need(&a.b2, "b2")?,
                l: need(&a.lost, "lost")?,
            }
        }
    };
    let v = blackhole_threshold(&s, &subset, &mode)?;
    let mode_name = match a.mode {
        HoleMode::Simple => "simple",
        HoleMode::Lost => "lost",
    };
    Ok(scalar("log d_R threshold", v, json!({"subset": subset, "mode": mode_name})))
}
