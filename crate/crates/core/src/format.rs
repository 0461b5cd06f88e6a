//! JSON documents for instances, partial matrices, completions and reports.
//! Indices in every document are 1-based.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::completion::{CompletedMatrix, NotCompletable, PartialMatrix};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::pipeline::SolveReport;
use crate::value::ExtValue;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    r: usize,
    domains: Vec<usize>,
    unary: Vec<Vec<Value>>,
    #[serde(default)]
    binary: Vec<BinaryDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BinaryDoc {
    i: usize,
    j: usize,
    table: Vec<Vec<Value>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    n: usize,
    entries: Vec<EntryDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    i: usize,
    j: usize,
    value: Value,
}

/// Integers as JSON numbers, other rationals as `"p/q"`, `+inf` as `"inf"`.
pub fn value_to_json(v: &ExtValue) -> Value {
    match v.as_finite() {
        Some(r) if r.is_integer() => match u64::try_from(r.numer()) {
            Ok(n) => Value::from(n),
            Err(_) => Value::String(v.to_string()),
        },
        _ => Value::String(v.to_string()),
    }
}

pub fn value_from_json(v: &Value) -> Result<ExtValue> {
    match v {
        Value::Number(n) => match n.as_u64() {
            Some(n) => Ok(ExtValue::from_integer(n)),
            None if n.as_i64().is_some() => Err(Error::Validation(format!("negative value {n}"))),
            None => Err(Error::Parse(format!("{n} is not an integer; write rationals as \"p/q\""))),
        },
        Value::String(s) => s.parse(),
        other => Err(Error::Parse(format!("expected a value, found {other}"))),
    }
}

fn row_from_json(row: &[Value]) -> Result<Vec<ExtValue>> {
    row.iter().map(value_from_json).collect()
}

fn one_based(k: usize, bound: usize, what: &str) -> Result<usize> {
    if k == 0 || k > bound {
        Err(Error::Validation(format!("{what} index {k} out of range 1..={bound}")))
    } else {
        Ok(k - 1)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    if doc.r != doc.domains.len() {
        return Err(Error::DimensionMismatch(format!(
            "r = {} but {} domains are listed",
            doc.r,
            doc.domains.len()
        )));
    }
    let unary = doc.unary.iter().map(|row| row_from_json(row)).collect::<Result<_>>()?;
    let mut inst = Instance::new(doc.domains, unary)?;
    let mut seen = std::collections::HashSet::new();
    for b in &doc.binary {
        if b.i >= b.j {
            return Err(Error::Validation(format!(
                "binary pair ({}, {}) must be given with i < j",
                b.i, b.j
            )));
        }
        let i = one_based(b.i, doc.r, "variable")?;
        let j = one_based(b.j, doc.r, "variable")?;
        if !seen.insert((i, j)) {
            return Err(Error::Validation(format!("binary pair ({}, {}) given twice", b.i, b.j)));
        }
        let table = b.table.iter().map(|row| row_from_json(row)).collect::<Result<_>>()?;
        inst.set_binary(i, j, table)?;
    }
    Ok(inst)
}

/// Lists only the binary tables that are stored.
pub fn instance_to_json(inst: &Instance) -> String {
    let r = inst.vars();
    let d = inst.domains();
    let unary: Vec<Vec<Value>> = (0..r).map(|i| inst.unary_row(i).iter().map(value_to_json).collect()).collect();
    let mut binary = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            if !inst.has_binary(i, j) {
                continue;
            }
            let table: Vec<Vec<Value>> = (0..d[i])
                .map(|a| (0..d[j]).map(|b| value_to_json(inst.binary(i, a, j, b))).collect())
                .collect();
            binary.push(json!({ "i": i + 1, "j": j + 1, "table": table }));
        }
    }
    let doc = json!({ "r": r, "domains": d, "unary": unary, "binary": binary });
    pretty(&doc)
}

/// Entries may be listed in either orientation, each unordered pair at most once.
pub fn parse_partial_matrix(text: &str) -> Result<PartialMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text)?;
    let entries = doc
        .entries
        .iter()
        .map(|e| {
            let i = one_based(e.i, doc.n, "row")?;
            let j = one_based(e.j, doc.n, "column")?;
            Ok((i, j, value_from_json(&e.value)?))
        })
        .collect::<Result<Vec<_>>>()?;
    PartialMatrix::from_entries(doc.n, entries)
}

pub fn partial_matrix_to_json(h: &PartialMatrix) -> String {
    let n = h.n();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(v) = h.get(i, j) {
                entries.push(json!({ "i": i + 1, "j": j + 1, "value": value_to_json(v) }));
            }
        }
    }
    pretty(&json!({ "n": n, "entries": entries }))
}

pub fn completion_to_json(m: &CompletedMatrix) -> String {
    let n = m.n();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            entries.push(json!({ "i": i + 1, "j": j + 1, "value": value_to_json(m.get(i, j)) }));
        }
    }
    pretty(&json!({ "completable": true, "n": n, "entries": entries }))
}

pub fn certificate_to_json(c: &NotCompletable) -> String {
    let doc = match c {
        NotCompletable::Triple { i, j, k, values } => json!({
            "completable": false,
            "triple": [i + 1, j + 1, k + 1],
            "values": values.iter().map(value_to_json).collect::<Vec<_>>(),
            "reason": c.to_string(),
        }),
        NotCompletable::Cycle(cycle) => json!({
            "completable": false,
            "cycle": cycle.vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
            "weights": cycle.weights.iter().map(value_to_json).collect::<Vec<_>>(),
            "reason": c.to_string(),
        }),
    };
    pretty(&doc)
}

pub fn report_to_json(report: &SolveReport, timings: bool) -> String {
    let mut doc = json!({
        "status": report.status.as_str(),
        "assignment": report.assignment.as_ref().map(|a| a.to_one_based()),
        "value": value_to_json(&report.value),
        "iterations": report.iterations,
        "violation": report.violation.as_ref().map(|v| v.to_string()),
    });
    if timings {
        let t = &report.timings;
        doc["timings_us"] = json!({
            "validation": t.validation.as_micros() as u64,
            "completion": t.completion.as_micros() as u64,
            "greedy": t.greedy.as_micros() as u64,
            "intersection": t.intersection.as_micros() as u64,
        });
    }
    pretty(&doc)
}

fn pretty(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}
