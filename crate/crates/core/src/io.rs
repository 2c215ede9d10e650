//! JSON encodings for pairs, matrices, reports and search streams.
//!
//! Numbers are written as decimal strings (`"n"` or `"n/d"`) so that values
//! of any size survive a round trip; readers also accept plain JSON integers.

use serde::Serializer;
use serde_json::{json, Value};

use crate::arith::{format_ratio, parse_ratio, Ratio};
use crate::construct::{SolutionPair, VerifyReport};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix3;
use crate::search::SearchConfig;

pub const SCHEMA: u64 = 1;

pub fn ser_opt_ratio<S: Serializer>(q: &Option<Ratio>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format_ratio(q)),
        None => s.serialize_none(),
    }
}

fn ratio_strings(xs: &[Ratio]) -> Vec<String> {
    xs.iter().map(format_ratio).collect()
}

fn parse_number(v: &Value, what: &str) -> Result<Ratio> {
    match v {
        Value::String(s) => parse_ratio(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_ratio(&n.to_string()),
        _ => Err(Error::Parse(format!("{what}: expected a decimal string or integer, found {v}"))),
    }
}

fn parse_list(v: Option<&Value>, key: &str) -> Result<Vec<Ratio>> {
    match v {
        Some(Value::Array(items)) => items.iter().map(|x| parse_number(x, key)).collect(),
        Some(other) => Err(Error::Parse(format!("`{key}` must be an array, found {other}"))),
        None => Err(Error::Parse(format!("missing `{key}` array"))),
    }
}

fn check_schema(doc: &Value) -> Result<()> {
    match doc.get("schema") {
        None => Ok(()),
        Some(v) if v.as_u64() == Some(SCHEMA) => Ok(()),
        Some(v) => Err(Error::Parse(format!("unsupported schema {v}, expected {SCHEMA}"))),
    }
}

pub fn pair_to_json(p: &SolutionPair) -> Value {
    let (m, n) = p.shape();
    json!({
        "schema": SCHEMA,
        "m": m,
        "n": n,
        "a": ratio_strings(&p.a),
        "b": ratio_strings(&p.b),
        "canonical": p.is_canonical(),
    })
}

pub fn pair_from_value(doc: &Value) -> Result<SolutionPair> {
    check_schema(doc)?;
    let pair = SolutionPair { a: parse_list(doc.get("a"), "a")?, b: parse_list(doc.get("b"), "b")? };
    let (m, n) = pair.shape();
    for (key, len) in [("m", m), ("n", n)] {
        if let Some(v) = doc.get(key) {
            if v.as_u64() != Some(len as u64) {
                return Err(Error::Parse(format!("`{key}` is {v} but the list has {len} elements")));
            }
        }
    }
    Ok(pair)
}

pub fn parse_pair(text: &str) -> Result<SolutionPair> {
    pair_from_value(&serde_json::from_str(text)?)
}

pub fn matrix_to_json(m: &SquareMatrix3) -> Value {
    Value::Array(m.entries.iter().map(|row| json!(ratio_strings(row))).collect())
}

/// A bare 3×3 array, or an object holding one under `entries`.
pub fn matrix_from_value(doc: &Value) -> Result<SquareMatrix3> {
    let rows = match doc {
        Value::Object(_) => {
            check_schema(doc)?;
            doc.get("entries").ok_or_else(|| Error::Parse("missing `entries`".into()))?
        }
        other => other,
    };
    let rows = rows.as_array().filter(|r| r.len() == 3).ok_or_else(|| Error::Parse("matrix must have 3 rows".into()))?;
    let mut out: Vec<[Ratio; 3]> = Vec::with_capacity(3);
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .filter(|c| c.len() == 3)
            .ok_or_else(|| Error::Parse(format!("row {} must have 3 entries", i + 1)))?;
        let parsed: Vec<Ratio> = cells.iter().map(|c| parse_number(c, "matrix entry")).collect::<Result<_>>()?;
        out.push(parsed.try_into().expect("three cells"));
    }
    Ok(SquareMatrix3::new(out.try_into().expect("three rows")))
}

pub fn parse_matrix(text: &str) -> Result<SquareMatrix3> {
    matrix_from_value(&serde_json::from_str(text)?)
}

pub fn verify_report_to_json(p: &SolutionPair, r: &VerifyReport) -> Value {
    let (m, n) = p.shape();
    let failures: Vec<Value> = r
        .failures
        .iter()
        .map(|(i, j, s)| json!({"i": i, "j": j, "sum": format_ratio(s)}))
        .collect();
    json!({
        "schema": SCHEMA,
        "ok": r.ok,
        "squares": m * n - r.failures.len(),
        "sums": m * n,
        "failures": failures,
        "duplicate_a": r.duplicate_a,
        "duplicate_b": r.duplicate_b,
    })
}

pub fn search_header(cfg: &SearchConfig) -> String {
    json!({"record": "header", "schema": SCHEMA, "config": cfg}).to_string()
}

pub fn search_solution(p: &SolutionPair) -> String {
    let mut v = pair_to_json(p);
    v["record"] = json!("solution");
    v.to_string()
}

pub fn search_footer(count: usize, elapsed_ms: u128) -> String {
    json!({"record": "footer", "schema": SCHEMA, "count": count, "elapsed_ms": elapsed_ms as u64}).to_string()
}
