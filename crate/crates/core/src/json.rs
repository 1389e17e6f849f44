//! JSON conventions: rationals as `"p/q"` strings, floats as shortest
//! round-trip decimals, every document tagged with [`SCHEMA`].

use serde::Serializer;
use serde_json::{json, Value};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rational_from_f64};
use crate::{QMatrix, Rational};

pub const SCHEMA: &str = "slm/1";

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub fn ser_rationals<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

pub fn rationals_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|q| Value::String(format_rational(q))).collect())
}

pub fn matrix_to_json(m: &QMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| rationals_to_json(m.row(i))).collect())
}

/// Accepts `"p/q"` strings, integer or decimal strings, and JSON numbers.
/// Numbers are read from their literal text, so `0.1` means `1/10`.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| Error::InvalidInput(format!("not a rational: {s:?}"))),
        Value::Number(n) => parse_rational(&n.to_string())
            .or_else(|| n.as_f64().and_then(rational_from_f64))
            .ok_or_else(|| Error::InvalidInput(format!("not a finite number: {n}"))),
        other => Err(Error::InvalidInput(format!("expected a number or \"p/q\" string, got {other}"))),
    }
}

pub fn rationals_from_json(v: &Value) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput(format!("expected an array, got {v}")))?
        .iter()
        .map(rational_from_json)
        .collect()
}

pub fn matrix_from_json(v: &Value) -> Result<Vec<Vec<Rational>>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput("expected an array of rows".into()))?
        .iter()
        .map(rationals_from_json)
        .collect()
}

pub fn floats_from_json(v: &Value) -> Result<Vec<f64>> {
    rationals_from_json(v).map(|q| q.iter().map(crate::scalar::rational_to_f64).collect())
}

/// `{"A": [[…]], "labels": […]?}`.
pub fn arrangement_from_json(v: &Value) -> Result<Arrangement> {
    let a = v.get("A").ok_or_else(|| Error::InvalidInput("missing field \"A\"".into()))?;
    let arr = Arrangement::from_rows(matrix_from_json(a)?)?;
    match v.get("labels") {
        None | Some(Value::Null) => Ok(arr),
        Some(Value::Array(l)) => {
            let labels = l
                .iter()
                .map(|x| x.as_str().map(str::to_owned))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::InvalidInput("labels must be strings".into()))?;
            arr.with_labels(labels)
        }
        Some(other) => Err(Error::InvalidInput(format!("labels must be an array, got {other}"))),
    }
}

pub fn arrangement_to_json(arr: &Arrangement) -> Value {
    let mut v = json!({ "A": matrix_to_json(arr.matrix()) });
    if let Some(l) = arr.labels() {
        v["labels"] = json!(l);
    }
    v
}
