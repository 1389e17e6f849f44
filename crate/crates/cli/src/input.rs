use std::io::Read;
use std::path::PathBuf;

use serde_json::Value;
use slm_core::json::{arrangement_from_json, floats_from_json, matrix_from_json, rationals_from_json};
use slm_core::model::SquaredLinearModel;
use slm_core::{QMatrix, Rational};

use crate::{CliError, CliResult};

pub fn read_document(path: Option<&PathBuf>) -> CliResult<Value> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| CliError::Invalid { kind: "Io", message: format!("{}: {e}", p.display()) })?,
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Invalid { kind: "Io", message: e.to_string() })?;
            s
        }
    };
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Invalid { kind: "Parse", message: e.to_string() })?;
    if !doc.is_object() {
        return Err(CliError::invalid("input must be a JSON object"));
    }
    Ok(doc)
}

/// The model in field `"A"`, validated.
pub fn model(doc: &Value) -> CliResult<SquaredLinearModel> {
    Ok(SquaredLinearModel::new(arrangement_from_json(doc)?)?)
}

fn field<'a>(doc: &'a Value, key: &str) -> CliResult<&'a Value> {
    doc.get(key)
        .filter(|v| !v.is_null())
        .ok_or_else(|| CliError::invalid(format!("missing field \"{key}\"")))
}

pub fn has(doc: &Value, key: &str) -> bool {
    doc.get(key).is_some_and(|v| !v.is_null())
}

pub fn rationals(doc: &Value, key: &str, len: usize) -> CliResult<Vec<Rational>> {
    let v = rationals_from_json(field(doc, key)?)?;
    check_len(key, v.len(), len)?;
    Ok(v)
}

pub fn floats(doc: &Value, key: &str, len: usize) -> CliResult<Vec<f64>> {
    let v = floats_from_json(field(doc, key)?)?;
    check_len(key, v.len(), len)?;
    Ok(v)
}

pub fn matrix(doc: &Value, key: &str) -> CliResult<QMatrix> {
    let rows = matrix_from_json(field(doc, key)?)?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(CliError::invalid(format!("\"{key}\" must be a nonempty rectangular matrix")));
    }
    Ok(QMatrix::from_rows(rows))
}

pub fn count(doc: &Value, key: &str) -> CliResult<usize> {
    field(doc, key)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| CliError::invalid(format!("\"{key}\" must be a nonnegative integer")))
}

/// `"segment": [a, b]` as two float vectors of length `len`.
pub fn segment(doc: &Value, len: usize) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let seg = field(doc, "segment")?
        .as_array()
        .filter(|s| s.len() == 2)
        .ok_or_else(|| CliError::invalid("\"segment\" must be a pair of points"))?;
    let a = floats_from_json(&seg[0])?;
    let b = floats_from_json(&seg[1])?;
    check_len("segment", a.len(), len)?;
    check_len("segment", b.len(), len)?;
    Ok((a, b))
}

/// Model point `y` from `"y"` directly or from `"x"` as `Ax`.
pub fn model_point(doc: &Value, model: &SquaredLinearModel) -> CliResult<Vec<Rational>> {
    if has(doc, "y") {
        rationals(doc, "y", model.n())
    } else if has(doc, "x") {
        let x = rationals(doc, "x", model.d())?;
        Ok(model.arrangement().values(&x))
    } else {
        Err(CliError::invalid("missing field \"x\" or \"y\""))
    }
}

fn check_len(key: &str, got: usize, want: usize) -> CliResult<()> {
    if got != want {
        return Err(CliError::invalid(format!("\"{key}\" has length {got}, expected {want}")));
    }
    Ok(())
}
