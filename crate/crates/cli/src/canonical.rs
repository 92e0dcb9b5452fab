//! Canonical JSON: keys sorted, reals rounded to 12 significant digits,
//! arrays in index order, two-space indentation, trailing newline.
//!
//! NaN and infinities are rejected rather than written as `null`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_value::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CanonicalError {
    #[error("non-finite number {value} at `{path}`")]
    NonFinite { path: String, value: f64 },
    #[error("unsupported map key at `{0}`")]
    Key(String),
    #[error("{0}")]
    Serialize(String),
}

pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CanonicalError> {
    let tree = serde_value::to_value(value).map_err(|e| CanonicalError::Serialize(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &tree, 0, &mut Vec::new())?;
    out.push('\n');
    Ok(out)
}

/// `x` rounded to 12 significant digits, in Rust's shortest round-trip form.
pub fn format_real(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some("0.0".into());
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    Some(format!("{rounded:?}"))
}

fn path_string(path: &[String]) -> String {
    if path.is_empty() {
        "$".into()
    } else {
        path.join(".")
    }
}

fn key_string(key: &Value, path: &[String]) -> Result<String, CanonicalError> {
    Ok(match key {
        Value::String(s) => s.clone(),
        Value::Char(c) => c.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::U8(x) => x.to_string(),
        Value::U16(x) => x.to_string(),
        Value::U32(x) => x.to_string(),
        Value::U64(x) => x.to_string(),
        Value::I8(x) => x.to_string(),
        Value::I16(x) => x.to_string(),
        Value::I32(x) => x.to_string(),
        Value::I64(x) => x.to_string(),
        Value::Newtype(inner) => key_string(inner, path)?,
        _ => return Err(CanonicalError::Key(path_string(path))),
    })
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_real(out: &mut String, x: f64, path: &[String]) -> Result<(), CanonicalError> {
    match format_real(x) {
        Some(s) => {
            out.push_str(&s);
            Ok(())
        }
        None => Err(CanonicalError::NonFinite {
            path: path_string(path),
            value: x,
        }),
    }
}

fn write_value(out: &mut String, v: &Value, level: usize, path: &mut Vec<String>) -> Result<(), CanonicalError> {
    match v {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::U8(x) => out.push_str(&x.to_string()),
        Value::U16(x) => out.push_str(&x.to_string()),
        Value::U32(x) => out.push_str(&x.to_string()),
        Value::U64(x) => out.push_str(&x.to_string()),
        Value::I8(x) => out.push_str(&x.to_string()),
        Value::I16(x) => out.push_str(&x.to_string()),
        Value::I32(x) => out.push_str(&x.to_string()),
        Value::I64(x) => out.push_str(&x.to_string()),
        Value::F32(x) => write_real(out, f64::from(*x), path)?,
        Value::F64(x) => write_real(out, *x, path)?,
        Value::Char(c) => out.push_str(&serde_json::to_string(&c.to_string()).expect("string encodes")),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
        Value::Unit | Value::Option(None) => out.push_str("null"),
        Value::Option(Some(inner)) | Value::Newtype(inner) => write_value(out, inner, level, path)?,
        Value::Bytes(bytes) => {
            let seq: Vec<Value> = bytes.iter().map(|&b| Value::U8(b)).collect();
            write_value(out, &Value::Seq(seq), level, path)?;
        }
        Value::Seq(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return Ok(());
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, level + 1);
                path.push(i.to_string());
                write_value(out, item, level + 1, path)?;
                path.pop();
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Map(map) => {
            let mut sorted: BTreeMap<String, &Value> = BTreeMap::new();
            for (k, val) in map {
                sorted.insert(key_string(k, path)?, val);
            }
            if sorted.is_empty() {
                out.push_str("{}");
                return Ok(());
            }
            out.push_str("{\n");
            let len = sorted.len();
            for (i, (k, val)) in sorted.into_iter().enumerate() {
                indent(out, level + 1);
                let _ = write!(out, "{}: ", serde_json::to_string(&k).expect("string encodes"));
                path.push(k);
                write_value(out, val, level + 1, path)?;
                path.pop();
                out.push_str(if i + 1 < len { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        zeta: f64,
        alpha: Vec<u32>,
        name: &'static str,
        missing: Option<u8>,
    }

    #[test]
    fn keys_sorted_and_reals_rounded() {
        let s = Sample {
            zeta: 0.1 + 0.2,
            alpha: vec![3, 1],
            name: "x\"y",
            missing: None,
        };
        let out = to_canonical_json(&s).unwrap();
        assert_eq!(
            out,
            "{\n  \"alpha\": [\n    3,\n    1\n  ],\n  \"missing\": null,\n  \"name\": \"x\\\"y\",\n  \"zeta\": 0.3\n}\n"
        );
        let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(parsed["zeta"], 0.3);
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(2.302775637731995).unwrap(), "2.30277563773");
        assert_eq!(format_real(-0.0).unwrap(), "0.0");
        assert_eq!(format_real(1e-7).unwrap(), "1e-7");
        assert_eq!(format_real(2.0).unwrap(), "2.0");
        assert_eq!(format_real(f64::INFINITY), None);
    }

    #[test]
    fn nan_is_an_error_with_its_path() {
        #[derive(Serialize)]
        struct Outer {
            inner: Vec<f64>,
        }
        let err = to_canonical_json(&Outer {
            inner: vec![1.0, f64::NAN],
        })
        .unwrap_err();
        assert!(matches!(err, CanonicalError::NonFinite { ref path, .. } if path == "inner.1"));
    }
}
