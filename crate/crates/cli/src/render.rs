//! Output formatting. JSON and CSV are exact; the human format adds decimal
//! approximations next to every fraction.

use std::fmt::Write as _;

use kannan_core::Scalar;
use serde_json::Value;

/// Longest array printed in full by the human format.
const HUMAN_ARRAY_LIMIT: usize = 12;

pub fn json_document(config: &Value, result: &Value) -> String {
    let doc = serde_json::json!({ "config": config, "result": result });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

pub fn csv_document(config: &Value, body: &str) -> String {
    format!("# config {}\n{body}", config)
}

pub fn human_document(config: &Value, result: &Value) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "config {config}");
    walk(&mut out, "", result);
    out
}

/// `p/q` followed by a six-digit decimal, or the plain text for non-fractions.
pub fn annotate(text: &str) -> String {
    if !text.contains('/') {
        return text.to_string();
    }
    match text.parse::<Scalar>() {
        Ok(v) => format!("{text}  (~{} approx.)", approx(v.to_f64())),
        Err(_) => text.to_string(),
    }
}

fn approx(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{x:.6}")
    } else {
        format!("{x:.5e}")
    }
}

fn walk(out: &mut String, path: &str, v: &Value) {
    let child = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                walk(out, &child(k), x);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                let _ = writeln!(out, "{path}: []");
            }
            for (i, x) in items.iter().take(HUMAN_ARRAY_LIMIT).enumerate() {
                walk(out, &format!("{path}[{i}]"), x);
            }
            if items.len() > HUMAN_ARRAY_LIMIT {
                let _ = writeln!(out, "{path}: ... {} more", items.len() - HUMAN_ARRAY_LIMIT);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{path}: {}", annotate(s));
        }
        other => {
            let _ = writeln!(out, "{path}: {other}");
        }
    }
}
